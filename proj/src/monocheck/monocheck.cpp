//  Copyright 2026 The calmlab Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#include "calm/monocheck/monocheck.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "calm/lang/parser.hpp"

namespace calm::monocheck {

using lang::TermKind;

const char* reason_name(Reason r) {
  switch (r) {
    case Reason::Negation: return "negation";
    case Reason::Aggregation: return "aggregation";
    case Reason::MembershipQuery: return "membership-query";
  }
  return "?";
}

const char* edge_label_name(EdgeLabel l) {
  switch (l) {
    case EdgeLabel::Positive: return "positive";
    case EdgeLabel::Negative: return "negative";
    case EdgeLabel::Aggregate: return "aggregate";
  }
  return "?";
}

std::string MonotonicityClass::str() const {
  if (monotone()) return "monotone";
  std::string s = "non-monotone{";
  bool first = true;
  for (Reason r : reasons) {
    if (!first) s += ",";
    s += reason_name(r);
    first = false;
  }
  return s + "}";
}

namespace {

bool has_aggregate(const lang::Rule& r) {
  return std::any_of(r.head.args.begin(), r.head.args.end(),
                     [](const lang::Term& t) { return t.kind == TermKind::Aggregate; });
}

}  // namespace

MonotonicityClass classify_rule(const lang::Rule& r) {
  MonotonicityClass c;
  if (has_aggregate(r)) c.reasons.insert(Reason::Aggregation);
  for (const auto& el : r.body) {
    const auto* lit = std::get_if<lang::Literal>(&el);
    if (lit == nullptr) continue;
    if (lit->negated) c.reasons.insert(Reason::Negation);
    if (lit->atom.relation == lang::kAllRelation) c.reasons.insert(Reason::MembershipQuery);
  }
  return c;
}

std::vector<DependencyEdge> dependency_graph(const lang::ValidatedProgram& p) {
  std::set<DependencyEdge> edges;
  for (const auto& rule : p.rules()) {
    bool agg = rule.has_aggregate;
    for (const auto& el : rule.source.body) {
      const auto* lit = std::get_if<lang::Literal>(&el);
      if (lit == nullptr) continue;
      DependencyEdge e;
      e.from = lit->atom.relation;
      e.to = rule.source.head.relation;
      e.label = lit->negated ? EdgeLabel::Negative : agg ? EdgeLabel::Aggregate : EdgeLabel::Positive;
      e.async = rule.channel_head;
      edges.insert(e);
    }
  }
  return {edges.begin(), edges.end()};
}

Stratification stratify(const lang::ValidatedProgram& p) {
  std::vector<std::string> names;
  std::map<std::string, int> index;
  for (const auto& [sym, info] : p.relations()) {
    index[sym.name()] = static_cast<int>(names.size());
    names.push_back(sym.name());
  }
  const int n = static_cast<int>(names.size());
  struct Arc {
    int to;
    bool strict;
  };
  std::vector<std::vector<Arc>> adj(static_cast<std::size_t>(n));
  for (const auto& e : dependency_graph(p)) {
    if (e.async) continue;
    adj[static_cast<std::size_t>(index.at(e.from))].push_back({index.at(e.to), e.label != EdgeLabel::Positive});
  }

  // Tarjan's strongly connected components.
  std::vector<int> comp(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n)),
      order(static_cast<std::size_t>(n), -1);
  std::vector<int> stack;
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  int counter = 0, ncomp = 0;
  std::function<void(int)> strong = [&](int v) {
    auto uv = static_cast<std::size_t>(v);
    order[uv] = low[uv] = counter++;
    stack.push_back(v);
    on_stack[uv] = true;
    for (const Arc& a : adj[uv]) {
      auto uw = static_cast<std::size_t>(a.to);
      if (order[uw] < 0) {
        strong(a.to);
        low[uv] = std::min(low[uv], low[uw]);
      } else if (on_stack[uw]) {
        low[uv] = std::min(low[uv], order[uw]);
      }
    }
    if (low[uv] == order[uv]) {
      while (true) {
        int w = stack.back();
        stack.pop_back();
        on_stack[static_cast<std::size_t>(w)] = false;
        comp[static_cast<std::size_t>(w)] = ncomp;
        if (w == v) break;
      }
      ++ncomp;
    }
  };
  for (int v = 0; v < n; ++v) {
    if (order[static_cast<std::size_t>(v)] < 0) strong(v);
  }

  for (int v = 0; v < n; ++v) {
    for (const Arc& a : adj[static_cast<std::size_t>(v)]) {
      if (!a.strict || comp[static_cast<std::size_t>(v)] != comp[static_cast<std::size_t>(a.to)]) continue;
      // Shortest path back from the head to the body relation inside the component.
      std::vector<int> parent(static_cast<std::size_t>(n), -2);
      std::deque<int> queue = {a.to};
      parent[static_cast<std::size_t>(a.to)] = -1;
      while (!queue.empty() && parent[static_cast<std::size_t>(v)] == -2) {
        int x = queue.front();
        queue.pop_front();
        for (const Arc& b : adj[static_cast<std::size_t>(x)]) {
          auto ub = static_cast<std::size_t>(b.to);
          if (parent[ub] != -2 || comp[ub] != comp[static_cast<std::size_t>(v)]) continue;
          parent[ub] = x;
          queue.push_back(b.to);
        }
      }
      std::vector<std::string> back;
      if (v == a.to) {
        back.push_back(names[static_cast<std::size_t>(v)]);
      } else {
        for (int x = v; x != -1; x = parent[static_cast<std::size_t>(x)]) back.push_back(names[static_cast<std::size_t>(x)]);
        std::reverse(back.begin(), back.end());
      }
      std::vector<std::string> cycle = {names[static_cast<std::size_t>(v)]};
      cycle.insert(cycle.end(), back.begin(), back.end());
      throw UnstratifiableError(cycle);
    }
  }

  // Longest path with strict arcs weighing 1; terminates because every cycle
  // has weight 0.
  std::vector<int> level(static_cast<std::size_t>(n), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < n; ++v) {
      for (const Arc& a : adj[static_cast<std::size_t>(v)]) {
        int want = level[static_cast<std::size_t>(v)] + (a.strict ? 1 : 0);
        if (level[static_cast<std::size_t>(a.to)] < want) {
          level[static_cast<std::size_t>(a.to)] = want;
          changed = true;
        }
      }
    }
  }

  Stratification s;
  for (const auto& [sym, info] : p.relations()) {
    int l = level[static_cast<std::size_t>(index.at(sym.name()))];
    s.level[sym] = l;
    if (info.reserved) continue;
    if (s.layers.size() <= static_cast<std::size_t>(l)) s.layers.resize(static_cast<std::size_t>(l) + 1);
    s.layers[static_cast<std::size_t>(l)].push_back(sym.name());
  }
  return s;
}

AnalysisReport analyze_program(const lang::ValidatedProgram& p) {
  AnalysisReport r;
  for (const auto& rule : p.rules()) {
    RuleReport rr;
    rr.index = rule.index;
    rr.text = lang::print_rule(rule.source);
    rr.loc = rule.source.loc;
    rr.cls = classify_rule(rule.source);
    if (!rr.cls.monotone()) r.monotone = false;
    if (rule.reads_all) r.uses_all = true;
    if (rule.reads_id) r.uses_id = true;
    for (const auto& t : rule.source.head.args) {
      if (t.kind == TermKind::Aggregate) {
        r.coordination_points.push_back({rule.index, t.loc, Reason::Aggregation, lang::print_term(t)});
      }
    }
    for (const auto& el : rule.source.body) {
      const auto* lit = std::get_if<lang::Literal>(&el);
      if (lit == nullptr) continue;
      if (lit->negated) {
        r.coordination_points.push_back({rule.index, lit->atom.loc, Reason::Negation, "!" + lang::print_atom(lit->atom)});
      }
      if (lit->atom.relation == lang::kAllRelation) {
        r.coordination_points.push_back(
            {rule.index, lit->atom.loc, Reason::MembershipQuery, (lit->negated ? "!" : "") + lang::print_atom(lit->atom)});
      }
    }
    r.rules.push_back(std::move(rr));
  }
  r.edges = dependency_graph(p);
  try {
    r.strata = stratify(p).layers;
  } catch (const UnstratifiableError& e) {
    r.stratifiable = false;
    r.unstratifiable_cycle = e.cycle();
  }
  return r;
}

namespace {

nlohmann::json loc_json(SourceLoc l) { return {{"line", l.line}, {"column", l.column}}; }

}  // namespace

nlohmann::json report_to_json(const AnalysisReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["verdict"] = r.monotone ? "monotone" : "non-monotone";
  j["monotone"] = r.monotone;
  j["uses_all"] = r.uses_all;
  j["uses_id"] = r.uses_id;
  j["stratifiable"] = r.stratifiable;
  j["strata"] = r.strata;
  if (!r.stratifiable) j["unstratifiable_cycle"] = r.unstratifiable_cycle;
  j["rules"] = nlohmann::json::array();
  for (const auto& rr : r.rules) {
    nlohmann::json reasons = nlohmann::json::array();
    for (Reason x : rr.cls.reasons) reasons.push_back(reason_name(x));
    j["rules"].push_back({{"index", rr.index},
                          {"rule", rr.text},
                          {"loc", loc_json(rr.loc)},
                          {"class", rr.cls.monotone() ? "monotone" : "non-monotone"},
                          {"reasons", reasons}});
  }
  j["dependencies"] = nlohmann::json::array();
  for (const auto& e : r.edges) {
    j["dependencies"].push_back(
        {{"from", e.from}, {"to", e.to}, {"label", edge_label_name(e.label)}, {"async", e.async}});
  }
  j["coordination_points"] = nlohmann::json::array();
  for (const auto& c : r.coordination_points) {
    j["coordination_points"].push_back({{"rule", c.rule},
                                        {"loc", loc_json(c.loc)},
                                        {"reason", reason_name(c.reason)},
                                        {"construct", c.construct}});
  }
  return j;
}

std::string report_to_text(const AnalysisReport& r) {
  std::ostringstream out;
  out << "verdict: " << (r.monotone ? "monotone" : "non-monotone") << "\n";
  for (const auto& rr : r.rules) {
    out << "  rule " << rr.index << " [" << rr.loc.str() << "] " << rr.cls.str() << ": " << rr.text << "\n";
  }
  if (r.stratifiable) {
    out << "strata:\n";
    for (std::size_t i = 0; i < r.strata.size(); ++i) {
      out << "  " << i << ":";
      for (const auto& n : r.strata[i]) out << " " << n;
      out << "\n";
    }
  } else {
    out << "unstratifiable cycle:";
    for (const auto& n : r.unstratifiable_cycle) out << " " << n;
    out << "\n";
  }
  out << "coordination points: " << r.coordination_points.size() << "\n";
  for (const auto& c : r.coordination_points) {
    out << "  " << c.loc.str() << " " << reason_name(c.reason) << ": " << c.construct << "\n";
  }
  out << "uses all: " << (r.uses_all ? "yes" : "no") << ", uses id: " << (r.uses_id ? "yes" : "no") << "\n";
  return out.str();
}

}  // namespace calm::monocheck
