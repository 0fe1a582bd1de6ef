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

#include <algorithm>
#include <deque>
#include <queue>
#include <unordered_map>

#include "calm/netsim/netsim.hpp"
#include "calm/relspace/fact_text.hpp"
#include "calm/relspace/json.hpp"

namespace calm::netsim {
namespace {

using Key = std::vector<std::uint32_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::uint32_t x : k) {
      h ^= x;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct MachineEntry {
  transducer::MachineState state;
  bool started = false;
  std::uint32_t output = 0;
  int tick = -1;  // unknown / no / yes
};

struct StepOut {
  std::uint32_t next = 0;
  std::vector<std::uint32_t> sent;
};

struct Move {
  Decision::Kind kind = Decision::Start;
  std::uint32_t machine = 0;
  std::vector<std::uint32_t> batch;
};

struct Edge {
  std::uint32_t target = 0;
  std::uint32_t cost = 0;
  bool changed = false;
};

class Explorer {
 public:
  Explorer(const NetworkState& init, ExploreOptions opts) : init_(init), opts_(opts) {
    output_schemas_ = vp().schemas().filter([&](const RelationSchema& r) { return vp().relation(r.name).output; });
  }

  Exploration run() {
    Exploration ex;
    Key start;
    for (Address a : init_.addresses) start.push_back(intern_machine(init_.machines.at(a), init_.started.count(a) != 0));
    for (const Message& m : init_.pending) start.push_back(intern_message(m));
    std::sort(start.begin() + static_cast<long>(machines()), start.end());
    add_state(std::move(start), UINT32_MAX, Move{});

    std::map<std::uint32_t, std::uint32_t> first_terminal;  // union output id -> state
    std::vector<std::uint32_t> terminals;
    for (std::size_t cursor = 0; cursor < keys_.size(); ++cursor) {
      if (keys_.size() > opts_.bound) {
        ex.complete = false;
        break;
      }
      auto s = static_cast<std::uint32_t>(cursor);
      const Key key = keys_[cursor];
      std::vector<Move> moves = enabled(key);
      if (moves.empty()) {
        terminals.push_back(s);
        first_terminal.emplace(union_of(key), s);
        continue;
      }
      for (Move& mv : moves) {
        Key next = apply(key, mv);
        std::uint32_t cost = 0;
        for (std::uint32_t id : mv.batch) cost += messages_[id].from != messages_[id].to ? 1 : 0;
        bool changed = union_of(next) != union_of(key);
        auto t = add_state(std::move(next), s, mv);
        edges_[cursor].push_back(Edge{t, cost, changed});
        ++ex.transitions;
      }
    }
    ex.states = keys_.size();
    ex.terminal_states = terminals.size();

    std::vector<std::pair<std::string, std::uint32_t>> found;
    for (const auto& [uid, state] : first_terminal) found.emplace_back(unions_[uid].second, state);
    std::sort(found.begin(), found.end());
    for (const auto& [text, state] : found) {
      ExploredOutcome o;
      o.output = unions_[union_of(keys_[state])].first;
      o.canonical = text;
      auto path = path_to(state);
      o.witness = run_schedule(init_, Schedule::explicit_list(path), path.size());
      ex.outcomes.push_back(std::move(o));
    }
    if (!terminals.empty()) ex.min_messages_before_output = min_messages(terminals);
    return ex;
  }

 private:
  const lang::ValidatedProgram& vp() const { return init_.plan->program; }
  std::size_t machines() const { return init_.addresses.size(); }

  std::uint32_t intern_machine(const transducer::MachineState& s, bool started) {
    std::string key = started ? "S" : "U";
    key += format_facts(s.persisted);
    key += "\x1f";
    for (const Fact& f : s.sent) key += f.str() + "\n";
    auto [it, fresh] = machine_ids_.emplace(std::move(key), static_cast<std::uint32_t>(mstates_.size()));
    if (fresh) {
      MachineEntry e;
      e.state = s;
      e.started = started;
      Database out = transducer::outputs_of(s.persisted, vp());
      auto [oit, ofresh] = output_ids_.emplace(canonical(out), static_cast<std::uint32_t>(outputs_.size()));
      if (ofresh) outputs_.push_back(std::move(out));
      e.output = oit->second;
      mstates_.push_back(std::move(e));
    }
    return it->second;
  }

  std::uint32_t intern_message(const Message& m) {
    auto [it, fresh] = message_ids_.emplace(m, static_cast<std::uint32_t>(messages_.size()));
    if (fresh) messages_.push_back(m);
    return it->second;
  }

  std::uint32_t union_of(const Key& key) {
    Key outs;
    for (std::size_t i = 0; i < machines(); ++i) outs.push_back(mstates_[key[i]].output);
    auto it = union_cache_.find(outs);
    if (it != union_cache_.end()) return it->second;
    Database u = output_schemas_;
    for (std::uint32_t o : outs) u = db_union(u, outputs_[o]);
    std::string text = canonical(u);
    auto [uit, fresh] = union_ids_.emplace(text, static_cast<std::uint32_t>(unions_.size()));
    if (fresh) unions_.emplace_back(std::move(u), std::move(text));
    union_cache_.emplace(std::move(outs), uit->second);
    return uit->second;
  }

  std::uint32_t add_state(Key key, std::uint32_t parent, Move mv) {
    auto [it, fresh] = state_ids_.emplace(key, static_cast<std::uint32_t>(keys_.size()));
    if (fresh) {
      keys_.push_back(std::move(key));
      parents_.emplace_back(parent, std::move(mv));
      edges_.emplace_back();
    }
    return it->second;
  }

  bool needs_tick(std::uint32_t msid) {
    if (!init_.plan->tick_sensitive || !mstates_[msid].started) return false;
    if (mstates_[msid].tick < 0) {
      const StepOut& r = step(msid, {});
      mstates_[msid].tick = (r.next != msid || !r.sent.empty()) ? 1 : 0;
    }
    return mstates_[msid].tick == 1;
  }

  const StepOut& step(std::uint32_t msid, const std::vector<std::uint32_t>& batch) {
    auto memo_key = std::make_pair(msid, batch);
    auto it = memo_.find(memo_key);
    if (it != memo_.end()) return it->second;
    std::set<Fact> inbox;
    for (std::uint32_t id : batch) inbox.insert(messages_[id].fact);
    transducer::MachineState state = mstates_[msid].state;
    Address self = state.address;
    auto r = transducer::step(state, inbox);
    StepOut out;
    out.next = intern_machine(r.new_state, true);
    for (const auto& [to, facts] : r.outbound) {
      for (const Fact& f : facts) out.sent.push_back(intern_message(Message{self, to, f, false}));
    }
    return memo_.emplace(std::move(memo_key), std::move(out)).first->second;
  }

  std::vector<Move> enabled(const Key& key) {
    std::vector<Move> moves;
    for (std::size_t i = 0; i < machines(); ++i) {
      const Address a = init_.addresses[i];
      std::vector<std::uint32_t> mine;
      for (std::size_t k = machines(); k < key.size(); ++k) {
        if (messages_[key[k]].to == a && (mine.empty() || mine.back() != key[k])) mine.push_back(key[k]);
      }
      auto mi = static_cast<std::uint32_t>(i);
      if (!mstates_[key[i]].started) moves.push_back(Move{Decision::Start, mi, {}});
      if (mine.size() >= 32) throw ScheduleError("too many pending messages on one machine to enumerate batches");
      const std::uint64_t subsets = (std::uint64_t{1} << mine.size());
      for (std::uint64_t mask = 1; mask < subsets; ++mask) {
        Move mv{Decision::Deliver, mi, {}};
        for (std::size_t b = 0; b < mine.size(); ++b) {
          if ((mask >> b) & 1U) mv.batch.push_back(mine[b]);
        }
        moves.push_back(std::move(mv));
      }
      if (needs_tick(key[i])) moves.push_back(Move{Decision::Tick, mi, {}});
    }
    return moves;
  }

  Key apply(const Key& key, const Move& mv) {
    const StepOut& r = step(key[mv.machine], mv.batch);
    std::vector<std::uint32_t> pending(key.begin() + static_cast<long>(machines()), key.end());
    for (std::uint32_t id : mv.batch) pending.erase(std::find(pending.begin(), pending.end(), id));
    pending.insert(pending.end(), r.sent.begin(), r.sent.end());
    std::sort(pending.begin(), pending.end());
    Key next(key.begin(), key.begin() + static_cast<long>(machines()));
    next[mv.machine] = r.next;
    next.insert(next.end(), pending.begin(), pending.end());
    return next;
  }

  std::vector<Decision> path_to(std::uint32_t state) {
    std::vector<Decision> out;
    for (std::uint32_t s = state; parents_[s].first != UINT32_MAX; s = parents_[s].first) {
      const Move& mv = parents_[s].second;
      Decision d;
      d.kind = mv.kind;
      d.machine = init_.addresses[mv.machine];
      for (std::uint32_t id : mv.batch) d.batch.push_back(messages_[id]);
      out.push_back(std::move(d));
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  // min over states s from which a terminal is reachable without further
  // output change, of the cheapest message count from the initial state to s.
  std::size_t min_messages(const std::vector<std::uint32_t>& terminals) {
    const std::size_t n = keys_.size();
    std::vector<std::vector<std::uint32_t>> quiet_rev(n);
    for (std::size_t s = 0; s < edges_.size(); ++s) {
      for (const Edge& e : edges_[s]) {
        if (!e.changed) quiet_rev[e.target].push_back(static_cast<std::uint32_t>(s));
      }
    }
    std::vector<bool> stable(n, false);
    std::deque<std::uint32_t> queue(terminals.begin(), terminals.end());
    for (auto t : terminals) stable[t] = true;
    while (!queue.empty()) {
      auto s = queue.front();
      queue.pop_front();
      for (auto p : quiet_rev[s]) {
        if (!stable[p]) {
          stable[p] = true;
          queue.push_back(p);
        }
      }
    }
    std::vector<std::size_t> dist(n, SIZE_MAX);
    using Item = std::pair<std::size_t, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[0] = 0;
    heap.emplace(0, 0);
    std::size_t best = SIZE_MAX;
    while (!heap.empty()) {
      auto [d, s] = heap.top();
      heap.pop();
      if (d != dist[s]) continue;
      if (stable[s]) {
        best = d;
        break;
      }
      for (const Edge& e : edges_[s]) {
        if (d + e.cost < dist[e.target]) {
          dist[e.target] = d + e.cost;
          heap.emplace(dist[e.target], e.target);
        }
      }
    }
    return best;
  }

  const NetworkState& init_;
  ExploreOptions opts_;
  Database output_schemas_;

  std::vector<MachineEntry> mstates_;
  std::unordered_map<std::string, std::uint32_t> machine_ids_;
  std::vector<Database> outputs_;
  std::unordered_map<std::string, std::uint32_t> output_ids_;
  std::vector<Message> messages_;
  std::map<Message, std::uint32_t> message_ids_;
  std::map<std::pair<std::uint32_t, std::vector<std::uint32_t>>, StepOut> memo_;
  std::map<Key, std::uint32_t> union_cache_;
  std::vector<std::pair<Database, std::string>> unions_;
  std::unordered_map<std::string, std::uint32_t> union_ids_;

  std::vector<Key> keys_;
  std::unordered_map<Key, std::uint32_t, KeyHash> state_ids_;
  std::vector<std::pair<std::uint32_t, Move>> parents_;
  std::vector<std::vector<Edge>> edges_;
};

}  // namespace

Exploration enumerate_schedules(const NetworkState& n, ExploreOptions opts) {
  return Explorer(n, opts).run();
}

}  // namespace calm::netsim
