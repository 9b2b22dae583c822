#include "bedrock/checker.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <unordered_map>

namespace bedrock {

const char* to_string(Mutation m) {
  switch (m) {
  case Mutation::None: return "none";
  case Mutation::WrongNextState: return "wrong-next-state";
  case Mutation::DroppedCohAck: return "dropped-coh-ack";
  case Mutation::SkippedInvalidation: return "skipped-invalidation";
  case Mutation::PrematurePendingClear: return "premature-pending-clear";
  case Mutation::ReorderedCompound: return "reordered-compound";
  case Mutation::SelfGrantM: return "self-grant-m";
  case Mutation::StaleMemoryFill: return "stale-memory-fill";
  }
  return "?";
}

namespace {

// One abstract in-flight message.
enum MsgKind : uint8_t { KReq, KInv, KInvAck, KOwnerCmd, KData, KStw, KCohAck };

struct AMsg {
  uint8_t kind = 0;
  uint8_t to = 0;      // destination cache (KReq: source cache)
  uint8_t st = 0;      // KOwnerCmd set-state / KData grant state
  uint8_t xst = 0;     // KOwnerCmd transfer state
  uint8_t bits = 0;    // KReq: store flag; KOwnerCmd: has_set|has_xfer<<1|wb<<2
  uint8_t fresh = 0;   // KData: carries current-epoch data
  auto operator<=>(const AMsg&) const = default;
};

enum ReqKind : uint8_t { RNone = 0, RLoad, RStore };

struct Txn {
  uint8_t active = 0, staged = 0;
  uint8_t requestor = 0, store = 0;
  uint8_t to_owner = 0, owner = 0;
  uint8_t has_set = 0, set = 0, has_xfer = 0, xfer = 0, wb = 0;
  uint8_t upgrade = 0;
  uint8_t send_data = 0, data_state = 0;
  uint8_t acks = 0;
  auto operator<=>(const Txn&) const = default;
};

struct GState {
  std::vector<uint8_t> st;    // coherence state per cache
  std::vector<uint8_t> fresh; // holds the latest epoch's data
  std::vector<uint8_t> req;   // outstanding request kind per cache
  std::vector<uint8_t> dir;   // directory's view per cache
  uint8_t pending = 0;
  uint8_t mem_fresh = 1;
  Txn txn;
  std::vector<AMsg> flight; // kept sorted for canonical hashing

  std::string key() const {
    std::string k;
    auto put = [&k](const void* p, size_t n) {
      k.append((const char*)p, n);
    };
    put(st.data(), st.size());
    put(fresh.data(), fresh.size());
    put(req.data(), req.size());
    put(dir.data(), dir.size());
    k.push_back((char)pending);
    k.push_back((char)mem_fresh);
    put(&txn, sizeof(txn));
    for (const AMsg& m : flight) put(&m, sizeof(m));
    return k;
  }
};

struct Succ {
  std::string event;
  GState next;
  std::optional<std::string> violation; // invariant name, if the step breaks one
};

struct Explorer {
  const ProtocolTables& T;
  const CheckerConfig& cfg;
  Mutation mut;

  explicit Explorer(const ProtocolTables& t, const CheckerConfig& c)
      : T(t), cfg(c), mut(c.mutation) {}

  bool rw_state(uint8_t s) const {
    return (St)s == St::E || (St)s == St::M;
  }

  std::optional<std::string> check_swmr(const GState& g) const {
    int rw = 0, valid = 0;
    for (uint8_t s : g.st) {
      if ((St)s != St::I) ++valid;
      if (rw_state(s)) ++rw;
    }
    if (rw > 1 || (rw == 1 && valid > 1)) return "swmr";
    return std::nullopt;
  }

  // A completed store opens a new read-write epoch.
  void epoch(GState& g, uint32_t writer) const {
    for (auto& f : g.fresh) f = 0;
    g.mem_fresh = 0;
    g.fresh[writer] = 1;
  }

  void push_msg(GState& g, AMsg m) const {
    g.flight.insert(
        std::upper_bound(g.flight.begin(), g.flight.end(), m), m);
  }

  // Emit the post-invalidation half of the open transaction.
  void stage(GState& g) const {
    Txn& t = g.txn;
    t.staged = 1;
    if (t.to_owner) {
      if (mut == Mutation::StaleMemoryFill && t.has_xfer) {
        // Fault: serve the requestor from memory and never poke the owner.
        push_msg(g, AMsg{KData, t.requestor, t.xfer, 0, 0, g.mem_fresh});
      } else {
        uint8_t bits = (t.has_set ? 1 : 0) | (t.has_xfer ? 2 : 0) |
                       (t.wb ? 4 : 0);
        push_msg(g, AMsg{KOwnerCmd, t.owner, t.set, t.xfer, bits, 0});
      }
    } else if (t.upgrade) {
      push_msg(g, AMsg{KStw, t.requestor, 0, 0, 0, 0});
    } else if (t.send_data) {
      push_msg(g, AMsg{KData, t.requestor, t.data_state, 0, 0, g.mem_fresh});
    }
    if (mut == Mutation::PrematurePendingClear) {
      g.pending = 0;
      t.active = 0;
    }
  }

  // Directory accepts one request; returns false when the table has no cell
  // for the combination (only reachable under mutations).
  bool accept_request(GState& g, uint32_t i, bool store) const {
    // Directory state: the owner's state, else S if any copy, else I.
    St ds = St::I;
    int owner = -1;
    bool any_s = false;
    for (uint32_t j = 0; j < g.dir.size(); ++j) {
      St s = (St)g.dir[j];
      if (s == St::I) continue;
      if (s == St::S) any_s = true;
      else {
        owner = (int)j;
        ds = s;
      }
    }
    if (owner < 0 && any_s) ds = St::S;

    CceEvent ev;
    if (!store) ev = CceEvent::ReqRd;
    else if ((St)g.dir[i] == St::I) ev = CceEvent::ReqWrInvalid;
    else if ((St)g.dir[i] == St::S) ev = CceEvent::ReqWrSharer;
    else ev = CceEvent::ReqWrOwner;

    if (!T.has_cce_entry(cfg.variant, ds, ev)) return false;
    const CceAction& act = T.cce_protocol_entry(cfg.variant, ds, ev);

    g.pending = 1;
    Txn t;
    t.active = 1;
    t.requestor = (uint8_t)i;
    t.store = store;
    t.upgrade = act.upgrade;
    t.send_data = act.send_data;
    t.data_state = (uint8_t)act.data_state;
    if (mut == Mutation::WrongNextState && ev == CceEvent::ReqRd) {
      // Fault: serve every read from memory with an exclusive grant,
      // ignoring any current owner.
      t.send_data = 1;
      t.data_state = (uint8_t)St::E;
      t.upgrade = 0;
    } else if (act.to_owner && owner >= 0) {
      t.to_owner = 1;
      t.owner = (uint8_t)owner;
      t.has_set = act.owner_set_state.has_value();
      if (act.owner_set_state) t.set = (uint8_t)*act.owner_set_state;
      t.has_xfer = act.xfer_state.has_value();
      if (act.xfer_state) t.xfer = (uint8_t)*act.xfer_state;
      t.wb = act.writeback;
    }

    // Invalidations per the table's scope.
    std::vector<uint32_t> targets;
    if (act.inv != InvScope::None && mut != Mutation::SkippedInvalidation) {
      for (uint32_t j = 0; j < g.dir.size(); ++j)
        if (j != i && (St)g.dir[j] == St::S) targets.push_back(j);
      if (act.inv == InvScope::OtherSAndOwner && owner >= 0 &&
          (uint32_t)owner != i)
        targets.push_back((uint32_t)owner);
    }
    for (uint32_t j : targets) {
      push_msg(g, AMsg{KInv, (uint8_t)j, 0, 0, 0, 0});
      g.dir[j] = (uint8_t)St::I;
    }
    t.acks = (uint8_t)targets.size();

    // The golden view leads the caches.
    St next = t.send_data   ? (St)t.data_state
              : t.upgrade   ? St::M
              : t.has_xfer  ? (St)t.xfer
                            : St::I;
    g.dir[i] = (uint8_t)next;
    if (t.to_owner && t.has_set) g.dir[t.owner] = t.set;

    g.txn = t;
    if (t.acks == 0) stage(g);
    return true;
  }

  // All enabled events from g.
  std::vector<Succ> successors(const GState& g) const {
    std::vector<Succ> out;
    auto add = [&](std::string ev, GState n) {
      Succ s{std::move(ev), std::move(n), std::nullopt};
      if (auto v = check_swmr(s.next)) s.violation = *v;
      out.push_back(std::move(s));
    };

    // Cache-issued events.
    for (uint32_t i = 0; i < g.st.size(); ++i) {
      if (g.req[i] != RNone) continue;
      St s = (St)g.st[i];
      if (s == St::I) {
        GState n = g;
        if (mut == Mutation::SelfGrantM) {
          n.st[i] = (uint8_t)St::M; // fault: local grant, directory unaware
          add("cache" + std::to_string(i) + " self-grants M on load", n);
        } else {
          n.req[i] = RLoad;
          push_msg(n, AMsg{KReq, (uint8_t)i, 0, 0, 0, 0});
          add("cache" + std::to_string(i) + " issues load", n);
        }
      }
      if (s == St::I || s == St::S || s == St::O || s == St::F) {
        GState n = g;
        n.req[i] = RStore;
        push_msg(n, AMsg{KReq, (uint8_t)i, 0, 0, 1, 0});
        add("cache" + std::to_string(i) + " issues store", n);
      }
      if (s == St::E) {
        GState n = g;
        n.st[i] = (uint8_t)St::M; // the protocol's only silent transition
        epoch(n, i);
        add("cache" + std::to_string(i) + " silently upgrades and stores", n);
      }
      if (s == St::M && (g.mem_fresh || !g.fresh[i])) {
        GState n = g;
        epoch(n, i);
        add("cache" + std::to_string(i) + " stores again", n);
      }
    }

    // Message deliveries; identical duplicates yield one event.
    for (size_t k = 0; k < g.flight.size(); ++k) {
      if (k > 0 && g.flight[k] == g.flight[k - 1]) continue;
      const AMsg m = g.flight[k];
      if (m.kind == KReq && g.pending) continue; // serialized
      GState n = g;
      n.flight.erase(n.flight.begin() + (long)k);
      switch (m.kind) {
      case KReq: {
        if (!accept_request(n, m.to, m.bits & 1)) continue;
        add("directory accepts cache" + std::to_string(m.to) +
                (m.bits & 1 ? " store" : " load"),
            n);
        break;
      }
      case KInv:
        n.st[m.to] = (uint8_t)St::I;
        n.fresh[m.to] = 0;
        push_msg(n, AMsg{KInvAck, 0, 0, 0, 0, 0});
        add("cache" + std::to_string(m.to) + " invalidates", n);
        break;
      case KInvAck:
        if (n.txn.acks > 0 && --n.txn.acks == 0 && !n.txn.staged) stage(n);
        add("directory counts an invalidation ack", n);
        break;
      case KOwnerCmd: {
        uint8_t o = m.to;
        if (m.bits & 4) n.mem_fresh = n.fresh[o]; // writeback
        if (m.bits & 2)
          push_msg(n, AMsg{KData, n.txn.requestor, m.xst, 0, 0, n.fresh[o]});
        if ((m.bits & 1) && mut != Mutation::ReorderedCompound)
          n.st[o] = m.st;
        add("cache" + std::to_string(o) + " obeys the owner command", n);
        break;
      }
      case KData: {
        uint8_t i = m.to;
        n.st[i] = m.st;
        n.fresh[i] = m.fresh;
        bool stale = !m.fresh;
        bool store = n.req[i] == RStore;
        n.req[i] = RNone;
        if (store) epoch(n, i);
        if (mut != Mutation::DroppedCohAck)
          push_msg(n, AMsg{KCohAck, 0, 0, 0, 0, 0});
        Succ s{"cache" + std::to_string(i) + " fills with data", std::move(n),
               std::nullopt};
        if (stale) s.violation = "data-value";
        else if (auto v = check_swmr(s.next)) s.violation = *v;
        out.push_back(std::move(s));
        break;
      }
      case KStw: {
        uint8_t i = m.to;
        n.st[i] = (uint8_t)St::M;
        n.req[i] = RNone;
        epoch(n, i);
        if (mut != Mutation::DroppedCohAck)
          push_msg(n, AMsg{KCohAck, 0, 0, 0, 0, 0});
        add("cache" + std::to_string(i) + " upgrades in place", n);
        break;
      }
      case KCohAck:
        n.pending = 0;
        n.txn = Txn{};
        add("directory closes the transaction", n);
        break;
      }
    }
    return out;
  }
};

} // namespace

CheckResult explore(const ProtocolTables& tables, const CheckerConfig& cfg) {
  Explorer ex(tables, cfg);
  CheckResult res;

  GState init;
  init.st.assign(cfg.num_caches, (uint8_t)St::I);
  init.fresh.assign(cfg.num_caches, 0);
  init.req.assign(cfg.num_caches, RNone);
  init.dir.assign(cfg.num_caches, (uint8_t)St::I);

  std::vector<GState> states{init};
  std::vector<std::pair<int64_t, std::string>> parent{{-1, ""}};
  std::unordered_map<std::string, uint64_t> seen{{init.key(), 0}};
  std::deque<uint64_t> frontier{0};

  auto trace_to = [&](uint64_t idx, const std::string& last) {
    std::vector<std::string> t{last};
    for (int64_t i = (int64_t)idx; i > 0; i = parent[(size_t)i].first)
      t.push_back(parent[(size_t)i].second);
    std::reverse(t.begin(), t.end());
    return t;
  };

  // Once something is wrong, finish only a bounded slice of the frontier to
  // classify the failure; mutated protocols need not have a finite graph.
  uint64_t grace_deadline = UINT64_MAX;

  while (!frontier.empty()) {
    if (states.size() > grace_deadline || res.violations.size() >= 2) break;
    uint64_t idx = frontier.front();
    frontier.pop_front();
    GState g = states[idx];
    auto succ = ex.successors(g);

    if (succ.empty()) {
      bool open = g.pending != 0 || !g.flight.empty();
      if (open && res.deadlocks.empty()) {
        res.deadlocks.push_back(trace_to(idx, "no event is enabled"));
        grace_deadline = std::min(grace_deadline, states.size() + 20'000);
      }
      continue;
    }

    for (auto& s : succ) {
      ++res.transitions;
      if (s.violation) {
        bool already = false;
        for (const auto& v : res.violations)
          if (v.invariant == *s.violation) already = true;
        if (!already) {
          res.violations.push_back(
              Violation{*s.violation, trace_to(idx, s.event)});
          grace_deadline = std::min(grace_deadline, states.size() + 20'000);
        }
        continue; // do not explore past a broken state
      }
      std::string k = s.next.key();
      auto [it, fresh_state] = seen.emplace(std::move(k), states.size());
      if (!fresh_state) continue;
      states.push_back(std::move(s.next));
      parent.emplace_back((int64_t)idx, s.event);
      frontier.push_back(it->second);
      if (states.size() >= cfg.max_states) {
        res.bounded = true;
        res.states_visited = states.size();
        return res;
      }
    }
  }
  res.states_visited = states.size();
  return res;
}

} // namespace bedrock
