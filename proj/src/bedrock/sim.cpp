#include "bedrock/sim.hpp"

#include <deque>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "bedrock/fsm_cce.hpp"
#include "bedrock/hybrid_cce.hpp"
#include "bedrock/lce.hpp"
#include "bedrock/memory.hpp"
#include "bedrock/ucode/interp.hpp"
#include "bedrock/ucode/programs.hpp"

namespace bedrock {

const char* to_string(EngineKind k) {
  switch (k) {
  case EngineKind::Fsm: return "fsm";
  case EngineKind::Ucode: return "ucode";
  case EngineKind::Hybrid: return "hybrid";
  }
  return "?";
}

EngineKind engine_from_string(const std::string& s) {
  if (s == "fsm") return EngineKind::Fsm;
  if (s == "ucode") return EngineKind::Ucode;
  if (s == "hybrid") return EngineKind::Hybrid;
  throw BadTrace("unknown engine: " + s);
}

const char* to_string(TraceOp op) {
  switch (op) {
  case TraceOp::Load: return "load";
  case TraceOp::Store: return "store";
  case TraceOp::Amo: return "amo";
  case TraceOp::UcLoad: return "ucload";
  case TraceOp::UcStore: return "ucstore";
  }
  return "?";
}

TraceOp trace_op_from_string(const std::string& s) {
  if (s == "load") return TraceOp::Load;
  if (s == "store") return TraceOp::Store;
  if (s == "amo") return TraceOp::Amo;
  if (s == "ucload") return TraceOp::UcLoad;
  if (s == "ucstore") return TraceOp::UcStore;
  throw BadTrace("unknown trace op: " + s);
}

Trace parse_trace(std::istream& in) {
  Trace t;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    uint32_t core;
    std::string op, addr;
    uint32_t size;
    if (!(ls >> core)) continue; // blank
    if (!(ls >> op >> addr >> size))
      throw BadTrace("trace line " + std::to_string(lineno) +
                     ": want `core op addr_hex size`");
    t.push_back({core, trace_op_from_string(op),
                 std::stoull(addr, nullptr, 16), size});
  }
  return t;
}

void write_trace(std::ostream& out, const Trace& t) {
  for (const TraceEvent& e : t) {
    std::ostringstream ls;
    ls << e.core << ' ' << to_string(e.op) << ' ' << std::hex << e.addr
       << std::dec << ' ' << e.size << '\n';
    out << ls.str();
  }
}

namespace {

CoreOp to_core_op(const TraceEvent& e) {
  CoreOp op;
  switch (e.op) {
  case TraceOp::Load: op.kind = CoreOp::Kind::Load; break;
  case TraceOp::Store: op.kind = CoreOp::Kind::Store; break;
  case TraceOp::Amo: op.kind = CoreOp::Kind::UcAmo; break;
  case TraceOp::UcLoad: op.kind = CoreOp::Kind::UcLoad; break;
  case TraceOp::UcStore: op.kind = CoreOp::Kind::UcStore; break;
  }
  op.addr = e.addr;
  op.size = e.size;
  return op;
}

TraceOp from_core_op(CoreOp::Kind k) {
  switch (k) {
  case CoreOp::Kind::Load: return TraceOp::Load;
  case CoreOp::Kind::Store: return TraceOp::Store;
  case CoreOp::Kind::UcAmo: return TraceOp::Amo;
  case CoreOp::Kind::UcLoad: return TraceOp::UcLoad;
  case CoreOp::Kind::UcStore: return TraceOp::UcStore;
  }
  return TraceOp::Load;
}

} // namespace

RunStats simulate(const SystemConfig& cfg, const Trace& trace) {
  for (const TraceEvent& e : trace)
    if (e.core >= cfg.cores)
      throw BadTrace("trace core " + std::to_string(e.core) +
                     " out of range");

  NetworkConfig nc;
  nc.min_latency = cfg.net_latency;
  nc.data_channel_width = cfg.channel_width;
  nc.block_width = cfg.org.block_bytes * 8;
  nc.seed = cfg.seed;
  Network req(MsgClass::Request, nc), cmd(MsgClass::Command, nc),
      fill(MsgClass::Fill, nc), resp(MsgClass::Response, nc);
  Memory mem(MemConfig{cfg.mem_latency, cfg.org.block_bytes});

  RunStats out;
  // Independent accounting: classify protocol traffic at the wire.
  cmd.on_send = [&](const Message& m) {
    if (m.cmd == CmdType::INV) ++out.invalidations;
    else if (m.cmd == CmdType::DATA) ++out.mem_fills;
    else if (m.cmd == CmdType::STW) ++out.upgrades;
  };
  fill.on_send = [&](const Message& m) {
    if (m.cmd == CmdType::DATA) ++out.transfers;
  };
  resp.on_send = [&](const Message& m) {
    if (m.rsp == RspType::DirtyWB) ++out.writebacks;
  };

  std::vector<std::unique_ptr<CceEngine>> engines;
  for (uint32_t i = 0; i < cfg.num_cce; ++i) {
    CceConfig cc;
    cc.id = i;
    cc.num_lce = cfg.cores;
    cc.num_cce = cfg.num_cce;
    cc.variant = cfg.variant;
    cc.sets = cfg.org.sets;
    cc.assoc = cfg.org.assoc;
    cc.block_bytes = cfg.org.block_bytes;
    cc.block_width = cfg.org.block_bytes * 8;
    cc.fill_width = cfg.fill_width;
    switch (cfg.engine) {
    case EngineKind::Fsm:
      engines.push_back(std::make_unique<FsmCce>(
          cc, ProtocolTables::standard(), &req, &cmd, &fill, &resp, &mem));
      break;
    case EngineKind::Ucode:
      engines.push_back(std::make_unique<ucode::UcodeCce>(
          cc, ucode::program_for(cfg.variant), &req, &cmd, &fill, &resp,
          &mem));
      break;
    case EngineKind::Hybrid:
      engines.push_back(std::make_unique<HybridCce>(
          cc, ProtocolTables::standard(), &req, &cmd, &fill, &resp, &mem));
      break;
    }
  }

  uint64_t version = 0;
  std::vector<std::unique_ptr<Lce>> lces;
  for (uint32_t i = 0; i < cfg.cores; ++i) {
    LceConfig lc;
    lc.id = i;
    lc.variant = cfg.variant;
    lc.org = cfg.org;
    lc.block_width = cfg.org.block_bytes * 8;
    lc.fill_width = cfg.fill_width;
    lc.num_cce = cfg.num_cce;
    lc.cce_base = cfg.cores;
    lces.push_back(std::make_unique<Lce>(lc, ProtocolTables::standard(), &req,
                                         &cmd, &fill, &resp, &version));
  }

  std::vector<std::deque<TraceEvent>> queue(cfg.cores);
  for (const TraceEvent& e : trace) queue[e.core].push_back(e);

  auto done = [&] {
    for (uint32_t i = 0; i < cfg.cores; ++i)
      if (!queue[i].empty() || lces[i]->has_outstanding()) return false;
    if (!req.empty() || !cmd.empty() || !fill.empty() || !resp.empty() ||
        !mem.empty())
      return false;
    return true;
  };

  uint64_t t = 0, last_progress = 0;
  auto progress_sig = [&] {
    return req.messages_sent() + cmd.messages_sent() + fill.messages_sent() +
           resp.messages_sent() + req.messages_delivered() +
           cmd.messages_delivered() + fill.messages_delivered() +
           resp.messages_delivered() + mem.commands() + out.log.size();
  };
  uint64_t sig = progress_sig();

  while (true) {
    for (auto& e : engines) e->step(t);
    for (auto& l : lces) l->step(t);
    for (uint32_t i = 0; i < cfg.cores; ++i) {
      while (auto c = lces[i]->pop_completion()) {
        out.log.push_back(LogEntry{i, from_core_op(c->op.kind), c->op.addr,
                                   c->value, c->issued, c->completed,
                                   c->hit});
      }
      if (!queue[i].empty() &&
          lces[i]->try_start(to_core_op(queue[i].front()), t))
        queue[i].pop_front();
    }
    if (uint64_t s = progress_sig(); s != sig) {
      sig = s;
      last_progress = t;
    }
    if (done()) break;
    if (t - last_progress > cfg.watchdog) {
      std::ostringstream why;
      why << "no progress for " << cfg.watchdog << " cycles at cycle " << t
          << "; in flight: req=" << req.in_flight() << " cmd="
          << cmd.in_flight() << " fill=" << fill.in_flight()
          << " resp=" << resp.in_flight();
      for (uint32_t i = 0; i < cfg.cores; ++i)
        if (lces[i]->has_outstanding()) why << " lce" << i << "=waiting";
      throw WatchdogDeadlock(why.str());
    }
    ++t;
  }

  // A hit on a core's last event completes after that core's drain pass.
  for (uint32_t i = 0; i < cfg.cores; ++i)
    while (auto c = lces[i]->pop_completion())
      out.log.push_back(LogEntry{i, from_core_op(c->op.kind), c->op.addr,
                                 c->value, c->issued, c->completed, c->hit});

  out.total_cycles = t;
  out.events = trace.size();
  out.mem_reads = mem.reads();
  out.mem_writes = mem.writes();
  for (auto& l : lces) {
    out.hits += l->stats().hits;
    out.misses += l->stats().misses;
    out.silent_upgrades += l->stats().silent_upgrades;
    out.lce_busy.push_back(l->stats().busy_cycles);
  }
  for (auto& e : engines) {
    const CceStats& s = e->stats();
    out.engine_busy.push_back(s.req_busy + s.mem_busy + s.lce_resp_busy +
                              s.uc_busy);
    out.coherent_requests += s.occupancy_log.size();
    for (uint64_t c : s.occupancy_log) ++out.occupancy[c];
  }

  out.quiescent = req.empty() && cmd.empty() && fill.empty() &&
                  resp.empty() && mem.empty();
  for (auto& e : engines)
    for (uint32_t wg = 0; wg < cfg.org.sets; ++wg)
      if (e->pending().pending(wg)) out.quiescent = false;

  // The caches must agree with the directory's golden states; a silently
  // upgraded M may still read E at the directory.
  out.shadow_match = true;
  for (uint32_t i = 0; i < cfg.cores; ++i) {
    const Cache& c = lces[i]->cache();
    for (uint32_t set = 0; set < cfg.org.sets; ++set) {
      CceEngine& e = *engines[cce_for_way_group(set, cfg.num_cce)];
      for (uint32_t w = 0; w < cfg.org.assoc; ++w) {
        const Cache::Line& line = c.line(set, w);
        DirEntry d = e.dir().read_entry(i, c.addr_of(set, line.tag), w);
        bool ok;
        if (line.state == St::I) ok = d.state == St::I;
        else
          ok = d.tag == line.tag &&
               (d.state == line.state ||
                (d.state == St::E && line.state == St::M));
        if (!ok) out.shadow_match = false;
      }
    }
  }
  return out;
}

bool fill_sources_balance(const RunStats& s) {
  return s.transfers + s.mem_fills + s.upgrades == s.coherent_requests;
}

bool sc_per_core(const std::vector<LogEntry>& log) {
  std::map<std::pair<uint32_t, uint64_t>, uint64_t> last;
  for (const LogEntry& e : log) {
    if (e.op == TraceOp::UcStore) continue; // fire-and-forget, no value
    uint64_t& v = last[{e.core, e.addr}];
    if (e.value.version < v) return false;
    v = e.value.version;
  }
  return true;
}

std::string stats_csv(const RunStats& s) {
  std::ostringstream os;
  os << "total_cycles,events,hits,misses,silent_upgrades,invalidations,"
        "transfers,mem_fills,upgrades,writebacks,mem_reads,mem_writes,"
        "coherent_requests,quiescent,shadow_match\n";
  os << s.total_cycles << ',' << s.events << ',' << s.hits << ','
     << s.misses << ',' << s.silent_upgrades << ',' << s.invalidations << ','
     << s.transfers << ',' << s.mem_fills << ',' << s.upgrades << ','
     << s.writebacks << ',' << s.mem_reads << ',' << s.mem_writes << ','
     << s.coherent_requests << ',' << (s.quiescent ? 1 : 0) << ','
     << (s.shadow_match ? 1 : 0) << '\n';
  return os.str();
}

} // namespace bedrock
