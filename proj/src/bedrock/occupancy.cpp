#include "bedrock/occupancy.hpp"

#include <algorithm>
#include <memory>

#include "bedrock/fsm_cce.hpp"
#include "bedrock/hybrid_cce.hpp"
#include "bedrock/lce.hpp"
#include "bedrock/ucode/interp.hpp"
#include "bedrock/ucode/programs.hpp"

namespace bedrock {

namespace {

// Scripted cache endpoint that answers every command the way a correct
// LCE would, so the engine's charged cycles can be measured in isolation.
struct FakeLce {
  uint32_t id = 0;
  Network* cmdn = nullptr;
  Network* filln = nullptr;
  Network* respn = nullptr;
  uint32_t cce_ep = 0;
  bool dirty = false;
  BlockData data;

  void step(uint64_t t) {
    for (Network* n : {filln, cmdn})
      while (n->any_deliverable(id, t)) handle(n->deliver_one(id, t), t);
  }

  void reply(RspType r, uint64_t addr, uint64_t t, bool with_data = false) {
    Message m;
    m.rsp = r;
    m.addr = addr;
    if (with_data) {
      m.has_data = true;
      m.data = data;
      m.size = 64;
    }
    respn->send(id, cce_ep, std::move(m), t);
  }

  void handle(const Message& m, uint64_t t) {
    switch (m.cmd) {
    case CmdType::INV: reply(RspType::InvAck, m.addr, t); return;
    case CmdType::DATA:
    case CmdType::STW: reply(RspType::CohAck, m.addr, t); return;
    case CmdType::UcData:
    case CmdType::UcStoreDone: return;
    default: break;
    }
    if (cmd_has_tr(m.cmd)) {
      Message d;
      d.cmd = CmdType::DATA;
      d.addr = m.addr;
      d.set_state = m.xfer_state;
      d.way = m.lru_way;
      d.has_data = true;
      d.data = data;
      d.size = 64;
      filln->send(id, m.xfer_target, std::move(d), t);
    }
    if (cmd_has_wb(m.cmd))
      reply(dirty ? RspType::DirtyWB : RspType::NullWB, m.addr, t, dirty);
  }
};

struct Bench {
  NetworkConfig nc;
  Network req, cmd, fill, resp;
  Memory mem;
  CceConfig cc;
  std::unique_ptr<CceEngine> cce;
  std::vector<FakeLce> lces;

  Bench(EngineKind e, uint32_t caches, uint32_t beats)
      : nc(make_nc()), req(MsgClass::Request, nc), cmd(MsgClass::Command, nc),
        fill(MsgClass::Fill, nc), resp(MsgClass::Response, nc),
        mem(MemConfig{10, 64}), cc(make_cc(caches, beats)) {
    switch (e) {
    case EngineKind::Fsm:
      cce = std::make_unique<FsmCce>(cc, ProtocolTables::standard(), &req,
                                     &cmd, &fill, &resp, &mem);
      break;
    case EngineKind::Ucode:
      cce = std::make_unique<ucode::UcodeCce>(cc,
                                              ucode::program_for(cc.variant),
                                              &req, &cmd, &fill, &resp, &mem);
      break;
    case EngineKind::Hybrid:
      cce = std::make_unique<HybridCce>(cc, ProtocolTables::standard(), &req,
                                        &cmd, &fill, &resp, &mem);
      break;
    }
    for (uint32_t i = 0; i < caches; ++i) {
      FakeLce l;
      l.id = i;
      l.cmdn = &cmd;
      l.filln = &fill;
      l.respn = &resp;
      l.cce_ep = cc.endpoint();
      l.data.assign(8, WordToken{i, 1});
      lces.push_back(std::move(l));
    }
  }

  static NetworkConfig make_nc() {
    NetworkConfig c;
    c.min_latency = 1;
    c.data_channel_width = 512;
    return c;
  }
  static CceConfig make_cc(uint32_t caches, uint32_t beats) {
    CceConfig c;
    c.num_lce = caches;
    c.fill_width = 512 / beats;
    return c;
  }

  bool settled() const {
    return req.empty() && cmd.empty() && fill.empty() && resp.empty() &&
           mem.empty();
  }

  // Run one preloaded request to completion; returns the charged cycles,
  // or UINT64_MAX if the transaction never finishes.
  uint64_t run_one(ReqType t, uint64_t addr, uint32_t lru_way) {
    Message m;
    m.req = t;
    m.addr = addr;
    m.lru_way = lru_way;
    m.size = 8;
    req.send(0, cc.endpoint(), std::move(m), 0);
    for (uint64_t now = 0; now < 600; ++now) {
      cce->step(now);
      for (auto& l : lces) l.step(now);
      if (!cce->stats().occupancy_log.empty() && settled() &&
          !cce->pending().pending(uint32_t(addr / 64) % cc.sets))
        return cce->stats().occupancy_log[0];
    }
    return UINT64_MAX;
  }
};

// One table row: the request, the cache states seeded around it, and how
// many extra sharers it can take.
struct RowSpec {
  const char* name;
  ReqType req = ReqType::ReqRd;
  St self = St::I;  // requestor's own entry, seeded at way 5
  St owner = St::I; // cache 1's entry, seeded at way 2
  int owner_dirty = -1; // -1: follow the state's dirty property
  int sharers = 0;      // -1: use the configured count
  int min_sharers = 0;
  St evict = St::I; // requestor's way-3 entry in the same set
  uint32_t lru_way = 0;
};

std::vector<RowSpec> row_specs(EngineKind e) {
  std::vector<RowSpec> r;
  if (e == EngineKind::Ucode)
    r.push_back({"read excl I/I", ReqType::ReqRd});
  // The microcode program serves plain reads on its non-exclusive path.
  ReqType rd = e == EngineKind::Ucode ? ReqType::ReqRdNE : ReqType::ReqRd;
  St I = St::I;
  r.push_back({"read I/I", rd});
  r.push_back({"read I/S", ReqType::ReqRd, I, I, -1, -1, 1});
  r.push_back({"read I/E clean", ReqType::ReqRd, I, St::E, 0});
  r.push_back({"read I/E dirty", ReqType::ReqRd, I, St::E, 1});
  r.push_back({"read I/M", ReqType::ReqRd, I, St::M});
  r.push_back({"read I/O", ReqType::ReqRd, I, St::O});
  r.push_back({"read I/F", ReqType::ReqRd, I, St::F});
  r.push_back({"write I/I", ReqType::ReqWr});
  r.push_back({"write I/S", ReqType::ReqWr, I, I, -1, -1, 1});
  r.push_back({"write I/E", ReqType::ReqWr, I, St::E});
  r.push_back({"write I/M", ReqType::ReqWr, I, St::M});
  r.push_back({"write I/O", ReqType::ReqWr, I, St::O, -1, -1});
  r.push_back({"write I/F", ReqType::ReqWr, I, St::F, -1, -1});
  r.push_back({"write S/S", ReqType::ReqWr, St::S, I, -1, -1});
  r.push_back({"write S/O", ReqType::ReqWr, St::S, St::O, -1, -1});
  r.push_back({"write S/F", ReqType::ReqWr, St::S, St::F, -1, -1});
  r.push_back({"write O/O", ReqType::ReqWr, St::O, I, -1, -1});
  r.push_back({"write F/F", ReqType::ReqWr, St::F, I, -1, -1});
  r.push_back({"read replace clean", ReqType::ReqRd, I, I, -1, 1, 0, St::E,
               3});
  r.push_back({"read replace dirty", ReqType::ReqRd, I, I, -1, 1, 0, St::M,
               3});
  return r;
}

// Closed-form cycle counts, one table per engine.
uint64_t expected_for(EngineKind e, const std::string& r, uint64_t C,
                      uint64_t N, uint64_t s) {
  uint64_t h = C / 2;
  switch (e) {
  case EngineKind::Fsm:
    if (r == "read I/I" || r == "read I/S" || r == "write I/I") return 8 + h;
    if (r == "read I/E clean") return 10 + h;
    if (r == "read I/E dirty") return 9 + h + N;
    if (r == "read I/M" || r == "read I/O" || r == "read I/F") return 9 + h;
    if (r == "write I/S") return 8 + h + 2 * s;
    if (r == "write I/E" || r == "write I/M") return 9 + h;
    if (r == "write S/O" || r == "write S/F") return 9 + h + 2 * (s + 1);
    if (r == "read replace clean") return 10 + h;
    if (r == "read replace dirty") return 9 + h + N;
    return 9 + h + 2 * s; // remaining owner, upgrade rows
  case EngineKind::Ucode:
    if (r == "read excl I/I") return 12 + h;
    if (r == "read I/I" || r == "read I/S") return 26 + h;
    if (r == "read I/E clean") return 36 + h;
    if (r == "read I/E dirty") return 35 + h + N;
    if (r == "read I/M") return 32 + h;
    if (r == "read I/O" || r == "read I/F") return 27 + h;
    if (r == "write I/I") return 23 + h;
    if (r == "write I/S") return 24 + h + 2 * s;
    if (r == "write I/E" || r == "write I/M") return 27 + h;
    if (r == "write I/O" || r == "write I/F") return 28 + h + 2 * s;
    if (r == "write S/O" || r == "write S/F") return 30 + h + 2 * s;
    if (r == "read replace clean") return 33 + h;
    if (r == "read replace dirty") return 32 + h + N;
    return 24 + h + 2 * s; // write S/S, write O/O, write F/F
  case EngineKind::Hybrid:
    if (r == "read I/I" || r == "read I/S" || r == "write I/I") return 8 + h;
    if (r == "read I/E clean" || r == "read I/E dirty") return 10 + h;
    if (r == "read I/M" || r == "read I/O" || r == "read I/F") return 9 + h;
    if (r == "write I/S") return 8 + h + 2 * s;
    if (r == "write I/E" || r == "write I/M") return 9 + h;
    if (r == "write S/O" || r == "write S/F") return 9 + h + 2 * (s + 1);
    if (r == "read replace clean" || r == "read replace dirty") return 10 + h;
    return 9 + h + 2 * s; // remaining owner, upgrade rows
  }
  return 0;
}

} // namespace

std::vector<OccupancyRow> occupancy_report(const OccupancyConfig& cfg) {
  std::vector<OccupancyRow> out;
  const uint64_t a = 0x1000;
  const uint64_t lru_block = a + 64ull * 64; // same set, different tag
  for (const RowSpec& spec : row_specs(cfg.engine)) {
    Bench b(cfg.engine, cfg.caches, cfg.beats);
    uint32_t first_sharer = spec.owner != St::I ? 2 : 1;
    uint32_t seats = cfg.caches - first_sharer;
    uint32_t s = spec.sharers >= 0 ? uint32_t(spec.sharers) : cfg.sharers;
    s = std::max(uint32_t(spec.min_sharers), std::min(s, seats));

    if (spec.self != St::I) {
      b.cce->dir().write_entry(0, a, 5, spec.self);
      b.lces[0].dirty = state_properties(spec.self).dirty;
    }
    if (spec.owner != St::I) {
      b.cce->dir().write_entry(1, a, 2, spec.owner);
      b.lces[1].dirty = spec.owner_dirty < 0
                            ? state_properties(spec.owner).dirty
                            : spec.owner_dirty != 0;
    }
    for (uint32_t l = first_sharer; l < first_sharer + s; ++l)
      b.cce->dir().write_entry(l, a, 0, St::S);
    if (spec.evict != St::I) {
      b.cce->dir().write_entry(0, lru_block, 3, spec.evict);
      b.lces[0].dirty = state_properties(spec.evict).dirty;
    }

    OccupancyRow row;
    row.name = spec.name;
    row.sharers = s;
    row.expected = expected_for(cfg.engine, row.name, cfg.caches, cfg.beats, s);
    row.measured = b.run_one(spec.req, a, spec.lru_way);
    row.match = row.measured == row.expected;
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<OccupancyRow> lce_occupancy_report(uint32_t beats) {
  const uint64_t N = beats;
  std::vector<OccupancyRow> out;
  auto req = [&](const char* name, CoreOp::Kind k, uint64_t want) {
    out.push_back({name, 0, want, lce_request_occupancy(k, beats), false});
  };
  auto cmd = [&](const char* name, CmdType c, bool dirty, uint64_t want) {
    out.push_back(
        {name, 0, want, lce_command_occupancy(c, dirty, beats), false});
  };
  req("req load", CoreOp::Kind::Load, 2 + N);
  req("req store", CoreOp::Kind::Store, 2 + N);
  req("req ucload", CoreOp::Kind::UcLoad, 2 + N);
  req("req ucamo", CoreOp::Kind::UcAmo, 2 + N);
  req("req ucstore", CoreOp::Kind::UcStore, 1);
  cmd("cmd Sync", CmdType::Sync, false, 1);
  cmd("cmd SetClear", CmdType::SetClear, false, 1);
  cmd("cmd ST", CmdType::ST, false, 1);
  cmd("cmd STW", CmdType::STW, false, 2);
  cmd("cmd INV", CmdType::INV, false, 1);
  cmd("cmd WB clean", CmdType::WB, false, 2);
  cmd("cmd WB dirty", CmdType::WB, true, 2 + N);
  cmd("cmd ST_WB clean", CmdType::ST_WB, false, 2);
  cmd("cmd ST_WB dirty", CmdType::ST_WB, true, 2 + N);
  cmd("cmd DATA", CmdType::DATA, false, 1 + N);
  cmd("cmd TR", CmdType::TR, false, 1 + N);
  cmd("cmd ST_TR", CmdType::ST_TR, false, 1 + N);
  cmd("cmd ST_TR_WB clean", CmdType::ST_TR_WB, false, 2 + N);
  cmd("cmd ST_TR_WB dirty", CmdType::ST_TR_WB, true, 2 + 2 * N);
  cmd("cmd UcData", CmdType::UcData, false, 1);
  cmd("cmd UcStoreDone", CmdType::UcStoreDone, false, 1);
  for (OccupancyRow& r : out) r.match = r.measured == r.expected;
  return out;
}

} // namespace bedrock
