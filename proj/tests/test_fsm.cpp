#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bedrock/fsm_cce.hpp"

using namespace bedrock;

namespace {

// Scripted cache endpoints that answer every command the way a correct
// LCE would, so engine occupancy can be measured in isolation.
struct FakeLce {
  uint32_t id = 0;
  Network* cmdn = nullptr;
  Network* filln = nullptr;
  Network* respn = nullptr;
  uint32_t cce_ep = 0;
  bool dirty = false;
  BlockData data;
  uint64_t coh_acks = 0;

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
    case CmdType::STW:
      ++coh_acks;
      reply(RspType::CohAck, m.addr, t);
      return;
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

struct Rig {
  NetworkConfig nc;
  Network req, cmd, fill, resp;
  Memory mem;
  CceConfig cc;
  FsmCce cce;
  std::vector<FakeLce> lces;

  Rig(uint32_t caches, uint32_t beats, Variant v = Variant::MOESIF)
      : nc(make_nc()), req(MsgClass::Request, nc), cmd(MsgClass::Command, nc),
        fill(MsgClass::Fill, nc), resp(MsgClass::Response, nc),
        mem(MemConfig{10, 64}), cc(make_cc(caches, beats, v)),
        cce(cc, ProtocolTables::standard(), &req, &cmd, &fill, &resp, &mem) {
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
  static CceConfig make_cc(uint32_t caches, uint32_t beats, Variant v) {
    CceConfig c;
    c.num_lce = caches;
    c.variant = v;
    c.fill_width = 512 / beats;
    return c;
  }

  void send_req(ReqType t, uint32_t lce, uint64_t addr, uint32_t lru_way,
                uint64_t now) {
    Message m;
    m.req = t;
    m.addr = addr;
    m.lru_way = lru_way;
    m.size = 8;
    if (t == ReqType::UcStore || t == ReqType::UcAmo) {
      m.has_data = true;
      m.data.assign(1, WordToken{lce, 99});
    }
    req.send(lce, cc.endpoint(), std::move(m), now);
  }

  void run(uint64_t cycles, uint64_t start = 0) {
    for (uint64_t t = start; t < start + cycles; ++t) {
      cce.step(t);
      for (auto& l : lces) l.step(t);
    }
  }

  bool settled() const {
    return req.empty() && cmd.empty() && fill.empty() && resp.empty() &&
           mem.empty();
  }
};

// Run one preloaded request to completion and return the charged cycles.
uint64_t occupancy(Rig& rig, ReqType t, uint32_t lce, uint64_t addr,
                   uint32_t lru_way = 0) {
  rig.send_req(t, lce, addr, lru_way, 0);
  rig.run(300);
  REQUIRE(rig.cce.stats().occupancy_log.size() == 1);
  REQUIRE(rig.settled());
  REQUIRE(!rig.cce.pending().pending(uint32_t(addr / 64) % 64));
  return rig.cce.stats().occupancy_log[0];
}

} // namespace

TEST_CASE("read occupancies by directory state") {
  const uint32_t C = 8, N = 4;
  uint64_t a = 0x1000;

  SUBCASE("miss everywhere: block from memory") {
    Rig rig(C, N);
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 8 + C / 2);
    // The granted state reaches the directory (exclusive on a silent miss).
    CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::E);
    CHECK(rig.lces[0].coh_acks == 1);
    CHECK(rig.cce.stats().mem_busy == N); // forwarded read response
  }
  SUBCASE("shared at others: block from memory") {
    Rig rig(C, N);
    for (uint32_t l : {1u, 2u, 3u}) rig.cce.dir().write_entry(l, a, 0, St::S);
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 8 + C / 2);
    CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::S);
  }
  SUBCASE("owned E clean: transfer with null writeback") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(1, a, 2, St::E);
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 10 + C / 2);
    CHECK(rig.cce.dir().read_entry(1, a, 2).state == St::F);
    CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::S);
  }
  SUBCASE("owned E dirty: transfer with writeback") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(1, a, 2, St::E);
    rig.lces[1].dirty = true;
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 9 + C / 2 + N);
  }
  SUBCASE("owned M, O, F: transfer only") {
    for (St st : {St::M, St::O, St::F}) {
      Rig rig(C, N);
      rig.cce.dir().write_entry(1, a, 2, st);
      rig.lces[1].dirty = state_properties(st).dirty;
      CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 9 + C / 2);
    }
  }
}

TEST_CASE("write occupancies by directory state") {
  const uint32_t C = 8, N = 4, S = 3;
  uint64_t a = 0x2000;

  SUBCASE("miss everywhere") {
    Rig rig(C, N);
    CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 8 + C / 2);
    CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::M);
  }
  SUBCASE("shared: invalidate all sharers, block from memory") {
    Rig rig(C, N);
    for (uint32_t l = 1; l <= S; ++l) rig.cce.dir().write_entry(l, a, 0, St::S);
    CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 8 + C / 2 + 2 * S);
    for (uint32_t l = 1; l <= S; ++l)
      CHECK(rig.cce.dir().read_entry(l, a, 0).state == St::I);
    CHECK(rig.cce.stats().invalidations == S);
  }
  SUBCASE("owned E or M: transfer") {
    for (St st : {St::E, St::M}) {
      Rig rig(C, N);
      rig.cce.dir().write_entry(1, a, 2, st);
      rig.lces[1].dirty = state_properties(st).dirty;
      CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 9 + C / 2);
      CHECK(rig.cce.dir().read_entry(1, a, 2).state == St::I);
      CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::M);
    }
  }
  SUBCASE("owned O or F with sharers: invalidate and transfer") {
    for (St st : {St::O, St::F}) {
      Rig rig(C, N);
      rig.cce.dir().write_entry(1, a, 2, st);
      rig.lces[1].dirty = state_properties(st).dirty;
      for (uint32_t l = 2; l < 2 + S; ++l)
        rig.cce.dir().write_entry(l, a, 0, St::S);
      CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 9 + C / 2 + 2 * S);
    }
  }
}

TEST_CASE("upgrade occupancies") {
  const uint32_t C = 8, N = 4;
  uint64_t a = 0x3000;

  SUBCASE("writer shares with others") {
    // Three sharers total; the requestor keeps its copy.
    Rig rig(C, N);
    rig.cce.dir().write_entry(0, a, 5, St::S);
    rig.cce.dir().write_entry(1, a, 0, St::S);
    rig.cce.dir().write_entry(2, a, 0, St::S);
    CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 9 + C / 2 + 2 * 2);
    CHECK(rig.cce.dir().read_entry(0, a, 5).state == St::M);
    CHECK(rig.cce.stats().upgrades == 1);
    CHECK(rig.cce.stats().invalidations == 2);
  }
  SUBCASE("writer shares while another cache owns") {
    // Owner in O plus one more sharer: both are invalidated.
    Rig rig(C, N);
    rig.cce.dir().write_entry(0, a, 5, St::S);
    rig.cce.dir().write_entry(1, a, 2, St::O);
    rig.lces[1].dirty = true;
    rig.cce.dir().write_entry(2, a, 0, St::S);
    CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 9 + C / 2 + 2 * 2);
    CHECK(rig.cce.dir().read_entry(1, a, 2).state == St::I);
    CHECK(rig.cce.dir().read_entry(0, a, 5).state == St::M);
  }
  SUBCASE("writer owns in O or F with sharers") {
    for (St st : {St::O, St::F}) {
      Rig rig(C, N);
      rig.cce.dir().write_entry(0, a, 5, st);
      rig.lces[0].dirty = state_properties(st).dirty;
      for (uint32_t l : {1u, 2u, 3u}) rig.cce.dir().write_entry(l, a, 0, St::S);
      CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 9 + C / 2 + 2 * 3);
      CHECK(rig.cce.dir().read_entry(0, a, 5).state == St::M);
    }
  }
}

TEST_CASE("replacement adds two cycles clean and one plus data dirty") {
  const uint32_t C = 8, N = 4;
  uint64_t a = 0x4000;
  uint64_t lru_block = a + 64 * 64; // same set, different tag

  SUBCASE("clean eviction") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(0, lru_block, 3, St::E);
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a, 3) == 8 + C / 2 + 2);
    // The way now tracks the newly requested block.
    CHECK(rig.cce.dir().read_entry(0, lru_block, 3).tag ==
          rig.cce.dir().tag_of(a));
    CHECK(rig.cce.stats().replacements == 1);
  }
  SUBCASE("dirty eviction") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(0, lru_block, 3, St::M);
    rig.lces[0].dirty = true;
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a, 3) == 8 + C / 2 + 1 + N);
    // The dirty block was forwarded to memory.
    CHECK(rig.mem.block(lru_block)[0] == WordToken{0, 1});
  }
}

TEST_CASE("occupancy scales with cores and beats") {
  uint64_t a = 0x5000;
  for (uint32_t C : {2u, 4u, 8u, 16u}) {
    for (uint32_t N : {1u, 2u, 4u, 8u}) {
      Rig rig(C, N);
      rig.cce.dir().write_entry(1, a, 2, St::E);
      rig.lces[1].dirty = true;
      CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 9 + C / 2 + N);
    }
  }
}

TEST_CASE("same way group requests serialize on the pending bits") {
  Rig rig(4, 1);
  uint64_t a = 0x1000, b = a + 64 * 64; // same way group
  rig.send_req(ReqType::ReqRd, 0, a, 0, 0);
  rig.send_req(ReqType::ReqRd, 1, b, 0, 0);
  rig.run(300);
  CHECK(rig.cce.stats().occupancy_log.size() == 2);
  CHECK(rig.settled());
  CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::E);
  CHECK(rig.cce.dir().read_entry(1, b, 0).state == St::E);
}

TEST_CASE("uncached requests to uncacheable memory bypass the protocol") {
  Rig rig(2, 1);
  uint64_t ua = (1ull << 39) + 0x120; // word 4 of its block
  rig.send_req(ReqType::UcStore, 0, ua, 0, 0);
  rig.run(100);
  CHECK(rig.settled());
  CHECK(rig.mem.block(ua)[4] == WordToken{0, 99});
  CHECK(rig.cce.stats().occupancy_log.empty()); // outside the coherent path

  rig.send_req(ReqType::UcLoad, 1, ua, 0, 100);
  rig.run(100, 100);
  CHECK(rig.settled());
}

TEST_CASE("uncached store to cacheable memory evicts the owner first") {
  Rig rig(4, 1);
  uint64_t a = 0x6000;
  rig.cce.dir().write_entry(1, a, 2, St::M);
  rig.lces[1].dirty = true;
  rig.send_req(ReqType::UcStore, 0, a + 0x20, 0, 0); // word 4
  rig.run(300);
  CHECK(rig.settled());
  CHECK(rig.cce.dir().read_entry(1, a, 2).state == St::I);
  // Writeback landed, then the uncached store overwrote one word.
  CHECK(rig.mem.block(a)[4] == WordToken{0, 99});
  CHECK(rig.mem.block(a)[0] == WordToken{1, 1});
}

TEST_CASE("mesi variant uses writeback transfers from m") {
  Rig rig(8, 2, Variant::MESI);
  uint64_t a = 0x7000;
  rig.cce.dir().write_entry(1, a, 2, St::M);
  rig.lces[1].dirty = true;
  // M -> ST^S-TR^S-WB: transfer plus dirty writeback sink.
  CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 9 + 8 / 2 + 2);
  CHECK(rig.cce.dir().read_entry(1, a, 2).state == St::S);
  CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::S);
}
