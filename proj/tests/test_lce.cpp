#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bedrock/lce.hpp"

using namespace bedrock;

namespace {

// One LCE (id 0) wired to a single controller (id 1) with single-beat
// messages so network delays stay out of the occupancy checks.
struct Rig {
  NetworkConfig nc;
  Network req, cmd, fill, resp;
  LceConfig lc;
  uint64_t version = 0;
  Lce lce;

  Rig(uint32_t fill_width_bits = 512)
      : nc(make_nc()), req(MsgClass::Request, nc), cmd(MsgClass::Command, nc),
        fill(MsgClass::Fill, nc), resp(MsgClass::Response, nc),
        lc(make_lc(fill_width_bits)),
        lce(lc, ProtocolTables::standard(), &req, &cmd, &fill, &resp,
            &version) {}

  static NetworkConfig make_nc() {
    NetworkConfig c;
    c.min_latency = 0;
    c.data_channel_width = 512; // one beat per block
    return c;
  }
  static LceConfig make_lc(uint32_t fw) {
    LceConfig c;
    c.id = 0;
    c.cce_base = 1;
    c.fill_width = fw;
    return c;
  }

  // Push a command to the LCE and step until it has been consumed.
  void give(Message m, uint64_t& t, MsgClass via = MsgClass::Command) {
    (via == MsgClass::Command ? cmd : fill).send(1, 0, m, t);
    ++t;
    lce.step(t);
    t = std::max(t + 1, lce.busy_until());
  }

  Message data_cmd(uint64_t addr, St st, uint32_t way, WordToken tok) {
    Message m;
    m.cmd = CmdType::DATA;
    m.addr = addr;
    m.set_state = st;
    m.way = way;
    m.size = 64;
    m.has_data = true;
    m.data.assign(8, tok);
    return m;
  }

  // Complete a load miss for addr, granting st, and return the request seen.
  Message grant(uint64_t addr, St st, uint64_t& t) {
    CoreOp op{CoreOp::Kind::Load, addr, 8};
    REQUIRE(lce.try_start(op, t));
    ++t;
    Message r = req.deliver_one(1, t);
    give(data_cmd(addr, st, r.lru_way, WordToken{99, 1}), t);
    REQUIRE(lce.pop_completion());
    resp.deliver_one(1, t + 1); // drain the coherence ack
    return r;
  }
};

} // namespace

TEST_CASE("request and command occupancy formulas") {
  for (uint32_t n : {1u, 2u, 4u, 8u}) {
    CHECK(lce_request_occupancy(CoreOp::Kind::Load, n) == 2 + n);
    CHECK(lce_request_occupancy(CoreOp::Kind::Store, n) == 2 + n);
    CHECK(lce_request_occupancy(CoreOp::Kind::UcLoad, n) == 2 + n);
    CHECK(lce_request_occupancy(CoreOp::Kind::UcStore, n) == 1);
    CHECK(lce_request_occupancy(CoreOp::Kind::UcAmo, n) == 2 + n);

    CHECK(lce_command_occupancy(CmdType::Sync, false, n) == 1);
    CHECK(lce_command_occupancy(CmdType::SetClear, false, n) == 1);
    CHECK(lce_command_occupancy(CmdType::ST, false, n) == 1);
    CHECK(lce_command_occupancy(CmdType::STW, false, n) == 2);
    CHECK(lce_command_occupancy(CmdType::WB, false, n) == 2);
    CHECK(lce_command_occupancy(CmdType::WB, true, n) == 2 + n);
    CHECK(lce_command_occupancy(CmdType::ST_WB, false, n) == 2);
    CHECK(lce_command_occupancy(CmdType::ST_WB, true, n) == 2 + n);
    CHECK(lce_command_occupancy(CmdType::INV, false, n) == 1);
    CHECK(lce_command_occupancy(CmdType::DATA, false, n) == 1 + n);
    CHECK(lce_command_occupancy(CmdType::TR, false, n) == 1 + n);
    CHECK(lce_command_occupancy(CmdType::ST_TR, false, n) == 1 + n);
    CHECK(lce_command_occupancy(CmdType::ST_TR_WB, false, n) == 2 + n);
    CHECK(lce_command_occupancy(CmdType::ST_TR_WB, true, n) == 2 + 2 * n);
    CHECK(lce_command_occupancy(CmdType::UcData, false, n) == 1);
    CHECK(lce_command_occupancy(CmdType::UcStoreDone, false, n) == 1);
  }
}

TEST_CASE("load miss issues a read request and fills on data") {
  Rig rig;
  uint64_t t = 0;
  CoreOp op{CoreOp::Kind::Load, 0x1000, 8};
  REQUIRE(rig.lce.try_start(op, t));
  CHECK(!rig.lce.try_start(op, t)); // backoff while outstanding
  CHECK(rig.lce.stats().backoffs == 1);

  ++t;
  Message r = rig.req.deliver_one(1, t);
  CHECK(r.req == ReqType::ReqRd);
  CHECK(r.addr == 0x1000);
  CHECK(r.src == 0);

  uint64_t before = rig.lce.stats().busy_cycles;
  rig.give(rig.data_cmd(0x1000, St::S, r.lru_way, WordToken{7, 3}), t);
  CHECK(rig.lce.stats().busy_cycles - before == 2); // data: 1 + N, N = 1

  auto done = rig.lce.pop_completion();
  REQUIRE(done);
  CHECK(done->value == WordToken{7, 3});
  CHECK(rig.lce.cache().line(rig.lce.cache().set_of(0x1000), r.lru_way)
            .state == St::S);

  Message a = rig.resp.deliver_one(1, t + 1);
  CHECK(a.rsp == RspType::CohAck);
  CHECK(rig.lce.stats().misses == 1);
}

TEST_CASE("store to a shared block upgrades via set state and wakeup") {
  Rig rig;
  uint64_t t = 0;
  rig.grant(0x40, St::S, t);

  CoreOp st{CoreOp::Kind::Store, 0x40, 8};
  REQUIRE(rig.lce.try_start(st, t));
  ++t;
  Message r = rig.req.deliver_one(1, t);
  CHECK(r.req == ReqType::ReqWr);

  Message w;
  w.cmd = CmdType::STW;
  w.addr = 0x40;
  w.set_state = St::M;
  rig.give(w, t);
  auto done = rig.lce.pop_completion();
  REQUIRE(done);
  CHECK(rig.resp.deliver_one(1, t + 1).rsp == RspType::CohAck);

  uint32_t set = rig.lce.cache().set_of(0x40);
  int way = rig.lce.cache().lookup(0x40);
  REQUIRE(way >= 0);
  CHECK(rig.lce.cache().line(set, uint32_t(way)).state == St::M);
  CHECK(rig.lce.cache().line(set, uint32_t(way)).dirty);
  // The store landed as this writer's token.
  CHECK(rig.lce.cache().line(set, uint32_t(way)).data[0].writer == 0);
}

TEST_CASE("store hit in E upgrades silently with no messages") {
  Rig rig;
  uint64_t t = 0;
  rig.grant(0x80, St::E, t);

  CoreOp st{CoreOp::Kind::Store, 0x80, 8};
  REQUIRE(rig.lce.try_start(st, t));
  REQUIRE(rig.lce.pop_completion());
  CHECK(rig.req.empty());
  int way = rig.lce.cache().lookup(0x80);
  CHECK(rig.lce.cache().line(rig.lce.cache().set_of(0x80), uint32_t(way))
            .state == St::M);
  CHECK(rig.lce.stats().silent_upgrades == 1);
  CHECK(rig.lce.stats().hits == 1);
}

TEST_CASE("invalidate and writeback commands") {
  Rig rig;
  uint64_t t = 0;
  rig.grant(0xc0, St::S, t);

  SUBCASE("invalidate sends an ack and clears the block") {
    Message inv;
    inv.cmd = CmdType::INV;
    inv.addr = 0xc0;
    uint64_t before = rig.lce.stats().busy_cycles;
    rig.give(inv, t);
    CHECK(rig.lce.stats().busy_cycles - before == 1);
    CHECK(rig.resp.deliver_one(1, t + 1).rsp == RspType::InvAck);
    CHECK(rig.lce.cache().lookup(0xc0) < 0);
  }

  SUBCASE("clean writeback answers with a null response") {
    // Re-grant as E so the writeback row exists.
    Message inv;
    inv.cmd = CmdType::INV;
    inv.addr = 0xc0;
    rig.give(inv, t);
    rig.resp.deliver_one(1, t + 1);
    rig.grant(0xc0, St::E, t);

    Message wb;
    wb.cmd = CmdType::WB;
    wb.addr = 0xc0;
    uint64_t before = rig.lce.stats().busy_cycles;
    rig.give(wb, t);
    CHECK(rig.lce.stats().busy_cycles - before == 2);
    Message r = rig.resp.deliver_one(1, t + 1);
    CHECK(r.rsp == RspType::NullWB);
    CHECK(!r.has_data);
    // Block remains cached in E.
    int way = rig.lce.cache().lookup(0xc0);
    CHECK(rig.lce.cache().line(rig.lce.cache().set_of(0xc0), uint32_t(way))
              .state == St::E);
  }
}

TEST_CASE("compound set state, transfer, writeback is atomic and ordered") {
  Rig rig;
  uint64_t t = 0;
  rig.grant(0x140, St::E, t);
  CoreOp st{CoreOp::Kind::Store, 0x140, 8};
  REQUIRE(rig.lce.try_start(st, t)); // silent upgrade makes the block dirty
  REQUIRE(rig.lce.pop_completion());
  WordToken tok =
      rig.lce.cache()
          .line(rig.lce.cache().set_of(0x140),
                uint32_t(rig.lce.cache().lookup(0x140)))
          .data[0];

  Message c;
  c.cmd = CmdType::ST_TR_WB;
  c.addr = 0x140;
  c.set_state = St::S;
  c.xfer_state = St::S;
  c.xfer_target = 2;
  c.lru_way = 5;
  uint64_t before = rig.lce.stats().busy_cycles;
  rig.give(c, t);
  CHECK(rig.lce.stats().busy_cycles - before == 4); // 2 + 2N, N = 1

  // Transfer carries the freshly written token to LCE 2 at its fill way.
  Message xfer = rig.fill.deliver_one(2, t + 1);
  CHECK(xfer.cmd == CmdType::DATA);
  CHECK(xfer.set_state == St::S);
  CHECK(xfer.way == 5);
  CHECK(xfer.data[0] == tok);
  // Writeback carries the same data and the block drops to S, now clean.
  Message wb = rig.resp.deliver_one(1, t + 1);
  CHECK(wb.rsp == RspType::DirtyWB);
  CHECK(wb.data[0] == tok);
  int way = rig.lce.cache().lookup(0x140);
  const auto& line =
      rig.lce.cache().line(rig.lce.cache().set_of(0x140), uint32_t(way));
  CHECK(line.state == St::S);
  CHECK(!line.dirty);
}

TEST_CASE("uncached stores are credit limited and non blocking") {
  Rig rig;
  uint64_t t = 0;
  for (uint32_t i = 0; i < 4; ++i) {
    CoreOp op{CoreOp::Kind::UcStore, 0x2000 + 8 * i, 8};
    REQUIRE(rig.lce.try_start(op, t));
    REQUIRE(rig.lce.pop_completion()); // completes at issue
    t = rig.lce.busy_until();
  }
  CHECK(rig.lce.uc_credits() == 0);
  CoreOp op{CoreOp::Kind::UcStore, 0x3000, 8};
  CHECK(!rig.lce.try_start(op, t));

  Message done;
  done.cmd = CmdType::UcStoreDone;
  done.addr = 0x2000;
  rig.give(done, t);
  CHECK(rig.lce.uc_credits() == 1);
  CHECK(rig.lce.try_start(op, t));
  // Four requests with data are sitting on the request network.
  CHECK(rig.req.in_flight() == 5);
}

TEST_CASE("sync and set clear") {
  Rig rig;
  uint64_t t = 0;
  rig.grant(0x180, St::S, t);

  Message sync;
  sync.cmd = CmdType::Sync;
  rig.give(sync, t);
  CHECK(rig.lce.sync_count() == 1);
  CHECK(rig.resp.deliver_one(1, t + 1).rsp == RspType::SyncAck);

  Message clr;
  clr.cmd = CmdType::SetClear;
  clr.addr = 0x180;
  rig.give(clr, t);
  CHECK(rig.lce.cache().lookup(0x180) < 0);
}

TEST_CASE("multi beat fills charge the extra cycles") {
  Rig rig(64); // fill width 64 bits -> N = 8
  uint64_t t = 0;
  CoreOp op{CoreOp::Kind::Load, 0x200, 8};
  REQUIRE(rig.lce.try_start(op, t));
  ++t;
  Message r = rig.req.deliver_one(1, t);
  uint64_t before = rig.lce.stats().busy_cycles;
  rig.give(rig.data_cmd(0x200, St::S, r.lru_way, WordToken{1, 1}), t);
  CHECK(rig.lce.stats().busy_cycles - before == 1 + 8);
}
