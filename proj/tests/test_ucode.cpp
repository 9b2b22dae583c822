#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "bedrock/fsm_cce.hpp"
#include "bedrock/ucode/assembler.hpp"
#include "bedrock/ucode/interp.hpp"
#include "bedrock/ucode/programs.hpp"

using namespace bedrock;
using namespace bedrock::ucode;

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

template <class Engine> struct RigT {
  NetworkConfig nc;
  Network req, cmd, fill, resp;
  Memory mem;
  CceConfig cc;
  Engine cce;
  std::vector<FakeLce> lces;

  template <class... Extra>
  RigT(uint32_t caches, uint32_t beats, Variant v, Extra&&... extra)
      : nc(make_nc()), req(MsgClass::Request, nc), cmd(MsgClass::Command, nc),
        fill(MsgClass::Fill, nc), resp(MsgClass::Response, nc),
        mem(MemConfig{10, 64}), cc(make_cc(caches, beats, v)),
        cce(cc, std::forward<Extra>(extra)..., &req, &cmd, &fill, &resp,
            &mem) {
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

struct Rig : RigT<UcodeCce> {
  Rig(uint32_t caches, uint32_t beats, Variant v = Variant::MOESIF,
      UcodeOptions opts = {})
      : RigT<UcodeCce>(caches, beats, v,
                       v == Variant::MESI ? mesi_program() : moesif_program(),
                       opts) {}
};

// Run one preloaded request to completion and return the charged cycles.
uint64_t occupancy(Rig& rig, ReqType t, uint32_t lce, uint64_t addr,
                   uint32_t lru_way = 0) {
  rig.send_req(t, lce, addr, lru_way, 0);
  rig.run(400);
  REQUIRE(rig.cce.stats().occupancy_log.size() == 1);
  REQUIRE(rig.settled());
  REQUIRE(!rig.cce.pending().pending(uint32_t(addr / 64) % 64));
  return rig.cce.stats().occupancy_log[0];
}

} // namespace

// ---------------------------------------------------------------------------
// Assembler
// ---------------------------------------------------------------------------

TEST_CASE("pseudo operations expand to base instructions") {
  SUBCASE("inc and dec") {
    auto p = assemble("inc r3\ndec r5");
    REQUIRE(p.code.size() == 2);
    CHECK(p.code[0].op == Op::Addi);
    CHECK(p.code[0].ra == 3);
    CHECK(p.code[0].imm == 1);
    CHECK(p.code[0].rd == 3);
    CHECK(p.code[1].op == Op::Subi);
    CHECK(p.code[1].imm == 1);
  }
  SUBCASE("nop is an add through r0") {
    auto p = assemble("nop");
    CHECK(p.code[0].op == Op::Add);
    CHECK(p.code[0].ra == 0);
    CHECK(p.code[0].rb == 0);
    CHECK(p.code[0].rd == 0);
  }
  SUBCASE("bi is an always-taken branch") {
    auto p = assemble("loop: nop\nbi loop");
    CHECK(p.code[1].op == Op::Beq);
    CHECK(p.code[1].ra == 0);
    CHECK(p.code[1].rb == 0);
    CHECK(p.code[1].target == 0);
    CHECK(p.code[1].predict);
  }
  SUBCASE("bz and bnz compare against zero") {
    auto p = assemble("done: bz r1 done\nbnz r2 done [pt]");
    CHECK(p.code[0].op == Op::Beqi);
    CHECK(p.code[0].imm == 0);
    CHECK(!p.code[0].predict);
    CHECK(p.code[1].op == Op::Bneqi);
    CHECK(p.code[1].predict);
  }
  SUBCASE("bgt and bge swap their operands") {
    auto p = assemble("t: bgt r1 r2 t\nbge r3 r4 t");
    CHECK(p.code[0].op == Op::Blt);
    CHECK(p.code[0].ra == 2);
    CHECK(p.code[0].rb == 1);
    CHECK(p.code[1].op == Op::Ble);
    CHECK(p.code[1].ra == 4);
    CHECK(p.code[1].rb == 3);
  }
  SUBCASE("clf clears the flag register") {
    auto p = assemble("clf");
    CHECK(p.code[0].op == Op::Ldflagsi);
    CHECK(p.code[0].imm == 0);
  }
}

TEST_CASE("assembler rejects malformed sources") {
  CHECK_THROWS_AS(assemble("frobnicate r1 r2 r3"), UnknownMnemonic);
  CHECK_THROWS_AS(assemble("beq r1 r2"), OperandArity);
  CHECK_THROWS_AS(assemble("addi r1 r2 r3 r4"), OperandArity);
  CHECK_THROWS_AS(assemble("bi nowhere"), UndefinedLabel);
}

TEST_CASE("comments labels and predict bits parse") {
  auto p = assemble("# header comment\n"
                    "start:  wfq lce_req   # wait\n"
                    "        popq lce_req wp\n"
                    "        bf start pf [pt]\n");
  REQUIRE(p.code.size() == 3);
  CHECK(p.code[0].op == Op::Wfq);
  CHECK(p.code[1].op == Op::Popq);
  CHECK(p.code[1].wp);
  CHECK(p.code[2].op == Op::Bf);
  CHECK(p.code[2].target == 0);
  CHECK(p.code[2].predict);
}

TEST_CASE("assembly round trips through the disassembler") {
  for (const MicrocodeProgram& p : {moesif_program(), mesi_program()}) {
    MicrocodeProgram again = assemble(disassemble(p));
    CHECK(again == p);
    // And a second trip is a fixed point.
    CHECK(assemble(disassemble(again)) == again);
  }
}

TEST_CASE("shipped programs stay compact") {
  // The hand-written controller fits in a small microcode store.
  CHECK(moesif_program().code.size() <= 125);
  CHECK(mesi_program().code.size() <= 125);
  MESSAGE("moesif program length: " << moesif_program().code.size());
}

// ---------------------------------------------------------------------------
// Flag branches
// ---------------------------------------------------------------------------

TEST_CASE("flag branch predicates over every mask and flag subset") {
  for (uint32_t mask = 1; mask < 256; ++mask) {
    for (uint32_t fl = 0; fl < 256; ++fl) {
      bool all = (fl & mask) == mask;
      bool none = (fl & mask) == 0;
      CHECK(flag_branch_taken(Op::Bf, mask, fl) == all);
      CHECK(flag_branch_taken(Op::Bfnot, mask, fl) == none);
      CHECK(flag_branch_taken(Op::Bfz, mask, fl) == !none);
      CHECK(flag_branch_taken(Op::Bfnz, mask, fl) == !all);
    }
  }
}

// ---------------------------------------------------------------------------
// Interpreter micro-behavior
// ---------------------------------------------------------------------------

TEST_CASE("alu programs compute into the register file") {
  auto p = assemble("movi 5 r1\n"
                    "addi r1 3 r2\n"
                    "lshi r2 2 r3\n"
                    "subi r3 1 r4\n"
                    "xor r3 r4 r5\n"
                    "park: wfq lce_req\n");
  Rig rig(2, 1);
  UcodeCce eng(rig.cc, p, &rig.req, &rig.cmd, &rig.fill, &rig.resp, &rig.mem);
  for (uint64_t t = 0; t < 20; ++t) eng.step(t);
  CHECK(eng.reg(1) == 5);
  CHECK(eng.reg(2) == 8);
  CHECK(eng.reg(3) == 32);
  CHECK(eng.reg(4) == 31);
  CHECK(eng.reg(5) == (32 ^ 31));
}

TEST_CASE("directory way group read costs one plus half the caches") {
  auto p = assemble("start: wfq lce_req\n"
                    "popq lce_req\n"
                    "rdw addr=req lce=req lru_way=req\n"
                    "gad\n"
                    "bi start\n");
  const uint32_t C = 8;
  Rig rig(C, 1);
  UcodeCce eng(rig.cc, p, &rig.req, &rig.cmd, &rig.fill, &rig.resp, &rig.mem);
  rig.send_req(ReqType::ReqRd, 0, 0x1000, 0, 0);
  for (uint64_t t = 0; t < 40; ++t) eng.step(t);
  REQUIRE(eng.stats().occupancy_log.size() == 1);
  // wfq + popq + rdw(1 + C/2) + gad + branch.
  CHECK(eng.stats().occupancy_log[0] == 4 + 1 + C / 2);
  CHECK(eng.ucode_stats().retired == 5);
}

TEST_CASE("a mispredicted branch costs one bubble") {
  auto p = assemble("start: wfq lce_req\n"
                    "popq lce_req\n"
                    "beqi r0 0 taken\n"
                    "nop\n"
                    "taken: bi start\n");
  Rig rig(2, 1);
  UcodeCce eng(rig.cc, p, &rig.req, &rig.cmd, &rig.fill, &rig.resp, &rig.mem);
  rig.send_req(ReqType::ReqRd, 0, 0x1000, 0, 0);
  for (uint64_t t = 0; t < 40; ++t) eng.step(t);
  REQUIRE(eng.stats().occupancy_log.size() == 1);
  // wfq + popq + beqi + bubble + bi (the nop is skipped).
  CHECK(eng.stats().occupancy_log[0] == 5);
  CHECK(eng.ucode_stats().mispredicts == 1);
  CHECK(eng.ucode_stats().retired == 4);
}

TEST_CASE("pipeline accounting identity holds after a full transaction") {
  const uint32_t C = 8, S = 3;
  uint64_t a = 0x2000;
  Rig rig(C, 4);
  for (uint32_t l = 1; l <= S; ++l) rig.cce.dir().write_entry(l, a, 0, St::S);
  occupancy(rig, ReqType::ReqWr, 0, a);
  const UcodeStats& u = rig.cce.ucode_stats();
  CHECK(u.busy_cycles == u.retired + u.extra_cycles + u.mispredicts);
  CHECK(u.retired > 0);
  CHECK(u.mispredicts > 0);
}

// ---------------------------------------------------------------------------
// Request occupancies (microcode engine, MOESIF)
// ---------------------------------------------------------------------------

TEST_CASE("ucode read occupancies by directory state") {
  const uint32_t C = 8, N = 4;
  uint64_t a = 0x1000;

  SUBCASE("fast path: exclusive read misses everywhere") {
    Rig rig(C, N);
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 12 + C / 2);
    CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::E);
    CHECK(rig.lces[0].coh_acks == 1);
    // Four cycles over the fixed-function engine's same row.
    CHECK(12 + C / 2 == (8 + C / 2) + 4);
  }
  SUBCASE("non-exclusive read misses everywhere") {
    Rig rig(C, N);
    CHECK(occupancy(rig, ReqType::ReqRdNE, 0, a) == 26 + C / 2);
    CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::S);
  }
  SUBCASE("shared at others") {
    Rig rig(C, N);
    for (uint32_t l : {1u, 2u, 3u}) rig.cce.dir().write_entry(l, a, 0, St::S);
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 26 + C / 2);
    CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::S);
  }
  SUBCASE("owned E clean: transfer with null writeback") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(1, a, 2, St::E);
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 36 + C / 2);
    CHECK(rig.cce.dir().read_entry(1, a, 2).state == St::F);
    CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::S);
  }
  SUBCASE("owned E dirty: transfer with writeback") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(1, a, 2, St::E);
    rig.lces[1].dirty = true;
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 35 + C / 2 + N);
    // The dirty block was forwarded to memory.
    CHECK(rig.mem.block(a)[0] == WordToken{1, 1});
  }
  SUBCASE("owned M: demote to O and transfer") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(1, a, 2, St::M);
    rig.lces[1].dirty = true;
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 32 + C / 2);
    CHECK(rig.cce.dir().read_entry(1, a, 2).state == St::O);
  }
  SUBCASE("owned O or F: transfer only") {
    for (St st : {St::O, St::F}) {
      Rig rig(C, N);
      rig.cce.dir().write_entry(1, a, 2, st);
      rig.lces[1].dirty = state_properties(st).dirty;
      CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 27 + C / 2);
      CHECK(rig.cce.dir().read_entry(1, a, 2).state == st);
    }
  }
}

TEST_CASE("ucode write occupancies by directory state") {
  const uint32_t C = 8, N = 4, S = 3;
  uint64_t a = 0x2000;

  SUBCASE("miss everywhere") {
    Rig rig(C, N);
    CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 23 + C / 2);
    CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::M);
  }
  SUBCASE("shared: invalidate all sharers") {
    Rig rig(C, N);
    for (uint32_t l = 1; l <= S; ++l) rig.cce.dir().write_entry(l, a, 0, St::S);
    CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 24 + C / 2 + 2 * S);
    for (uint32_t l = 1; l <= S; ++l)
      CHECK(rig.cce.dir().read_entry(l, a, 0).state == St::I);
    CHECK(rig.cce.stats().invalidations == S);
  }
  SUBCASE("owned E or M: transfer") {
    for (St st : {St::E, St::M}) {
      Rig rig(C, N);
      rig.cce.dir().write_entry(1, a, 2, st);
      rig.lces[1].dirty = state_properties(st).dirty;
      CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 27 + C / 2);
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
      CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 28 + C / 2 + 2 * S);
    }
  }
  SUBCASE("owned O with no sharers still routes through the invalidator") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(1, a, 2, St::O);
    rig.lces[1].dirty = true;
    CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 28 + C / 2);
  }
}

TEST_CASE("ucode upgrade occupancies") {
  const uint32_t C = 8, N = 4;
  uint64_t a = 0x3000;

  SUBCASE("writer shares with others") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(0, a, 5, St::S);
    rig.cce.dir().write_entry(1, a, 0, St::S);
    rig.cce.dir().write_entry(2, a, 0, St::S);
    CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 24 + C / 2 + 2 * 2);
    CHECK(rig.cce.dir().read_entry(0, a, 5).state == St::M);
    CHECK(rig.cce.stats().invalidations == 2);
  }
  SUBCASE("writer is the only sharer") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(0, a, 5, St::S);
    CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 24 + C / 2);
    CHECK(rig.cce.dir().read_entry(0, a, 5).state == St::M);
  }
  SUBCASE("writer shares while another cache owns in O or F") {
    for (St st : {St::O, St::F}) {
      Rig rig(C, N);
      rig.cce.dir().write_entry(0, a, 5, St::S);
      rig.cce.dir().write_entry(1, a, 2, st);
      rig.lces[1].dirty = state_properties(st).dirty;
      rig.cce.dir().write_entry(2, a, 0, St::S);
      // Two caches hold the line in S, so one sharer besides the writer.
      CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 30 + C / 2 + 2 * 1);
      CHECK(rig.cce.dir().read_entry(1, a, 2).state == St::I);
      CHECK(rig.cce.dir().read_entry(0, a, 5).state == St::M);
    }
  }
  SUBCASE("writer owns in O or F with sharers") {
    for (St st : {St::O, St::F}) {
      Rig rig(C, N);
      rig.cce.dir().write_entry(0, a, 5, st);
      rig.lces[0].dirty = state_properties(st).dirty;
      for (uint32_t l : {1u, 2u, 3u}) rig.cce.dir().write_entry(l, a, 0, St::S);
      CHECK(occupancy(rig, ReqType::ReqWr, 0, a) == 24 + C / 2 + 2 * 3);
      CHECK(rig.cce.dir().read_entry(0, a, 5).state == St::M);
    }
  }
}

TEST_CASE("ucode replacement adds seven clean or six plus data dirty") {
  const uint32_t C = 8, N = 4;
  uint64_t a = 0x4000;
  uint64_t lru_block = a + 64 * 64; // same set, different tag

  SUBCASE("clean eviction on a shared read") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(1, a, 0, St::S);
    rig.cce.dir().write_entry(0, lru_block, 3, St::E);
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a, 3) == (26 + C / 2) + 7);
    CHECK(rig.cce.dir().read_entry(0, lru_block, 3).tag ==
          rig.cce.dir().tag_of(a));
  }
  SUBCASE("dirty eviction on a shared read") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(1, a, 0, St::S);
    rig.cce.dir().write_entry(0, lru_block, 3, St::M);
    rig.lces[0].dirty = true;
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a, 3) == (26 + C / 2) + 6 + N);
    CHECK(rig.mem.block(lru_block)[0] == WordToken{0, 1});
  }
  SUBCASE("an otherwise fast read takes the slow path to evict") {
    Rig rig(C, N);
    rig.cce.dir().write_entry(0, lru_block, 3, St::E);
    CHECK(occupancy(rig, ReqType::ReqRd, 0, a, 3) == 31 + C / 2);
    CHECK(rig.cce.dir().read_entry(0, a, 3).state == St::E);
  }
}

TEST_CASE("ucode occupancy scales with cores and beats") {
  uint64_t a = 0x5000;
  for (uint32_t C : {2u, 4u, 8u, 16u}) {
    for (uint32_t N : {1u, 2u, 4u, 8u}) {
      Rig rig(C, N);
      rig.cce.dir().write_entry(1, a, 2, St::E);
      rig.lces[1].dirty = true;
      CHECK(occupancy(rig, ReqType::ReqRd, 0, a) == 35 + C / 2 + N);
    }
  }
}

TEST_CASE("ucode serializes same way group requests on the pending bits") {
  Rig rig(4, 1);
  uint64_t a = 0x1000, b = a + 64 * 64;
  rig.send_req(ReqType::ReqRd, 0, a, 0, 0);
  rig.send_req(ReqType::ReqRd, 1, b, 0, 0);
  rig.run(500);
  CHECK(rig.cce.stats().occupancy_log.size() == 2);
  CHECK(rig.settled());
  CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::E);
  CHECK(rig.cce.dir().read_entry(1, b, 0).state == St::E);
}

TEST_CASE("ucode uncached store to cacheable memory evicts the owner") {
  Rig rig(4, 1);
  uint64_t a = 0x6000;
  rig.cce.dir().write_entry(1, a, 2, St::M);
  rig.lces[1].dirty = true;
  rig.send_req(ReqType::UcStore, 0, a + 0x20, 0, 0); // word 4
  rig.run(400);
  CHECK(rig.settled());
  CHECK(rig.cce.dir().read_entry(1, a, 2).state == St::I);
  CHECK(rig.mem.block(a)[4] == WordToken{0, 99});
  CHECK(rig.mem.block(a)[0] == WordToken{1, 1});
  CHECK(rig.cce.stats().occupancy_log.empty()); // outside the coherent path
}

TEST_CASE("ucode uncached requests to uncacheable memory bypass the tables") {
  Rig rig(2, 1);
  uint64_t ua = (1ull << 39) + 0x120;
  rig.send_req(ReqType::UcStore, 0, ua, 0, 0);
  rig.run(200);
  CHECK(rig.settled());
  CHECK(rig.mem.block(ua)[4] == WordToken{0, 99});
  rig.send_req(ReqType::UcLoad, 1, ua, 0, 200);
  rig.run(200, 200);
  CHECK(rig.settled());
}

TEST_CASE("ucode mesi variant writes back on read transfers from m") {
  Rig rig(8, 2, Variant::MESI);
  uint64_t a = 0x7000;
  rig.cce.dir().write_entry(1, a, 2, St::M);
  rig.lces[1].dirty = true;
  CHECK(occupancy(rig, ReqType::ReqRd, 0, a) > 0);
  CHECK(rig.cce.dir().read_entry(1, a, 2).state == St::S);
  CHECK(rig.cce.dir().read_entry(0, a, 0).state == St::S);
  CHECK(rig.mem.block(a)[0] == WordToken{1, 1});
}

// ---------------------------------------------------------------------------
// Message unit
// ---------------------------------------------------------------------------

TEST_CASE("memory responses wait when auto forwarding is disabled") {
  Rig rig(2, 1);
  rig.cce.set_auto_fwd(false);
  rig.send_req(ReqType::ReqRd, 0, 0x1000, 0, 0);
  rig.run(80);
  // The speculative read response is parked in the memory queue, so the
  // requestor never sees its fill even though request processing finished.
  CHECK(!rig.mem.empty());
  CHECK(rig.cce.stats().occupancy_log.size() == 1);
  CHECK(rig.lces[0].coh_acks == 0);
  rig.cce.set_auto_fwd(true);
  rig.run(200, 80);
  CHECK(rig.settled());
  CHECK(rig.lces[0].coh_acks == 1);
}

TEST_CASE("uncached only mode forwards uncached and rejects coherent") {
  UcodeOptions opts;
  opts.start_uncached = true;
  Rig rig(2, 1, Variant::MOESIF, opts);
  uint64_t a = 0x1000;
  rig.send_req(ReqType::UcStore, 0, a + 0x20, 0, 0);
  rig.run(100);
  CHECK(rig.settled());
  CHECK(rig.mem.block(a)[4] == WordToken{0, 99});
  rig.send_req(ReqType::ReqRd, 1, a, 0, 100);
  CHECK_THROWS_AS(rig.run(100, 100), CoherentRequestInUncachedMode);
}

TEST_CASE("watchdog flags a stuck transaction") {
  // A request that waits forever on the response queue trips the watchdog.
  auto p = assemble("start: wfq lce_req\n"
                    "popq lce_req\n"
                    "wfq lce_resp\n"
                    "bi start\n");
  Rig rig(2, 1);
  UcodeOptions opts;
  opts.watchdog = 200;
  UcodeCce eng(rig.cc, p, &rig.req, &rig.cmd, &rig.fill, &rig.resp, &rig.mem,
               opts);
  rig.send_req(ReqType::ReqRd, 0, 0x1000, 0, 0);
  auto spin = [&] {
    for (uint64_t t = 0; t < 1000; ++t) eng.step(t);
  };
  CHECK_THROWS_AS(spin(), WfqDeadlock);
}

// ---------------------------------------------------------------------------
// Equivalence with the fixed-function engine
// ---------------------------------------------------------------------------

namespace {

std::string brief(const Message& m) {
  std::ostringstream os;
  os << to_string(m.cls) << ' ';
  switch (m.cls) {
  case MsgClass::Request: os << to_string(m.req); break;
  case MsgClass::Command: os << to_string(m.cmd); break;
  case MsgClass::Fill: os << to_string(m.cmd); break;
  case MsgClass::Response: os << to_string(m.rsp); break;
  }
  os << " src=" << m.src << " dst=" << m.dst << " addr=" << m.addr;
  if (m.cls == MsgClass::Command || m.cls == MsgClass::Fill)
    os << " st=" << to_string(m.set_state) << " xst=" << to_string(m.xfer_state);
  return os.str();
}

template <class R>
std::vector<std::string> trace(R& rig, ReqType t, uint32_t lce, uint64_t addr) {
  std::vector<std::string> log;
  auto tap = [&log](const Message& m) { log.push_back(brief(m)); };
  rig.req.on_send = tap;
  rig.cmd.on_send = tap;
  rig.fill.on_send = tap;
  rig.resp.on_send = tap;
  rig.send_req(t, lce, addr, 0, 0);
  rig.run(400);
  REQUIRE(rig.settled());
  std::sort(log.begin(), log.end());
  return log;
}

} // namespace

TEST_CASE("ucode and fsm engines emit identical message multisets") {
  const uint32_t C = 8, N = 4;
  uint64_t a = 0x9000;
  auto scenarios = {
      std::tuple{ReqType::ReqRd, St::I, false}, // miss everywhere
      std::tuple{ReqType::ReqRd, St::E, true},  // dirty transfer + wb
      std::tuple{ReqType::ReqRd, St::O, true},  // transfer only
      std::tuple{ReqType::ReqWr, St::S, false}, // invalidate sharers
      std::tuple{ReqType::ReqWr, St::M, true},  // write transfer
  };
  for (auto [t, st, dirty] : scenarios) {
    RigT<FsmCce> fr(C, N, Variant::MOESIF, ProtocolTables::standard());
    Rig ur(C, N);
    for (auto* d : {&fr.cce.dir(), &ur.cce.dir()}) {
      if (st == St::S)
        for (uint32_t l : {1u, 2u, 3u}) d->write_entry(l, a, 0, St::S);
      else if (st != St::I)
        d->write_entry(1, a, 2, st);
    }
    if (dirty) fr.lces[1].dirty = ur.lces[1].dirty = true;
    CHECK(trace(fr, t, 0, a) == trace(ur, t, 0, a));
  }
}
