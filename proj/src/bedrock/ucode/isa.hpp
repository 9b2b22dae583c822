#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bedrock/memory.hpp"
#include "bedrock/messages.hpp"
#include "bedrock/states.hpp"

namespace bedrock::ucode {

// Hardware opcodes.  Pseudo instructions are expanded by the assembler and
// never reach the decode stage.
enum class Op : uint8_t {
  // ALU
  Add, Addi, Sub, Subi, Not, Lsh, Lshi, Rsh, Rshi, And, Or, Xor, Neg,
  // Branches over registers and special registers
  Beq, Bne, Blt, Ble, Beqi, Bneqi, Bs, Bsi,
  // Branches over MSHR flags
  Bf, Bfnot, Bfz, Bfnz,
  // Data movement
  Mov, Movi, Movsg, Movgs, Movis, Clm, Ldflags, Ldflagsi,
  // Flag ALU
  Sf, Sfz, Andf, Orf, Nandf, Norf, Notf,
  // Directory
  Rdp, Rdw, Rde, Wdp, Clp, Clr, Wde, Wds, Gad,
  // Queues and message unit
  Wfq, Pushq, Popq, Poph, Specq, Inv
};

// MSHR flag bits, one per digested request property.
enum Flag : uint32_t {
  FlWrite = 1u << 0,       // rqf: store-type request
  FlUncached = 1u << 1,    // ucf
  FlNonExcl = 1u << 2,     // nef
  FlAtomic = 1u << 3,      // af
  FlAtomicNr = 1u << 4,    // anrf
  FlCacheable = 1u << 5,   // caf: address inside coherent memory
  FlNullWb = 1u << 6,      // nwf: last writeback response carried no data
  FlPending = 1u << 7,     // pf: way group busy with another transaction
  FlSpec = 1u << 8,        // spf
  FlCachedS = 1u << 9,     // csf
  FlCachedE = 1u << 10,    // cef
  FlCachedM = 1u << 11,    // cmf
  FlCachedO = 1u << 12,    // cof
  FlCachedF = 1u << 13,    // cff
  FlReplace = 1u << 14,    // rf: LRU way holds a block that must leave
  FlUpgrade = 1u << 15,    // uf
  FlReqOwns = 1u << 16,    // rof: requestor itself holds a non-S copy
};

// True when the branch would redirect for the given flag word.
inline bool flag_branch_taken(Op op, uint32_t mask, uint32_t flags) {
  switch (op) {
  case Op::Bf: return (flags & mask) == mask;    // all set
  case Op::Bfnot: return (flags & mask) == 0;    // all clear
  case Op::Bfz: return (flags & mask) != 0;      // any set
  case Op::Bfnz: return (flags & mask) != mask;  // any clear
  default: return false;
  }
}

// Special (source) registers visible to the data-movement and branch ops.
enum class Sreg : uint8_t {
  CohState, // default/next coherence state
  ReqLce,
  Addr,
  LruAddr,
  LruWay,
  Way,
  OwnerLce,
  OwnerWay,
  OwnerState,
  AutoFwd,
};

enum class Queue : uint8_t { LceReq, LceResp, MemResp, LceCmd, MemCmd };
enum class AddrSel : uint8_t { Req, Lru };
enum class LceSel : uint8_t { Req, Owner };
enum class WaySel : uint8_t { Req, Lru, Owner };
enum class StateSel : uint8_t { Imm, CohReg };
enum class SpecqOp : uint8_t { Squash, FwdMod, Unset };

// One decoded microinstruction.  The engine executes these records directly;
// there is no binary encoding.
struct Instr {
  Op op = Op::Add;
  uint8_t ra = 0, rb = 0, rd = 0;
  int64_t imm = 0;
  uint32_t flags = 0;  // flag mask for bf-family / sf / sfz
  int32_t target = -1; // branch destination pc
  bool predict = false;
  Sreg sa = Sreg::CohState; // special-register operand
  uint32_t qmask = 0;       // wfq wait set (bit per Queue)
  Queue q = Queue::LceReq;  // pushq/popq/poph queue
  CmdType cmd = CmdType::INV;
  MemOp mop = MemOp::Read;
  AddrSel addr_sel = AddrSel::Req;
  LceSel lce_sel = LceSel::Req;
  WaySel way_sel = WaySel::Req;
  StateSel st_sel = StateSel::Imm;
  St st = St::I; // ST field / wde state / movis value
  StateSel xst_sel = StateSel::Imm;
  St xst = St::I; // state granted with transferred data
  bool spec = false, wp = false;
  SpecqOp sq = SpecqOp::Squash;

  bool operator==(const Instr&) const = default;
};

struct MicrocodeProgram {
  std::vector<Instr> code;
  bool operator==(const MicrocodeProgram&) const = default;
};

} // namespace bedrock::ucode
