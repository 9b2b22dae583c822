#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bedrock/states.hpp"

namespace bedrock {

enum class MsgClass : uint8_t { Request = 0, Command, Fill, Response };

// Higher rank drains first when endpoints have a choice.
inline int network_priority(MsgClass c) {
  switch (c) {
    case MsgClass::Response: return 4;
    case MsgClass::Fill: return 3;
    case MsgClass::Command: return 2;
    case MsgClass::Request: return 1;
  }
  return 0;
}

const char* to_string(MsgClass c);

enum class ReqType : uint8_t { ReqRd, ReqRdNE, ReqWr, UcLoad, UcStore, UcAmo };
enum class CmdType : uint8_t {
  INV,
  DATA,
  ST,
  STW,
  WB,
  TR,
  ST_WB,
  ST_TR,
  ST_TR_WB,
  Sync,
  SetClear,
  UcData,
  UcStoreDone
};
enum class RspType : uint8_t { InvAck, CohAck, DirtyWB, NullWB, SyncAck };

const char* to_string(ReqType t);
const char* to_string(CmdType t);
const char* to_string(RspType t);

inline bool cmd_has_st(CmdType t) {
  return t == CmdType::ST || t == CmdType::ST_WB || t == CmdType::ST_TR ||
         t == CmdType::ST_TR_WB || t == CmdType::STW;
}
inline bool cmd_has_tr(CmdType t) {
  return t == CmdType::TR || t == CmdType::ST_TR || t == CmdType::ST_TR_WB;
}
inline bool cmd_has_wb(CmdType t) {
  return t == CmdType::WB || t == CmdType::ST_WB || t == CmdType::ST_TR_WB;
}

// Data is modeled as (writer, version) tokens, one per 64-bit word.
struct WordToken {
  uint32_t writer = 0;
  uint64_t version = 0;
  bool operator==(const WordToken&) const = default;
};

using BlockData = std::vector<WordToken>;

// One message on any of the coherence networks or the memory channel.
// Endpoint ids: LCEs are 0..C-1; CCEs and memory use separate id spaces
// selected by the channel the message travels on.
struct Message {
  MsgClass cls = MsgClass::Request;
  // Exactly one of req/cmd/rsp is meaningful, per cls.
  ReqType req = ReqType::ReqRd;
  CmdType cmd = CmdType::INV;
  RspType rsp = RspType::InvAck;

  uint32_t src = 0;
  uint32_t dst = 0;
  uint64_t addr = 0;
  uint32_t size = 0; // bytes

  // Command fields.
  St set_state = St::I;      // ST/STW target state
  St xfer_state = St::I;     // state granted with TR data
  uint32_t xfer_target = 0;  // LCE to receive the transfer
  uint32_t way = 0;          // way at the destination LCE
  // Request fields.
  uint32_t lru_way = 0;
  uint8_t subop = 0; // AMO sub-operation

  BlockData data; // empty for header-only messages
  bool has_data = false;

  uint64_t ready_cycle = 0; // set by the network on send
  uint64_t seq = 0;         // network-assigned, for deterministic ordering

  std::string describe() const;
};

} // namespace bedrock
