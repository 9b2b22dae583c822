#pragma once

#include <cstdint>

#include "bedrock/messages.hpp"
#include "bedrock/states.hpp"

namespace bedrock {

// Per-request working registers, populated in order as a request is
// decoded, the LRU entry is examined, and the sharers are digested.
struct MshrFlags {
  bool write_not_read = false;
  bool uncached = false;
  bool non_exclusive = false;
  bool atomic = false;
  bool atomic_no_return = false;
  bool cacheable_address = true;
  bool null_writeback = false;
  bool pending = false;
  bool speculative = false;
  bool cached_S = false;
  bool cached_E = false;
  bool cached_M = false;
  bool cached_O = false;
  bool cached_F = false;
  bool replacement = false;
  bool upgrade = false;
};

struct Mshr {
  // From the request message.
  ReqType msg_type = ReqType::ReqRd;
  uint8_t subop = 0;
  uint32_t size = 0;
  uint32_t lce_id = 0;
  uint64_t addr = 0;
  uint32_t lru_way = 0;
  // From the directory read.
  uint64_t lru_addr = 0;
  St lru_state = St::I;
  uint32_t way_id = 0; // way of addr at the requestor, when present
  uint32_t owner_lce = 0;
  uint32_t owner_way = 0;
  St owner_state = St::I;
  // Digested by GAD.
  MshrFlags flags;
  // Decided by the protocol.
  St next_state = St::I;
};

} // namespace bedrock
