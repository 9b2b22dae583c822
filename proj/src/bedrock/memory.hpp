#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <vector>

#include "bedrock/messages.hpp"

namespace bedrock {

enum class MemOp : uint8_t { Read, Write, UcRead, UcWrite, UcAmo };
const char* to_string(MemOp op);

struct MemCommand {
  MemOp op = MemOp::Read;
  uint64_t addr = 0;
  uint32_t size = 0;
  BlockData data;          // Write / UcWrite / UcAmo payload
  bool speculative = false;
  uint32_t lce = 0;        // response routing payload
  uint32_t way = 0;
  St state = St::I;
  uint8_t subop = 0;
  uint32_t src_cce = 0;
  bool coherent = false; // response must decrement the way group's pending bit
};

struct MemResponse {
  MemCommand cmd;
  BlockData data; // Read / UcRead / UcAmo result
  uint64_t ready_cycle = 0;
};

struct MemConfig {
  uint32_t latency = 20;
  uint32_t block_bytes = 64;
};

// Flat token-valued backing store with a fixed-latency channel and one
// in-order response queue per controller.
class Memory {
public:
  explicit Memory(const MemConfig& cfg = {}) : cfg_(cfg) {}

  void send(MemCommand cmd, uint64_t now);
  bool response_ready(uint32_t cce, uint64_t now) const;
  const MemResponse& front(uint32_t cce) const;
  MemResponse pop(uint32_t cce);
  bool empty() const;

  BlockData& block(uint64_t addr);
  uint64_t commands() const { return commands_; }
  uint64_t reads() const { return reads_; }
  uint64_t writes() const { return writes_; }
  const MemConfig& config() const { return cfg_; }

private:
  MemConfig cfg_;
  std::map<uint64_t, BlockData> store_;
  std::map<uint32_t, std::deque<MemResponse>> queues_;
  uint64_t commands_ = 0;
  uint64_t reads_ = 0;
  uint64_t writes_ = 0;
};

} // namespace bedrock
