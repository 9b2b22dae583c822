#include "bedrock/memory.hpp"

#include <stdexcept>

namespace bedrock {

const char* to_string(MemOp op) {
  switch (op) {
  case MemOp::Read: return "read";
  case MemOp::Write: return "write";
  case MemOp::UcRead: return "uc_read";
  case MemOp::UcWrite: return "uc_write";
  case MemOp::UcAmo: return "uc_amo";
  }
  return "?";
}

BlockData& Memory::block(uint64_t addr) {
  uint64_t base = addr & ~uint64_t(cfg_.block_bytes - 1);
  auto it = store_.find(base);
  if (it == store_.end()) {
    // Fresh memory reads back as the memory writer's token.
    it = store_
             .emplace(base, BlockData(cfg_.block_bytes / 8,
                                      WordToken{0xffffffffu, 0}))
             .first;
  }
  return it->second;
}

void Memory::send(MemCommand cmd, uint64_t now) {
  ++commands_;
  if (cmd.op == MemOp::Read || cmd.op == MemOp::UcRead) ++reads_;
  else ++writes_;
  MemResponse r;
  r.ready_cycle = now + cfg_.latency;
  uint32_t word = uint32_t(cmd.addr % cfg_.block_bytes) / 8;
  switch (cmd.op) {
  case MemOp::Read:
    r.data = block(cmd.addr);
    break;
  case MemOp::Write:
    block(cmd.addr) = cmd.data;
    break;
  case MemOp::UcRead:
    r.data.assign(1, block(cmd.addr)[word]);
    break;
  case MemOp::UcWrite:
    block(cmd.addr)[word] = cmd.data.at(0);
    break;
  case MemOp::UcAmo: {
    WordToken old = block(cmd.addr)[word];
    block(cmd.addr)[word] = cmd.data.at(0);
    r.data.assign(1, old);
    break;
  }
  }
  r.cmd = std::move(cmd);
  queues_[r.cmd.src_cce].push_back(std::move(r));
}

bool Memory::response_ready(uint32_t cce, uint64_t now) const {
  auto it = queues_.find(cce);
  return it != queues_.end() && !it->second.empty() &&
         it->second.front().ready_cycle <= now;
}

const MemResponse& Memory::front(uint32_t cce) const {
  return queues_.at(cce).front();
}

MemResponse Memory::pop(uint32_t cce) {
  auto& q = queues_.at(cce);
  if (q.empty()) throw std::runtime_error("memory response queue empty");
  MemResponse r = std::move(q.front());
  q.pop_front();
  return r;
}

bool Memory::empty() const {
  for (const auto& [cce, q] : queues_)
    if (!q.empty()) return false;
  return true;
}

} // namespace bedrock
