#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bedrock/fsm_cce.hpp"

namespace bedrock {

struct ProgrammablePipeTimeout : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Status message from the programmable pipe: squash/proceed bit plus the
// cycle count the microcode needed to produce it.
struct Verdict {
  bool proceed = true;
  uint32_t latency = 1;
};

struct HybridOptions {
  uint32_t pending_queue_depth = 8;
  uint32_t verdict_timeout = 64; // cycles before a missing verdict is fatal
  bool start_uncached = false;   // boot in uncached-only mode
  // Per-request verdict hook; when unset the default program proceeds
  // immediately.
  std::function<Verdict(const Mshr&)> verdict;
};

// Pipelined controller: the same protocol decisions as the fixed-function
// engine, decomposed into concurrent memory-response, LCE-response,
// coherent-request, and uncacheable-request pipes plus a control unit.
// Response messages are sunk by the LCE-response pipe, which raises
// one-cycle ack pulses toward the request pipe.
class HybridCce : public CceEngine {
public:
  enum class Mode { UncachedOnly, Draining, Syncing, Coherent };

  HybridCce(const CceConfig& cfg, const ProtocolTables& tables, Network* req,
            Network* cmd, Network* fill, Network* resp, Memory* mem,
            HybridOptions opts = {});

  void step(uint64_t now) override;
  bool idle(uint64_t now) const override;
  const CceStats& stats() const override { return stats_; }
  DirectorySegment& dir() override { return dir_; }
  PendingBits& pending() override { return pending_; }
  const CceConfig& config() const override { return cfg_; }
  SpecBits& spec() { return spec_; }

  Mode mode() const { return mode_; }
  void request_mode_switch() { switch_requested_ = true; }
  const std::vector<uint64_t>& completion_order() const {
    return completion_order_;
  }
  uint64_t squashed() const { return squashed_; }

private:
  enum class Phase {
    Ready,
    Replacement,
    InvAcks,
    OwnerWb,
    UncachedOwnerWb,
    InvAcksUncached,
    Resolve
  };

  uint32_t wg_of(uint64_t addr) const {
    return uint32_t(addr / cfg_.block_bytes) % cfg_.sets;
  }
  bool cacheable(uint64_t addr) const { return addr < cfg_.uncached_base; }
  void charge(uint64_t now, uint32_t cycles);
  void step_mem(uint64_t now);
  void step_lce_resp(uint64_t now);
  void step_req(uint64_t now);
  void step_uncacheable(uint64_t now);
  void step_control(uint64_t now);
  void start_coherent(Message m, uint64_t now);
  void begin_uncached_coherent(uint64_t now, const WayGroupResult& wgres,
                               const GadResult& g);
  void finish_uncached_mem(uint64_t now);
  void after_replacement(uint64_t now);
  void after_inv(uint64_t now);
  void after_owner_wb(uint64_t now);
  void finish_resolve(uint64_t now);
  void send_cmd(uint32_t dst, Message m, uint64_t now);
  void send_mem(MemCommand c, uint64_t now);
  bool take_pulse(std::deque<uint64_t>& q, uint64_t now);

  CceConfig cfg_;
  HybridOptions opts_;
  const ProtocolTables& tables_;
  Network* req_;
  Network* cmd_;
  Network* fill_;
  Network* resp_;
  Memory* mem_;

  DirectorySegment dir_;
  PendingBits pending_;
  SpecBits spec_;

  Mode mode_ = Mode::Coherent;
  bool switch_requested_ = false;
  uint32_t sync_acks_seen_ = 0;

  Phase phase_ = Phase::Ready;
  uint64_t req_busy_until_ = 0;
  uint64_t mem_busy_until_ = 0;
  uint64_t lce_resp_busy_until_ = 0;
  uint64_t uc_busy_until_ = 0;
  uint64_t txn_charge_ = 0;
  uint64_t outstanding_mem_ = 0;

  // Ack pulses raised by the LCE-response pipe, tagged with the cycle they
  // become visible to the request pipe.
  std::deque<uint64_t> inv_ack_at_;
  std::deque<uint64_t> wb_ack_at_;

  // Requests blocked on a pending way group, plus the arbiter's held slot
  // once the queue is full.
  std::deque<Message> pq_;
  std::optional<Message> held_;

  // Active coherent transaction.
  Message areq_;
  Mshr mshr_;
  CceAction act_;
  std::vector<uint32_t> inv_targets_;
  uint32_t acks_left_ = 0;

  std::vector<uint64_t> completion_order_;
  uint64_t squashed_ = 0;
  CceStats stats_;
};

} // namespace bedrock
