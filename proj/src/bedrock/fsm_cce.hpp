#pragma once

#include <optional>
#include <vector>

#include "bedrock/dir.hpp"
#include "bedrock/memory.hpp"
#include "bedrock/mshr.hpp"
#include "bedrock/net.hpp"
#include "bedrock/tables.hpp"

namespace bedrock {

struct CceConfig {
  uint32_t id = 0; // controller index
  uint32_t num_lce = 2;
  uint32_t num_cce = 1;
  Variant variant = Variant::MOESIF;
  uint32_t sets = 64; // way groups (mirrors the cache organization)
  uint32_t assoc = 8;
  uint32_t block_bytes = 64;
  uint32_t block_width = 512;
  uint32_t fill_width = 512;
  // Addresses at or above this are outside the coherence protocol.
  uint64_t uncached_base = 1ull << 39;

  uint32_t endpoint() const { return num_lce + id; }
  uint32_t beats() const { return block_width / fill_width; }
};

struct CceStats {
  uint64_t requests = 0;
  uint64_t req_busy = 0;      // request-unit charged cycles
  uint64_t mem_busy = 0;      // memory-response-unit charged cycles
  uint64_t lce_resp_busy = 0; // response-pipe charged cycles (hybrid)
  uint64_t uc_busy = 0;       // uncacheable-pipe charged cycles (hybrid)
  uint64_t coh_acks = 0;
  uint64_t mem_responses = 0;
  uint64_t invalidations = 0;
  uint64_t transfers = 0;
  uint64_t upgrades = 0;
  uint64_t replacements = 0;
  // Charged cycles of each finished request, pop through speculation
  // resolution (coherent requests only).
  std::vector<uint64_t> occupancy_log;
};

// Engine-neutral interface so the harness can swap implementations.
class CceEngine {
public:
  virtual ~CceEngine() = default;
  virtual void step(uint64_t now) = 0;
  virtual bool idle(uint64_t now) const = 0;
  virtual const CceStats& stats() const = 0;
  virtual DirectorySegment& dir() = 0;
  virtual PendingBits& pending() = 0;
  virtual const CceConfig& config() const = 0;
};

// Fixed-function controller: one blocking request state machine plus a
// concurrent memory-response unit and coherence-ack sink.
class FsmCce : public CceEngine {
public:
  FsmCce(const CceConfig& cfg, const ProtocolTables& tables, Network* req,
         Network* cmd, Network* fill, Network* resp, Memory* mem);

  void step(uint64_t now) override;
  bool idle(uint64_t now) const override;
  const CceStats& stats() const override { return stats_; }
  DirectorySegment& dir() override { return dir_; }
  PendingBits& pending() override { return pending_; }
  const CceConfig& config() const override { return cfg_; }
  SpecBits& spec() { return spec_; }

private:
  enum class Phase {
    Ready,
    PendingWait,
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
  void drain_coh_acks(uint64_t now);
  void step_mem(uint64_t now);
  void step_req(uint64_t now);
  void start_request(Message m, uint64_t now);
  void begin_coherent(uint64_t now);
  void begin_uncached_coherent(uint64_t now, const WayGroupResult& wgres,
                               const GadResult& g, St ds);
  void finish_uncached_mem(uint64_t now);
  void after_replacement(uint64_t now);
  void after_inv(uint64_t now);
  void after_owner_wb(uint64_t now);
  void finish_resolve(uint64_t now);
  void send_cmd(uint32_t dst, Message m, uint64_t now);
  std::optional<Message> take_resp(RspType a, RspType b, uint64_t now);

  CceConfig cfg_;
  const ProtocolTables& tables_;
  Network* req_;
  Network* cmd_;
  Network* fill_;
  Network* resp_;
  Memory* mem_;

  DirectorySegment dir_;
  PendingBits pending_;
  SpecBits spec_;

  Phase phase_ = Phase::Ready;
  uint64_t req_busy_until_ = 0;
  uint64_t mem_busy_until_ = 0;
  uint64_t txn_charge_ = 0;

  // Active coherent transaction.
  Message areq_;
  Mshr mshr_;
  CceAction act_;
  std::vector<uint32_t> inv_targets_;
  uint32_t acks_left_ = 0;

  CceStats stats_;
};

} // namespace bedrock
