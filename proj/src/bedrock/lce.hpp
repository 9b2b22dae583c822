#pragma once

#include <deque>
#include <optional>

#include "bedrock/cache.hpp"
#include "bedrock/dir.hpp"
#include "bedrock/net.hpp"
#include "bedrock/tables.hpp"

namespace bedrock {

struct CoreOp {
  enum class Kind { Load, Store, UcLoad, UcStore, UcAmo };
  Kind kind = Kind::Load;
  uint64_t addr = 0;
  uint32_t size = 8;
  bool non_exclusive = false; // issue the read as non-exclusive
  uint8_t subop = 0;          // atomic sub-operation
};

struct CompletedOp {
  CoreOp op;
  uint64_t issued = 0;
  uint64_t completed = 0;
  bool hit = false;
  WordToken value; // token observed by loads and atomics
};

struct LceConfig {
  uint32_t id = 0;
  Variant variant = Variant::MOESIF;
  CacheOrg org;
  uint32_t block_width = 512; // bits
  uint32_t fill_width = 512;  // bits; beats N = block / fill
  uint32_t uc_store_credits = 4;
  uint32_t num_cce = 1;
  uint32_t cce_base = 1; // endpoint id of controller 0
};

inline uint32_t data_beats(const LceConfig& c) {
  return c.block_width / c.fill_width;
}

// No-contention request-side cost in cycles (N = data beats).
uint32_t lce_request_occupancy(CoreOp::Kind k, uint32_t beats);
// No-contention command-processing cost in cycles.
uint32_t lce_command_occupancy(CmdType c, bool dirty, uint32_t beats);

// Cache controller: issues coherence requests for core operations and
// services commands from the directory and fills from peer caches.
class Lce {
public:
  struct Stats {
    uint64_t hits = 0;
    uint64_t misses = 0;
    uint64_t backoffs = 0;
    uint64_t busy_cycles = 0;
    uint64_t requests = 0;
    uint64_t commands = 0;
    uint64_t silent_upgrades = 0;
  };

  Lce(const LceConfig& cfg, const ProtocolTables& tables, Network* req,
      Network* cmd, Network* fill, Network* resp, uint64_t* version_ctr);

  // Core side.  Returns false (backoff) while busy, while a blocking
  // request is outstanding, or when uncached-store credits are exhausted.
  bool try_start(const CoreOp& op, uint64_t now);
  std::optional<CompletedOp> pop_completion();

  // Service one deliverable command or fill message, honoring network
  // priority (fill before command).
  void step(uint64_t now);

  bool idle(uint64_t now) const {
    return now >= busy_until_ && !outstanding_;
  }
  bool has_outstanding() const { return outstanding_.has_value(); }
  uint64_t busy_until() const { return busy_until_; }
  Cache& cache() { return cache_; }
  const Cache& cache() const { return cache_; }
  const LceConfig& config() const { return cfg_; }
  const Stats& stats() const { return stats_; }
  uint32_t uc_credits() const { return uc_credits_; }
  uint64_t sync_count() const { return sync_count_; }

private:
  uint32_t cce_for(uint64_t addr) const;
  void charge(uint64_t now, uint32_t cycles);
  void send_request(ReqType t, const CoreOp& op, uint64_t now);
  void respond(RspType t, uint64_t addr, uint32_t dst, uint64_t now,
               const BlockData* data = nullptr);
  void process_command(Message m, uint64_t now);
  void complete(const CoreOp& op, uint64_t now, bool hit, WordToken value);
  WordToken write_token();
  uint32_t word_of(uint64_t addr) const {
    return uint32_t(addr % cfg_.org.block_bytes) / 8;
  }

  LceConfig cfg_;
  const ProtocolTables& tables_;
  Network* req_;
  Network* cmd_;
  Network* fill_;
  Network* resp_;
  uint64_t* version_;

  Cache cache_;
  uint64_t busy_until_ = 0;
  std::optional<CoreOp> outstanding_;
  uint64_t outstanding_since_ = 0;
  uint32_t uc_credits_;
  uint64_t sync_count_ = 0;
  std::deque<CompletedOp> completions_;
  Stats stats_;
};

} // namespace bedrock
