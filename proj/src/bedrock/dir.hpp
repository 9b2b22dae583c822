#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bedrock/states.hpp"

namespace bedrock {

struct PendingUnderflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotSpeculative : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Standalone directory organizations compared for storage overhead.
enum class DirKind { DuplicateTag, Complete, Coarse8 };

// Bits per directory entry for 8-way/64B L1 caches of the given size.
uint32_t directory_entry_bits(DirKind kind, uint32_t caches,
                              uint32_t cache_kib, uint32_t assoc = 8,
                              uint32_t block_bytes = 64,
                              uint32_t paddr_bits = 40);
// Directory storage as a percentage of total L1 capacity; entries are
// rounded up to whole bytes.
double storage_overhead_pct(DirKind kind, uint32_t caches, uint32_t cache_kib,
                            uint32_t assoc = 8, uint32_t block_bytes = 64,
                            uint32_t paddr_bits = 40);

// Modulo hash banking of way groups across controllers; loads differ by at
// most one.
inline uint32_t cce_for_way_group(uint32_t wg, uint32_t num_cce) {
  return wg % num_cce;
}

struct DirConfig {
  uint32_t caches = 2;
  uint32_t sets = 64; // way groups tracked by this segment
  uint32_t assoc = 8;
  uint32_t block_bytes = 64;
};

struct DirEntry {
  uint64_t tag = 0;
  St state = St::I;
};

struct SharersEntry {
  bool hit = false;
  St state = St::I;
  uint32_t way = 0;
};

struct WayGroupResult {
  std::vector<SharersEntry> sharers; // one per tracked cache
  DirEntry lru_entry;                // requestor's entry at its LRU way
};

// Duplicate-tag directory segment: per-cache tag sets packed two per SRAM
// row, single-cycle writes, multi-cycle reads.
class DirectorySegment {
public:
  static constexpr uint32_t kEntryReadLatency = 2;
  static constexpr uint32_t kWriteLatency = 1;
  static constexpr uint32_t kTagSetsPerRow = 2;

  explicit DirectorySegment(const DirConfig& cfg);

  const DirConfig& config() const { return cfg_; }
  uint32_t rows_per_set() const {
    return (cfg_.caches + kTagSetsPerRow - 1) / kTagSetsPerRow;
  }
  uint32_t way_group_read_latency() const { return rows_per_set() + 1; }

  uint32_t set_of(uint64_t addr) const {
    return uint32_t(addr / cfg_.block_bytes) % cfg_.sets;
  }
  uint64_t tag_of(uint64_t addr) const {
    return addr / cfg_.block_bytes / cfg_.sets;
  }
  uint64_t addr_of(uint32_t set, uint64_t tag) const {
    return (tag * cfg_.sets + set) * cfg_.block_bytes;
  }

  DirEntry read_entry(uint32_t lce, uint64_t addr, uint32_t way) const;
  // wde: tag and state together.  wds: state only.
  void write_entry(uint32_t lce, uint64_t addr, uint32_t way, St state);
  void write_state(uint32_t lce, uint64_t addr, uint32_t way, St state);
  // Clears the tag sets of the row'th cache pair for one set.
  void clear_row(uint32_t set, uint32_t row);

  WayGroupResult read_way_group(uint64_t addr, uint32_t req_lce,
                                uint32_t req_lru_way) const;

private:
  DirEntry& at(uint32_t lce, uint32_t set, uint32_t way) {
    return entries_[(uint64_t(lce) * cfg_.sets + set) * cfg_.assoc + way];
  }
  const DirEntry& at(uint32_t lce, uint32_t set, uint32_t way) const {
    return entries_[(uint64_t(lce) * cfg_.sets + set) * cfg_.assoc + way];
  }

  DirConfig cfg_;
  std::vector<DirEntry> entries_;
};

struct GadResult {
  bool replacement = false;
  bool upgrade = false;
  bool cached_S = false, cached_E = false, cached_M = false, cached_O = false,
       cached_F = false;
  bool owner_found = false;
  uint32_t owner_lce = 0;
  uint32_t owner_way = 0;
  St owner_state = St::I;
  bool req_hit = false;
  uint32_t req_addr_way = 0;
  St req_state = St::I;
};

// Generate-Auxiliary-Data: digest the sharers vectors for one request.
GadResult gad(const WayGroupResult& wg, uint32_t req_lce, bool write_not_read);

// Per-way-group outstanding-transaction counters.  A group is pending while
// its count is positive; writes forward to reads in the same cycle.
class PendingBits {
public:
  explicit PendingBits(uint32_t way_groups) : cnt_(way_groups, 0) {}
  void inc(uint32_t wg) { ++cnt_.at(wg); }
  void dec(uint32_t wg) {
    if (cnt_.at(wg) == 0) throw PendingUnderflow("pending bits underflow");
    --cnt_[wg];
  }
  bool pending(uint32_t wg) const { return cnt_.at(wg) > 0; }
  int count(uint32_t wg) const { return cnt_.at(wg); }

private:
  std::vector<int> cnt_;
};

struct SpecState {
  bool spec = false;
  bool squash = false;
  bool fwd_mod = false;
  St state = St::I;
};

// Speculative-access flags, one record per way group.  squash and fwd_mod
// are mutually exclusive resolutions of an open speculation.
class SpecBits {
public:
  explicit SpecBits(uint32_t way_groups) : recs_(way_groups) {}
  void set_spec(uint32_t wg) { recs_.at(wg) = SpecState{true, false, false}; }
  void resolve_squash(uint32_t wg) {
    open(wg).squash = true;
  }
  void resolve_fwd_mod(uint32_t wg, St st) {
    SpecState& r = open(wg);
    r.fwd_mod = true;
    r.state = st;
  }
  void unset(uint32_t wg) { open(wg) = SpecState{}; }
  // Reset after the speculative response has been processed.
  void consume(uint32_t wg) { recs_.at(wg) = SpecState{}; }
  const SpecState& get(uint32_t wg) const { return recs_.at(wg); }

private:
  SpecState& open(uint32_t wg) {
    SpecState& r = recs_.at(wg);
    if (!r.spec || r.squash || r.fwd_mod)
      throw NotSpeculative("way group is not awaiting resolution");
    return r;
  }
  std::vector<SpecState> recs_;
};

} // namespace bedrock
