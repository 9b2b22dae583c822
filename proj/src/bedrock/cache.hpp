#pragma once

#include <cstdint>
#include <list>
#include <vector>

#include "bedrock/messages.hpp"
#include "bedrock/states.hpp"

namespace bedrock {

struct CacheOrg {
  uint32_t sets = 64;
  uint32_t assoc = 8;
  uint32_t block_bytes = 64;
};

// Set-associative tag/state/data array with true-LRU replacement.
class Cache {
public:
  struct Line {
    uint64_t tag = 0;
    St state = St::I;
    bool dirty = false; // stat-memory dirty bit; survives state downgrades
    BlockData data;
    bool valid() const { return state != St::I; }
  };

  explicit Cache(const CacheOrg& org);

  const CacheOrg& org() const { return org_; }
  uint32_t set_of(uint64_t addr) const {
    return uint32_t(addr / org_.block_bytes) % org_.sets;
  }
  uint64_t tag_of(uint64_t addr) const {
    return addr / org_.block_bytes / org_.sets;
  }
  uint64_t block_base(uint64_t addr) const {
    return addr & ~uint64_t(org_.block_bytes - 1);
  }
  uint64_t addr_of(uint32_t set, uint64_t tag) const {
    return (tag * org_.sets + set) * org_.block_bytes;
  }

  // Way holding addr, or -1 on miss.
  int lookup(uint64_t addr) const;
  Line& line(uint32_t set, uint32_t way) { return lines_[set][way]; }
  const Line& line(uint32_t set, uint32_t way) const {
    return lines_[set][way];
  }

  // Install addr in the LRU way (valid ways only evicted when the set is
  // full); returns the way used and marks it most recently used.
  uint32_t fill(uint64_t addr, St state);
  // Install at a controller-directed way.
  void fill_at(uint64_t addr, uint32_t way, St state);
  void invalidate(uint64_t addr);
  void touch(uint32_t set, uint32_t way);
  // Victim way: an invalid way if one exists, else the true-LRU way.
  uint32_t lru_way(uint32_t set) const;
  uint32_t valid_ways(uint32_t set) const;

private:
  CacheOrg org_;
  std::vector<std::vector<Line>> lines_;
  // Per-set way order, most recently used first.
  std::vector<std::vector<uint32_t>> order_;
};

} // namespace bedrock
