#include "bedrock/dir.hpp"

#include <cmath>

namespace bedrock {

namespace {
uint32_t log2u(uint32_t x) {
  uint32_t n = 0;
  while ((1u << n) < x) ++n;
  return n;
}
} // namespace

uint32_t directory_entry_bits(DirKind kind, uint32_t caches,
                              uint32_t cache_kib, uint32_t assoc,
                              uint32_t block_bytes, uint32_t paddr_bits) {
  uint32_t sets = cache_kib * 1024 / (block_bytes * assoc);
  uint32_t tag = paddr_bits - log2u(sets) - log2u(block_bytes);
  uint32_t state = 3;
  switch (kind) {
  case DirKind::DuplicateTag:
    return tag + state;
  case DirKind::Complete:
    return tag + state + log2u(caches) + caches;
  case DirKind::Coarse8: {
    // One sharers bit covers up to eight caches; below nine caches the
    // vector is still one bit per cache.
    uint32_t vec = caches <= 8 ? caches : (caches + 7) / 8;
    return tag + state + log2u(caches) + vec;
  }
  }
  return 0;
}

double storage_overhead_pct(DirKind kind, uint32_t caches, uint32_t cache_kib,
                            uint32_t assoc, uint32_t block_bytes,
                            uint32_t paddr_bits) {
  uint32_t bits =
      directory_entry_bits(kind, caches, cache_kib, assoc, block_bytes,
                           paddr_bits);
  uint32_t entry_bytes = (bits + 7) / 8;
  // Entries and capacity both scale with the cache count, so the ratio
  // reduces to bytes-per-entry over bytes-per-block.
  return 100.0 * double(entry_bytes) / double(block_bytes);
}

DirectorySegment::DirectorySegment(const DirConfig& cfg) : cfg_(cfg) {
  entries_.assign(uint64_t(cfg.caches) * cfg.sets * cfg.assoc, DirEntry{});
}

DirEntry DirectorySegment::read_entry(uint32_t lce, uint64_t addr,
                                      uint32_t way) const {
  return at(lce, set_of(addr), way);
}

void DirectorySegment::write_entry(uint32_t lce, uint64_t addr, uint32_t way,
                                   St state) {
  at(lce, set_of(addr), way) = DirEntry{tag_of(addr), state};
}

void DirectorySegment::write_state(uint32_t lce, uint64_t addr, uint32_t way,
                                   St state) {
  at(lce, set_of(addr), way).state = state;
}

void DirectorySegment::clear_row(uint32_t set, uint32_t row) {
  for (uint32_t i = 0; i < kTagSetsPerRow; ++i) {
    uint32_t lce = row * kTagSetsPerRow + i;
    if (lce >= cfg_.caches) break;
    for (uint32_t w = 0; w < cfg_.assoc; ++w) at(lce, set, w) = DirEntry{};
  }
}

WayGroupResult DirectorySegment::read_way_group(uint64_t addr,
                                                uint32_t req_lce,
                                                uint32_t req_lru_way) const {
  WayGroupResult r;
  uint32_t set = set_of(addr);
  uint64_t tag = tag_of(addr);
  r.sharers.resize(cfg_.caches);
  for (uint32_t lce = 0; lce < cfg_.caches; ++lce)
    for (uint32_t w = 0; w < cfg_.assoc; ++w) {
      const DirEntry& e = at(lce, set, w);
      if (e.state != St::I && e.tag == tag) {
        r.sharers[lce] = SharersEntry{true, e.state, w};
        break;
      }
    }
  r.lru_entry = at(req_lce, set, req_lru_way);
  return r;
}

GadResult gad(const WayGroupResult& wg, uint32_t req_lce,
              bool write_not_read) {
  GadResult g;
  for (uint32_t lce = 0; lce < wg.sharers.size(); ++lce) {
    const SharersEntry& s = wg.sharers[lce];
    if (!s.hit) continue;
    if (lce == req_lce) {
      g.req_hit = true;
      g.req_addr_way = s.way;
      g.req_state = s.state;
      continue;
    }
    switch (s.state) {
    case St::S: g.cached_S = true; break;
    case St::E: g.cached_E = true; break;
    case St::M: g.cached_M = true; break;
    case St::O: g.cached_O = true; break;
    case St::F: g.cached_F = true; break;
    case St::I: break;
    }
    if (s.state != St::S) {
      g.owner_found = true;
      g.owner_lce = lce;
      g.owner_way = s.way;
      g.owner_state = s.state;
    }
  }
  // A write by a holder of a read-only state upgrades in place.
  g.upgrade = write_not_read && g.req_hit &&
              !state_properties(g.req_state).read_write;
  // A miss that lands on a valid LRU entry must first evict it.
  g.replacement = !g.upgrade && !g.req_hit && wg.lru_entry.state != St::I;
  return g;
}

} // namespace bedrock
