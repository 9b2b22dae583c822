#include "bedrock/cache.hpp"

#include <algorithm>

namespace bedrock {

Cache::Cache(const CacheOrg& org) : org_(org) {
  lines_.assign(org.sets, std::vector<Line>(org.assoc));
  order_.assign(org.sets, {});
  for (auto& o : order_)
    for (uint32_t w = 0; w < org.assoc; ++w) o.push_back(w);
}

int Cache::lookup(uint64_t addr) const {
  uint32_t set = set_of(addr);
  uint64_t tag = tag_of(addr);
  for (uint32_t w = 0; w < org_.assoc; ++w)
    if (lines_[set][w].valid() && lines_[set][w].tag == tag) return int(w);
  return -1;
}

uint32_t Cache::fill(uint64_t addr, St state) {
  uint32_t set = set_of(addr);
  int hit = lookup(addr);
  uint32_t way = hit >= 0 ? uint32_t(hit) : lru_way(set);
  Line& l = lines_[set][way];
  l.tag = tag_of(addr);
  l.state = state;
  l.dirty = false;
  touch(set, way);
  return way;
}

void Cache::fill_at(uint64_t addr, uint32_t way, St state) {
  uint32_t set = set_of(addr);
  Line& l = lines_[set][way];
  l.tag = tag_of(addr);
  l.state = state;
  l.dirty = false;
  touch(set, way);
}

void Cache::invalidate(uint64_t addr) {
  int w = lookup(addr);
  if (w >= 0) lines_[set_of(addr)][w].state = St::I;
}

void Cache::touch(uint32_t set, uint32_t way) {
  auto& o = order_[set];
  o.erase(std::find(o.begin(), o.end(), way));
  o.insert(o.begin(), way);
}

uint32_t Cache::lru_way(uint32_t set) const {
  const auto& o = order_[set];
  for (auto it = o.rbegin(); it != o.rend(); ++it)
    if (!lines_[set][*it].valid()) return *it;
  return o.back();
}

uint32_t Cache::valid_ways(uint32_t set) const {
  uint32_t n = 0;
  for (const auto& l : lines_[set])
    if (l.valid()) ++n;
  return n;
}

} // namespace bedrock
