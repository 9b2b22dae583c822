#include "bedrock/net.hpp"

namespace bedrock {

std::vector<uint64_t> wrap_beat_addresses(uint64_t addr, uint32_t size_bytes,
                                          uint32_t width_bits) {
  uint32_t beat_bytes = width_bits / 8;
  if (uint64_t(size_bytes) * 8 <= width_bits) return {addr};
  if (addr % beat_bytes != 0)
    throw MisalignedAddress("address not beat-aligned");
  uint64_t base = addr & ~uint64_t(size_bytes - 1);
  uint32_t n = size_bytes / beat_bytes;
  std::vector<uint64_t> out;
  out.reserve(n);
  uint64_t cur = addr;
  for (uint32_t i = 0; i < n; ++i) {
    out.push_back(cur);
    cur += beat_bytes;
    if (cur >= base + size_bytes) cur = base;
  }
  return out;
}

uint32_t critical_beat_index(uint64_t addr, uint32_t size_bytes,
                             uint32_t width_bits, bool rotated) {
  if (uint64_t(size_bytes) * 8 <= width_bits) return 0;
  if (rotated) return 0;
  uint32_t beat_bytes = width_bits / 8;
  return uint32_t((addr % size_bytes) / beat_bytes);
}

} // namespace bedrock
