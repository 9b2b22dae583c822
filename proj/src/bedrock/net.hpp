#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "bedrock/messages.hpp"

namespace bedrock {

struct EmptyNetwork : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MisalignedAddress : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Seed mixing for independent per-component generators.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct NetworkConfig {
  enum class Ordering { Unordered, PointToPoint };
  Ordering ordering = Ordering::Unordered;
  uint32_t min_latency = 1;       // cycles per hop
  uint32_t data_channel_width = 64; // bits
  uint32_t block_width = 512;       // bits
  uint64_t seed = 0;
};

// Critical-word-first WRAP sequence of beat addresses for a block message.
std::vector<uint64_t> wrap_beat_addresses(uint64_t addr, uint32_t size_bytes,
                                          uint32_t width_bits);
// Beat index holding `addr`: 0 for rotated (wrapped) streams, offset/width
// for linear streams.
uint32_t critical_beat_index(uint64_t addr, uint32_t size_bytes,
                             uint32_t width_bits, bool rotated);

// One coherence network: unbounded, error-free, no drops or duplicates.
class Network {
public:
  Network(MsgClass cls, const NetworkConfig& cfg)
      : cls_(cls), cfg_(cfg), rng_(splitmix64(cfg.seed ^ (uint64_t)cls)) {}

  uint32_t beats_of(const Message& m) const {
    if (!m.has_data || m.size == 0) return 1;
    uint64_t bits = uint64_t(m.size) * 8;
    return uint32_t((bits + cfg_.data_channel_width - 1) /
                    cfg_.data_channel_width);
  }

  void send(uint32_t src, uint32_t dst, Message msg, uint64_t now) {
    msg.cls = cls_;
    msg.src = src;
    msg.dst = dst;
    msg.ready_cycle = now + cfg_.min_latency + beats_of(msg);
    msg.seq = seq_++;
    if (on_send) on_send(msg);
    in_flight_.push_back(std::move(msg));
    ++sent_;
  }

  // Optional tap observing every message as it enters the network.
  std::function<void(const Message&)> on_send;

  // Indices into the candidate set, stable for a given (dst, now).
  std::vector<Message> deliverable(uint32_t dst, uint64_t now) const {
    std::vector<Message> out;
    for (size_t i : candidate_indices(dst, now)) out.push_back(in_flight_[i]);
    return out;
  }

  bool any_deliverable(uint32_t dst, uint64_t now) const {
    return !candidate_indices(dst, now).empty();
  }

  // Seeded-random pick among ready candidates (simulator mode).
  Message deliver_one(uint32_t dst, uint64_t now) {
    auto cand = candidate_indices(dst, now);
    if (cand.empty()) throw EmptyNetwork("no deliverable message");
    size_t pick = 0;
    if (cfg_.ordering == NetworkConfig::Ordering::Unordered && cand.size() > 1)
      pick = std::uniform_int_distribution<size_t>(0, cand.size() - 1)(rng_);
    return take(cand[pick]);
  }

  // Explicit pick (checker mode); choice indexes the deliverable list.
  Message deliver_choice(uint32_t dst, size_t choice, uint64_t now) {
    auto cand = candidate_indices(dst, now);
    if (choice >= cand.size()) throw EmptyNetwork("bad delivery choice");
    return take(cand[choice]);
  }

  bool empty() const { return in_flight_.empty(); }
  size_t in_flight() const { return in_flight_.size(); }
  uint64_t messages_sent() const { return sent_; }
  uint64_t messages_delivered() const { return delivered_; }

  // Earliest ready cycle of any message headed to dst (or at all, dst = ~0).
  uint64_t next_ready(uint32_t dst = UINT32_MAX) const {
    uint64_t best = std::numeric_limits<uint64_t>::max();
    for (const auto& m : in_flight_)
      if (dst == UINT32_MAX || m.dst == dst)
        best = std::min(best, m.ready_cycle);
    return best;
  }

  MsgClass cls() const { return cls_; }

private:
  std::vector<size_t> candidate_indices(uint32_t dst, uint64_t now) const {
    std::vector<size_t> cand;
    if (cfg_.ordering == NetworkConfig::Ordering::PointToPoint) {
      // Head-of-queue per (src,dst): oldest sequence number per source.
      std::vector<std::pair<uint32_t, size_t>> head;
      for (size_t i = 0; i < in_flight_.size(); ++i) {
        const auto& m = in_flight_[i];
        if (m.dst != dst) continue;
        bool found = false;
        for (auto& h : head)
          if (h.first == m.src) {
            found = true;
            if (in_flight_[h.second].seq > m.seq) h.second = i;
          }
        if (!found) head.emplace_back(m.src, i);
      }
      for (auto& h : head)
        if (in_flight_[h.second].ready_cycle <= now) cand.push_back(h.second);
    } else {
      for (size_t i = 0; i < in_flight_.size(); ++i)
        if (in_flight_[i].dst == dst && in_flight_[i].ready_cycle <= now)
          cand.push_back(i);
    }
    return cand;
  }

  Message take(size_t idx) {
    Message m = std::move(in_flight_[idx]);
    in_flight_.erase(in_flight_.begin() + (long)idx);
    ++delivered_;
    return m;
  }

  MsgClass cls_;
  NetworkConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<Message> in_flight_;
  uint64_t seq_ = 0;
  uint64_t sent_ = 0;
  uint64_t delivered_ = 0;
};

} // namespace bedrock
