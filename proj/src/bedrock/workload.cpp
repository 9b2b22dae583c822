#include "bedrock/workload.hpp"

#include <random>

namespace bedrock {

const char* to_string(WorkloadKind k) {
  switch (k) {
  case WorkloadKind::Sanity: return "sanity";
  case WorkloadKind::AtomicAdd: return "atomic-add";
  case WorkloadKind::LrscAdd: return "lrsc-add";
  case WorkloadKind::RandomWalk: return "random-walk";
  case WorkloadKind::WorkSort: return "work-sort";
  }
  return "?";
}

WorkloadKind workload_from_string(const std::string& s) {
  if (s == "sanity") return WorkloadKind::Sanity;
  if (s == "atomic-add") return WorkloadKind::AtomicAdd;
  if (s == "lrsc-add") return WorkloadKind::LrscAdd;
  if (s == "random-walk") return WorkloadKind::RandomWalk;
  if (s == "work-sort") return WorkloadKind::WorkSort;
  throw BadTrace("unknown workload: " + s);
}

namespace {

uint64_t private_block(const WorkloadParams& p, uint32_t core, uint32_t b) {
  return p.private_base + (uint64_t(core) << 20) + 64ull * b;
}

} // namespace

Trace gen_workload(WorkloadKind kind, uint32_t cores,
                   const WorkloadParams& p, uint64_t seed) {
  Trace t;
  std::mt19937_64 rng(splitmix64(seed));
  switch (kind) {
  case WorkloadKind::Sanity:
    // Read-only false sharing: each core re-reads its own word of every
    // shared block.
    for (uint64_t it = 0; it < p.iterations; ++it)
      for (uint32_t b = 0; b < p.blocks; ++b)
        for (uint32_t c = 0; c < cores; ++c)
          t.push_back(
              {c, TraceOp::Load, p.shared_base + 64ull * b + 8 * (c % 8), 8});
    break;

  case WorkloadKind::AtomicAdd:
  case WorkloadKind::LrscAdd:
    // Both reduce to one atomic read-modify-write per increment; the
    // reservation pair is modeled as a single atomic at the trace level.
    for (uint64_t it = 0; it < p.iterations; ++it)
      for (uint32_t c = 0; c < cores; ++c)
        t.push_back({c, TraceOp::Amo, p.shared_base, 8});
    break;

  case WorkloadKind::RandomWalk:
    for (uint32_t e = 0; e < p.epochs; ++e) {
      for (uint32_t c = 0; c < cores; ++c) {
        for (uint32_t i = 0; i < p.burst; ++i) {
          uint32_t b = uint32_t(rng() % p.working_set);
          uint64_t a = private_block(p, c, b) + 8 * (rng() % 8);
          t.push_back({c, rng() % 4 == 0 ? TraceOp::Store : TraceOp::Load,
                       a, 8});
        }
        // Arrive at the epoch barrier on the shared flag, then re-read it.
        t.push_back({c, TraceOp::Amo, p.shared_base, 8});
        t.push_back({c, TraceOp::Load, p.shared_base + 64, 8});
      }
    }
    break;

  case WorkloadKind::WorkSort:
    for (uint64_t it = 0; it < p.iterations; ++it)
      for (uint32_t c = 0; c < cores; ++c) {
        // Claim a work item from the shared pointer, then churn on it
        // privately.
        t.push_back({c, TraceOp::Amo, p.shared_base, 8});
        for (uint32_t i = 0; i < p.burst; ++i) {
          uint32_t b = uint32_t((it + i) % p.working_set);
          uint64_t a = private_block(p, c, b) + 8 * (i % 8);
          t.push_back({c, i % 2 ? TraceOp::Store : TraceOp::Load, a, 8});
        }
      }
    break;
  }
  return t;
}

} // namespace bedrock
