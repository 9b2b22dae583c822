#pragma once

#include "bedrock/sim.hpp"

namespace bedrock {

enum class WorkloadKind : uint8_t {
  Sanity,    // read-only false sharing: cores stripe words of shared blocks
  AtomicAdd, // every core hammers one shared word with atomics
  LrscAdd,   // load-reserved/store-conditional loop, modeled as atomics
  RandomWalk, // private work between epoch barriers on a shared flag
  WorkSort,  // grab a shared work pointer, then a private burst
};
const char* to_string(WorkloadKind k);
WorkloadKind workload_from_string(const std::string& s);

struct WorkloadParams {
  uint64_t iterations = 64; // per-core outer loop count
  uint32_t blocks = 8;      // shared blocks touched by Sanity
  uint32_t epochs = 8;      // RandomWalk barrier phases
  uint32_t burst = 16;      // private accesses per phase / work item
  uint32_t working_set = 16; // private blocks per core
  uint64_t shared_base = 0x100000;
  uint64_t private_base = 0x800000;
};

Trace gen_workload(WorkloadKind kind, uint32_t cores,
                   const WorkloadParams& p, uint64_t seed);

} // namespace bedrock
