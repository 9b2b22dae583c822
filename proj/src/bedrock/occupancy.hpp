#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bedrock/sim.hpp"

namespace bedrock {

// One request-occupancy table sweep: engine at C caches, N data beats,
// and a requested sharer count (rows clamp it to what they can seat).
struct OccupancyConfig {
  EngineKind engine = EngineKind::Fsm;
  uint32_t caches = 8;  // C
  uint32_t beats = 4;   // N
  uint32_t sharers = 3; // invalidation targets beyond requestor and owner
};

struct OccupancyRow {
  std::string name;     // e.g. "write S/O"
  uint32_t sharers = 0; // sharer count the scenario actually seated
  uint64_t expected = 0;
  uint64_t measured = 0;
  bool match = false;
};

// Run each table row as an isolated no-contention scenario against a real
// engine and compare the charged cycles with the closed-form value.
std::vector<OccupancyRow> occupancy_report(const OccupancyConfig& cfg);

// Cache-controller request and command costs against their closed forms.
std::vector<OccupancyRow> lce_occupancy_report(uint32_t beats);

} // namespace bedrock
