#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bedrock/tables.hpp"

namespace bedrock {

// Seeded protocol faults for mutation-coverage runs.
enum class Mutation : uint8_t {
  None = 0,
  WrongNextState,        // shared read grants E anyway
  DroppedCohAck,         // requestor never closes the transaction
  SkippedInvalidation,   // store grant leaves sharers valid
  PrematurePendingClear, // way group reopens before the CohAck
  ReorderedCompound,     // ST_TR delivered as TR: owner keeps its state
  SelfGrantM,            // cache takes write permission on a local load
  StaleMemoryFill,       // memory serves a fill past a dirty owner
};
const char* to_string(Mutation m);

struct CheckerConfig {
  Variant variant = Variant::MESI;
  uint32_t num_caches = 2;
  uint64_t max_states = 5'000'000;
  Mutation mutation = Mutation::None;
};

struct Violation {
  std::string invariant; // "swmr" or "data-value"
  std::vector<std::string> trace;
};

struct CheckResult {
  uint64_t states_visited = 0;
  uint64_t transitions = 0;
  std::vector<Violation> violations;
  std::vector<std::vector<std::string>> deadlocks;
  bool bounded = false; // hit max_states; partial result
  bool ok() const { return violations.empty() && deadlocks.empty(); }
};

// Exhaustive breadth-first exploration of one cache block under the given
// protocol tables: every cache may issue loads and stores, every in-flight
// message may be delivered in any order, and the directory serializes
// transactions on a pending counter. Checks the single-writer-multiple-reader
// and data-value invariants at every state and reports unserviceable states
// as deadlocks. Stops at the first violation of each kind.
CheckResult explore(const ProtocolTables& tables, const CheckerConfig& cfg);

} // namespace bedrock
