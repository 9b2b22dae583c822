#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bedrock {

struct UnknownRow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Four-network protocol with coherence acks vs. the classic three-network
// directory protocol.
enum class ModelProtocol : uint8_t { BedRock, Canonical };
const char* to_string(ModelProtocol p);
ModelProtocol model_protocol_from_string(const std::string& s);

// Per-phase cycle costs substituted into the transaction formulas.
struct LatencyCosts {
  uint64_t req = 1;
  uint64_t dir = 1;
  uint64_t mem = 1;
  uint64_t data = 1;
  uint64_t cmd = 1;
  uint64_t fill = 1;
  uint64_t ack = 1;
  uint64_t inv = 1;
  uint64_t inv_ack = 1;
  uint64_t fwd_get = 1;
  uint64_t ack_unit = 1; // cost per accumulated ack in AckCount(N)
  uint32_t n = 0;        // sharer count N
};

struct LatencyRow {
  std::string key;     // e.g. "store I,S->M S" (+inv marks the variant
                       // that also invalidates sharers)
  std::string formula; // symbolic form, Max(a, b) for concurrent arms
};

// All transaction rows of one protocol's analytical model, in table order.
const std::vector<LatencyRow>& latency_rows(ModelProtocol p);

// Evaluate a row's formula under the given costs.
uint64_t eval_latency_model(ModelProtocol p, const std::string& row_key,
                            const LatencyCosts& costs);

} // namespace bedrock
