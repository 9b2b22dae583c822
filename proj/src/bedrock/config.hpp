#pragma once

#include <iosfwd>

#include "bedrock/sim.hpp"

namespace bedrock {

struct BadConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat `key = value` text; `#` comments and blank lines ignored.  Unknown
// keys are errors.  Keys: cores, variant, engine, sets, assoc, block_bytes,
// num_cce, fill_width, net_latency, channel_width, mem_latency, seed,
// watchdog.
SystemConfig parse_system_config(std::istream& in);
// Every parameter echoed back, parseable by parse_system_config.
std::string config_text(const SystemConfig& cfg);

} // namespace bedrock
