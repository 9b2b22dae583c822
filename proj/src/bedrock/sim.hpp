#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bedrock/cache.hpp"
#include "bedrock/net.hpp"
#include "bedrock/states.hpp"

namespace bedrock {

struct WatchdogDeadlock : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadTrace : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EngineKind : uint8_t { Fsm, Ucode, Hybrid };
const char* to_string(EngineKind k);
EngineKind engine_from_string(const std::string& s);

struct SystemConfig {
  uint32_t cores = 2;
  Variant variant = Variant::MOESIF;
  EngineKind engine = EngineKind::Fsm;
  CacheOrg org;
  uint32_t num_cce = 1;
  uint32_t fill_width = 512;     // bits
  uint32_t net_latency = 1;      // cycles per hop
  uint32_t channel_width = 512;  // bits per network beat
  uint32_t mem_latency = 20;
  uint64_t seed = 1;
  uint64_t watchdog = 100'000; // cycles without progress before giving up
};

enum class TraceOp : uint8_t { Load, Store, Amo, UcLoad, UcStore };
const char* to_string(TraceOp op);
TraceOp trace_op_from_string(const std::string& s);

struct TraceEvent {
  uint32_t core = 0;
  TraceOp op = TraceOp::Load;
  uint64_t addr = 0;
  uint32_t size = 8;
  bool operator==(const TraceEvent&) const = default;
};
using Trace = std::vector<TraceEvent>;

// Plain text, one event per line: `core op addr_hex size`.  Blank lines and
// `#` comments ignored.
Trace parse_trace(std::istream& in);
void write_trace(std::ostream& out, const Trace& t);

struct LogEntry {
  uint32_t core = 0;
  TraceOp op = TraceOp::Load;
  uint64_t addr = 0;
  WordToken value; // token read, or written for stores
  uint64_t issued = 0;
  uint64_t completed = 0;
  bool hit = false;
  bool operator==(const LogEntry&) const = default;
};

struct RunStats {
  uint64_t total_cycles = 0;
  uint64_t events = 0;
  uint64_t hits = 0;
  uint64_t misses = 0;
  uint64_t silent_upgrades = 0;
  // Counted by network taps, independently of the engines' own stats.
  uint64_t invalidations = 0;
  uint64_t transfers = 0;
  uint64_t mem_fills = 0;
  uint64_t upgrades = 0;
  uint64_t writebacks = 0;
  uint64_t mem_reads = 0;
  uint64_t mem_writes = 0;
  uint64_t coherent_requests = 0; // transactions the directories completed
  std::map<uint64_t, uint64_t> occupancy; // charged cycles -> count
  std::vector<uint64_t> engine_busy;      // per controller
  std::vector<uint64_t> lce_busy;         // per cache
  std::vector<LogEntry> log;
  bool quiescent = false;    // pending 0, networks and memory drained
  bool shadow_match = false; // cache states agree with the directory
  bool operator==(const RunStats&) const = default;
};

// Run the trace to completion on a freshly built system.  Deterministic for
// a given config (the seed feeds every network's arbitration).
RunStats simulate(const SystemConfig& cfg, const Trace& trace);

// Every transaction closed by one of the three fill sources.
bool fill_sources_balance(const RunStats& s);
// Per core and address, observed write tokens never go backwards.
bool sc_per_core(const std::vector<LogEntry>& log);

std::string stats_csv(const RunStats& s);

} // namespace bedrock
