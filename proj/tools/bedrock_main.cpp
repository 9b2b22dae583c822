#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bedrock/checker.hpp"
#include "bedrock/config.hpp"
#include "bedrock/dir.hpp"
#include "bedrock/latency_model.hpp"
#include "bedrock/occupancy.hpp"
#include "bedrock/sim.hpp"
#include "bedrock/ucode/assembler.hpp"
#include "bedrock/workload.hpp"

using nlohmann::json;
using namespace bedrock;

namespace {

Mutation mutation_from_string(const std::string& s) {
  for (int i = 0; i <= int(Mutation::StaleMemoryFill); ++i)
    if (s == to_string(Mutation(i))) return Mutation(i);
  throw CLI::ValidationError("mutation", "unknown mutation: " + s);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json stats_json(const RunStats& s) {
  json j;
  j["total_cycles"] = s.total_cycles;
  j["events"] = s.events;
  j["hits"] = s.hits;
  j["misses"] = s.misses;
  j["silent_upgrades"] = s.silent_upgrades;
  j["coherent_requests"] = s.coherent_requests;
  j["invalidations"] = s.invalidations;
  j["mem_fills"] = s.mem_fills;
  j["transfers"] = s.transfers;
  j["upgrades"] = s.upgrades;
  j["writebacks"] = s.writebacks;
  j["mem_reads"] = s.mem_reads;
  j["mem_writes"] = s.mem_writes;
  j["engine_busy"] = s.engine_busy;
  j["lce_busy"] = s.lce_busy;
  j["quiescent"] = s.quiescent;
  j["shadow_match"] = s.shadow_match;
  return j;
}

int cmd_simulate(const std::string& config_path,
                 const std::string& trace_path,
                 const std::string& workload_name, const std::string& engine,
                 int cores, long long seed, bool as_json) {
  SystemConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open " + config_path);
    cfg = parse_system_config(in);
  }
  if (!engine.empty()) cfg.engine = engine_from_string(engine);
  if (cores > 0) cfg.cores = uint32_t(cores);
  if (seed >= 0) cfg.seed = uint64_t(seed);
  Trace trace;
  if (!trace_path.empty()) {
    std::ifstream in(trace_path);
    if (!in) throw std::runtime_error("cannot open " + trace_path);
    trace = parse_trace(in);
  } else {
    trace = gen_workload(workload_from_string(workload_name), cfg.cores, {},
                         cfg.seed);
  }
  RunStats s = simulate(cfg, trace);
  if (as_json)
    std::cout << stats_json(s).dump(2) << "\n";
  else
    std::cout << stats_csv(s);
  if (!s.quiescent || !s.shadow_match || !fill_sources_balance(s) ||
      !sc_per_core(s.log)) {
    std::cerr << "error: run failed its consistency checks\n";
    return 2;
  }
  return 0;
}

int cmd_check(const std::string& variant, int caches, uint64_t max_states,
              const std::string& mutation, const std::string& trace_out) {
  std::vector<Variant> variants;
  if (variant == "all")
    for (int v = 0; v <= int(Variant::MOESIF); ++v)
      variants.push_back(Variant(v));
  else
    variants.push_back(variant_from_string(variant));

  bool failed = false;
  for (Variant v : variants) {
    CheckerConfig cc;
    cc.variant = v;
    cc.num_caches = uint32_t(caches);
    cc.max_states = max_states;
    cc.mutation = mutation_from_string(mutation);
    CheckResult r = explore(ProtocolTables::standard(), cc);
    std::cout << to_string(v) << " " << caches << " " << r.states_visited
              << " " << r.transitions << " " << r.violations.size() << " "
              << r.deadlocks.size() << (r.bounded ? " (bounded)" : "")
              << "\n";
    if (r.ok()) continue;
    failed = true;
    const std::vector<std::string>* trace = nullptr;
    std::string label;
    if (!r.violations.empty()) {
      trace = &r.violations.front().trace;
      label = "violation of " + r.violations.front().invariant;
    } else {
      trace = &r.deadlocks.front();
      label = "deadlock";
    }
    std::ostream* out = &std::cerr;
    std::ofstream f;
    if (!trace_out.empty()) {
      f.open(trace_out);
      out = &f;
    }
    *out << "# " << to_string(v) << ": " << label << "\n";
    for (const std::string& step : *trace) *out << step << "\n";
  }
  return failed ? 1 : 0;
}

int cmd_overhead(std::vector<uint32_t> caches, std::vector<uint32_t> sizes) {
  std::cout << "kind,caches,cache_kib,overhead_pct\n";
  for (DirKind k :
       {DirKind::DuplicateTag, DirKind::Complete, DirKind::Coarse8}) {
    const char* name = k == DirKind::DuplicateTag ? "duplicate-tag"
                       : k == DirKind::Complete   ? "complete"
                                                  : "coarse8";
    for (uint32_t c : caches)
      for (uint32_t s : sizes)
        std::cout << name << "," << c << "," << s << "," << std::fixed
                  << std::setprecision(2) << storage_overhead_pct(k, c, s)
                  << "\n";
  }
  return 0;
}

int cmd_occupancy(const std::string& engine, int caches, int beats,
                  int sharers, bool lce, bool as_json) {
  std::vector<OccupancyRow> rows;
  if (lce) {
    rows = lce_occupancy_report(uint32_t(beats));
  } else {
    OccupancyConfig cfg;
    cfg.engine = engine_from_string(engine);
    cfg.caches = uint32_t(caches);
    cfg.beats = uint32_t(beats);
    cfg.sharers = uint32_t(sharers);
    rows = occupancy_report(cfg);
  }
  bool all_match = true;
  if (as_json) {
    json j = json::array();
    for (const OccupancyRow& r : rows) {
      j.push_back({{"row", r.name},
                   {"sharers", r.sharers},
                   {"expected", r.expected},
                   {"measured", r.measured},
                   {"match", r.match}});
      all_match = all_match && r.match;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "row,sharers,expected,measured,match\n";
    for (const OccupancyRow& r : rows) {
      std::cout << r.name << "," << r.sharers << "," << r.expected << ","
                << r.measured << "," << (r.match ? "yes" : "no") << "\n";
      all_match = all_match && r.match;
    }
  }
  return all_match ? 0 : 1;
}

int cmd_latency(const std::string& protocol, const std::string& row,
                const LatencyCosts& costs) {
  ModelProtocol p = model_protocol_from_string(protocol);
  std::cout << "row,formula,cycles\n";
  for (const LatencyRow& r : latency_rows(p)) {
    if (!row.empty() && r.key != row) continue;
    std::cout << "\"" << r.key << "\",\"" << r.formula << "\","
              << eval_latency_model(p, r.key, costs) << "\n";
  }
  return 0;
}

int cmd_gen(const std::string& workload, int cores, long long seed,
            const WorkloadParams& params, const std::string& out_path) {
  Trace t = gen_workload(workload_from_string(workload), uint32_t(cores),
                         params, uint64_t(seed));
  if (out_path.empty()) {
    write_trace(std::cout, t);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    write_trace(out, t);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"BedRock coherence system: simulator, checker, and analysis"};
  app.require_subcommand(1);

  // simulate
  std::string sim_config, sim_trace, sim_workload = "random-walk", sim_engine;
  int sim_cores = 0;
  long long sim_seed = -1;
  bool sim_json = false;
  auto* sim = app.add_subcommand("simulate", "run a trace to quiescence");
  sim->add_option("--config", sim_config, "system config file");
  sim->add_option("--trace", sim_trace, "trace file (core op addr size)");
  sim->add_option("--workload", sim_workload,
                  "generated workload when no trace is given");
  sim->add_option("--engine", sim_engine, "fsm, ucode, or hybrid");
  sim->add_option("--cores", sim_cores, "number of cores");
  sim->add_option("--seed", sim_seed, "rng seed");
  sim->add_flag("--json", sim_json, "emit stats as json");

  // check
  std::string chk_variant = "all", chk_mutation = "none", chk_trace_out;
  int chk_caches = 2;
  uint64_t chk_max_states = 5'000'000;
  auto* chk = app.add_subcommand("check", "explore the protocol state space");
  chk->add_option("--variant", chk_variant, "protocol variant or 'all'");
  chk->add_option("--caches", chk_caches, "caches sharing the block")
      ->check(CLI::Range(1, 6));
  chk->add_option("--max-states", chk_max_states, "exploration bound");
  chk->add_option("--mutation", chk_mutation, "seeded fault to inject");
  chk->add_option("--trace-out", chk_trace_out,
                  "write the first counterexample trace here");

  // asm
  std::string asm_file;
  auto* as = app.add_subcommand("asm", "assemble and list a microcode file");
  as->add_option("file", asm_file, "source file")->required();

  // overhead
  std::vector<uint32_t> ovh_caches = {2,  4,   8,   16,  32,
                                      64, 128, 256, 512, 1024};
  std::vector<uint32_t> ovh_sizes = {32, 64, 128};
  auto* ovh = app.add_subcommand("overhead", "directory storage overhead");
  ovh->add_option("--caches", ovh_caches, "cache counts");
  ovh->add_option("--sizes", ovh_sizes, "L1 sizes in KiB");

  // occupancy
  std::string occ_engine = "fsm";
  int occ_caches = 8, occ_beats = 4, occ_sharers = 3;
  bool occ_lce = false, occ_json = false;
  auto* occ = app.add_subcommand("occupancy",
                                 "measured vs. closed-form request costs");
  occ->add_option("--engine", occ_engine, "fsm, ucode, or hybrid");
  occ->add_option("--cores", occ_caches, "caches C");
  occ->add_option("--beats", occ_beats, "data beats N");
  occ->add_option("--sharers", occ_sharers, "sharers to invalidate");
  occ->add_flag("--lce", occ_lce, "cache-side table instead of the engine");
  occ->add_flag("--json", occ_json, "emit rows as json");

  // latency-model
  std::string lat_protocol = "bedrock", lat_row;
  LatencyCosts costs;
  auto* lat = app.add_subcommand("latency-model",
                                 "analytical transaction latency");
  lat->add_option("--protocol", lat_protocol, "bedrock or canonical");
  lat->add_option("--row", lat_row, "single row key (default: all)");
  lat->add_option("--req", costs.req);
  lat->add_option("--dir", costs.dir);
  lat->add_option("--mem", costs.mem);
  lat->add_option("--data", costs.data);
  lat->add_option("--cmd", costs.cmd);
  lat->add_option("--fill", costs.fill);
  lat->add_option("--ack", costs.ack);
  lat->add_option("--inv", costs.inv);
  lat->add_option("--inv-ack", costs.inv_ack);
  lat->add_option("--fwd-get", costs.fwd_get);
  lat->add_option("--ack-unit", costs.ack_unit);
  lat->add_option("--n", costs.n, "sharer count N");

  // gen
  std::string gen_workload_name = "random-walk", gen_out;
  int gen_cores = 4;
  long long gen_seed = 1;
  WorkloadParams gen_params;
  auto* gen = app.add_subcommand("gen", "generate a workload trace");
  gen->add_option("--workload", gen_workload_name, "workload kind");
  gen->add_option("--cores", gen_cores, "number of cores");
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--iterations", gen_params.iterations);
  gen->add_option("--burst", gen_params.burst);
  gen->add_option("--epochs", gen_params.epochs);
  gen->add_option("--blocks", gen_params.blocks);
  gen->add_option("--working-set", gen_params.working_set);
  gen->add_option("--out", gen_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(sim_config, sim_trace, sim_workload, sim_engine,
                          sim_cores, sim_seed, sim_json);
    if (chk->parsed())
      return cmd_check(chk_variant, chk_caches, chk_max_states, chk_mutation,
                       chk_trace_out);
    if (as->parsed()) {
      std::cout << ucode::listing(ucode::assemble(slurp(asm_file)));
      return 0;
    }
    if (ovh->parsed()) return cmd_overhead(ovh_caches, ovh_sizes);
    if (occ->parsed())
      return cmd_occupancy(occ_engine, occ_caches, occ_beats, occ_sharers,
                           occ_lce, occ_json);
    if (lat->parsed()) return cmd_latency(lat_protocol, lat_row, costs);
    if (gen->parsed())
      return cmd_gen(gen_workload_name, gen_cores, gen_seed, gen_params,
                     gen_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
