#pragma once

#include <array>
#include <stdexcept>

#include "bedrock/fsm_cce.hpp"
#include "bedrock/ucode/isa.hpp"

namespace bedrock::ucode {

struct IllegalInstruction : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct WfqDeadlock : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CoherentRequestInUncachedMode : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UcodeOptions {
  bool start_uncached = false; // bypass the microcode, memory traffic only
  uint64_t watchdog = 10000;   // cycles one transaction may stay open
  bool auto_fwd = true;        // message unit forwards memory responses
};

struct UcodeStats {
  uint64_t retired = 0;      // instructions completed
  uint64_t mispredicts = 0;  // one bubble each
  uint64_t extra_cycles = 0; // multi-cycle occupancy beyond the first cycle
  uint64_t busy_cycles = 0;  // total charged execute cycles
  uint64_t stall_cycles = 0; // cycles parked on an empty queue
};

// Microcode-programmed controller: a two-stage engine executing decoded
// records, plus the same concurrent message unit as the fixed-function
// implementation.  Mispredicted branches cost one bubble; queue waits stall
// without charge.
class UcodeCce : public CceEngine {
public:
  UcodeCce(const CceConfig& cfg, const MicrocodeProgram& prog, Network* req,
           Network* cmd, Network* fill, Network* resp, Memory* mem,
           UcodeOptions opts = {});
  UcodeCce(const CceConfig& cfg, const MicrocodeProgram& prog,
           UcodeOptions opts, Network* req, Network* cmd, Network* fill,
           Network* resp, Memory* mem)
      : UcodeCce(cfg, prog, req, cmd, fill, resp, mem, opts) {}

  void step(uint64_t now) override;
  bool idle(uint64_t now) const override;
  const CceStats& stats() const override { return stats_; }
  DirectorySegment& dir() override { return dir_; }
  PendingBits& pending() override { return pending_; }
  const CceConfig& config() const override { return cfg_; }

  SpecBits& spec() { return spec_; }
  const UcodeStats& ucode_stats() const { return ustats_; }
  uint64_t reg(int i) const { return gprs_.at((size_t)i); }
  void set_auto_fwd(bool v) { opts_.auto_fwd = v; }

private:
  uint32_t wg_of(uint64_t addr) const {
    return uint32_t(addr / cfg_.block_bytes) % cfg_.sets;
  }
  bool cacheable(uint64_t addr) const { return addr < cfg_.uncached_base; }
  void step_mem(uint64_t now);
  void step_uncached_only(uint64_t now);
  void exec(uint64_t now);
  void run_inv(uint64_t now);
  void retire(uint64_t now, uint32_t cycles, int32_t next_pc,
              bool mispredict = false);
  void charge(uint64_t now, uint32_t cycles);
  void close_txn();
  uint64_t sreg_read(Sreg s) const;
  void sreg_write(Sreg s, uint64_t v);
  uint64_t sel_addr(const Instr& i) const;
  uint32_t sel_lce(const Instr& i) const;
  uint32_t sel_way(const Instr& i) const;
  St sel_state(StateSel sel, St imm) const;
  void do_popq_lce_req(uint64_t now, const Instr& i);
  bool do_popq_lce_resp(uint64_t now, const Instr& i);
  void do_pushq(uint64_t now, const Instr& i);
  void set_flag(uint32_t bit, bool v) {
    if (v) fl_ |= bit;
    else fl_ &= ~bit;
  }

  CceConfig cfg_;
  MicrocodeProgram prog_;
  UcodeOptions opts_;
  Network* req_;
  Network* cmd_;
  Network* fill_;
  Network* resp_;
  Memory* mem_;

  DirectorySegment dir_;
  PendingBits pending_;
  SpecBits spec_;

  // Architectural state.
  int32_t pc_ = 0;
  std::array<uint64_t, 8> gprs_{};
  Mshr mshr_;
  uint32_t fl_ = 0;  // MSHR flag word
  St cohst_ = St::E; // coherence state register
  Message areq_;     // active request message (payload source)
  WayGroupResult wgres_;

  // Timing.
  uint64_t exec_busy_until_ = 0;
  uint64_t mem_busy_until_ = 0;
  bool txn_active_ = false;
  bool txn_coherent_ = false;
  uint64_t txn_charge_ = 0;
  uint64_t txn_start_ = 0;

  // Invalidation sub-FSM.
  bool inv_active_ = false;
  std::vector<std::pair<uint32_t, uint32_t>> inv_targets_; // (lce, way)
  size_t inv_sent_ = 0;
  uint32_t inv_acks_left_ = 0;
  uint64_t inv_charged_ = 0;

  CceStats stats_;
  UcodeStats ustats_;
};

} // namespace bedrock::ucode
