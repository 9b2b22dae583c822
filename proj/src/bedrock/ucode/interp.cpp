#include "bedrock/ucode/interp.hpp"

#include <algorithm>

namespace bedrock::ucode {

namespace {
uint32_t beats_of_size(uint32_t size_bytes, uint32_t width_bits) {
  uint64_t bits = uint64_t(size_bytes) * 8;
  return uint32_t(std::max<uint64_t>(1, (bits + width_bits - 1) / width_bits));
}

bool is_uncached_req(ReqType t) {
  return t == ReqType::UcLoad || t == ReqType::UcStore || t == ReqType::UcAmo;
}
} // namespace

UcodeCce::UcodeCce(const CceConfig& cfg, const MicrocodeProgram& prog,
                   Network* req, Network* cmd, Network* fill, Network* resp,
                   Memory* mem, UcodeOptions opts)
    : cfg_(cfg), prog_(prog), opts_(opts), req_(req), cmd_(cmd), fill_(fill),
      resp_(resp), mem_(mem),
      dir_(DirConfig{cfg.num_lce, cfg.sets, cfg.assoc, cfg.block_bytes}),
      pending_(cfg.sets), spec_(cfg.sets) {
  (void)fill_;
}

void UcodeCce::step(uint64_t now) {
  if (opts_.start_uncached) {
    step_uncached_only(now);
    return;
  }
  // Coherence acks retire without engine involvement.
  for (;;) {
    auto cand = resp_->deliverable(cfg_.endpoint(), now);
    size_t idx = cand.size();
    for (size_t i = 0; i < cand.size(); ++i)
      if (cand[i].rsp == RspType::CohAck) {
        idx = i;
        break;
      }
    if (idx == cand.size()) break;
    Message m = resp_->deliver_choice(cfg_.endpoint(), idx, now);
    pending_.dec(wg_of(m.addr));
    ++stats_.coh_acks;
  }
  step_mem(now);
  exec(now);
}

bool UcodeCce::idle(uint64_t now) const {
  return !txn_active_ && !inv_active_ && now >= exec_busy_until_ &&
         now >= mem_busy_until_;
}

// ----- memory response unit -----

void UcodeCce::step_mem(uint64_t now) {
  if (!opts_.auto_fwd) return;
  if (now < mem_busy_until_) return;
  if (!mem_->response_ready(cfg_.id, now)) return;
  const MemResponse& peek = mem_->front(cfg_.id);
  uint32_t wg = wg_of(peek.cmd.addr);

  if (peek.cmd.speculative) {
    const SpecState& sb = spec_.get(wg);
    if (sb.spec && !sb.squash && !sb.fwd_mod) return; // await resolution
    MemResponse r = mem_->pop(cfg_.id);
    ++stats_.mem_responses;
    uint32_t n = cfg_.beats();
    mem_busy_until_ = now + n;
    stats_.mem_busy += n;
    if (!sb.squash) {
      Message d;
      d.cmd = CmdType::DATA;
      d.addr = r.cmd.addr;
      d.way = r.cmd.way;
      d.set_state = sb.fwd_mod ? sb.state : r.cmd.state;
      d.size = cfg_.block_bytes;
      d.has_data = true;
      d.data = r.data;
      cmd_->send(cfg_.endpoint(), r.cmd.lce, std::move(d), now);
    }
    spec_.consume(wg);
    pending_.dec(wg);
    return;
  }

  MemResponse r = mem_->pop(cfg_.id);
  ++stats_.mem_responses;
  switch (r.cmd.op) {
  case MemOp::Read: {
    uint32_t n = cfg_.beats();
    mem_busy_until_ = now + n;
    stats_.mem_busy += n;
    Message d;
    d.cmd = CmdType::DATA;
    d.addr = r.cmd.addr;
    d.way = r.cmd.way;
    d.set_state = r.cmd.state;
    d.size = cfg_.block_bytes;
    d.has_data = true;
    d.data = r.data;
    cmd_->send(cfg_.endpoint(), r.cmd.lce, std::move(d), now);
    if (r.cmd.coherent) pending_.dec(wg);
    break;
  }
  case MemOp::Write:
    mem_busy_until_ = now + 1;
    stats_.mem_busy += 1;
    if (r.cmd.coherent) pending_.dec(wg);
    break;
  case MemOp::UcRead:
  case MemOp::UcAmo: {
    uint32_t n = beats_of_size(r.cmd.size, cfg_.fill_width);
    mem_busy_until_ = now + n;
    stats_.mem_busy += n;
    Message d;
    d.cmd = CmdType::UcData;
    d.addr = r.cmd.addr;
    d.size = r.cmd.size;
    d.has_data = true;
    d.data = r.data;
    cmd_->send(cfg_.endpoint(), r.cmd.lce, std::move(d), now);
    if (r.cmd.coherent) pending_.dec(wg);
    break;
  }
  case MemOp::UcWrite: {
    mem_busy_until_ = now + 1;
    stats_.mem_busy += 1;
    Message d;
    d.cmd = CmdType::UcStoreDone;
    d.addr = r.cmd.addr;
    cmd_->send(cfg_.endpoint(), r.cmd.lce, std::move(d), now);
    if (r.cmd.coherent) pending_.dec(wg);
    break;
  }
  }
}

// ----- uncached-only bypass mode -----

void UcodeCce::step_uncached_only(uint64_t now) {
  step_mem(now);
  if (now < exec_busy_until_) return;
  if (!req_->any_deliverable(cfg_.endpoint(), now)) return;
  Message m = req_->deliver_one(cfg_.endpoint(), now);
  if (!is_uncached_req(m.req))
    throw CoherentRequestInUncachedMode("coherent request before sync");
  ++stats_.requests;
  MemCommand c;
  c.op = m.req == ReqType::UcLoad    ? MemOp::UcRead
         : m.req == ReqType::UcStore ? MemOp::UcWrite
                                     : MemOp::UcAmo;
  c.addr = m.addr;
  c.size = m.size;
  c.data = m.data;
  c.lce = m.src;
  c.subop = m.subop;
  c.src_cce = cfg_.id;
  uint32_t cycles = c.op == MemOp::UcWrite
                        ? 1 + beats_of_size(m.size, cfg_.fill_width)
                        : 2;
  exec_busy_until_ = std::max(exec_busy_until_, now) + cycles;
  stats_.req_busy += cycles;
  mem_->send(std::move(c), now);
  ++stats_.uc_busy;
}

// ----- execute stage helpers -----

void UcodeCce::charge(uint64_t now, uint32_t cycles) {
  if (cycles == 0) return;
  exec_busy_until_ = std::max(exec_busy_until_, now) + cycles;
  stats_.req_busy += cycles;
  ustats_.busy_cycles += cycles;
  if (txn_active_) txn_charge_ += cycles;
}

void UcodeCce::close_txn() {
  if (txn_coherent_) stats_.occupancy_log.push_back(txn_charge_);
  txn_active_ = false;
}

void UcodeCce::retire(uint64_t now, uint32_t cycles, int32_t next_pc,
                      bool mispredict) {
  charge(now, cycles + (mispredict ? 1 : 0));
  ++ustats_.retired;
  ustats_.extra_cycles += cycles - 1;
  if (mispredict) ++ustats_.mispredicts;
  pc_ = next_pc;
  if (next_pc == 0 && txn_active_) close_txn();
}

uint64_t UcodeCce::sreg_read(Sreg s) const {
  switch (s) {
  case Sreg::CohState: return (uint64_t)cohst_;
  case Sreg::ReqLce: return mshr_.lce_id;
  case Sreg::Addr: return mshr_.addr;
  case Sreg::LruAddr: return mshr_.lru_addr;
  case Sreg::LruWay: return mshr_.lru_way;
  case Sreg::Way: return mshr_.way_id;
  case Sreg::OwnerLce: return mshr_.owner_lce;
  case Sreg::OwnerWay: return mshr_.owner_way;
  case Sreg::OwnerState: return (uint64_t)mshr_.owner_state;
  case Sreg::AutoFwd: return opts_.auto_fwd ? 1 : 0;
  }
  return 0;
}

void UcodeCce::sreg_write(Sreg s, uint64_t v) {
  switch (s) {
  case Sreg::CohState: cohst_ = (St)v; break;
  case Sreg::ReqLce: mshr_.lce_id = (uint32_t)v; break;
  case Sreg::Addr: mshr_.addr = v; break;
  case Sreg::LruAddr: mshr_.lru_addr = v; break;
  case Sreg::LruWay: mshr_.lru_way = (uint32_t)v; break;
  case Sreg::Way: mshr_.way_id = (uint32_t)v; break;
  case Sreg::OwnerLce: mshr_.owner_lce = (uint32_t)v; break;
  case Sreg::OwnerWay: mshr_.owner_way = (uint32_t)v; break;
  case Sreg::OwnerState: mshr_.owner_state = (St)v; break;
  case Sreg::AutoFwd: opts_.auto_fwd = v != 0; break;
  }
}

uint64_t UcodeCce::sel_addr(const Instr& i) const {
  return i.addr_sel == AddrSel::Lru ? mshr_.lru_addr : mshr_.addr;
}

uint32_t UcodeCce::sel_lce(const Instr& i) const {
  return i.lce_sel == LceSel::Owner ? mshr_.owner_lce : mshr_.lce_id;
}

uint32_t UcodeCce::sel_way(const Instr& i) const {
  switch (i.way_sel) {
  case WaySel::Owner: return mshr_.owner_way;
  case WaySel::Lru: return mshr_.lru_way;
  default: return mshr_.way_id;
  }
}

St UcodeCce::sel_state(StateSel sel, St imm) const {
  return sel == StateSel::CohReg ? cohst_ : imm;
}

// ----- queue operations -----

void UcodeCce::do_popq_lce_req(uint64_t now, const Instr& i) {
  Message m = req_->deliver_one(cfg_.endpoint(), now);
  ++stats_.requests;
  areq_ = std::move(m);
  mshr_ = Mshr{};
  fl_ = 0;
  mshr_.msg_type = areq_.req;
  mshr_.subop = areq_.subop;
  mshr_.size = areq_.size;
  mshr_.lce_id = areq_.src;
  mshr_.addr = areq_.addr;
  mshr_.lru_way = areq_.lru_way;
  mshr_.way_id = areq_.lru_way;
  bool write = areq_.req == ReqType::ReqWr || areq_.req == ReqType::UcStore ||
               areq_.req == ReqType::UcAmo;
  bool uncached = is_uncached_req(areq_.req);
  set_flag(FlWrite, write);
  set_flag(FlUncached, uncached);
  set_flag(FlNonExcl, areq_.req == ReqType::ReqRdNE);
  set_flag(FlAtomic, areq_.req == ReqType::UcAmo);
  set_flag(FlCacheable, cacheable(areq_.addr));
  txn_coherent_ = cacheable(areq_.addr) && !uncached;
  if (i.wp) pending_.inc(wg_of(areq_.addr));
}

bool UcodeCce::do_popq_lce_resp(uint64_t now, const Instr& i) {
  auto cand = resp_->deliverable(cfg_.endpoint(), now);
  size_t idx = cand.size();
  for (size_t k = 0; k < cand.size(); ++k)
    if (cand[k].rsp != RspType::CohAck) {
      idx = k;
      break;
    }
  if (idx == cand.size()) return false;
  Message m = resp_->deliver_choice(cfg_.endpoint(), idx, now);
  ++stats_.lce_resp_busy;
  switch (m.rsp) {
  case RspType::DirtyWB: {
    set_flag(FlNullWb, false);
    MemCommand w;
    w.op = MemOp::Write;
    w.addr = m.addr;
    w.size = cfg_.block_bytes;
    w.data = m.data;
    w.src_cce = cfg_.id;
    w.coherent = true;
    if (i.wp) pending_.inc(wg_of(m.addr));
    mem_->send(std::move(w), now);
    retire(now, cfg_.beats(), pc_ + 1);
    break;
  }
  case RspType::NullWB:
    set_flag(FlNullWb, true);
    retire(now, 1, pc_ + 1);
    break;
  default: // InvAck / SyncAck
    retire(now, 1, pc_ + 1);
    break;
  }
  return true;
}

void UcodeCce::do_pushq(uint64_t now, const Instr& i) {
  if (i.q == Queue::MemCmd) {
    MemCommand c;
    c.op = i.mop;
    c.src_cce = cfg_.id;
    c.coherent = true;
    c.lce = mshr_.lce_id;
    uint32_t cycles = 1;
    switch (i.mop) {
    case MemOp::Read:
    case MemOp::Write:
      c.addr = sel_addr(i) & ~uint64_t(cfg_.block_bytes - 1);
      c.size = cfg_.block_bytes;
      c.way = mshr_.lru_way;
      break;
    case MemOp::UcRead:
    case MemOp::UcWrite:
    case MemOp::UcAmo:
      c.addr = sel_addr(i);
      c.size = mshr_.size;
      c.data = areq_.data;
      c.subop = mshr_.subop;
      if (i.mop == MemOp::UcWrite)
        cycles = beats_of_size(mshr_.size, cfg_.fill_width);
      ++stats_.uc_busy;
      break;
    }
    if (i.spec) {
      c.speculative = true;
      spec_.set_spec(wg_of(c.addr));
      set_flag(FlSpec, true);
    }
    if (i.wp) pending_.inc(wg_of(c.addr));
    mem_->send(std::move(c), now);
    retire(now, cycles, pc_ + 1);
    return;
  }
  // LCE command
  Message c;
  c.cmd = i.cmd;
  c.addr = sel_addr(i);
  c.set_state = sel_state(i.st_sel, i.st);
  c.way = sel_way(i);
  if (cmd_has_tr(i.cmd)) {
    c.xfer_state = sel_state(i.xst_sel, i.xst);
    c.xfer_target = mshr_.lce_id;
    c.lru_way = mshr_.lru_way;
    ++stats_.transfers;
  }
  if (i.cmd == CmdType::STW) ++stats_.upgrades;
  if (i.cmd == CmdType::INV) ++stats_.invalidations;
  if (i.cmd == CmdType::ST_WB && i.addr_sel == AddrSel::Lru)
    ++stats_.replacements;
  cmd_->send(cfg_.endpoint(), sel_lce(i), std::move(c), now);
  retire(now, 1, pc_ + 1);
}

// ----- invalidation sequencer -----

void UcodeCce::run_inv(uint64_t now) {
  if (inv_sent_ < inv_targets_.size()) {
    auto [lce, way] = inv_targets_[inv_sent_];
    Message c;
    c.cmd = CmdType::INV;
    c.addr = mshr_.addr;
    cmd_->send(cfg_.endpoint(), lce, std::move(c), now);
    dir_.write_state(lce, mshr_.addr, way, St::I);
    ++stats_.invalidations;
    charge(now, 1);
    ++inv_charged_;
    ++inv_sent_;
    return;
  }
  // Ack collection, one per cycle.
  auto cand = resp_->deliverable(cfg_.endpoint(), now);
  size_t idx = cand.size();
  for (size_t k = 0; k < cand.size(); ++k)
    if (cand[k].rsp == RspType::InvAck) {
      idx = k;
      break;
    }
  if (idx == cand.size()) {
    ++ustats_.stall_cycles;
    return;
  }
  resp_->deliver_choice(cfg_.endpoint(), idx, now);
  charge(now, 1);
  ++inv_charged_;
  if (--inv_acks_left_ == 0) {
    inv_active_ = false;
    ++ustats_.retired;
    ustats_.extra_cycles += inv_charged_ - 1;
    pc_ += 1;
  }
}

// ----- execute stage -----

void UcodeCce::exec(uint64_t now) {
  if (now < exec_busy_until_) return;
  if (txn_active_ && now > txn_start_ + opts_.watchdog)
    throw WfqDeadlock("transaction exceeded the watchdog limit");
  if (inv_active_) {
    run_inv(now);
    return;
  }
  if (pc_ < 0 || (size_t)pc_ >= prog_.code.size())
    throw IllegalInstruction("pc out of range");
  const Instr& i = prog_.code[(size_t)pc_];

  auto r = [&](uint8_t n) { return gprs_[n]; };
  auto branch = [&](bool taken) {
    retire(now, 1, taken ? i.target : pc_ + 1, taken != i.predict);
  };
  auto simple = [&](uint32_t cycles = 1) { retire(now, cycles, pc_ + 1); };
  auto stall = [&] { ++ustats_.stall_cycles; };

  switch (i.op) {
  // ALU
  case Op::Add: gprs_[i.rd] = r(i.ra) + r(i.rb); simple(); break;
  case Op::Addi: gprs_[i.rd] = r(i.ra) + (uint64_t)i.imm; simple(); break;
  case Op::Sub: gprs_[i.rd] = r(i.ra) - r(i.rb); simple(); break;
  case Op::Subi: gprs_[i.rd] = r(i.ra) - (uint64_t)i.imm; simple(); break;
  case Op::Not: gprs_[i.rd] = ~r(i.ra); simple(); break;
  case Op::Neg: gprs_[i.rd] = -r(i.ra); simple(); break;
  case Op::Lsh: gprs_[i.rd] = r(i.ra) << (r(i.rb) & 63); simple(); break;
  case Op::Lshi: gprs_[i.rd] = r(i.ra) << (i.imm & 63); simple(); break;
  case Op::Rsh: gprs_[i.rd] = r(i.ra) >> (r(i.rb) & 63); simple(); break;
  case Op::Rshi: gprs_[i.rd] = r(i.ra) >> (i.imm & 63); simple(); break;
  case Op::And: gprs_[i.rd] = r(i.ra) & r(i.rb); simple(); break;
  case Op::Or: gprs_[i.rd] = r(i.ra) | r(i.rb); simple(); break;
  case Op::Xor: gprs_[i.rd] = r(i.ra) ^ r(i.rb); simple(); break;

  // Branches
  case Op::Beq: branch(r(i.ra) == r(i.rb)); break;
  case Op::Bne: branch(r(i.ra) != r(i.rb)); break;
  case Op::Blt: branch(r(i.ra) < r(i.rb)); break;
  case Op::Ble: branch(r(i.ra) <= r(i.rb)); break;
  case Op::Beqi: branch(r(i.ra) == (uint64_t)i.imm); break;
  case Op::Bneqi: branch(r(i.ra) != (uint64_t)i.imm); break;
  case Op::Bs: branch(sreg_read(i.sa) == r(i.ra)); break;
  case Op::Bsi: branch(sreg_read(i.sa) == (uint64_t)i.imm); break;
  case Op::Bf:
  case Op::Bfnot:
  case Op::Bfz:
  case Op::Bfnz: branch(flag_branch_taken(i.op, i.flags, fl_)); break;

  // Data movement
  case Op::Mov: gprs_[i.rd] = r(i.ra); simple(); break;
  case Op::Movi: gprs_[i.rd] = (uint64_t)i.imm; simple(); break;
  case Op::Movsg: gprs_[i.rd] = sreg_read(i.sa); simple(); break;
  case Op::Movgs: sreg_write(i.sa, r(i.ra)); simple(); break;
  case Op::Movis: sreg_write(i.sa, (uint64_t)i.imm); simple(); break;
  case Op::Clm:
    mshr_ = Mshr{};
    fl_ = 0;
    simple();
    break;
  case Op::Ldflags: fl_ = (uint32_t)r(i.ra); simple(); break;
  case Op::Ldflagsi: fl_ = (uint32_t)i.imm; simple(); break;

  // Flag ALU
  case Op::Sf: fl_ |= i.flags; simple(); break;
  case Op::Sfz: fl_ &= ~i.flags; simple(); break;
  case Op::Andf: gprs_[i.rd] = fl_ & (uint32_t)r(i.ra); simple(); break;
  case Op::Orf: gprs_[i.rd] = fl_ | (uint32_t)r(i.ra); simple(); break;
  case Op::Nandf: gprs_[i.rd] = ~(fl_ & (uint32_t)r(i.ra)); simple(); break;
  case Op::Norf: gprs_[i.rd] = ~(fl_ | (uint32_t)r(i.ra)); simple(); break;
  case Op::Notf: gprs_[i.rd] = ~fl_; simple(); break;

  // Directory
  case Op::Rdp:
    set_flag(FlPending, pending_.count(wg_of(sel_addr(i))) > 1);
    simple();
    break;
  case Op::Rdw: {
    wgres_ = dir_.read_way_group(mshr_.addr, mshr_.lce_id, mshr_.lru_way);
    mshr_.lru_state = wgres_.lru_entry.state;
    mshr_.lru_addr =
        dir_.addr_of(dir_.set_of(mshr_.addr), wgres_.lru_entry.tag);
    simple(dir_.way_group_read_latency());
    break;
  }
  case Op::Rde: {
    DirEntry e = dir_.read_entry(sel_lce(i), sel_addr(i), sel_way(i));
    gprs_[i.rd] = (e.tag << 3) | (uint64_t)e.state;
    simple(2);
    break;
  }
  case Op::Wdp:
    if (i.imm) pending_.inc(wg_of(sel_addr(i)));
    else pending_.dec(wg_of(sel_addr(i)));
    simple();
    break;
  case Op::Clp: {
    uint32_t wg = wg_of(sel_addr(i));
    while (pending_.count(wg) > 0) pending_.dec(wg);
    simple();
    break;
  }
  case Op::Clr:
    dir_.clear_row(dir_.set_of(sel_addr(i)), 0);
    simple();
    break;
  case Op::Wde:
    dir_.write_entry(sel_lce(i), sel_addr(i), sel_way(i),
                     sel_state(i.st_sel, i.st));
    simple();
    break;
  case Op::Wds:
    dir_.write_state(sel_lce(i), sel_addr(i), sel_way(i),
                     sel_state(i.st_sel, i.st));
    simple();
    break;
  case Op::Gad: {
    GadResult g = gad(wgres_, mshr_.lce_id, (fl_ & FlWrite) != 0);
    mshr_.way_id = g.req_hit ? g.req_addr_way : mshr_.lru_way;
    mshr_.owner_lce = g.owner_lce;
    mshr_.owner_way = g.owner_way;
    mshr_.owner_state = g.owner_state;
    set_flag(FlCachedS, g.cached_S);
    set_flag(FlCachedE, g.cached_E);
    set_flag(FlCachedM, g.cached_M);
    set_flag(FlCachedO, g.cached_O);
    set_flag(FlCachedF, g.cached_F);
    set_flag(FlUpgrade, g.upgrade);
    bool rof = g.req_hit && g.req_state != St::S;
    set_flag(FlReqOwns, rof);
    // Only dirty or owned victims owe an eviction command.
    bool evict = g.replacement && !(fl_ & FlUncached) &&
                 (mshr_.lru_state == St::E || mshr_.lru_state == St::M ||
                  mshr_.lru_state == St::O);
    set_flag(FlReplace, evict);
    // An uncached request flushing the requestor's own copy reuses the
    // owner routing fields.
    if (!g.owner_found && rof) {
      mshr_.owner_lce = mshr_.lce_id;
      mshr_.owner_way = g.req_addr_way;
      mshr_.owner_state = g.req_state;
    }
    simple();
    break;
  }

  // Queues
  case Op::Wfq: {
    auto avail = [&](Queue q) {
      switch (q) {
      case Queue::LceReq: return req_->any_deliverable(cfg_.endpoint(), now);
      case Queue::LceResp: {
        auto cand = resp_->deliverable(cfg_.endpoint(), now);
        for (const auto& m : cand)
          if (m.rsp != RspType::CohAck) return true;
        return false;
      }
      case Queue::MemResp: return mem_->response_ready(cfg_.id, now);
      default: return true;
      }
    };
    bool ready = false;
    for (int q = 0; q <= (int)Queue::MemCmd && !ready; ++q)
      if (i.qmask & (1u << q)) ready = avail((Queue)q);
    if (!ready) {
      stall();
      return;
    }
    if (!txn_active_ && (i.qmask & (1u << (int)Queue::LceReq))) {
      txn_active_ = true;
      txn_coherent_ = false;
      txn_charge_ = 0;
      txn_start_ = now;
    }
    simple();
    break;
  }
  case Op::Popq:
    switch (i.q) {
    case Queue::LceReq:
      if (!req_->any_deliverable(cfg_.endpoint(), now)) {
        stall();
        return;
      }
      do_popq_lce_req(now, i);
      simple();
      break;
    case Queue::LceResp:
      if (!do_popq_lce_resp(now, i)) {
        stall();
        return;
      }
      break;
    case Queue::MemResp:
      if (!mem_->response_ready(cfg_.id, now)) {
        stall();
        return;
      }
      // Hand the head response to the message unit this cycle.
      {
        bool saved = opts_.auto_fwd;
        opts_.auto_fwd = true;
        uint64_t before = mem_busy_until_;
        mem_busy_until_ = 0;
        step_mem(now);
        uint64_t cycles = mem_busy_until_ > now ? mem_busy_until_ - now : 1;
        mem_busy_until_ = before;
        opts_.auto_fwd = saved;
        simple((uint32_t)cycles);
      }
      break;
    default: throw IllegalInstruction("popq on an outbound queue");
    }
    break;
  case Op::Poph:
    switch (i.q) {
    case Queue::LceReq: {
      auto cand = req_->deliverable(cfg_.endpoint(), now);
      if (cand.empty()) {
        stall();
        return;
      }
      gprs_[i.rd] = cand.front().addr;
      simple();
      break;
    }
    case Queue::LceResp: {
      auto cand = resp_->deliverable(cfg_.endpoint(), now);
      if (cand.empty()) {
        stall();
        return;
      }
      gprs_[i.rd] = cand.front().addr;
      simple();
      break;
    }
    case Queue::MemResp:
      if (!mem_->response_ready(cfg_.id, now)) {
        stall();
        return;
      }
      gprs_[i.rd] = mem_->front(cfg_.id).cmd.addr;
      simple();
      break;
    default: throw IllegalInstruction("poph on an outbound queue");
    }
    break;
  case Op::Pushq: do_pushq(now, i); break;
  case Op::Specq: {
    uint32_t wg = wg_of(sel_addr(i));
    switch (i.sq) {
    case SpecqOp::Squash: spec_.resolve_squash(wg); break;
    case SpecqOp::FwdMod:
      spec_.resolve_fwd_mod(wg, sel_state(i.st_sel, i.st));
      break;
    case SpecqOp::Unset: spec_.unset(wg); break;
    }
    simple();
    break;
  }
  case Op::Inv: {
    inv_targets_.clear();
    for (uint32_t lce = 0; lce < cfg_.num_lce; ++lce)
      if (lce != mshr_.lce_id && wgres_.sharers[lce].hit &&
          wgres_.sharers[lce].state == St::S)
        inv_targets_.push_back({lce, wgres_.sharers[lce].way});
    if (inv_targets_.empty()) {
      // Nothing to do: the sequencer elides the instruction.
      pc_ += 1;
      return;
    }
    inv_active_ = true;
    inv_sent_ = 0;
    inv_acks_left_ = (uint32_t)inv_targets_.size();
    inv_charged_ = 0;
    run_inv(now);
    break;
  }
  }
}

} // namespace bedrock::ucode
