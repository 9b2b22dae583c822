#include "bedrock/hybrid_cce.hpp"

#include <algorithm>

namespace bedrock {

namespace {
CmdType compose_cmd(bool st, bool tr, bool wb) {
  if (st && tr && wb) return CmdType::ST_TR_WB;
  if (st && tr) return CmdType::ST_TR;
  if (st && wb) return CmdType::ST_WB;
  if (tr) return CmdType::TR;
  if (wb) return CmdType::WB;
  return CmdType::ST;
}

uint32_t beats_of_size(uint32_t size_bytes, uint32_t width_bits) {
  uint64_t bits = uint64_t(size_bytes) * 8;
  return uint32_t(std::max<uint64_t>(1, (bits + width_bits - 1) / width_bits));
}
} // namespace

HybridCce::HybridCce(const CceConfig& cfg, const ProtocolTables& tables,
                     Network* req, Network* cmd, Network* fill, Network* resp,
                     Memory* mem, HybridOptions opts)
    : cfg_(cfg), opts_(std::move(opts)), tables_(tables), req_(req), cmd_(cmd),
      fill_(fill), resp_(resp), mem_(mem),
      dir_(DirConfig{cfg.num_lce, cfg.sets, cfg.assoc, cfg.block_bytes}),
      pending_(cfg.sets), spec_(cfg.sets) {
  mode_ = opts_.start_uncached ? Mode::UncachedOnly : Mode::Coherent;
}

void HybridCce::charge(uint64_t now, uint32_t cycles) {
  req_busy_until_ = std::max(req_busy_until_, now) + cycles;
  stats_.req_busy += cycles;
  txn_charge_ += cycles;
}

void HybridCce::send_cmd(uint32_t dst, Message m, uint64_t now) {
  cmd_->send(cfg_.endpoint(), dst, std::move(m), now);
}

void HybridCce::send_mem(MemCommand c, uint64_t now) {
  ++outstanding_mem_;
  mem_->send(std::move(c), now);
}

bool HybridCce::take_pulse(std::deque<uint64_t>& q, uint64_t now) {
  if (q.empty() || q.front() > now) return false;
  q.pop_front();
  return true;
}

void HybridCce::step(uint64_t now) {
  // Fixed pipe order keeps ack-pulse visibility deterministic.
  step_mem(now);
  step_lce_resp(now);
  step_req(now);
  step_uncacheable(now);
  step_control(now);
}

bool HybridCce::idle(uint64_t now) const {
  return phase_ == Phase::Ready && pq_.empty() && !held_ &&
         mode_ != Mode::Draining && mode_ != Mode::Syncing &&
         now >= req_busy_until_ && now >= mem_busy_until_ &&
         now >= lce_resp_busy_until_ && now >= uc_busy_until_;
}

// ----- memory response pipe -----

void HybridCce::step_mem(uint64_t now) {
  if (now < mem_busy_until_) return;
  if (!mem_->response_ready(cfg_.id, now)) return;
  const MemResponse& peek = mem_->front(cfg_.id);
  uint32_t wg = wg_of(peek.cmd.addr);

  if (peek.cmd.speculative) {
    const SpecState& sb = spec_.get(wg);
    if (sb.spec && !sb.squash && !sb.fwd_mod) return; // await resolution
    MemResponse r = mem_->pop(cfg_.id);
    --outstanding_mem_;
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
      send_cmd(r.cmd.lce, std::move(d), now);
    }
    spec_.consume(wg);
    if (r.cmd.coherent) pending_.dec(wg);
    return;
  }

  MemResponse r = mem_->pop(cfg_.id);
  --outstanding_mem_;
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
    send_cmd(r.cmd.lce, std::move(d), now);
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
    send_cmd(r.cmd.lce, std::move(d), now);
    if (r.cmd.coherent) pending_.dec(wg);
    break;
  }
  case MemOp::UcWrite: {
    mem_busy_until_ = now + 1;
    stats_.mem_busy += 1;
    Message d;
    d.cmd = CmdType::UcStoreDone;
    d.addr = r.cmd.addr;
    send_cmd(r.cmd.lce, std::move(d), now);
    if (r.cmd.coherent) pending_.dec(wg);
    break;
  }
  }
}

// ----- lce response pipe -----

void HybridCce::step_lce_resp(uint64_t now) {
  if (now < lce_resp_busy_until_) return;
  if (!resp_->any_deliverable(cfg_.endpoint(), now)) return;
  Message m = resp_->deliver_one(cfg_.endpoint(), now);
  uint32_t c = 1;
  switch (m.rsp) {
  case RspType::SyncAck:
    ++sync_acks_seen_;
    break;
  case RspType::InvAck:
    inv_ack_at_.push_back(now);
    break;
  case RspType::CohAck:
    c = 2; // sink plus pending-bit write
    pending_.dec(wg_of(m.addr));
    ++stats_.coh_acks;
    break;
  case RspType::NullWB:
    wb_ack_at_.push_back(now);
    break;
  case RspType::DirtyWB: {
    uint32_t n = cfg_.beats();
    c = 1 + n;
    MemCommand w;
    w.op = MemOp::Write;
    w.addr = m.addr;
    w.size = cfg_.block_bytes;
    w.data = m.data;
    w.src_cce = cfg_.id;
    w.coherent = true;
    pending_.inc(wg_of(m.addr));
    send_mem(std::move(w), now);
    // The ack signal is raised as the last beat goes out.
    wb_ack_at_.push_back(now + n);
    break;
  }
  }
  lce_resp_busy_until_ = now + c;
  stats_.lce_resp_busy += c;
}

// ----- coherent request pipe -----

void HybridCce::step_req(uint64_t now) {
  if (now < req_busy_until_) return;
  switch (phase_) {
  case Phase::Ready: {
    if (mode_ != Mode::Coherent) return;
    // Older stalled requests resume as soon as their way group clears.
    if (!pq_.empty() && !pending_.pending(wg_of(pq_.front().addr))) {
      Message m = std::move(pq_.front());
      pq_.pop_front();
      start_coherent(std::move(m), now);
      return;
    }
    if (held_) {
      if (!pending_.pending(wg_of(held_->addr))) {
        Message m = std::move(*held_);
        held_.reset();
        start_coherent(std::move(m), now);
      } else if (pq_.size() < opts_.pending_queue_depth) {
        pq_.push_back(std::move(*held_));
        held_.reset();
      }
      return;
    }
    auto cand = req_->deliverable(cfg_.endpoint(), now);
    for (size_t i = 0; i < cand.size(); ++i) {
      if (!cacheable(cand[i].addr)) continue; // other stream
      Message m = req_->deliver_choice(cfg_.endpoint(), i, now);
      if (pending_.pending(wg_of(m.addr))) {
        if (pq_.size() < opts_.pending_queue_depth)
          pq_.push_back(std::move(m));
        else
          held_ = std::move(m); // arbiter blocks until space frees up
      } else {
        start_coherent(std::move(m), now);
      }
      return;
    }
    return;
  }
  case Phase::Replacement:
    if (!take_pulse(wb_ack_at_, now)) return;
    charge(now, 1);
    after_replacement(now);
    return;
  case Phase::InvAcks:
    if (!take_pulse(inv_ack_at_, now)) return;
    charge(now, 1);
    if (--acks_left_ == 0) after_inv(now);
    return;
  case Phase::OwnerWb:
  case Phase::UncachedOwnerWb:
    if (!take_pulse(wb_ack_at_, now)) return;
    charge(now, 1);
    if (phase_ == Phase::OwnerWb) after_owner_wb(now);
    else finish_uncached_mem(now);
    return;
  case Phase::InvAcksUncached:
    if (!take_pulse(inv_ack_at_, now)) return;
    charge(now, 1);
    if (--acks_left_ == 0) finish_uncached_mem(now);
    return;
  case Phase::Resolve:
    finish_resolve(now);
    return;
  }
}

void HybridCce::start_coherent(Message m, uint64_t now) {
  ++stats_.requests;
  areq_ = std::move(m);
  mshr_ = Mshr{};
  mshr_.msg_type = areq_.req;
  mshr_.subop = areq_.subop;
  mshr_.size = areq_.size;
  mshr_.lce_id = areq_.src;
  mshr_.addr = areq_.addr;
  mshr_.lru_way = areq_.lru_way;
  mshr_.flags.write_not_read =
      areq_.req == ReqType::ReqWr || areq_.req == ReqType::UcStore ||
      areq_.req == ReqType::UcAmo;
  mshr_.flags.uncached = areq_.req == ReqType::UcLoad ||
                         areq_.req == ReqType::UcStore ||
                         areq_.req == ReqType::UcAmo;
  mshr_.flags.non_exclusive = areq_.req == ReqType::ReqRdNE;
  mshr_.flags.atomic = areq_.req == ReqType::UcAmo;
  mshr_.flags.cacheable_address = true;

  uint32_t wg = wg_of(areq_.addr);
  pending_.inc(wg);
  mshr_.flags.pending = true;
  txn_charge_ = 0;

  bool uncached = mshr_.flags.uncached;
  if (!uncached) {
    mshr_.flags.speculative = true;
    spec_.set_spec(wg);
    MemCommand c;
    c.op = MemOp::Read;
    c.addr = areq_.addr & ~uint64_t(cfg_.block_bytes - 1);
    c.size = cfg_.block_bytes;
    c.speculative = true;
    c.lce = areq_.src;
    c.way = areq_.lru_way;
    c.src_cce = cfg_.id;
    c.coherent = true;
    pending_.inc(wg);
    send_mem(std::move(c), now);
  }

  WayGroupResult wgres =
      dir_.read_way_group(areq_.addr, areq_.src, areq_.lru_way);
  GadResult g = gad(wgres, areq_.src, mshr_.flags.write_not_read);
  mshr_.lru_state = wgres.lru_entry.state;
  mshr_.lru_addr = dir_.addr_of(dir_.set_of(areq_.addr), wgres.lru_entry.tag);
  mshr_.way_id = g.req_hit ? g.req_addr_way : areq_.lru_way;
  mshr_.owner_lce = g.owner_lce;
  mshr_.owner_way = g.owner_way;
  mshr_.owner_state = g.owner_state;
  mshr_.flags.cached_S = g.cached_S;
  mshr_.flags.cached_E = g.cached_E;
  mshr_.flags.cached_M = g.cached_M;
  mshr_.flags.cached_O = g.cached_O;
  mshr_.flags.cached_F = g.cached_F;
  mshr_.flags.replacement = !uncached && g.replacement;
  mshr_.flags.upgrade = g.upgrade;

  // The programmable pipe sees every coherence request and must return its
  // status bit before the transaction may commit.  The fixed-function
  // pre-commit half covers the verdict as long as it arrives within
  // 5 + (C/2) cycles.
  Verdict v = opts_.verdict ? opts_.verdict(mshr_) : Verdict{};
  if (v.latency > opts_.verdict_timeout)
    throw ProgrammablePipeTimeout("programmable pipe verdict overdue");
  uint32_t window = 4 + dir_.way_group_read_latency();
  uint32_t stall = v.latency > window ? v.latency - window : 0;

  St ds = St::I;
  if (g.owner_found) ds = g.owner_state;
  else if (g.req_hit && g.req_state != St::S) ds = g.req_state;
  else if (g.cached_S || g.req_hit) ds = St::S;

  inv_targets_.clear();

  if (!v.proceed) {
    // Squashed before commit: nothing observable changed.
    charge(now, 6 + dir_.way_group_read_latency() + stall + 1);
    if (!uncached) spec_.resolve_squash(wg);
    pending_.dec(wg);
    ++squashed_;
    phase_ = Phase::Ready;
    return;
  }

  if (uncached) {
    charge(now, stall);
    begin_uncached_coherent(now, wgres, g);
    return;
  }

  CceEvent ev;
  if (areq_.req == ReqType::ReqRd) ev = CceEvent::ReqRd;
  else if (areq_.req == ReqType::ReqRdNE) ev = CceEvent::ReqRdNE;
  else if (!g.req_hit) ev = CceEvent::ReqWrInvalid;
  else if (g.req_state == St::S) ev = CceEvent::ReqWrSharer;
  else ev = CceEvent::ReqWrOwner;

  act_ = tables_.cce_protocol_entry(cfg_.variant, ds, ev);

  mshr_.next_state = act_.send_data          ? act_.data_state
                     : act_.upgrade          ? St::M
                     : act_.xfer_state       ? *act_.xfer_state
                                             : St::I;

  if (act_.inv != InvScope::None) {
    for (uint32_t l = 0; l < cfg_.num_lce; ++l) {
      if (l == areq_.src) continue;
      if (wgres.sharers[l].hit && wgres.sharers[l].state == St::S)
        inv_targets_.push_back(l);
    }
    if (act_.inv == InvScope::OtherSAndOwner && g.owner_found)
      inv_targets_.push_back(g.owner_lce);
  }

  bool repl_cmd = mshr_.flags.replacement &&
                  (mshr_.lru_state == St::E || mshr_.lru_state == St::M ||
                   mshr_.lru_state == St::O);
  if (mshr_.flags.replacement)
    dir_.write_state(areq_.src, mshr_.lru_addr, areq_.lru_way, St::I);
  dir_.write_entry(areq_.src, areq_.addr, mshr_.way_id, mshr_.next_state);
  if (act_.to_owner && act_.owner_set_state)
    dir_.write_state(g.owner_lce, areq_.addr, g.owner_way,
                     *act_.owner_set_state);
  for (uint32_t l : inv_targets_)
    dir_.write_state(l, areq_.addr, wgres.sharers[l].way, St::I);
  if (act_.inv == InvScope::OtherSAndOwner && g.owner_found)
    dir_.write_state(g.owner_lce, areq_.addr, g.owner_way, St::I);

  // Front half: pop, pending, speculative read, directory read, GAD,
  // programmable-pipe sync, directory write.
  charge(now, 6 + dir_.way_group_read_latency() + stall);

  if (repl_cmd) {
    ++stats_.replacements;
    charge(now, 1);
    Message c;
    c.cmd = CmdType::ST_WB;
    c.addr = mshr_.lru_addr;
    c.set_state = St::I;
    send_cmd(areq_.src, std::move(c), now);
    phase_ = Phase::Replacement;
    return;
  }
  after_replacement(now);
}

void HybridCce::after_replacement(uint64_t now) {
  if (!inv_targets_.empty()) {
    charge(now, uint32_t(inv_targets_.size()));
    for (uint32_t l : inv_targets_) {
      Message c;
      c.cmd = CmdType::INV;
      c.addr = areq_.addr;
      send_cmd(l, std::move(c), now);
      ++stats_.invalidations;
    }
    acks_left_ = uint32_t(inv_targets_.size());
    phase_ = Phase::InvAcks;
    return;
  }
  after_inv(now);
}

void HybridCce::after_inv(uint64_t now) {
  if (act_.to_owner) {
    charge(now, 1);
    ++stats_.transfers;
    Message c;
    c.cmd = compose_cmd(act_.owner_set_state.has_value(),
                        act_.xfer_state.has_value(), act_.writeback);
    c.addr = areq_.addr;
    if (act_.owner_set_state) c.set_state = *act_.owner_set_state;
    if (act_.xfer_state) c.xfer_state = *act_.xfer_state;
    c.xfer_target = areq_.src;
    c.way = mshr_.owner_way;
    c.lru_way = areq_.lru_way;
    send_cmd(mshr_.owner_lce, std::move(c), now);
    if (act_.writeback) {
      phase_ = Phase::OwnerWb;
      return;
    }
  }
  after_owner_wb(now);
}

void HybridCce::after_owner_wb(uint64_t now) {
  if (act_.upgrade) {
    charge(now, 1);
    ++stats_.upgrades;
    Message c;
    c.cmd = CmdType::STW;
    c.addr = areq_.addr;
    c.set_state = St::M;
    c.way = mshr_.way_id;
    send_cmd(areq_.src, std::move(c), now);
  }
  finish_resolve(now);
}

void HybridCce::finish_resolve(uint64_t now) {
  charge(now, 1);
  uint32_t wg = wg_of(areq_.addr);
  if (act_.send_data) spec_.resolve_fwd_mod(wg, act_.data_state);
  else spec_.resolve_squash(wg);
  stats_.occupancy_log.push_back(txn_charge_);
  completion_order_.push_back(areq_.addr);
  phase_ = Phase::Ready;
}

// ----- uncached requests to cacheable memory -----

void HybridCce::begin_uncached_coherent(uint64_t now,
                                        const WayGroupResult& wgres,
                                        const GadResult& g) {
  charge(now, 3 + dir_.way_group_read_latency()); // pop, pending, dir, gad
  for (uint32_t l = 0; l < cfg_.num_lce; ++l)
    if (wgres.sharers[l].hit && wgres.sharers[l].state == St::S &&
        !(g.owner_found && l == g.owner_lce))
      inv_targets_.push_back(l);
  uint32_t evict_lce = cfg_.num_lce;
  if (g.owner_found) evict_lce = g.owner_lce;
  else if (g.req_hit && g.req_state != St::S) evict_lce = areq_.src;

  if (!inv_targets_.empty()) {
    charge(now, uint32_t(inv_targets_.size()));
    for (uint32_t l : inv_targets_) {
      Message c;
      c.cmd = CmdType::INV;
      c.addr = areq_.addr;
      send_cmd(l, std::move(c), now);
      ++stats_.invalidations;
      dir_.write_state(l, areq_.addr, wgres.sharers[l].way, St::I);
    }
    acks_left_ = uint32_t(inv_targets_.size());
  } else {
    acks_left_ = 0;
  }

  if (evict_lce < cfg_.num_lce) {
    charge(now, 2); // next-state + command send
    uint32_t way = evict_lce == areq_.src ? g.req_addr_way : g.owner_way;
    dir_.write_state(evict_lce, areq_.addr, way, St::I);
    Message c;
    c.cmd = CmdType::ST_WB;
    c.addr = areq_.addr;
    c.set_state = St::I;
    send_cmd(evict_lce, std::move(c), now);
    phase_ = Phase::UncachedOwnerWb;
    return;
  }
  finish_uncached_mem(now);
}

void HybridCce::finish_uncached_mem(uint64_t now) {
  while (acks_left_ > 0) {
    if (!take_pulse(inv_ack_at_, now)) {
      phase_ = Phase::InvAcksUncached;
      return;
    }
    charge(now, 1);
    --acks_left_;
  }
  MemCommand c;
  c.op = areq_.req == ReqType::UcLoad    ? MemOp::UcRead
         : areq_.req == ReqType::UcStore ? MemOp::UcWrite
                                         : MemOp::UcAmo;
  c.addr = areq_.addr;
  c.size = areq_.size;
  c.data = areq_.data;
  c.lce = areq_.src;
  c.subop = areq_.subop;
  c.src_cce = cfg_.id;
  c.coherent = true;
  charge(now, c.op == MemOp::UcWrite
                  ? beats_of_size(areq_.size, cfg_.fill_width)
                  : 1);
  send_mem(std::move(c), now);
  phase_ = Phase::Ready;
}

// ----- uncacheable request pipe -----

void HybridCce::step_uncacheable(uint64_t now) {
  if (now < uc_busy_until_) return;
  if (mode_ == Mode::Draining || mode_ == Mode::Syncing) return;
  auto cand = req_->deliverable(cfg_.endpoint(), now);
  for (size_t i = 0; i < cand.size(); ++i) {
    if (mode_ != Mode::UncachedOnly && cacheable(cand[i].addr)) continue;
    Message m = req_->deliver_choice(cfg_.endpoint(), i, now);
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
    uc_busy_until_ = now + cycles;
    stats_.uc_busy += cycles;
    send_mem(std::move(c), now);
    return;
  }
}

// ----- control pipe -----

void HybridCce::step_control(uint64_t now) {
  if (switch_requested_ && mode_ == Mode::UncachedOnly) {
    mode_ = Mode::Draining;
    switch_requested_ = false;
  }
  if (mode_ == Mode::Draining) {
    bool drained = phase_ == Phase::Ready && pq_.empty() && !held_ &&
                   now >= req_busy_until_ && now >= uc_busy_until_ &&
                   now >= lce_resp_busy_until_ && outstanding_mem_ == 0;
    if (drained) {
      sync_acks_seen_ = 0;
      for (uint32_t l = 0; l < cfg_.num_lce; ++l) {
        Message s;
        s.cmd = CmdType::Sync;
        send_cmd(l, std::move(s), now);
      }
      mode_ = Mode::Syncing;
    }
  }
  if (mode_ == Mode::Syncing && sync_acks_seen_ >= cfg_.num_lce)
    mode_ = Mode::Coherent;
}

} // namespace bedrock
