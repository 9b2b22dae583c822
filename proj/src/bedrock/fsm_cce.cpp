#include "bedrock/fsm_cce.hpp"

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

FsmCce::FsmCce(const CceConfig& cfg, const ProtocolTables& tables,
               Network* req, Network* cmd, Network* fill, Network* resp,
               Memory* mem)
    : cfg_(cfg), tables_(tables), req_(req), cmd_(cmd), fill_(fill),
      resp_(resp), mem_(mem),
      dir_(DirConfig{cfg.num_lce, cfg.sets, cfg.assoc, cfg.block_bytes}),
      pending_(cfg.sets), spec_(cfg.sets) {}

void FsmCce::charge(uint64_t now, uint32_t cycles) {
  req_busy_until_ = std::max(req_busy_until_, now) + cycles;
  stats_.req_busy += cycles;
  txn_charge_ += cycles;
}

void FsmCce::send_cmd(uint32_t dst, Message m, uint64_t now) {
  cmd_->send(cfg_.endpoint(), dst, std::move(m), now);
}

std::optional<Message> FsmCce::take_resp(RspType a, RspType b, uint64_t now) {
  auto cand = resp_->deliverable(cfg_.endpoint(), now);
  for (size_t i = 0; i < cand.size(); ++i)
    if (cand[i].rsp == a || cand[i].rsp == b)
      return resp_->deliver_choice(cfg_.endpoint(), i, now);
  return std::nullopt;
}

void FsmCce::drain_coh_acks(uint64_t now) {
  for (;;) {
    auto cand = resp_->deliverable(cfg_.endpoint(), now);
    size_t idx = cand.size();
    for (size_t i = 0; i < cand.size(); ++i)
      if (cand[i].rsp == RspType::CohAck) {
        idx = i;
        break;
      }
    if (idx == cand.size()) return;
    Message m = resp_->deliver_choice(cfg_.endpoint(), idx, now);
    pending_.dec(wg_of(m.addr));
    ++stats_.coh_acks;
  }
}

void FsmCce::step(uint64_t now) {
  drain_coh_acks(now);
  step_mem(now);
  step_req(now);
}

bool FsmCce::idle(uint64_t now) const {
  return phase_ == Phase::Ready && now >= req_busy_until_ &&
         now >= mem_busy_until_;
}

// ----- memory response unit -----

void FsmCce::step_mem(uint64_t now) {
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
      send_cmd(r.cmd.lce, std::move(d), now);
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
    send_cmd(r.cmd.lce, std::move(d), now);
    if (cacheable(r.cmd.addr)) pending_.dec(wg);
    break;
  }
  case MemOp::Write:
    mem_busy_until_ = now + 1;
    stats_.mem_busy += 1;
    if (cacheable(r.cmd.addr)) pending_.dec(wg);
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
    if (cacheable(r.cmd.addr)) pending_.dec(wg);
    break;
  }
  case MemOp::UcWrite: {
    mem_busy_until_ = now + 1;
    stats_.mem_busy += 1;
    Message d;
    d.cmd = CmdType::UcStoreDone;
    d.addr = r.cmd.addr;
    send_cmd(r.cmd.lce, std::move(d), now);
    if (cacheable(r.cmd.addr)) pending_.dec(wg);
    break;
  }
  }
}

// ----- request unit -----

void FsmCce::step_req(uint64_t now) {
  if (now < req_busy_until_) return;
  switch (phase_) {
  case Phase::Ready: {
    if (!req_->any_deliverable(cfg_.endpoint(), now)) return;
    Message m = req_->deliver_one(cfg_.endpoint(), now);
    if (cacheable(m.addr) && pending_.pending(wg_of(m.addr))) {
      areq_ = std::move(m);
      phase_ = Phase::PendingWait; // uncharged stall on an open transaction
      return;
    }
    start_request(std::move(m), now);
    return;
  }
  case Phase::PendingWait:
    if (pending_.pending(wg_of(areq_.addr))) return;
    phase_ = Phase::Ready;
    start_request(std::move(areq_), now);
    return;
  case Phase::Replacement: {
    auto r = take_resp(RspType::NullWB, RspType::DirtyWB, now);
    if (!r) return;
    if (r->rsp == RspType::DirtyWB) {
      charge(now, cfg_.beats());
      MemCommand w;
      w.op = MemOp::Write;
      w.addr = r->addr;
      w.size = cfg_.block_bytes;
      w.data = r->data;
      w.src_cce = cfg_.id;
      pending_.inc(wg_of(r->addr));
      mem_->send(std::move(w), now);
    } else {
      charge(now, 1);
      mshr_.flags.null_writeback = true;
    }
    after_replacement(now);
    return;
  }
  case Phase::InvAcks: {
    auto r = take_resp(RspType::InvAck, RspType::InvAck, now);
    if (!r) return;
    charge(now, 1);
    if (--acks_left_ == 0) after_inv(now);
    return;
  }
  case Phase::OwnerWb:
  case Phase::UncachedOwnerWb: {
    auto r = take_resp(RspType::NullWB, RspType::DirtyWB, now);
    if (!r) return;
    if (r->rsp == RspType::DirtyWB) {
      charge(now, cfg_.beats());
      MemCommand w;
      w.op = MemOp::Write;
      w.addr = r->addr;
      w.size = cfg_.block_bytes;
      w.data = r->data;
      w.src_cce = cfg_.id;
      pending_.inc(wg_of(r->addr));
      mem_->send(std::move(w), now);
    } else {
      charge(now, 1);
    }
    if (phase_ == Phase::OwnerWb) after_owner_wb(now);
    else finish_uncached_mem(now);
    return;
  }
  case Phase::InvAcksUncached: {
    auto r = take_resp(RspType::InvAck, RspType::InvAck, now);
    if (!r) return;
    charge(now, 1);
    if (--acks_left_ == 0) finish_uncached_mem(now);
    return;
  }
  case Phase::Resolve:
    finish_resolve(now);
    return;
  }
}

void FsmCce::start_request(Message m, uint64_t now) {
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
  mshr_.flags.cacheable_address = cacheable(areq_.addr);

  if (!mshr_.flags.cacheable_address) {
    // Outside the coherence protocol: forward straight to memory.
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
    uint32_t cycles =
        c.op == MemOp::UcWrite
            ? 1 + beats_of_size(areq_.size, cfg_.fill_width)
            : 2;
    req_busy_until_ = std::max(req_busy_until_, now) + cycles;
    stats_.req_busy += cycles;
    mem_->send(std::move(c), now);
    phase_ = Phase::Ready;
    return;
  }
  begin_coherent(now);
}

void FsmCce::begin_coherent(uint64_t now) {
  uint32_t wg = wg_of(areq_.addr);
  pending_.inc(wg);
  mshr_.flags.pending = true;
  txn_charge_ = 0;

  bool uncached = mshr_.flags.uncached;
  if (!uncached) {
    // Speculative block read overlaps memory with request processing.
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
    pending_.inc(wg);
    mem_->send(std::move(c), now);
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

  // Directory state of the block: the owner's state, else S if any valid
  // copy remains, else I.
  St ds = St::I;
  if (g.owner_found) ds = g.owner_state;
  else if (g.req_hit && g.req_state != St::S) ds = g.req_state;
  else if (g.cached_S || g.req_hit) ds = St::S;

  // Sharers receiving invalidations, filled in per the table's scope.
  inv_targets_.clear();

  if (uncached) {
    begin_uncached_coherent(now, wgres, g, ds);
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

  // Directory updates happen as the commands are committed to the network;
  // the golden tag sets lead the caches.
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
  // next-state, directory write.
  charge(now, 6 + dir_.way_group_read_latency());

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

void FsmCce::after_replacement(uint64_t now) {
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

void FsmCce::after_inv(uint64_t now) {
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

void FsmCce::after_owner_wb(uint64_t now) {
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

void FsmCce::finish_resolve(uint64_t now) {
  charge(now, 1);
  uint32_t wg = wg_of(areq_.addr);
  if (act_.send_data) spec_.resolve_fwd_mod(wg, act_.data_state);
  else spec_.resolve_squash(wg);
  stats_.occupancy_log.push_back(txn_charge_);
  phase_ = Phase::Ready;
}

// ----- uncached requests to cacheable memory -----

void FsmCce::begin_uncached_coherent(uint64_t now, const WayGroupResult& wgres,
                                     const GadResult& g, St ds) {
  (void)ds;
  // Evict any owner (or the requestor's own copy) and invalidate sharers
  // before touching memory directly.
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
    // Acks for these drain in the same phase as the eviction writeback.
    acks_left_ = uint32_t(inv_targets_.size());
  } else {
    acks_left_ = 0;
  }

  if (evict_lce < cfg_.num_lce) {
    charge(now, 2); // next-state + command send
    uint32_t way =
        evict_lce == areq_.src ? g.req_addr_way : g.owner_way;
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

void FsmCce::finish_uncached_mem(uint64_t now) {
  // Outstanding invalidation acks drain before memory is accessed.
  while (acks_left_ > 0) {
    auto r = take_resp(RspType::InvAck, RspType::InvAck, now);
    if (!r) {
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
  charge(now, c.op == MemOp::UcWrite
                  ? beats_of_size(areq_.size, cfg_.fill_width)
                  : 1);
  mem_->send(std::move(c), now);
  phase_ = Phase::Ready;
}

} // namespace bedrock
