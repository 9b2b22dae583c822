#include "bedrock/lce.hpp"

namespace bedrock {

uint32_t lce_request_occupancy(CoreOp::Kind k, uint32_t beats) {
  switch (k) {
  case CoreOp::Kind::UcStore: return 1;
  case CoreOp::Kind::Load:
  case CoreOp::Kind::Store:
  case CoreOp::Kind::UcLoad:
  case CoreOp::Kind::UcAmo: return 2 + beats;
  }
  return 0;
}

uint32_t lce_command_occupancy(CmdType c, bool dirty, uint32_t beats) {
  switch (c) {
  case CmdType::Sync:
  case CmdType::SetClear:
  case CmdType::ST:
  case CmdType::INV:
  case CmdType::UcData:
  case CmdType::UcStoreDone: return 1;
  case CmdType::STW: return 2;
  case CmdType::WB:
  case CmdType::ST_WB: return dirty ? 2 + beats : 2;
  case CmdType::DATA:
  case CmdType::TR:
  case CmdType::ST_TR: return 1 + beats;
  case CmdType::ST_TR_WB: return dirty ? 2 + 2 * beats : 2 + beats;
  }
  return 1;
}

Lce::Lce(const LceConfig& cfg, const ProtocolTables& tables, Network* req,
         Network* cmd, Network* fill, Network* resp, uint64_t* version_ctr)
    : cfg_(cfg), tables_(tables), req_(req), cmd_(cmd), fill_(fill),
      resp_(resp), version_(version_ctr), cache_(cfg.org),
      uc_credits_(cfg.uc_store_credits) {}

uint32_t Lce::cce_for(uint64_t addr) const {
  return cfg_.cce_base + cce_for_way_group(cache_.set_of(addr), cfg_.num_cce);
}

void Lce::charge(uint64_t now, uint32_t cycles) {
  busy_until_ = now + cycles;
  stats_.busy_cycles += cycles;
}

WordToken Lce::write_token() { return WordToken{cfg_.id, ++*version_}; }

void Lce::complete(const CoreOp& op, uint64_t now, bool hit, WordToken value) {
  completions_.push_back(CompletedOp{op, outstanding_since_, now, hit, value});
}

void Lce::send_request(ReqType t, const CoreOp& op, uint64_t now) {
  Message m;
  m.req = t;
  m.addr = op.addr;
  m.size = op.size;
  m.subop = op.subop;
  m.lru_way = cache_.lru_way(cache_.set_of(op.addr));
  if (t == ReqType::UcStore || t == ReqType::UcAmo) {
    m.has_data = true;
    m.data.assign(1, write_token());
  }
  req_->send(cfg_.id, cce_for(op.addr), std::move(m), now);
  ++stats_.requests;
}

void Lce::respond(RspType t, uint64_t addr, uint32_t dst, uint64_t now,
                  const BlockData* data) {
  Message m;
  m.rsp = t;
  m.addr = addr;
  if (data) {
    m.has_data = true;
    m.data = *data;
    m.size = cfg_.org.block_bytes;
  }
  resp_->send(cfg_.id, dst, std::move(m), now);
}

bool Lce::try_start(const CoreOp& op, uint64_t now) {
  if (now < busy_until_ || outstanding_) {
    ++stats_.backoffs;
    return false;
  }
  uint32_t beats = data_beats(cfg_);
  switch (op.kind) {
  case CoreOp::Kind::UcStore:
    if (uc_credits_ == 0) {
      ++stats_.backoffs;
      return false;
    }
    --uc_credits_;
    charge(now, lce_request_occupancy(op.kind, beats));
    outstanding_since_ = now;
    send_request(ReqType::UcStore, op, now);
    complete(op, now, false, WordToken{});
    return true;
  case CoreOp::Kind::UcLoad:
  case CoreOp::Kind::UcAmo:
    charge(now, 2); // issue portion; the remaining wait is the transaction
    outstanding_since_ = now;
    outstanding_ = op;
    send_request(op.kind == CoreOp::Kind::UcLoad ? ReqType::UcLoad
                                                 : ReqType::UcAmo,
                 op, now);
    return true;
  case CoreOp::Kind::Load:
  case CoreOp::Kind::Store: break;
  }

  int way = cache_.lookup(op.addr);
  St st = way >= 0 ? cache_.line(cache_.set_of(op.addr), uint32_t(way)).state
                   : St::I;
  const LceAction& act = tables_.lce_protocol_entry(
      cfg_.variant, st,
      op.kind == CoreOp::Kind::Load ? LceEvent::Load : LceEvent::Store);
  if (act.outcome == LceAction::Outcome::Hit) {
    uint32_t set = cache_.set_of(op.addr);
    auto& line = cache_.line(set, uint32_t(way));
    if (line.data.size() < cfg_.org.block_bytes / 8)
      line.data.resize(cfg_.org.block_bytes / 8);
    ++stats_.hits;
    outstanding_since_ = now;
    if (op.kind == CoreOp::Kind::Store) {
      if (act.next && *act.next != line.state) {
        // Silent upgrade: the only cache-local state change.
        line.state = *act.next;
        ++stats_.silent_upgrades;
      }
      line.dirty = true;
      line.data[word_of(op.addr)] = write_token();
      complete(op, now, true, line.data[word_of(op.addr)]);
    } else {
      complete(op, now, true, line.data[word_of(op.addr)]);
    }
    cache_.touch(set, uint32_t(way));
    return true;
  }
  // Coherence miss: hand the request to the directory and wait.
  ++stats_.misses;
  charge(now, 2);
  outstanding_since_ = now;
  outstanding_ = op;
  ReqType rt = *act.request;
  if (rt == ReqType::ReqRd && op.non_exclusive) rt = ReqType::ReqRdNE;
  send_request(rt, op, now);
  return true;
}

std::optional<CompletedOp> Lce::pop_completion() {
  if (completions_.empty()) return std::nullopt;
  CompletedOp c = completions_.front();
  completions_.pop_front();
  return c;
}

void Lce::step(uint64_t now) {
  if (now < busy_until_) return;
  if (fill_->any_deliverable(cfg_.id, now))
    process_command(fill_->deliver_one(cfg_.id, now), now);
  else if (cmd_->any_deliverable(cfg_.id, now))
    process_command(cmd_->deliver_one(cfg_.id, now), now);
}

void Lce::process_command(Message m, uint64_t now) {
  ++stats_.commands;
  uint32_t beats = data_beats(cfg_);
  uint32_t set = cache_.set_of(m.addr);
  switch (m.cmd) {
  case CmdType::Sync:
    ++sync_count_;
    charge(now, lce_command_occupancy(m.cmd, false, beats));
    respond(RspType::SyncAck, m.addr, m.src, now);
    return;
  case CmdType::SetClear:
    charge(now, lce_command_occupancy(m.cmd, false, beats));
    for (uint32_t w = 0; w < cfg_.org.assoc; ++w) {
      cache_.line(set, w).state = St::I;
      cache_.line(set, w).dirty = false;
    }
    return;
  case CmdType::UcData: {
    charge(now, lce_command_occupancy(m.cmd, false, beats));
    if (outstanding_) {
      CoreOp op = *outstanding_;
      outstanding_.reset();
      complete(op, now, false, m.data.empty() ? WordToken{} : m.data[0]);
    }
    return;
  }
  case CmdType::UcStoreDone:
    charge(now, lce_command_occupancy(m.cmd, false, beats));
    ++uc_credits_;
    return;
  case CmdType::DATA: {
    charge(now, lce_command_occupancy(m.cmd, false, beats));
    cache_.fill_at(m.addr, m.way, m.set_state);
    auto& line = cache_.line(set, m.way);
    line.data = m.data;
    line.data.resize(cfg_.org.block_bytes / 8);
    // Ack the controller for this address; transfers arrive from a peer.
    respond(RspType::CohAck, m.addr, cce_for(m.addr), now);
    if (outstanding_) {
      CoreOp op = *outstanding_;
      outstanding_.reset();
      if (op.kind == CoreOp::Kind::Store) {
        line.dirty = true;
        line.data[word_of(op.addr)] = write_token();
      }
      complete(op, now, false, line.data[word_of(op.addr)]);
    }
    return;
  }
  default: break;
  }

  // Protocol-managed commands against a block this cache holds.
  int wayi = cache_.lookup(m.addr);
  St st = wayi >= 0 ? cache_.line(set, uint32_t(wayi)).state : St::I;
  const LceAction& act =
      tables_.lce_protocol_entry(cfg_.variant, st, lce_event_of(m.cmd));
  auto& line = cache_.line(set, uint32_t(wayi < 0 ? 0 : wayi));
  bool dirty = wayi >= 0 && line.dirty;
  charge(now, lce_command_occupancy(m.cmd, dirty, beats));

  // State update first, then transfer, then writeback.
  St next = act.next_from_msg ? m.set_state : act.next.value_or(st);
  if (m.cmd == CmdType::INV) next = St::I;
  line.state = next;

  if (cmd_has_tr(m.cmd)) {
    Message x;
    x.cmd = CmdType::DATA;
    x.addr = cache_.block_base(m.addr);
    x.set_state = m.xfer_state;
    x.way = m.lru_way; // install way at the receiving cache
    x.size = cfg_.org.block_bytes;
    x.has_data = true;
    x.data = line.data;
    fill_->send(cfg_.id, m.xfer_target, std::move(x), now);
  }
  if (cmd_has_wb(m.cmd)) {
    if (dirty) {
      respond(RspType::DirtyWB, cache_.block_base(m.addr), m.src, now,
              &line.data);
      line.dirty = false;
    } else {
      respond(RspType::NullWB, cache_.block_base(m.addr), m.src, now);
    }
  }
  if (m.cmd == CmdType::INV) {
    respond(RspType::InvAck, m.addr, m.src, now);
    return;
  }
  if (m.cmd == CmdType::STW) {
    // Wakeup: the upgrade the requestor waited on is now granted.
    respond(RspType::CohAck, m.addr, m.src, now);
    if (outstanding_ && outstanding_->kind == CoreOp::Kind::Store &&
        cache_.block_base(outstanding_->addr) == cache_.block_base(m.addr)) {
      CoreOp op = *outstanding_;
      outstanding_.reset();
      line.dirty = true;
      line.data[word_of(op.addr)] = write_token();
      complete(op, now, false, line.data[word_of(op.addr)]);
    }
  }
  (void)act;
}

} // namespace bedrock
