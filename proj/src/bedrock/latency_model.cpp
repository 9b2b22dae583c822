#include "bedrock/latency_model.hpp"

namespace bedrock {

const char* to_string(ModelProtocol p) {
  return p == ModelProtocol::BedRock ? "bedrock" : "canonical";
}

ModelProtocol model_protocol_from_string(const std::string& s) {
  if (s == "bedrock") return ModelProtocol::BedRock;
  if (s == "canonical") return ModelProtocol::Canonical;
  throw UnknownRow("unknown protocol model: " + s);
}

namespace {

enum class Term {
  Mem,
  Data,
  Cmd,
  Fill,
  Ack,
  Inv,
  InvAck,
  FwdGet,
  AckCount0,
  AckCountN,
};

const char* term_name(Term t) {
  switch (t) {
  case Term::Mem: return "Mem";
  case Term::Data: return "Data";
  case Term::Cmd: return "Cmd";
  case Term::Fill: return "Fill";
  case Term::Ack: return "Ack";
  case Term::Inv: return "Inv";
  case Term::InvAck: return "InvAck";
  case Term::FwdGet: return "FwdGet";
  case Term::AckCount0: return "AckCount(0)";
  case Term::AckCountN: return "AckCount(N)";
  }
  return "?";
}

uint64_t term_cost(Term t, const LatencyCosts& c) {
  switch (t) {
  case Term::Mem: return c.mem;
  case Term::Data: return c.data;
  case Term::Cmd: return c.cmd;
  case Term::Fill: return c.fill;
  case Term::Ack: return c.ack;
  case Term::Inv: return c.inv;
  case Term::InvAck: return c.inv_ack;
  case Term::FwdGet: return c.fwd_get;
  case Term::AckCount0: return 0;
  case Term::AckCountN: return uint64_t(c.n) * c.ack_unit;
  }
  return 0;
}

// One table row: Req + Dir + max over the concurrent arms.
struct Row {
  std::string key;
  std::vector<std::vector<Term>> arms;
};

std::string render(const Row& r) {
  auto sum = [](const std::vector<Term>& ts) {
    std::string s;
    for (const Term& t : ts) {
      if (!s.empty()) s += " + ";
      s += term_name(t);
    }
    return s;
  };
  std::string f = "Req + Dir";
  if (r.arms.size() == 1) {
    if (!r.arms[0].empty()) f += " + " + sum(r.arms[0]);
  } else {
    f += " + Max(" + sum(r.arms[0]) + ", " + sum(r.arms[1]) + ")";
  }
  return f;
}

using T = Term;

const std::vector<Row>& rows_of(ModelProtocol p) {
  static const std::vector<Row> bedrock = {
      {"load I->S S", {{T::Mem, T::Data, T::Ack}}},
      {"load I->S F,O", {{T::Cmd, T::Fill, T::Ack}}},
      {"load I->S E,M", {{T::Cmd, T::Fill, T::Ack}}},
      {"load I->E I", {{T::Mem, T::Data, T::Ack}}},
      {"store I->M I", {{T::Mem, T::Data, T::Ack}}},
      {"store I,S->M S",
       {{T::Inv, T::InvAck}, {T::Mem, T::Data, T::Ack}}},
      {"store I->M E,M", {{T::Cmd, T::Fill, T::Ack}}},
      {"store I->M F,O", {{T::Cmd, T::Fill, T::Ack}}},
      {"store I->M F,O +inv",
       {{T::Inv, T::InvAck}, {T::Cmd, T::Fill, T::Ack}}},
      {"store S->M F,O", {{T::Inv, T::InvAck}, {T::Cmd, T::Ack}}},
      {"store F,O->M F,O", {{T::Cmd, T::Ack}}},
      {"store F,O->M F,O +inv", {{T::Inv, T::InvAck}, {T::Cmd, T::Ack}}},
  };
  static const std::vector<Row> canonical = {
      {"load I->S S", {{T::Mem, T::Data}}},
      {"load I->S F,O", {{T::FwdGet, T::Data}}},
      {"load I->S E,M", {{T::FwdGet, T::Data}}},
      {"load I->E I", {{T::Mem, T::Data}}},
      {"store I->M I", {{T::Mem, T::Data}}},
      {"store S->M S", {{T::Mem, T::Data}}},
      {"store I,S->M S +inv", {{T::Mem, T::Data}, {T::Inv, T::InvAck}}},
      {"store I->M E,M", {{T::FwdGet, T::Data}}},
      {"store I->M F,O", {{T::FwdGet, T::Data}}},
      {"store I,S->M F,O +inv",
       {{T::Inv, T::InvAck}, {T::FwdGet, T::Data}}},
      {"store F,O->M F,O", {{T::AckCount0}}},
      {"store F,O->M F,O +inv", {{T::AckCountN}, {T::Inv, T::InvAck}}},
  };
  return p == ModelProtocol::BedRock ? bedrock : canonical;
}

} // namespace

const std::vector<LatencyRow>& latency_rows(ModelProtocol p) {
  static std::vector<LatencyRow> cache[2];
  auto& out = cache[p == ModelProtocol::Canonical ? 1 : 0];
  if (out.empty())
    for (const Row& r : rows_of(p)) out.push_back({r.key, render(r)});
  return out;
}

uint64_t eval_latency_model(ModelProtocol p, const std::string& row_key,
                            const LatencyCosts& costs) {
  for (const Row& r : rows_of(p)) {
    if (r.key != row_key) continue;
    uint64_t best = 0;
    for (const auto& arm : r.arms) {
      uint64_t s = 0;
      for (Term t : arm) s += term_cost(t, costs);
      best = std::max(best, s);
    }
    return costs.req + costs.dir + best;
  }
  throw UnknownRow("no such model row: " + row_key);
}

} // namespace bedrock
