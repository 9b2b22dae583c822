#include "bedrock/tables.hpp"

#include <fstream>
#include <sstream>

namespace bedrock {

const char* to_string(LceEvent e) {
  switch (e) {
    case LceEvent::Load: return "Load";
    case LceEvent::Store: return "Store";
    case LceEvent::Inv: return "INV";
    case LceEvent::Data: return "DATA";
    case LceEvent::Stw: return "STW";
    case LceEvent::Wb: return "WB";
    case LceEvent::Tr: return "TR";
    case LceEvent::StWb: return "ST-WB";
    case LceEvent::StTr: return "ST-TR";
    case LceEvent::StTrWb: return "ST-TR-WB";
  }
  return "?";
}

LceEvent lce_event_from_string(const std::string& s) {
  for (LceEvent e : all_lce_events)
    if (s == to_string(e)) return e;
  throw std::invalid_argument("unknown lce event: " + s);
}

LceEvent lce_event_of(CmdType cmd) {
  switch (cmd) {
    case CmdType::INV: return LceEvent::Inv;
    case CmdType::DATA: return LceEvent::Data;
    case CmdType::STW: return LceEvent::Stw;
    case CmdType::WB: return LceEvent::Wb;
    case CmdType::TR: return LceEvent::Tr;
    case CmdType::ST_WB: return LceEvent::StWb;
    case CmdType::ST_TR: return LceEvent::StTr;
    case CmdType::ST_TR_WB: return LceEvent::StTrWb;
    default:
      throw std::invalid_argument(std::string("command has no table column: ") +
                                  to_string(cmd));
  }
}

const char* to_string(CceEvent e) {
  switch (e) {
    case CceEvent::ReqRd: return "ReqRd";
    case CceEvent::ReqRdNE: return "ReqRdNE";
    case CceEvent::ReqWrInvalid: return "ReqWrI";
    case CceEvent::ReqWrSharer: return "ReqWrS";
    case CceEvent::ReqWrOwner: return "ReqWrO";
    case CceEvent::Replacement: return "Replacement";
  }
  return "?";
}

CceEvent cce_event_from_string(const std::string& s) {
  for (CceEvent e : all_cce_events)
    if (s == to_string(e)) return e;
  throw std::invalid_argument("unknown cce event: " + s);
}

const char* to_string(NsEvent e) {
  switch (e) {
    case NsEvent::Load: return "Load";
    case NsEvent::LoadNE: return "LoadNE";
    case NsEvent::Store: return "Store";
  }
  return "?";
}

NsEvent ns_event_from_string(const std::string& s) {
  if (s == "Load") return NsEvent::Load;
  if (s == "LoadNE") return NsEvent::LoadNE;
  if (s == "Store") return NsEvent::Store;
  throw std::invalid_argument("unknown ns event: " + s);
}

const char* to_string(LceNsEvent e) {
  switch (e) {
    case LceNsEvent::Load: return "Load";
    case LceNsEvent::Store: return "Store";
    case LceNsEvent::SilentUpgrade: return "SilentUpgrade";
    case LceNsEvent::OtherLoad: return "OtherLoad";
    case LceNsEvent::OtherStore: return "OtherStore";
  }
  return "?";
}

LceNsEvent lce_ns_event_from_string(const std::string& s) {
  if (s == "Load") return LceNsEvent::Load;
  if (s == "Store") return LceNsEvent::Store;
  if (s == "SilentUpgrade") return LceNsEvent::SilentUpgrade;
  if (s == "OtherLoad") return LceNsEvent::OtherLoad;
  if (s == "OtherStore") return LceNsEvent::OtherStore;
  throw std::invalid_argument("unknown lns event: " + s);
}

std::string LceAction::action_text() const {
  if (outcome == Outcome::Hit) return "Hit";
  if (outcome == Outcome::IssueRequest) return to_string(*request);
  std::string s;
  if (send_fill_data) s = "DATA";
  if (response) {
    if (!s.empty()) s += "+";
    s += to_string(*response);
  }
  return s.empty() ? "-" : s;
}

std::string LceAction::next_text() const {
  if (next_from_msg) return "X";
  if (next) return to_string(*next);
  return "-";
}

std::string CceAction::action_text() const {
  std::string s;
  auto app = [&](const std::string& part) {
    if (!s.empty()) s += "+";
    s += part;
  };
  switch (inv) {
    case InvScope::None: break;
    case InvScope::AllS: app("InvAllS"); break;
    case InvScope::OtherS: app("InvOtherS"); break;
    case InvScope::OtherSAndOwner: app("InvOtherS&Owner"); break;
  }
  if (send_data) app(std::string("DATA^") + to_string(data_state) + ":Req");
  if (upgrade) app("STW^M:Req");
  if (to_owner) {
    std::string t;
    if (owner_set_state) t += std::string("ST^") + to_string(*owner_set_state) + "-";
    t += std::string("TR^") + to_string(*xfer_state);
    if (writeback) t += "-WB";
    t += ":Owner";
    app(t);
  }
  if (repl_writeback) app("ST^I-WB:Req");
  return s;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

LceAction parse_lce_action(const std::string& action, const std::string& next,
                           int line) {
  LceAction a;
  if (action == "Hit") {
    a.outcome = LceAction::Outcome::Hit;
  } else if (action == "ReqRd" || action == "ReqWr") {
    a.outcome = LceAction::Outcome::IssueRequest;
    a.request = action == "ReqRd" ? ReqType::ReqRd : ReqType::ReqWr;
  } else if (action != "-") {
    for (const auto& part : split(action, '+')) {
      if (part == "DATA") {
        a.send_fill_data = true;
      } else if (part == "InvAck") {
        a.response = RspType::InvAck;
      } else if (part == "CohAck") {
        a.response = RspType::CohAck;
      } else if (part == "DirtyWB") {
        a.response = RspType::DirtyWB;
      } else if (part == "NullWB") {
        a.response = RspType::NullWB;
      } else {
        throw std::runtime_error("line " + std::to_string(line) +
                                 ": bad lce action " + part);
      }
    }
  }
  if (next == "X")
    a.next_from_msg = true;
  else if (next != "-")
    a.next = state_from_string(next);
  return a;
}

CceAction parse_cce_action(const std::string& action, const std::string& next,
                           int line) {
  CceAction a;
  a.next_dir = state_from_string(next);
  for (const auto& part : split(action, '+')) {
    if (part == "InvAllS") {
      a.inv = InvScope::AllS;
    } else if (part == "InvOtherS") {
      a.inv = InvScope::OtherS;
    } else if (part == "InvOtherS&Owner") {
      a.inv = InvScope::OtherSAndOwner;
    } else if (part.rfind("DATA^", 0) == 0 && part.size() >= 10 &&
               part.substr(6) == ":Req") {
      a.send_data = true;
      a.data_state = state_from_string(part.substr(5, 1));
    } else if (part == "STW^M:Req") {
      a.upgrade = true;
    } else if (part == "ST^I-WB:Req") {
      a.repl_writeback = true;
    } else if (part.size() > 6 && part.substr(part.size() - 6) == ":Owner") {
      std::string body = part.substr(0, part.size() - 6);
      a.to_owner = true;
      if (body.rfind("ST^", 0) == 0) {
        a.owner_set_state = state_from_string(body.substr(3, 1));
        if (body.size() < 5 || body[4] != '-')
          throw std::runtime_error("line " + std::to_string(line) +
                                   ": bad owner command " + part);
        body = body.substr(5);
      }
      if (body.rfind("TR^", 0) != 0)
        throw std::runtime_error("line " + std::to_string(line) +
                                 ": bad owner command " + part);
      a.xfer_state = state_from_string(body.substr(3, 1));
      body = body.substr(4);
      if (body == "-WB")
        a.writeback = true;
      else if (!body.empty())
        throw std::runtime_error("line " + std::to_string(line) +
                                 ": bad owner command " + part);
    } else {
      throw std::runtime_error("line " + std::to_string(line) +
                               ": bad cce action " + part);
    }
  }
  return a;
}

} // namespace

ProtocolTables ProtocolTables::parse(const std::string& text) {
  ProtocolTables t;
  std::istringstream in(text);
  std::string linebuf;
  int lineno = 0;
  while (std::getline(in, linebuf)) {
    ++lineno;
    auto hash = linebuf.find('#');
    if (hash != std::string::npos) linebuf = linebuf.substr(0, hash);
    std::istringstream ls(linebuf);
    std::vector<std::string> tok;
    std::string w;
    while (ls >> w) tok.push_back(w);
    if (tok.empty()) continue;
    if (tok.size() != 7 && !(tok[0] == "lns" && tok.size() == 6))
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": malformed record");
    Variant v = variant_from_string(tok[1]);
    if (tok[0] == "lce") {
      if (tok[4] != "->") throw std::runtime_error("line " + std::to_string(lineno));
      St st = state_from_string(tok[2]);
      LceEvent ev = lce_event_from_string(tok[3]);
      auto key = std::make_tuple(v, st, ev);
      if (t.lce_.count(key))
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": duplicate lce cell");
      t.lce_[key] = parse_lce_action(tok[5], tok[6], lineno);
    } else if (tok[0] == "cce") {
      if (tok[4] != "->") throw std::runtime_error("line " + std::to_string(lineno));
      St st = state_from_string(tok[2]);
      CceEvent ev = cce_event_from_string(tok[3]);
      auto key = std::make_tuple(v, st, ev);
      if (t.cce_.count(key))
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": duplicate cce cell");
      t.cce_[key] = parse_cce_action(tok[5], tok[6], lineno);
    } else if (tok[0] == "ns") {
      if (tok[4] != "->") throw std::runtime_error("line " + std::to_string(lineno));
      NsEvent ev = ns_event_from_string(tok[2]);
      St st = state_from_string(tok[3]);
      auto key = std::make_tuple(v, ev, st);
      if (t.ns_.count(key))
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": duplicate ns cell");
      t.ns_[key] = NsEntry{state_from_string(tok[5]), state_from_string(tok[6])};
    } else if (tok[0] == "lns") {
      if (tok[4] != "->") throw std::runtime_error("line " + std::to_string(lineno));
      LceNsEvent ev = lce_ns_event_from_string(tok[2]);
      St st = state_from_string(tok[3]);
      auto key = std::make_tuple(v, ev, st);
      if (t.lns_.count(key))
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": duplicate lns cell");
      std::vector<St> nexts;
      for (const auto& part : split(tok[5], '|'))
        nexts.push_back(state_from_string(part));
      t.lns_[key] = nexts;
    } else {
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": unknown record kind " + tok[0]);
    }
  }
  return t;
}

ProtocolTables ProtocolTables::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open table file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse(os.str());
}

const ProtocolTables& ProtocolTables::standard() {
  static const ProtocolTables t =
      load_file(std::string(BEDROCK_DATA_DIR) + "/protocol_tables.txt");
  return t;
}

const LceAction& ProtocolTables::lce_protocol_entry(Variant v, St state,
                                                    LceEvent e) const {
  if (!has_state(v, state))
    throw std::invalid_argument(std::string("state ") + to_string(state) +
                                " not in variant " + to_string(v));
  auto it = lce_.find(std::make_tuple(v, state, e));
  if (it == lce_.end())
    throw ImpossibleEvent(std::string("lce ") + to_string(v) + " " +
                          to_string(state) + " " + to_string(e));
  return it->second;
}

const CceAction& ProtocolTables::cce_protocol_entry(Variant v, St dir_state,
                                                    CceEvent e) const {
  if (!has_state(v, dir_state))
    throw std::invalid_argument(std::string("state ") + to_string(dir_state) +
                                " not in variant " + to_string(v));
  auto it = cce_.find(std::make_tuple(v, dir_state, e));
  if (it == cce_.end())
    throw ImpossibleEvent(std::string("cce ") + to_string(v) + " " +
                          to_string(dir_state) + " " + to_string(e));
  return it->second;
}

NsEntry ProtocolTables::next_states(Variant v, NsEvent e, St dir_state) const {
  if (!has_state(v, dir_state))
    throw std::invalid_argument(std::string("state ") + to_string(dir_state) +
                                " not in variant " + to_string(v));
  auto it = ns_.find(std::make_tuple(v, e, dir_state));
  if (it == ns_.end())
    throw ImpossibleEvent(std::string("ns ") + to_string(v) + " " +
                          to_string(e) + " " + to_string(dir_state));
  return it->second;
}

const std::vector<St>& ProtocolTables::lce_next_states(Variant v, LceNsEvent e,
                                                       St state) const {
  auto it = lns_.find(std::make_tuple(v, e, state));
  if (it == lns_.end())
    throw ImpossibleEvent(std::string("lns ") + to_string(v) + " " +
                          to_string(e) + " " + to_string(state));
  return it->second;
}

bool ProtocolTables::has_lce_entry(Variant v, St state, LceEvent e) const {
  return lce_.count(std::make_tuple(v, state, e)) > 0;
}
bool ProtocolTables::has_cce_entry(Variant v, St state, CceEvent e) const {
  return cce_.count(std::make_tuple(v, state, e)) > 0;
}
bool ProtocolTables::has_ns_entry(Variant v, NsEvent e, St state) const {
  return ns_.count(std::make_tuple(v, e, state)) > 0;
}
bool ProtocolTables::has_lce_ns_entry(Variant v, LceNsEvent e, St state) const {
  return lns_.count(std::make_tuple(v, e, state)) > 0;
}

std::string ProtocolTables::serialize() const {
  std::ostringstream os;
  for (const auto& [key, a] : lce_) {
    auto [v, st, ev] = key;
    os << "lce " << to_string(v) << ' ' << to_string(st) << ' '
       << to_string(ev) << " -> " << a.action_text() << ' ' << a.next_text()
       << '\n';
  }
  for (const auto& [key, a] : cce_) {
    auto [v, st, ev] = key;
    os << "cce " << to_string(v) << ' ' << to_string(st) << ' '
       << to_string(ev) << " -> " << a.action_text() << ' '
       << to_string(a.next_dir) << '\n';
  }
  for (const auto& [key, e] : ns_) {
    auto [v, ev, st] = key;
    os << "ns " << to_string(v) << ' ' << to_string(ev) << ' ' << to_string(st)
       << " -> " << to_string(e.next_dir) << ' ' << to_string(e.next_requestor)
       << '\n';
  }
  for (const auto& [key, nexts] : lns_) {
    auto [v, ev, st] = key;
    os << "lns " << to_string(v) << ' ' << to_string(ev) << ' '
       << to_string(st) << " -> ";
    for (size_t i = 0; i < nexts.size(); ++i) {
      if (i) os << '|';
      os << to_string(nexts[i]);
    }
    os << '\n';
  }
  return os.str();
}

} // namespace bedrock
