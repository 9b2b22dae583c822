#include "bedrock/ucode/assembler.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace bedrock::ucode {

namespace {

const std::map<std::string, Op> kOps = {
    {"add", Op::Add},       {"addi", Op::Addi},   {"sub", Op::Sub},
    {"subi", Op::Subi},     {"not", Op::Not},     {"lsh", Op::Lsh},
    {"lshi", Op::Lshi},     {"rsh", Op::Rsh},     {"rshi", Op::Rshi},
    {"and", Op::And},       {"or", Op::Or},       {"xor", Op::Xor},
    {"neg", Op::Neg},       {"beq", Op::Beq},     {"bne", Op::Bne},
    {"blt", Op::Blt},       {"ble", Op::Ble},     {"beqi", Op::Beqi},
    {"bneqi", Op::Bneqi},   {"bs", Op::Bs},       {"bsi", Op::Bsi},
    {"bf", Op::Bf},         {"bfnot", Op::Bfnot}, {"bfz", Op::Bfz},
    {"bfnz", Op::Bfnz},     {"mov", Op::Mov},     {"movi", Op::Movi},
    {"movsg", Op::Movsg},   {"movgs", Op::Movgs}, {"movis", Op::Movis},
    {"clm", Op::Clm},       {"ldflags", Op::Ldflags},
    {"ldflagsi", Op::Ldflagsi},                   {"sf", Op::Sf},
    {"sfz", Op::Sfz},       {"andf", Op::Andf},   {"orf", Op::Orf},
    {"nandf", Op::Nandf},   {"norf", Op::Norf},   {"notf", Op::Notf},
    {"rdp", Op::Rdp},       {"rdw", Op::Rdw},     {"rde", Op::Rde},
    {"wdp", Op::Wdp},       {"clp", Op::Clp},     {"clr", Op::Clr},
    {"wde", Op::Wde},       {"wds", Op::Wds},     {"gad", Op::Gad},
    {"wfq", Op::Wfq},       {"pushq", Op::Pushq}, {"popq", Op::Popq},
    {"poph", Op::Poph},     {"specq", Op::Specq}, {"inv", Op::Inv},
};

const std::pair<const char*, uint32_t> kFlags[] = {
    {"rqf", FlWrite},    {"ucf", FlUncached}, {"nef", FlNonExcl},
    {"af", FlAtomic},    {"anrf", FlAtomicNr}, {"caf", FlCacheable},
    {"nwf", FlNullWb},   {"pf", FlPending},   {"spf", FlSpec},
    {"csf", FlCachedS},  {"cef", FlCachedE},  {"cmf", FlCachedM},
    {"cof", FlCachedO},  {"cff", FlCachedF},  {"rf", FlReplace},
    {"uf", FlUpgrade},   {"rof", FlReqOwns},
};

const std::pair<const char*, Sreg> kSregs[] = {
    {"cohst", Sreg::CohState},      {"reqlce", Sreg::ReqLce},
    {"addr", Sreg::Addr},           {"lruaddr", Sreg::LruAddr},
    {"lruway", Sreg::LruWay},       {"way", Sreg::Way},
    {"ownerlce", Sreg::OwnerLce},   {"ownerway", Sreg::OwnerWay},
    {"ownerstate", Sreg::OwnerState}, {"autofwd", Sreg::AutoFwd},
};

const std::pair<const char*, Queue> kQueues[] = {
    {"lce_req", Queue::LceReq},   {"lce_resp", Queue::LceResp},
    {"mem_resp", Queue::MemResp}, {"lce_cmd", Queue::LceCmd},
    {"mem_cmd", Queue::MemCmd},
};

const std::pair<const char*, CmdType> kCmds[] = {
    {"inv", CmdType::INV},         {"data", CmdType::DATA},
    {"st", CmdType::ST},           {"stw", CmdType::STW},
    {"wb", CmdType::WB},           {"tr", CmdType::TR},
    {"st_wb", CmdType::ST_WB},     {"st_tr", CmdType::ST_TR},
    {"st_tr_wb", CmdType::ST_TR_WB}, {"sync", CmdType::Sync},
    {"set_clear", CmdType::SetClear}, {"uc_data", CmdType::UcData},
    {"uc_done", CmdType::UcStoreDone},
};

const std::pair<const char*, MemOp> kMemOps[] = {
    {"rd", MemOp::Read},     {"wr", MemOp::Write},   {"uc_rd", MemOp::UcRead},
    {"uc_wr", MemOp::UcWrite}, {"uc_amo", MemOp::UcAmo},
};

const std::pair<const char*, St> kStates[] = {
    {"i", St::I}, {"s", St::S}, {"e", St::E},
    {"f", St::F}, {"m", St::M}, {"o", St::O},
};

[[noreturn]] void arity(const std::string& line) {
  throw OperandArity("bad operands: " + line);
}

template <class T, size_t N>
std::optional<T> lookup(const std::pair<const char*, T> (&tbl)[N],
                        const std::string& tok) {
  for (auto& [name, v] : tbl)
    if (tok == name) return v;
  return std::nullopt;
}

template <class T, size_t N>
const char* name_of(const std::pair<const char*, T> (&tbl)[N], T v) {
  for (auto& [name, val] : tbl)
    if (val == v) return name;
  return "?";
}

struct Line {
  std::vector<std::string> toks;
  std::string text;
  std::string label_ref; // unresolved branch target
};

uint8_t parse_reg(const std::string& t, const std::string& line) {
  if (t.size() < 2 || t[0] != 'r') arity(line);
  for (size_t i = 1; i < t.size(); ++i)
    if (!isdigit((unsigned char)t[i])) arity(line);
  int n = std::stoi(t.substr(1));
  if (n < 0 || n > 7) arity(line);
  return (uint8_t)n;
}

int64_t parse_int(const std::string& t, const std::string& line) {
  try {
    size_t pos = 0;
    int64_t v = std::stoll(t, &pos, 0);
    if (pos != t.size()) arity(line);
    return v;
  } catch (const OperandArity&) {
    throw;
  } catch (...) {
    arity(line);
  }
}

// state=<letter> or state=coh
void parse_state_sel(const std::string& v, StateSel& sel, St& st,
                     const std::string& line) {
  if (v == "coh") {
    sel = StateSel::CohReg;
    return;
  }
  if (auto s = lookup(kStates, v)) {
    sel = StateSel::Imm;
    st = *s;
    return;
  }
  arity(line);
}

struct KeyVals {
  std::map<std::string, std::string> kv;
  std::vector<std::string> bare;
};

KeyVals split_kv(const std::vector<std::string>& toks, size_t from) {
  KeyVals out;
  for (size_t i = from; i < toks.size(); ++i) {
    auto eq = toks[i].find('=');
    if (eq == std::string::npos)
      out.bare.push_back(toks[i]);
    else
      out.kv[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
  }
  return out;
}

} // namespace

MicrocodeProgram assemble(const std::string& source) {
  // Pass 1: strip comments, peel labels, expand pseudo-ops.
  std::vector<Line> lines;
  std::map<std::string, int32_t> labels;
  std::istringstream in(source);
  std::string raw;
  while (std::getline(in, raw)) {
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    while (!toks.empty() && toks.front().back() == ':') {
      std::string lbl = toks.front().substr(0, toks.front().size() - 1);
      labels[lbl] = (int32_t)lines.size();
      toks.erase(toks.begin());
    }
    if (toks.empty()) continue;
    Line l;
    l.toks = std::move(toks);
    l.text = raw;
    lines.push_back(std::move(l));
  }

  auto expand = [](std::vector<std::string>& t, const std::string& line) {
    const std::string& m = t[0];
    auto need = [&](size_t n) {
      if (t.size() != n) arity(line);
    };
    if (m == "nop") {
      need(1);
      t = {"add", "r0", "r0", "r0"};
    } else if (m == "inc") {
      need(2);
      t = {"addi", t[1], "1", t[1]};
    } else if (m == "dec") {
      need(2);
      t = {"subi", t[1], "1", t[1]};
    } else if (m == "bi") {
      need(2);
      t = {"beq", "r0", "r0", t[1], "[pt]"};
    } else if (m == "bgt" || m == "bge") {
      if (t.size() != 4 && t.size() != 5) arity(line);
      std::string op = m == "bgt" ? "blt" : "ble";
      std::swap(t[1], t[2]);
      t[0] = op;
    } else if (m == "bz" || m == "bnz") {
      if (t.size() != 3 && t.size() != 4) arity(line);
      t.insert(t.begin() + 2, "0");
      t[0] = m == "bz" ? "beqi" : "bneqi";
    } else if (m == "clf") {
      need(1);
      t = {"ldflagsi", "0"};
    }
  };

  MicrocodeProgram p;
  for (auto& l : lines) {
    bool predict = false;
    if (!l.toks.empty() && l.toks.back() == "[pt]") {
      predict = true;
      l.toks.pop_back();
    }
    expand(l.toks, l.text);
    if (!l.toks.empty() && l.toks.back() == "[pt]") {
      predict = true;
      l.toks.pop_back();
    }
    auto& t = l.toks;
    auto it = kOps.find(t[0]);
    if (it == kOps.end()) throw UnknownMnemonic("unknown mnemonic: " + t[0]);
    Instr ins;
    ins.op = it->second;
    ins.predict = predict;
    auto need = [&](size_t n) {
      if (t.size() != n) arity(l.text);
    };
    auto resolve = [&](const std::string& lbl) {
      auto f = labels.find(lbl);
      if (f == labels.end()) throw UndefinedLabel("undefined label: " + lbl);
      return f->second;
    };
    switch (ins.op) {
    case Op::Add: case Op::Sub: case Op::Lsh: case Op::Rsh:
    case Op::And: case Op::Or: case Op::Xor:
      need(4);
      ins.ra = parse_reg(t[1], l.text);
      ins.rb = parse_reg(t[2], l.text);
      ins.rd = parse_reg(t[3], l.text);
      break;
    case Op::Addi: case Op::Subi: case Op::Lshi: case Op::Rshi:
      need(4);
      ins.ra = parse_reg(t[1], l.text);
      ins.imm = parse_int(t[2], l.text);
      ins.rd = parse_reg(t[3], l.text);
      break;
    case Op::Not: case Op::Neg: case Op::Mov:
      need(3);
      ins.ra = parse_reg(t[1], l.text);
      ins.rd = parse_reg(t[2], l.text);
      break;
    case Op::Movi:
      need(3);
      ins.imm = parse_int(t[1], l.text);
      ins.rd = parse_reg(t[2], l.text);
      break;
    case Op::Beq: case Op::Bne: case Op::Blt: case Op::Ble:
      need(4);
      ins.ra = parse_reg(t[1], l.text);
      ins.rb = parse_reg(t[2], l.text);
      ins.target = resolve(t[3]);
      break;
    case Op::Beqi: case Op::Bneqi:
      need(4);
      ins.ra = parse_reg(t[1], l.text);
      ins.imm = parse_int(t[2], l.text);
      ins.target = resolve(t[3]);
      break;
    case Op::Bs:
      need(4);
      if (auto s = lookup(kSregs, t[1])) ins.sa = *s; else arity(l.text);
      ins.ra = parse_reg(t[2], l.text);
      ins.target = resolve(t[3]);
      break;
    case Op::Bsi:
      need(4);
      if (auto s = lookup(kSregs, t[1])) ins.sa = *s; else arity(l.text);
      if (auto s = lookup(kStates, t[2]))
        ins.imm = (int64_t)*s;
      else
        ins.imm = parse_int(t[2], l.text);
      ins.target = resolve(t[3]);
      break;
    case Op::Bf: case Op::Bfnot: case Op::Bfz: case Op::Bfnz:
      if (t.size() < 3) arity(l.text);
      ins.target = resolve(t[1]);
      for (size_t i = 2; i < t.size(); ++i) {
        if (auto f = lookup(kFlags, t[i])) ins.flags |= *f;
        else arity(l.text);
      }
      break;
    case Op::Sf: case Op::Sfz:
      if (t.size() < 2) arity(l.text);
      for (size_t i = 1; i < t.size(); ++i) {
        if (auto f = lookup(kFlags, t[i])) ins.flags |= *f;
        else arity(l.text);
      }
      break;
    case Op::Andf: case Op::Orf: case Op::Nandf: case Op::Norf:
      need(3);
      ins.ra = parse_reg(t[1], l.text);
      ins.rd = parse_reg(t[2], l.text);
      break;
    case Op::Notf:
      need(2);
      ins.rd = parse_reg(t[1], l.text);
      break;
    case Op::Ldflags:
      need(2);
      ins.ra = parse_reg(t[1], l.text);
      break;
    case Op::Ldflagsi:
      need(2);
      ins.imm = parse_int(t[1], l.text);
      break;
    case Op::Movsg:
      need(3);
      if (auto s = lookup(kSregs, t[1])) ins.sa = *s; else arity(l.text);
      ins.rd = parse_reg(t[2], l.text);
      break;
    case Op::Movgs:
      need(3);
      ins.ra = parse_reg(t[1], l.text);
      if (auto s = lookup(kSregs, t[2])) ins.sa = *s; else arity(l.text);
      break;
    case Op::Movis:
      need(3);
      if (auto s = lookup(kStates, t[1]))
        ins.imm = (int64_t)*s;
      else
        ins.imm = parse_int(t[1], l.text);
      if (auto s = lookup(kSregs, t[2])) ins.sa = *s; else arity(l.text);
      break;
    case Op::Clm: case Op::Gad: case Op::Inv:
      need(1);
      break;
    case Op::Rdp: case Op::Clp: case Op::Clr: {
      need(2);
      auto kv = split_kv(t, 1);
      auto a = kv.kv.find("addr");
      if (a == kv.kv.end()) arity(l.text);
      ins.addr_sel = a->second == "lru" ? AddrSel::Lru : AddrSel::Req;
      if (a->second != "lru" && a->second != "req") arity(l.text);
      break;
    }
    case Op::Wdp: {
      need(3);
      auto kv = split_kv(t, 1);
      if (!kv.kv.count("addr") || !kv.kv.count("p")) arity(l.text);
      ins.addr_sel = kv.kv["addr"] == "lru" ? AddrSel::Lru : AddrSel::Req;
      ins.imm = parse_int(kv.kv["p"], l.text);
      break;
    }
    case Op::Rdw: {
      need(4);
      auto kv = split_kv(t, 1);
      if (!kv.kv.count("addr") || !kv.kv.count("lce") ||
          !kv.kv.count("lru_way"))
        arity(l.text);
      ins.addr_sel = kv.kv["addr"] == "lru" ? AddrSel::Lru : AddrSel::Req;
      break;
    }
    case Op::Rde: {
      auto kv = split_kv(t, 1);
      if (!kv.kv.count("addr") || !kv.kv.count("lce") || !kv.kv.count("way") ||
          !kv.kv.count("dst"))
        arity(l.text);
      ins.addr_sel = kv.kv["addr"] == "lru" ? AddrSel::Lru : AddrSel::Req;
      ins.lce_sel = kv.kv["lce"] == "owner" ? LceSel::Owner : LceSel::Req;
      ins.way_sel = kv.kv["way"] == "owner"  ? WaySel::Owner
                    : kv.kv["way"] == "lru" ? WaySel::Lru
                                            : WaySel::Req;
      ins.rd = parse_reg(kv.kv["dst"], l.text);
      break;
    }
    case Op::Wde: case Op::Wds: {
      need(5);
      auto kv = split_kv(t, 1);
      if (!kv.kv.count("addr") || !kv.kv.count("lce") || !kv.kv.count("way") ||
          !kv.kv.count("state"))
        arity(l.text);
      ins.addr_sel = kv.kv["addr"] == "lru" ? AddrSel::Lru : AddrSel::Req;
      ins.lce_sel = kv.kv["lce"] == "owner" ? LceSel::Owner : LceSel::Req;
      ins.way_sel = kv.kv["way"] == "owner"  ? WaySel::Owner
                    : kv.kv["way"] == "lru" ? WaySel::Lru
                                            : WaySel::Req;
      parse_state_sel(kv.kv["state"], ins.st_sel, ins.st, l.text);
      break;
    }
    case Op::Wfq: {
      if (t.size() < 2) arity(l.text);
      for (size_t i = 1; i < t.size(); ++i) {
        if (auto q = lookup(kQueues, t[i])) ins.qmask |= 1u << (int)*q;
        else arity(l.text);
      }
      break;
    }
    case Op::Popq: {
      if (t.size() != 2 && t.size() != 3) arity(l.text);
      if (auto q = lookup(kQueues, t[1])) ins.q = *q; else arity(l.text);
      if (t.size() == 3) {
        if (t[2] != "wp") arity(l.text);
        ins.wp = true;
      }
      break;
    }
    case Op::Poph: {
      need(3);
      if (auto q = lookup(kQueues, t[1])) ins.q = *q; else arity(l.text);
      ins.rd = parse_reg(t[2], l.text);
      break;
    }
    case Op::Pushq: {
      if (t.size() < 3) arity(l.text);
      if (auto q = lookup(kQueues, t[1])) ins.q = *q; else arity(l.text);
      auto kv = split_kv(t, 3);
      if (ins.q == Queue::MemCmd) {
        if (auto m = lookup(kMemOps, t[2])) ins.mop = *m; else arity(l.text);
      } else if (ins.q == Queue::LceCmd) {
        if (auto c = lookup(kCmds, t[2])) ins.cmd = *c; else arity(l.text);
      } else {
        arity(l.text);
      }
      if (kv.kv.count("addr"))
        ins.addr_sel = kv.kv["addr"] == "lru" ? AddrSel::Lru : AddrSel::Req;
      if (kv.kv.count("lce"))
        ins.lce_sel = kv.kv["lce"] == "owner" ? LceSel::Owner : LceSel::Req;
      if (kv.kv.count("way"))
        ins.way_sel = kv.kv["way"] == "owner"  ? WaySel::Owner
                      : kv.kv["way"] == "lru" ? WaySel::Lru
                                              : WaySel::Req;
      if (kv.kv.count("st"))
        parse_state_sel(kv.kv["st"], ins.st_sel, ins.st, l.text);
      if (kv.kv.count("xst"))
        parse_state_sel(kv.kv["xst"], ins.xst_sel, ins.xst, l.text);
      if (kv.kv.count("spec")) ins.spec = parse_int(kv.kv["spec"], l.text) != 0;
      if (kv.kv.count("wp")) ins.wp = parse_int(kv.kv["wp"], l.text) != 0;
      // target=req is implied for transfer commands.
      break;
    }
    case Op::Specq: {
      if (t.size() < 3) arity(l.text);
      if (t[2] != "addr=req" && t[2] != "addr=lru") arity(l.text);
      ins.addr_sel = t[2] == "addr=lru" ? AddrSel::Lru : AddrSel::Req;
      if (t[1] == "squash") ins.sq = SpecqOp::Squash;
      else if (t[1] == "fwd_mod") ins.sq = SpecqOp::FwdMod;
      else if (t[1] == "unset") ins.sq = SpecqOp::Unset;
      else arity(l.text);
      if (ins.sq == SpecqOp::FwdMod) {
        if (t.size() != 4 || t[3].rfind("state=", 0) != 0) arity(l.text);
        parse_state_sel(t[3].substr(6), ins.st_sel, ins.st, l.text);
      } else if (t.size() != 3) {
        arity(l.text);
      }
      break;
    }
    }
    p.code.push_back(ins);
  }
  return p;
}

namespace {

std::string sel_str(AddrSel s) { return s == AddrSel::Lru ? "lru" : "req"; }
std::string sel_str(LceSel s) { return s == LceSel::Owner ? "owner" : "req"; }
std::string sel_str(WaySel s) {
  switch (s) {
  case WaySel::Owner: return "owner";
  case WaySel::Lru: return "lru";
  default: return "req";
  }
}
std::string st_str(StateSel sel, St st) {
  return sel == StateSel::CohReg ? "coh" : name_of(kStates, st);
}

std::string render(const Instr& i, const std::vector<std::string>& label_at) {
  std::ostringstream os;
  auto reg = [](uint8_t r) { return "r" + std::to_string(r); };
  auto tgt = [&] { return label_at[(size_t)i.target]; };
  auto mn = [&](const char* m) { os << m; };
  switch (i.op) {
  case Op::Add: mn("add"); goto rrr;
  case Op::Sub: mn("sub"); goto rrr;
  case Op::Lsh: mn("lsh"); goto rrr;
  case Op::Rsh: mn("rsh"); goto rrr;
  case Op::And: mn("and"); goto rrr;
  case Op::Or: mn("or"); goto rrr;
  case Op::Xor: mn("xor"); goto rrr;
  rrr:
    os << ' ' << reg(i.ra) << ' ' << reg(i.rb) << ' ' << reg(i.rd);
    break;
  case Op::Addi: mn("addi"); goto rir;
  case Op::Subi: mn("subi"); goto rir;
  case Op::Lshi: mn("lshi"); goto rir;
  case Op::Rshi: mn("rshi"); goto rir;
  rir:
    os << ' ' << reg(i.ra) << ' ' << i.imm << ' ' << reg(i.rd);
    break;
  case Op::Not: os << "not " << reg(i.ra) << ' ' << reg(i.rd); break;
  case Op::Neg: os << "neg " << reg(i.ra) << ' ' << reg(i.rd); break;
  case Op::Mov: os << "mov " << reg(i.ra) << ' ' << reg(i.rd); break;
  case Op::Movi: os << "movi " << i.imm << ' ' << reg(i.rd); break;
  case Op::Beq: mn("beq"); goto brr;
  case Op::Bne: mn("bne"); goto brr;
  case Op::Blt: mn("blt"); goto brr;
  case Op::Ble: mn("ble"); goto brr;
  brr:
    os << ' ' << reg(i.ra) << ' ' << reg(i.rb) << ' ' << tgt();
    break;
  case Op::Beqi:
    os << "beqi " << reg(i.ra) << ' ' << i.imm << ' ' << tgt();
    break;
  case Op::Bneqi:
    os << "bneqi " << reg(i.ra) << ' ' << i.imm << ' ' << tgt();
    break;
  case Op::Bs:
    os << "bs " << name_of(kSregs, i.sa) << ' ' << reg(i.ra) << ' ' << tgt();
    break;
  case Op::Bsi:
    os << "bsi " << name_of(kSregs, i.sa) << ' '
       << name_of(kStates, (St)i.imm) << ' ' << tgt();
    break;
  case Op::Bf: mn("bf"); goto bfl;
  case Op::Bfnot: mn("bfnot"); goto bfl;
  case Op::Bfz: mn("bfz"); goto bfl;
  case Op::Bfnz: mn("bfnz"); goto bfl;
  bfl:
    os << ' ' << tgt();
    for (auto& [name, bit] : kFlags)
      if (i.flags & bit) os << ' ' << name;
    break;
  case Op::Sf: case Op::Sfz:
    os << (i.op == Op::Sf ? "sf" : "sfz");
    for (auto& [name, bit] : kFlags)
      if (i.flags & bit) os << ' ' << name;
    break;
  case Op::Andf: os << "andf " << reg(i.ra) << ' ' << reg(i.rd); break;
  case Op::Orf: os << "orf " << reg(i.ra) << ' ' << reg(i.rd); break;
  case Op::Nandf: os << "nandf " << reg(i.ra) << ' ' << reg(i.rd); break;
  case Op::Norf: os << "norf " << reg(i.ra) << ' ' << reg(i.rd); break;
  case Op::Notf: os << "notf " << reg(i.rd); break;
  case Op::Ldflags: os << "ldflags " << reg(i.ra); break;
  case Op::Ldflagsi: os << "ldflagsi " << i.imm; break;
  case Op::Movsg:
    os << "movsg " << name_of(kSregs, i.sa) << ' ' << reg(i.rd);
    break;
  case Op::Movgs:
    os << "movgs " << reg(i.ra) << ' ' << name_of(kSregs, i.sa);
    break;
  case Op::Movis:
    os << "movis ";
    if (i.sa == Sreg::CohState || i.sa == Sreg::OwnerState)
      os << name_of(kStates, (St)i.imm);
    else
      os << i.imm;
    os << ' ' << name_of(kSregs, i.sa);
    break;
  case Op::Clm: os << "clm"; break;
  case Op::Gad: os << "gad"; break;
  case Op::Inv: os << "inv"; break;
  case Op::Rdp: os << "rdp addr=" << sel_str(i.addr_sel); break;
  case Op::Clp: os << "clp addr=" << sel_str(i.addr_sel); break;
  case Op::Clr: os << "clr addr=" << sel_str(i.addr_sel); break;
  case Op::Wdp:
    os << "wdp addr=" << sel_str(i.addr_sel) << " p=" << i.imm;
    break;
  case Op::Rdw:
    os << "rdw addr=" << sel_str(i.addr_sel) << " lce=req lru_way=req";
    break;
  case Op::Rde:
    os << "rde addr=" << sel_str(i.addr_sel) << " lce=" << sel_str(i.lce_sel)
       << " way=" << sel_str(i.way_sel) << " dst=" << reg(i.rd);
    break;
  case Op::Wde: case Op::Wds:
    os << (i.op == Op::Wde ? "wde" : "wds") << " addr=" << sel_str(i.addr_sel)
       << " lce=" << sel_str(i.lce_sel) << " way=" << sel_str(i.way_sel)
       << " state=" << st_str(i.st_sel, i.st);
    break;
  case Op::Wfq:
    os << "wfq";
    for (auto& [name, q] : kQueues)
      if (i.qmask & (1u << (int)q)) os << ' ' << name;
    break;
  case Op::Popq:
    os << "popq " << name_of(kQueues, i.q);
    if (i.wp) os << " wp";
    break;
  case Op::Poph:
    os << "poph " << name_of(kQueues, i.q) << ' ' << reg(i.rd);
    break;
  case Op::Pushq:
    os << "pushq " << name_of(kQueues, i.q) << ' ';
    if (i.q == Queue::MemCmd) {
      os << name_of(kMemOps, i.mop) << " addr=" << sel_str(i.addr_sel)
         << " spec=" << (i.spec ? 1 : 0) << " wp=" << (i.wp ? 1 : 0);
    } else {
      os << name_of(kCmds, i.cmd) << " addr=" << sel_str(i.addr_sel)
         << " lce=" << sel_str(i.lce_sel) << " way=" << sel_str(i.way_sel)
         << " st=" << st_str(i.st_sel, i.st);
      if (cmd_has_tr(i.cmd))
        os << " xst=" << st_str(i.xst_sel, i.xst) << " target=req";
      if (i.wp) os << " wp=1";
    }
    break;
  case Op::Specq:
    os << "specq ";
    switch (i.sq) {
    case SpecqOp::Squash: os << "squash"; break;
    case SpecqOp::FwdMod: os << "fwd_mod"; break;
    case SpecqOp::Unset: os << "unset"; break;
    }
    os << " addr=" << sel_str(i.addr_sel);
    if (i.sq == SpecqOp::FwdMod) os << " state=" << st_str(i.st_sel, i.st);
    break;
  }
  if (i.predict) os << " [pt]";
  return os.str();
}

std::vector<std::string> make_labels(const MicrocodeProgram& p) {
  std::vector<std::string> at(p.code.size() + 1);
  for (const auto& i : p.code)
    if (i.target >= 0 && (size_t)i.target < at.size())
      at[(size_t)i.target] = "L" + std::to_string(i.target);
  return at;
}

} // namespace

std::string disassemble(const MicrocodeProgram& p) {
  auto labels = make_labels(p);
  std::ostringstream os;
  for (size_t pc = 0; pc < p.code.size(); ++pc) {
    if (!labels[pc].empty()) os << labels[pc] << ":\n";
    os << "    " << render(p.code[pc], labels) << '\n';
  }
  return os.str();
}

std::string listing(const MicrocodeProgram& p) {
  auto labels = make_labels(p);
  std::ostringstream os;
  for (size_t pc = 0; pc < p.code.size(); ++pc) {
    os << pc << '\t' << (p.code[pc].predict ? 1 : 0) << '\t';
    if (!labels[pc].empty()) os << labels[pc] << ": ";
    os << render(p.code[pc], labels) << '\n';
  }
  return os.str();
}

} // namespace bedrock::ucode
