#include "bedrock/states.hpp"

namespace bedrock {

StateProps state_properties(St s) {
  switch (s) {
    case St::I: return {false, false, false, false, false, 0b000};
    case St::S: return {true, false, false, true, false, 0b001};
    case St::E: return {true, false, true, false, true, 0b010};
    case St::F: return {true, false, true, true, false, 0b011};
    case St::M: return {true, true, true, false, true, 0b110};
    case St::O: return {true, true, true, true, false, 0b111};
  }
  throw std::logic_error("bad state");
}

const char* to_string(St s) {
  switch (s) {
    case St::I: return "I";
    case St::S: return "S";
    case St::E: return "E";
    case St::F: return "F";
    case St::M: return "M";
    case St::O: return "O";
  }
  return "?";
}

St state_from_string(const std::string& s) {
  if (s == "I") return St::I;
  if (s == "S") return St::S;
  if (s == "E") return St::E;
  if (s == "F") return St::F;
  if (s == "M") return St::M;
  if (s == "O") return St::O;
  throw std::invalid_argument("unknown state: " + s);
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::MI: return "MI";
    case Variant::MSI: return "MSI";
    case Variant::MESI: return "MESI";
    case Variant::MESIF: return "MESIF";
    case Variant::MOSI: return "MOSI";
    case Variant::MOSIF: return "MOSIF";
    case Variant::MOESI: return "MOESI";
    case Variant::MOESIF: return "MOESIF";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  for (Variant v : all_variants)
    if (s == to_string(v)) return v;
  throw std::invalid_argument("unknown variant: " + s);
}

const std::vector<St>& states(Variant v) {
  static const std::vector<St> mi{St::M, St::I};
  static const std::vector<St> msi{St::M, St::S, St::I};
  static const std::vector<St> mesi{St::M, St::E, St::S, St::I};
  static const std::vector<St> mesif{St::M, St::E, St::S, St::I, St::F};
  static const std::vector<St> mosi{St::M, St::O, St::S, St::I};
  static const std::vector<St> mosif{St::M, St::O, St::S, St::I, St::F};
  static const std::vector<St> moesi{St::M, St::O, St::E, St::S, St::I};
  static const std::vector<St> moesif{St::M, St::O, St::E, St::S, St::I, St::F};
  switch (v) {
    case Variant::MI: return mi;
    case Variant::MSI: return msi;
    case Variant::MESI: return mesi;
    case Variant::MESIF: return mesif;
    case Variant::MOSI: return mosi;
    case Variant::MOSIF: return mosif;
    case Variant::MOESI: return moesi;
    case Variant::MOESIF: return moesif;
  }
  throw std::logic_error("bad variant");
}

bool has_state(Variant v, St s) {
  for (St x : states(v))
    if (x == s) return true;
  return false;
}

} // namespace bedrock
