#include "bedrock/ucode/programs.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bedrock/ucode/assembler.hpp"

namespace bedrock::ucode {

namespace {

MicrocodeProgram load(const char* name) {
  std::string path = std::string(BEDROCK_DATA_DIR) + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open microcode: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return assemble(ss.str());
}

} // namespace

const MicrocodeProgram& moesif_program() {
  static const MicrocodeProgram p = load("moesif.ucode");
  return p;
}

const MicrocodeProgram& mesi_program() {
  static const MicrocodeProgram p = load("mesi.ucode");
  return p;
}

const MicrocodeProgram& program_for(Variant v) {
  switch (v) {
  case Variant::MESI: return mesi_program();
  case Variant::MOESIF: return moesif_program();
  default:
    throw std::runtime_error(std::string("no microcode program for ") +
                             bedrock::to_string(v));
  }
}

} // namespace bedrock::ucode
