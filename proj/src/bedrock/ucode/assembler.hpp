#pragma once

#include <stdexcept>
#include <string>

#include "bedrock/ucode/isa.hpp"

namespace bedrock::ucode {

struct UnknownMnemonic : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UndefinedLabel : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OperandArity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two-pass assembly of one microcode source: labels, pseudo-op expansion,
// and static predict-taken bits.
MicrocodeProgram assemble(const std::string& source);

// Canonical text whose reassembly reproduces the same decoded records.
std::string disassemble(const MicrocodeProgram& p);

// Human-oriented listing: pc, instruction, predict bit.
std::string listing(const MicrocodeProgram& p);

} // namespace bedrock::ucode
