#pragma once

#include "bedrock/states.hpp"
#include "bedrock/ucode/isa.hpp"

namespace bedrock::ucode {

// Shipped request-processing programs, assembled from the data directory.
const MicrocodeProgram& moesif_program();
const MicrocodeProgram& mesi_program();
// Program for a protocol variant; only MESI and MOESIF ship microcode.
const MicrocodeProgram& program_for(Variant v);

} // namespace bedrock::ucode
