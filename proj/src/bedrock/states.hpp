#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bedrock {

// Stable coherence states. No transient states exist anywhere in the model.
enum class St : uint8_t { I = 0, S, E, F, M, O };

inline constexpr std::array<St, 6> all_states{St::I, St::S, St::E,
                                              St::F, St::M, St::O};

struct StateProps {
  bool valid;
  bool dirty;
  bool owned;
  bool not_exclusive;
  bool read_write;  // write permission; meaningless for I
  uint8_t encoding; // 3 bits: {dirty, owned, not_exclusive}
};

StateProps state_properties(St s);
const char* to_string(St s);
St state_from_string(const std::string& s);

enum class Variant : uint8_t { MI = 0, MSI, MESI, MESIF, MOSI, MOSIF, MOESI, MOESIF };

inline constexpr std::array<Variant, 8> all_variants{
    Variant::MI,   Variant::MSI,   Variant::MESI,  Variant::MESIF,
    Variant::MOSI, Variant::MOSIF, Variant::MOESI, Variant::MOESIF};

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

// The exact state subset named by the variant (always contains I).
const std::vector<St>& states(Variant v);
bool has_state(Variant v, St s);

} // namespace bedrock
