#include "bedrock/config.hpp"

#include <istream>
#include <sstream>

namespace bedrock {

SystemConfig parse_system_config(std::istream& in) {
  SystemConfig c;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::istringstream probe(line);
      std::string tok;
      if (probe >> tok)
        throw BadConfig("line " + std::to_string(lineno) + ": want key = value");
      continue; // blank
    }
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw BadConfig("line " + std::to_string(lineno) + ": empty key or value");
    auto num = [&] { return std::stoull(val); };
    if (key == "cores") c.cores = uint32_t(num());
    else if (key == "variant") c.variant = variant_from_string(val);
    else if (key == "engine") c.engine = engine_from_string(val);
    else if (key == "sets") c.org.sets = uint32_t(num());
    else if (key == "assoc") c.org.assoc = uint32_t(num());
    else if (key == "block_bytes") c.org.block_bytes = uint32_t(num());
    else if (key == "num_cce") c.num_cce = uint32_t(num());
    else if (key == "fill_width") c.fill_width = uint32_t(num());
    else if (key == "net_latency") c.net_latency = uint32_t(num());
    else if (key == "channel_width") c.channel_width = uint32_t(num());
    else if (key == "mem_latency") c.mem_latency = uint32_t(num());
    else if (key == "seed") c.seed = num();
    else if (key == "watchdog") c.watchdog = num();
    else throw BadConfig("line " + std::to_string(lineno) + ": unknown key " + key);
  }
  return c;
}

std::string config_text(const SystemConfig& c) {
  std::ostringstream os;
  os << "cores = " << c.cores << '\n'
     << "variant = " << to_string(c.variant) << '\n'
     << "engine = " << to_string(c.engine) << '\n'
     << "sets = " << c.org.sets << '\n'
     << "assoc = " << c.org.assoc << '\n'
     << "block_bytes = " << c.org.block_bytes << '\n'
     << "num_cce = " << c.num_cce << '\n'
     << "fill_width = " << c.fill_width << '\n'
     << "net_latency = " << c.net_latency << '\n'
     << "channel_width = " << c.channel_width << '\n'
     << "mem_latency = " << c.mem_latency << '\n'
     << "seed = " << c.seed << '\n'
     << "watchdog = " << c.watchdog << '\n';
  return os.str();
}

} // namespace bedrock
