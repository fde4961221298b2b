#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "geost/netsim/scenario.hpp"

namespace geost::harness {

/// "1000MiB", "64 KiB", "2GB", "4096" (bytes). Throws kInvalidScenario.
std::uint64_t parse_size(std::string_view text);

/// JSON scenario documents. Syntax errors carry line:column; schema errors
/// carry the JSON path of the offending field. `base_dir` resolves a
/// relative "traces_file".
netsim::Scenario parse_scenario(std::string_view text, const std::string& origin = "<scenario>",
                                const std::string& base_dir = ".");
netsim::Scenario load_scenario(const std::string& path);

/// Inline-trace JSON that parse_scenario reads back to an equal scenario.
std::string scenario_to_json(const netsim::Scenario& sc);

}  // namespace geost::harness
