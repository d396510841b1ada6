#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "otfs/modem_sim.hpp"

namespace otfs {

/// Line-oriented configuration text.
///
///   # comment
///   [grid]
///   M = 16
///   N = 8
///   [channel]
///   profile = vehicular_b_scaled
///   [sim]
///   snr_db = 5, 10, 15
///
/// A key may also be written fully qualified ("grid.M = 16") outside any
/// section. Lists are comma separated. Unknown sections and keys are
/// rejected, as are duplicate keys.
///
/// Overrides are "key=value" strings applied after the file. The key is
/// either qualified or a bare name that is unique across sections.
SimConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides = {});

/// Reads `path` and parses it. Throws ConfigError when the file is missing.
SimConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Canonical text for `config`. parse_config_text(to_config_text(c)) == c.
std::string to_config_text(const SimConfig& config);

/// Every accepted qualified key, in canonical order.
const std::vector<std::string>& config_keys();

}  // namespace otfs
