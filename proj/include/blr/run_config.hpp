// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "blr/gmjmcmc.hpp"

namespace blr {

/// Keys accepted in config files, in echo order.
const std::vector<std::string>& config_keys();

/// Sets one tuning parameter by its table name (N_init, ..., d). Throws
/// std::invalid_argument for unknown keys or unparsable values.
void set_config_value(GmjmcmcConfig& cfg, std::string_view key, std::string_view value);

/// Applies `key = value` lines; blank lines and lines starting with '#' are
/// skipped. Errors name the line.
void apply_config(GmjmcmcConfig& cfg, std::istream& in, const std::string& origin = "config");
void apply_config_file(GmjmcmcConfig& cfg, const std::string& path);

}  // namespace blr
