#pragma once

// Flat key-value configuration files.
//
//   # comment
//   model.G = 0.2
//   meas.scheme = dispersive
//   sweep.lambdas = 0, 0.01, 0.02, 0.04
//
// One `key = value` per line; `#` starts a comment. Unknown keys, duplicate
// keys and malformed values are errors that name the key and line number.
// Every key has a default, so an empty file is the full default
// configuration.

#include <string>
#include <string_view>
#include <vector>

#include "qotto/engine.hpp"

namespace qotto {

/// Parses configuration text. `source` labels error messages.
CycleConfig parse_config_text(std::string_view text, const std::string& source = "<config>",
                              const std::vector<std::string>& overrides = {});

/// Reads and parses a file, then applies `key=value` overrides in order.
/// Throws ConfigError on a missing file.
CycleConfig parse_config_file(const std::string& path,
                              const std::vector<std::string>& overrides = {});

/// Sets one key from its textual value without validating the whole config.
void set_config_value(CycleConfig& config, std::string_view key, std::string_view value);

/// All keys in emission order.
std::vector<std::string> config_keys();

/// Every key with its current value, one `key = value` per line. Parsing the
/// output reproduces `config` exactly.
std::string emit_config(const CycleConfig& config);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

Scheme parse_scheme(std::string_view text);

}  // namespace qotto
