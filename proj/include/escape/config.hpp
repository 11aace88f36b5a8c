#pragma once

#include "escape/engine.hpp"

#include <string>
#include <string_view>

namespace escape {

/// Parses and validates a run configuration document. Throws ConfigError.
GameConfig parse_config(std::string_view text);

/// Canonical form: compact JSON, sorted keys, all defaults spelled out.
/// parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const GameConfig& config, int indent = -1);

/// Lowercase hex SHA-256 of serialize_config(config).
std::string config_digest(const GameConfig& config);

std::string sha256_hex(std::string_view bytes);

GameConfig load_config_file(const std::string& path);

}  // namespace escape
