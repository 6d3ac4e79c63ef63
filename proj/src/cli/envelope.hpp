#pragma once

// Result envelope and text formatting shared by all commands.

#include "config.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qnd::cli {

inline constexpr const char* kToolName = "qnd";
inline constexpr const char* kToolVersion = "0.1.0";

// ISO-8601 UTC. "now" reads the clock; anything else is echoed verbatim.
// Without a flag: SOURCE_DATE_EPOCH if set, else the Unix epoch, so that
// repeated runs stay byte-identical.
std::string resolve_timestamp(const std::optional<std::string>& flag);

// {"tool", "version", "timestamp", "command", "config", "payload"}; keys sorted.
nlohmann::json envelope(const std::string& command, const RawConfig& raw, const std::string& timestamp,
                        nlohmann::json payload);

std::string dump_pretty(const nlohmann::json& j);  // 2-space indent, trailing LF
std::string dump_line(const nlohmann::json& j);    // compact, trailing LF

// 17 significant digits; empty cell for a missing value.
std::string csv_number(double v);
std::string csv_number(const std::optional<double>& v);
std::string csv_text(const std::string& s);  // RFC 4180 quoting when needed

// null for missing or non-finite values.
nlohmann::json json_number(const std::optional<double>& v);

std::string csv_row(const std::vector<std::string>& cells);

}  // namespace qnd::cli
