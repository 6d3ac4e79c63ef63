#include "envelope.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>

namespace qnd::cli {

namespace {

std::string iso_utc(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string resolve_timestamp(const std::optional<std::string>& flag) {
    if (flag) {
        if (*flag == "now") return iso_utc(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now()));
        return *flag;
    }
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0') return iso_utc(static_cast<std::time_t>(v));
    }
    return iso_utc(0);
}

nlohmann::json envelope(const std::string& command, const RawConfig& raw, const std::string& timestamp,
                        nlohmann::json payload) {
    nlohmann::json config = nlohmann::json::object();
    for (const auto& [section, body] : raw) {
        nlohmann::json s = nlohmann::json::object();
        for (const auto& [key, value] : body) s[key] = value;
        config[section] = std::move(s);
    }
    return {{"tool", kToolName},
            {"version", kToolVersion},
            {"timestamp", timestamp},
            {"command", command},
            {"config", std::move(config)},
            {"payload", std::move(payload)}};
}

std::string dump_pretty(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string dump_line(const nlohmann::json& j) { return j.dump() + "\n"; }

std::string csv_number(double v) {
    if (!std::isfinite(v)) return {};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_number(const std::optional<double>& v) { return v ? csv_number(*v) : std::string{}; }

std::string csv_text(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

nlohmann::json json_number(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    return line + "\n";
}

}  // namespace qnd::cli
