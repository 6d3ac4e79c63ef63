#pragma once

// Run configuration: INI text -> raw string table -> typed, validated
// RunConfig. Every value is checked before any computation starts; the raw
// table is what the envelope echoes back.

#include "qnd/analytic.hpp"
#include "qnd/bayes.hpp"
#include "qnd/resonator.hpp"
#include "qnd/validation.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace qnd::cli {

// Bad or missing configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// section -> key -> value, both levels sorted.
using RawConfig = std::map<std::string, std::map<std::string, std::string>>;

RawConfig parse_ini(std::istream& in, const std::string& origin = "<config>");
RawConfig load_ini(const std::string& path);

// "section.key=value"; creates the section if needed.
void apply_override(RawConfig& raw, const std::string& assignment);

// Inverse of parse_ini for any table parse_ini can produce.
std::string to_ini(const RawConfig& raw);

enum class SweepVariable { n_bar_p, eta, q_load };
enum class SweepScale { log, linear };
enum class OutputFormat { csv, json };

struct SweepConfig {
    SweepVariable variable = SweepVariable::n_bar_p;
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 0;
    SweepScale scale = SweepScale::log;
};

struct RunConfig {
    // Exactly one of these supplies the nonlinearity.
    std::optional<InteractionParams> interaction;
    std::optional<ResonatorSpec> resonator;

    std::optional<double> n_bar_p;  // probe section
    std::optional<double> eta;      // detection.eta, or eta_total of the resonator
    std::optional<double> zeta;     // empty: auto (optimal angle at the prior mean)
    bayes::Likelihood likelihood = bayes::Likelihood::gaussian;

    std::optional<double> n_bar_s;
    std::optional<std::size_t> window_max;

    std::optional<validation::Options> oracle;
    std::optional<SweepConfig> sweep;

    std::optional<std::string> posterior_x;  // number, "sample" or "mode"
    std::optional<std::size_t> sample_count;
    double credible_mass = 0.68;

    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_path;
    std::optional<OutputFormat> format;

    // Nonlinear factors from whichever section supplies them.
    InteractionParams interaction_params() const;
    // Detection efficiency (resonator: eta_load * eta_extra); 1 when unset.
    double efficiency() const;
};

RunConfig resolve(const RawConfig& raw);

std::string format_name(OutputFormat f);
std::string sweep_variable_name(SweepVariable v);

}  // namespace qnd::cli
