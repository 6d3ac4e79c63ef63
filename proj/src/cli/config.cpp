#include "config.hpp"

#include "qnd/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qnd::cli {

namespace pt = boost::property_tree;

RawConfig parse_ini(std::istream& in, const std::string& origin) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    RawConfig raw;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError(origin + ": key '" + section + "' must live inside a [section]");
        }
        auto& dst = raw[section];
        for (const auto& [key, value] : body) dst[key] = value.get_value<std::string>();
    }
    return raw;
}

RawConfig load_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_ini(in, path);
}

void apply_override(RawConfig& raw, const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq || dot == 0 || dot + 1 == eq) {
        throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
    }
    raw[assignment.substr(0, dot)][assignment.substr(dot + 1, eq - dot - 1)] = assignment.substr(eq + 1);
}

std::string to_ini(const RawConfig& raw) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [section, body] : raw) {
        if (!first) out << '\n';
        first = false;
        out << '[' << section << "]\n";
        for (const auto& [key, value] : body) out << key << " = " << value << '\n';
    }
    return out.str();
}

std::string format_name(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

std::string sweep_variable_name(SweepVariable v) {
    switch (v) {
        case SweepVariable::n_bar_p: return "n_bar_p";
        case SweepVariable::eta: return "eta";
        case SweepVariable::q_load: return "q_load";
    }
    return "?";
}

namespace {

// Typed access to one section, remembering which keys were consumed.
class Section {
public:
    Section(const RawConfig& raw, std::string name) : name_(std::move(name)) {
        if (auto it = raw.find(name_); it != raw.end()) body_ = &it->second;
    }

    bool present() const { return body_ != nullptr; }
    bool has(const std::string& key) const { return body_ && body_->count(key); }
    std::string path(const std::string& key) const { return name_ + "." + key; }

    std::optional<std::string> text(const std::string& key) {
        used_.insert(key);
        if (!has(key)) return std::nullopt;
        return body_->at(key);
    }

    std::optional<double> number(const std::string& key, bool allow_inf = false) {
        const auto t = text(key);
        if (!t) return std::nullopt;
        return parse_number(key, *t, allow_inf);
    }

    double required(const std::string& key, const std::string& why) {
        const auto v = number(key);
        if (!v) throw ConfigError(path(key) + ": required " + why);
        return *v;
    }

    std::optional<std::uint64_t> unsigned_integer(const std::string& key) {
        const auto t = text(key);
        if (!t) return std::nullopt;
        std::uint64_t v = 0;
        const auto* end = t->data() + t->size();
        const auto [ptr, ec] = std::from_chars(t->data(), end, v);
        if (ec != std::errc{} || ptr != end) {
            throw ConfigError(path(key) + ": expected a non-negative integer, got '" + *t + "'");
        }
        return v;
    }

    std::vector<double> list(const std::string& key, std::vector<double> fallback) {
        const auto t = text(key);
        if (!t) return fallback;
        std::vector<double> out;
        std::stringstream ss(*t);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item), false));
        if (out.empty()) throw ConfigError(path(key) + ": empty list");
        return out;
    }

    // Unknown keys are errors so that typos do not silently fall back to defaults.
    void finish() const {
        if (!body_) return;
        for (const auto& [key, value] : *body_) {
            if (!used_.count(key)) throw ConfigError(path(key) + ": unknown key");
        }
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return {};
        return s.substr(b, s.find_last_not_of(" \t") - b + 1);
    }

    double parse_number(const std::string& key, const std::string& t, bool allow_inf) const {
        double v = 0.0;
        const auto* end = t.data() + t.size();
        const auto [ptr, ec] = std::from_chars(t.data(), end, v);
        if (ec != std::errc{} || ptr != end || std::isnan(v)) {
            throw ConfigError(path(key) + ": expected a number, got '" + t + "'");
        }
        if (std::isinf(v) && !allow_inf) throw ConfigError(path(key) + ": must be finite");
        return v;
    }

    std::string name_;
    const std::map<std::string, std::string>* body_ = nullptr;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void parse_interaction(Section& s, RunConfig& cfg) {
    const bool factors = s.has("spm") || s.has("xpm");
    const bool rates = s.has("spm_rate") || s.has("xpm_rate") || s.has("tau");
    require(!(factors && rates), "interaction: give either spm/xpm or spm_rate/xpm_rate/tau, not both");
    if (rates) {
        const double gs = s.required("spm_rate", "with rate form");
        const double gx = s.required("xpm_rate", "with rate form");
        const double tau = s.required("tau", "with rate form");
        require(tau > 0.0, s.path("tau") + ": must be > 0");
        cfg.interaction = InteractionParams::from_rates(gs, gx, tau);
    } else {
        cfg.interaction = InteractionParams::from_factors(s.required("spm", "(or rate form)"),
                                                          s.required("xpm", "(or rate form)"));
    }
}

void parse_resonator(Section& s, RunConfig& cfg) {
    ResonatorSpec spec;
    const std::string why = "in the resonator section";
    spec.q_load = s.required("q_load", why);
    spec.q_intr = s.number("q_intr", true).value_or(NAN);
    require(!std::isnan(spec.q_intr), s.path("q_intr") + ": required " + why);
    spec.wavelength = s.required("wavelength", why);
    spec.n0 = s.required("n0", why);
    spec.n2 = s.required("n2", why);
    spec.v_eff = s.required("v_eff", why);
    const auto extra = s.number("eta_extra");
    const auto total = s.number("eta_total");
    require(!(extra && total), "resonator: give eta_extra or eta_total, not both");
    try {
        spec.eta_extra = 1.0;
        spec.validate();
        if (extra) {
            spec.eta_extra = *extra;
        } else {
            spec.eta_extra = resonator::eta_extra_for_total(
                spec, total.value_or(resonator::kReferenceEtaTotal));
        }
        spec.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("resonator: ") + e.what());
    }
    cfg.resonator = spec;
}

void parse_oracle(Section& s, RunConfig& cfg) {
    validation::Options o;
    o.alphas = s.list("alphas", o.alphas);
    o.spm = s.list("spm", o.spm);
    o.xpm_ratio = s.number("xpm_ratio").value_or(o.xpm_ratio);
    o.n_s = s.list("n_s", o.n_s);
    o.zetas = s.list("zetas", o.zetas);
    o.grid_step = s.number("grid_step").value_or(o.grid_step);
    if (auto t = s.unsigned_integer("truncation")) o.truncation = *t;
    o.kernel_alpha = s.number("kernel_alpha").value_or(o.kernel_alpha);
    o.kernel_spm_alpha2 = s.number("kernel_spm_alpha2").value_or(o.kernel_spm_alpha2);
    o.kernel_xpm = s.number("kernel_xpm").value_or(o.kernel_xpm);
    o.kernel_zeta = s.number("kernel_zeta").value_or(o.kernel_zeta);
    if (auto n = s.unsigned_integer("kernel_n")) o.kernel_n = *n;
    if (auto f = s.text("inject_fault")) {
        if (*f == "none") {
            o.fault = validation::Fault::none;
        } else if (*f == "xpm_sign") {
            o.fault = validation::Fault::xpm_sign;
        } else {
            throw ConfigError(s.path("inject_fault") + ": expected none or xpm_sign, got '" + *f + "'");
        }
    }
    for (double a : o.alphas) require(a >= 0.0 && a * a <= 100.0, s.path("alphas") + ": need 0 <= alpha^2 <= 100");
    for (double n : o.n_s) require(n >= 0.0, s.path("n_s") + ": must be >= 0");
    // The shrinking-gap check runs at up to 10/3 of kernel_alpha.
    require(o.kernel_alpha > 0.0 && o.kernel_alpha <= 3.0,
            s.path("kernel_alpha") + ": need 0 < kernel_alpha <= 3 (alpha^2 <= 100 at 10/3 scale)");
    require(o.grid_step > 0.0 && o.grid_step <= 0.1, s.path("grid_step") + ": need 0 < grid_step <= 0.1");
    cfg.oracle = o;
}

void parse_sweep(Section& s, RunConfig& cfg) {
    SweepConfig sw;
    const auto var = s.text("variable");
    require(var.has_value(), s.path("variable") + ": required (n_bar_p, eta or q_load)");
    if (*var == "n_bar_p") {
        sw.variable = SweepVariable::n_bar_p;
    } else if (*var == "eta") {
        sw.variable = SweepVariable::eta;
    } else if (*var == "q_load") {
        sw.variable = SweepVariable::q_load;
    } else {
        throw ConfigError(s.path("variable") + ": expected n_bar_p, eta or q_load, got '" + *var + "'");
    }
    sw.min = s.required("min", "by the sweep");
    sw.max = s.required("max", "by the sweep");
    const auto points = s.unsigned_integer("points");
    require(points.has_value(), s.path("points") + ": required by the sweep");
    sw.points = static_cast<std::size_t>(*points);
    const std::string scale = s.text("scale").value_or("log");
    if (scale == "log") {
        sw.scale = SweepScale::log;
    } else if (scale == "linear") {
        sw.scale = SweepScale::linear;
    } else {
        throw ConfigError(s.path("scale") + ": expected log or linear, got '" + scale + "'");
    }
    require(sw.points >= 2, s.path("points") + ": degenerate range, need at least 2 points");
    require(sw.min < sw.max, "sweep: degenerate range, need min < max");
    require(sw.min > 0.0, s.path("min") + ": must be > 0");
    if (sw.variable == SweepVariable::eta) require(sw.max <= 1.0, s.path("max") + ": efficiency must be <= 1");
    cfg.sweep = sw;
}

}  // namespace

InteractionParams RunConfig::interaction_params() const {
    if (interaction) return *interaction;
    if (resonator) return resonator::kerr_rates(*resonator);
    throw ConfigError("interaction: no nonlinearity configured (need [interaction] or [resonator])");
}

double RunConfig::efficiency() const {
    if (resonator) return resonator::loading_efficiency(resonator->q_load, resonator->q_intr) * resonator->eta_extra;
    return eta.value_or(1.0);
}

RunConfig resolve(const RawConfig& raw) {
    static const std::set<std::string> known{"interaction", "probe", "detection", "prior", "resonator", "oracle",
                                             "sweep",       "posterior", "sample", "rng", "output"};
    for (const auto& [name, body] : raw) {
        if (!known.count(name)) throw ConfigError(name + ": unknown section");
    }

    RunConfig cfg;
    try {
        Section interaction(raw, "interaction");
        Section res(raw, "resonator");
        require(!(interaction.present() && res.present()),
                "interaction/resonator: exactly one section may supply the nonlinearity");
        if (interaction.present()) parse_interaction(interaction, cfg);
        if (res.present()) parse_resonator(res, cfg);
        interaction.finish();
        res.finish();

        Section probe(raw, "probe");
        const auto alpha = probe.number("alpha");
        const auto n_bar_p = probe.number("n_bar_p");
        require(!(alpha && n_bar_p), "probe: give alpha or n_bar_p, not both");
        if (alpha) {
            require(*alpha > 0.0, probe.path("alpha") + ": must be > 0");
            cfg.n_bar_p = *alpha * *alpha;
        }
        if (n_bar_p) {
            require(*n_bar_p > 0.0, probe.path("n_bar_p") + ": must be > 0");
            cfg.n_bar_p = *n_bar_p;
        }
        probe.finish();

        Section det(raw, "detection");
        cfg.eta = det.number("eta");
        if (cfg.eta) {
            require(*cfg.eta > 0.0 && *cfg.eta <= 1.0, det.path("eta") + ": must lie in (0, 1]");
            require(!cfg.resonator, det.path("eta") +
                                        ": the resonator supplies the efficiency; set resonator.eta_total "
                                        "or resonator.eta_extra instead");
        }
        if (const auto z = det.text("zeta"); z && *z != "auto") cfg.zeta = det.number("zeta");
        if (const auto l = det.text("likelihood")) {
            if (*l == "gaussian") {
                cfg.likelihood = bayes::Likelihood::gaussian;
            } else if (*l == "kernel") {
                cfg.likelihood = bayes::Likelihood::kernel;
            } else {
                throw ConfigError(det.path("likelihood") + ": expected gaussian or kernel, got '" + *l + "'");
            }
        }
        det.finish();

        Section prior(raw, "prior");
        cfg.n_bar_s = prior.number("n_bar_s");
        if (cfg.n_bar_s) require(*cfg.n_bar_s >= 0.0, prior.path("n_bar_s") + ": must be >= 0");
        if (auto w = prior.unsigned_integer("window_max")) cfg.window_max = static_cast<std::size_t>(*w);
        prior.finish();

        Section oracle(raw, "oracle");
        if (oracle.present()) parse_oracle(oracle, cfg);
        oracle.finish();

        Section sweep(raw, "sweep");
        if (sweep.present()) parse_sweep(sweep, cfg);
        sweep.finish();
        if (cfg.sweep && cfg.sweep->variable == SweepVariable::q_load) {
            require(cfg.resonator.has_value(), "sweep.variable: q_load sweeps need a [resonator] section");
            require(cfg.sweep->max <= cfg.resonator->q_intr, "sweep.max: q_load must stay <= resonator.q_intr");
        }

        Section post(raw, "posterior");
        cfg.posterior_x = post.text("x");
        if (cfg.posterior_x && *cfg.posterior_x != "sample" && *cfg.posterior_x != "mode") post.number("x");
        post.finish();

        Section sample(raw, "sample");
        if (auto c = sample.unsigned_integer("count")) cfg.sample_count = static_cast<std::size_t>(*c);
        cfg.credible_mass = sample.number("mass").value_or(cfg.credible_mass);
        require(cfg.credible_mass > 0.0 && cfg.credible_mass < 1.0, sample.path("mass") + ": must lie in (0, 1)");
        sample.finish();

        Section rng(raw, "rng");
        cfg.seed = rng.unsigned_integer("seed");
        rng.finish();

        Section out(raw, "output");
        cfg.output_path = out.text("path");
        if (const auto f = out.text("format")) {
            if (*f == "csv") {
                cfg.format = OutputFormat::csv;
            } else if (*f == "json") {
                cfg.format = OutputFormat::json;
            } else {
                throw ConfigError(out.path("format") + ": expected csv or json, got '" + *f + "'");
            }
        }
        out.finish();
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

}  // namespace qnd::cli
