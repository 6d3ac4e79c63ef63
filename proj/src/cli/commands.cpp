#include "commands.hpp"

#include "envelope.hpp"

#include "qnd/errors.hpp"
#include "qnd/kernels.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace qnd::cli {

using nlohmann::json;

namespace {

json stats_json(const PosteriorStats& s) {
    return {{"mean", s.mean}, {"variance", s.variance}, {"skewness", s.skewness}};
}

std::string likelihood_name(bayes::Likelihood l) {
    return l == bayes::Likelihood::kernel ? "kernel" : "gaussian";
}

template <class T>
const T& need(const std::optional<T>& v, const std::string& path, const std::string& command) {
    if (!v) throw ConfigError(path + ": required by " + command);
    return *v;
}

// Prior, kernel parameters and the resolved homodyne angle shared by
// `posterior` and `sample`.
struct Measurement {
    PhotonDistribution prior;
    KrausParams kp;
    bool zeta_auto = false;
};

Measurement measurement(const RunConfig& cfg, const std::string& command) {
    const double n_p = need(cfg.n_bar_p, "probe.n_bar_p", command);
    const double n_s = need(cfg.n_bar_s, "prior.n_bar_s", command);
    const InteractionParams params = cfg.interaction_params();
    KrausParams kp{std::sqrt(n_p), params.spm, params.xpm, 0.0};
    const bool automatic = !cfg.zeta.has_value();
    kp.zeta = automatic ? analytic::optimal_homodyne_angle(params, n_p, n_s, cfg.efficiency()) : *cfg.zeta;
    return {bayes::poisson_prior(n_s, cfg.window_max), kp, automatic};
}

std::vector<double> sweep_values(const SweepConfig& sw) {
    std::vector<double> v(sw.points);
    const double last = static_cast<double>(sw.points - 1);
    for (std::size_t i = 0; i < sw.points; ++i) {
        const double t = static_cast<double>(i) / last;
        v[i] = sw.scale == SweepScale::log ? std::exp(std::log(sw.min) + t * (std::log(sw.max) - std::log(sw.min)))
                                           : sw.min + t * (sw.max - sw.min);
    }
    v.front() = sw.min;
    v.back() = sw.max;
    return v;
}

struct CurvePoint {
    double value = 0.0;
    std::optional<double> n_bar_p;
    std::optional<double> eta;
    std::optional<double> dn2_at_optimal_angle;
    std::optional<double> dn2_min_formula;
    std::optional<double> sql_ratio;
};

CurvePoint curve_point(const RunConfig& cfg, double value) {
    const SweepConfig& sw = *cfg.sweep;
    CurvePoint pt;
    pt.value = value;
    InteractionParams params;
    double eta = 1.0;
    std::optional<double> n_p = cfg.n_bar_p;
    switch (sw.variable) {
        case SweepVariable::n_bar_p:
            params = cfg.interaction_params();
            eta = cfg.efficiency();
            n_p = value;
            break;
        case SweepVariable::eta:
            params = cfg.interaction_params();
            eta = value;
            break;
        case SweepVariable::q_load: {
            ResonatorSpec spec = *cfg.resonator;
            spec.q_load = value;
            params = resonator::kerr_rates(spec);
            eta = resonator::loading_efficiency(spec.q_load, spec.q_intr) * spec.eta_extra;
            break;
        }
    }
    pt.eta = eta;
    try {
        pt.dn2_min_formula = analytic::minimum_error(params, eta);
    } catch (const UnboundedOptimumError&) {
    }
    if (!n_p) {
        try {
            n_p = analytic::optimal_probe_number(params.spm, eta);
        } catch (const UnboundedOptimumError&) {
        }
    }
    if (n_p) {
        pt.n_bar_p = n_p;
        pt.dn2_at_optimal_angle =
            analytic::asymptotic_error_with_loss(params, *n_p, eta, analytic::optimal_phase(params, *n_p, eta));
        if (cfg.n_bar_s && *cfg.n_bar_s > 0.0) {
            pt.sql_ratio = std::sqrt(*pt.dn2_at_optimal_angle) / analytic::sql(*cfg.n_bar_s);
        }
    }
    return pt;
}

}  // namespace

OutputFormat default_format(const std::string& command) {
    return command == "estimate" || command == "sample" ? OutputFormat::json : OutputFormat::csv;
}

CommandOutput cmd_estimate(const Invocation& inv) {
    const RunConfig& cfg = inv.cfg;
    const ResonatorSpec& spec = need(cfg.resonator, "resonator", "estimate");
    const double n_s = cfg.n_bar_s.value_or(0.0);
    const DesignReport r = resonator::design_report(spec, n_s);

    std::optional<double> dn_min, phi, zeta;
    if (r.dn2_min) dn_min = std::sqrt(*r.dn2_min);
    if (r.n_p_opt) {
        const auto params = InteractionParams::from_factors(r.spm, r.xpm);
        phi = analytic::optimal_phase(params, *r.n_p_opt, r.eta_total);
        zeta = analytic::optimal_homodyne_angle(params, *r.n_p_opt, n_s, r.eta_total);
    }
    const std::vector<std::pair<std::string, std::optional<double>>> rows{
        {"gamma_s", r.spm},
        {"gamma_x", r.xpm},
        {"eta_load", r.eta_load},
        {"eta_extra", r.eta_extra},
        {"eta_total", r.eta_total},
        {"n_p_opt", r.n_p_opt},
        {"dn2_min", r.dn2_min},
        {"dn_min", dn_min},
        {"pump_power_w", r.pump_power_w},
        {"optimal_phase", phi},
        {"zeta", zeta},
        {"n_bar_s", r.n_bar_s},
        {"sql", r.sql},
        {"sub_sql_margin", r.n_p_opt ? std::optional<double>(r.sub_sql_margin) : std::nullopt},
    };

    CommandOutput out;
    if (inv.format == OutputFormat::csv) {
        out.primary = csv_row({"quantity", "value"});
        for (const auto& [k, v] : rows) out.primary += csv_row({k, csv_number(v)});
        out.primary += csv_row({"unbounded_optimum", r.unbounded_optimum ? "true" : "false"});
    } else {
        json payload = json::object();
        for (const auto& [k, v] : rows) payload[k] = json_number(v);
        payload["unbounded_optimum"] = r.unbounded_optimum;
        out.primary = dump_pretty(envelope(inv.command, inv.raw, inv.timestamp, std::move(payload)));
    }
    out.summary = r.unbounded_optimum ? "estimate: no finite optimum (eta_total = 1)"
                                      : "estimate: n_p_opt=" + csv_number(*r.n_p_opt) +
                                            " dn2_min=" + csv_number(*r.dn2_min);
    return out;
}

CommandOutput cmd_error_curve(const Invocation& inv) {
    const RunConfig& cfg = inv.cfg;
    const SweepConfig& sw = need(cfg.sweep, "sweep", "error-curve");
    if (sw.variable != SweepVariable::q_load && cfg.interaction_params().xpm == 0.0) {
        throw NoCouplingError("no coupling: Gamma_X is zero, the error is unbounded");
    }
    const auto values = sweep_values(sw);
    const auto points =
        kernels::parallel::map_indices(values.size(), [&](std::size_t i) { return curve_point(cfg, values[i]); });

    CommandOutput out;
    if (inv.format == OutputFormat::csv) {
        out.primary = csv_row({"sweep_var", "dn2_at_optimal_angle", "dn2_min_formula", "sql_ratio"});
        for (const auto& p : points) {
            out.primary += csv_row({csv_number(p.value), csv_number(p.dn2_at_optimal_angle),
                                    csv_number(p.dn2_min_formula), csv_number(p.sql_ratio)});
        }
    } else {
        json rows = json::array();
        for (const auto& p : points) {
            rows.push_back({{"sweep_var", p.value},
                            {"n_bar_p", json_number(p.n_bar_p)},
                            {"eta", json_number(p.eta)},
                            {"dn2_at_optimal_angle", json_number(p.dn2_at_optimal_angle)},
                            {"dn2_min_formula", json_number(p.dn2_min_formula)},
                            {"sql_ratio", json_number(p.sql_ratio)}});
        }
        json payload{{"variable", sweep_variable_name(sw.variable)}, {"rows", std::move(rows)}};
        out.primary = dump_pretty(envelope(inv.command, inv.raw, inv.timestamp, std::move(payload)));
    }
    out.summary = "error-curve: " + std::to_string(points.size()) + " points over " + sweep_variable_name(sw.variable);
    return out;
}

CommandOutput cmd_posterior(const Invocation& inv) {
    const RunConfig& cfg = inv.cfg;
    const Measurement m = measurement(cfg, "posterior");
    const std::string source = cfg.posterior_x.value_or("mode");

    double x = 0.0;
    json record = nullptr;
    if (source == "mode") {
        x = bayes::kraus_mean(static_cast<std::size_t>(std::llround(*cfg.n_bar_s)), m.kp);
    } else if (source == "sample") {
        const std::uint64_t seed = need(cfg.seed, "rng.seed", "posterior x = sample");
        const MeasurementRecord rec = bayes::sample_record(m.prior, m.kp, seed, 0);
        x = rec.x;
        record = {{"n_true", rec.n_true}, {"x", rec.x}, {"seed", rec.seed}, {"index", rec.index}};
    } else {
        // resolve() has already checked that this parses in full.
        std::from_chars(source.data(), source.data() + source.size(), x);
    }

    const Posterior post = [&] {
        try {
            return bayes::posterior(x, m.prior, m.kp, cfg.likelihood);
        } catch (const SingularAngleError& e) {
            throw SingularAngleError(std::string(e.what()) +
                                     "; move detection.zeta away from the amplitude quadrature or set "
                                     "detection.likelihood = gaussian");
        }
    }();
    const PosteriorStats ps = bayes::posterior_stats(m.prior);
    const PosteriorStats qs = bayes::posterior_stats(post.distribution);
    const CredibleInterval ci = bayes::central_interval(post.distribution, cfg.credible_mass);

    json payload{
        {"x", x},
        {"x_source", source == "mode" || source == "sample" ? source : "value"},
        {"record", record},
        {"alpha", m.kp.alpha},
        {"gamma_s", m.kp.spm},
        {"gamma_x", m.kp.xpm},
        {"zeta", m.kp.zeta},
        {"zeta_source", m.zeta_auto ? "auto" : "config"},
        {"likelihood", likelihood_name(cfg.likelihood)},
        {"support", {m.prior.support_min(), m.prior.support_max()}},
        {"prior_truncated_mass", m.prior.truncated_mass()},
        {"prior_stats", stats_json(ps)},
        {"posterior_stats", stats_json(qs)},
        {"variance_ratio", ps.variance > 0.0 ? json(qs.variance / ps.variance) : json(nullptr)},
        {"evidence", post.evidence},
        {"credible_interval", {{"mass", cfg.credible_mass}, {"lo", ci.lo}, {"hi", ci.hi}}},
    };

    CommandOutput out;
    std::string csv = csv_row({"n", "prior", "posterior"});
    for (std::size_t n = m.prior.support_min(); n <= m.prior.support_max(); ++n) {
        csv += csv_row({std::to_string(n), csv_number(m.prior.probability(n)),
                        csv_number(post.distribution.probability(n))});
    }
    if (inv.format == OutputFormat::csv) {
        out.primary = std::move(csv);
        out.sidecar = dump_pretty(envelope(inv.command, inv.raw, inv.timestamp, payload));
    } else {
        json dist = json::array();
        for (std::size_t n = m.prior.support_min(); n <= m.prior.support_max(); ++n) {
            dist.push_back({{"n", n}, {"prior", m.prior.probability(n)}, {"posterior", post.distribution.probability(n)}});
        }
        payload["distribution"] = std::move(dist);
        out.primary = dump_pretty(envelope(inv.command, inv.raw, inv.timestamp, std::move(payload)));
    }
    out.summary = "posterior: x=" + csv_number(x) + " mean=" + csv_number(qs.mean) +
                  " variance_ratio=" + (ps.variance > 0.0 ? csv_number(qs.variance / ps.variance) : "n/a") +
                  " skewness=" + csv_number(qs.skewness);
    return out;
}

CommandOutput cmd_validate(const Invocation& inv) {
    const validation::Options& opt = need(inv.cfg.oracle, "oracle", "validate");
    const auto checks = validation::run(opt);
    const bool ok = validation::all_passed(checks);
    std::size_t passed = 0;
    for (const auto& c : checks) passed += c.passed ? 1 : 0;

    CommandOutput out;
    if (inv.format == OutputFormat::csv) {
        out.primary = csv_row({"check", "measured", "tolerance", "passed", "detail"});
        for (const auto& c : checks) {
            out.primary += csv_row({c.name, csv_number(c.measured), csv_number(c.tolerance),
                                    c.passed ? "true" : "false", csv_text(c.detail)});
        }
    } else {
        json rows = json::array();
        for (const auto& c : checks) {
            rows.push_back({{"name", c.name},
                            {"measured", json_number(c.measured)},
                            {"tolerance", c.tolerance},
                            {"passed", c.passed},
                            {"detail", c.detail}});
        }
        json payload{{"checks", std::move(rows)}, {"all_passed", ok}};
        out.primary = dump_pretty(envelope(inv.command, inv.raw, inv.timestamp, std::move(payload)));
    }
    out.summary = "validate: " + std::to_string(passed) + "/" + std::to_string(checks.size()) + " checks passed";
    out.exit_code = ok ? kExitOk : kExitValidation;
    return out;
}

CommandOutput cmd_sample(const Invocation& inv) {
    const RunConfig& cfg = inv.cfg;
    const std::uint64_t seed = need(cfg.seed, "rng.seed", "sample");
    const std::size_t count = need(cfg.sample_count, "sample.count", "sample");
    const Measurement m = measurement(cfg, "sample");

    const auto records = kernels::parallel::sample_batch(m.prior, m.kp, seed, count);
    const auto summaries = kernels::parallel::summarize_records(records, m.prior, m.kp, cfg.credible_mass);
    std::size_t covered = 0;
    for (const auto& s : summaries) covered += s.covered ? 1 : 0;
    const double coverage = count ? static_cast<double>(covered) / static_cast<double>(count) : 0.0;

    CommandOutput out;
    if (inv.format == OutputFormat::csv) {
        out.primary = csv_row({"index", "n_true", "x", "posterior_mean", "posterior_variance", "covered"});
        for (std::size_t i = 0; i < count; ++i) {
            out.primary += csv_row({std::to_string(records[i].index), std::to_string(records[i].n_true),
                                    csv_number(records[i].x), csv_number(summaries[i].posterior_mean),
                                    csv_number(summaries[i].posterior_variance),
                                    summaries[i].covered ? "true" : "false"});
        }
    } else {
        json header = envelope(inv.command, inv.raw, inv.timestamp,
                               {{"count", count},
                                {"seed", seed},
                                {"alpha", m.kp.alpha},
                                {"zeta", m.kp.zeta},
                                {"zeta_source", m.zeta_auto ? "auto" : "config"},
                                {"likelihood", "gaussian"},
                                {"mass", cfg.credible_mass}});
        header["type"] = "header";
        out.primary = dump_line(header);
        for (std::size_t i = 0; i < count; ++i) {
            out.primary += dump_line({{"type", "record"},
                                      {"index", records[i].index},
                                      {"seed", records[i].seed},
                                      {"n_true", records[i].n_true},
                                      {"x", records[i].x},
                                      {"posterior_mean", summaries[i].posterior_mean},
                                      {"posterior_variance", summaries[i].posterior_variance},
                                      {"covered", summaries[i].covered}});
        }
        if (count > 0) {
            out.primary += dump_line({{"type", "summary"},
                                      {"count", count},
                                      {"covered", covered},
                                      {"coverage", coverage},
                                      {"mass", cfg.credible_mass}});
        }
    }
    out.summary = "sample: " + std::to_string(count) + " records, coverage " + csv_number(coverage);
    return out;
}

CommandOutput dispatch(const Invocation& inv) {
    if (inv.command == "estimate") return cmd_estimate(inv);
    if (inv.command == "error-curve") return cmd_error_curve(inv);
    if (inv.command == "posterior") return cmd_posterior(inv);
    if (inv.command == "validate") return cmd_validate(inv);
    if (inv.command == "sample") return cmd_sample(inv);
    throw ConfigError("unknown command '" + inv.command + "'");
}

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Photon-number QND measurement via Kerr cross-phase modulation: sensitivity, "
                 "inference and resonator design",
                 "qnd"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::optional<std::string> config_path, out_path, format_flag, timestamp_flag;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    bool quiet = false;
    std::optional<std::string> x_flag;
    std::optional<std::size_t> count_flag;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "INI configuration file");
        sub->add_option("--set", overrides, "override, section.key=value (repeatable)");
        sub->add_option("--out", out_path, "output file (default: stdout)");
        sub->add_option("--seed", seed, "RNG seed; overrides rng.seed");
        sub->add_option("--format", format_flag, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--timestamp", timestamp_flag,
                        "envelope timestamp: 'now' or a literal (default: SOURCE_DATE_EPOCH or the epoch)");
        sub->add_flag("--quiet", quiet, "no summary line on stderr");
    };
    common(app.add_subcommand("estimate", "resonator design report"));
    common(app.add_subcommand("error-curve", "sweep the lossy error over n_bar_p, eta or q_load"));
    auto* posterior = app.add_subcommand("posterior", "prior and posterior photon-number distributions");
    common(posterior);
    posterior->add_option("--x", x_flag, "homodyne outcome: a number, 'sample' or 'mode'");
    common(app.add_subcommand("validate", "oracle-versus-closed-form checks"));
    auto* sample = app.add_subcommand("sample", "seeded Monte Carlo records with posterior summaries");
    common(sample);
    sample->add_option("--count", count_flag, "number of records; overrides sample.count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    Invocation inv;
    inv.command = app.get_subcommands().front()->get_name();
    try {
        if (config_path) inv.raw = load_ini(*config_path);
        for (const auto& o : overrides) apply_override(inv.raw, o);
        if (seed) inv.raw["rng"]["seed"] = std::to_string(*seed);
        if (x_flag) inv.raw["posterior"]["x"] = *x_flag;
        if (count_flag) inv.raw["sample"]["count"] = std::to_string(*count_flag);
        inv.cfg = resolve(inv.raw);
        if (format_flag) {
            inv.format = *format_flag == "csv" ? OutputFormat::csv : OutputFormat::json;
        } else {
            inv.format = inv.cfg.format.value_or(default_format(inv.command));
        }
        inv.timestamp = resolve_timestamp(timestamp_flag);
        if (!out_path) out_path = inv.cfg.output_path;

        const CommandOutput result = dispatch(inv);
        if (out_path && *out_path != "-") {
            write_file(*out_path, result.primary);
            if (result.sidecar) write_file(*out_path + ".json", *result.sidecar);
        } else {
            out << result.primary;
        }
        if (!quiet) err << result.summary << '\n';
        return result.exit_code;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace qnd::cli
