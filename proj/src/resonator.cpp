#include "qnd/resonator.hpp"

#include "qnd/constants.hpp"
#include "qnd/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qnd {

double ResonatorSpec::omega0() const {
    return 2.0 * std::numbers::pi * constants::kSpeedOfLight / wavelength;
}

void ResonatorSpec::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || std::isnan(v)) {
            throw ValidationError(std::string("resonator ") + name + " must be > 0");
        }
    };
    auto finite_positive = [&](double v, const char* name) {
        positive(v, name);
        if (!std::isfinite(v)) throw ValidationError(std::string("resonator ") + name + " must be finite");
    };
    finite_positive(q_load, "q_load");
    positive(q_intr, "q_intr");
    finite_positive(wavelength, "wavelength");
    finite_positive(n0, "n0");
    finite_positive(n2, "n2");
    finite_positive(v_eff, "v_eff");
    if (!(eta_extra > 0.0 && eta_extra <= 1.0)) {
        throw ValidationError("resonator eta_extra must lie in (0, 1]");
    }
    if (q_load > q_intr) {
        throw ValidationError("q_load exceeds q_intr (" + std::to_string(q_load) + " > " +
                              std::to_string(q_intr) + ")");
    }
}

namespace resonator {

ResonatorSpec caf2_reference() {
    ResonatorSpec spec;
    spec.q_load = 1e9;
    spec.q_intr = 3e11;
    spec.wavelength = 1.55e-6;
    spec.n0 = 1.44;
    spec.n2 = 3.2e-20;
    spec.v_eff = 2e-15;
    spec.eta_extra = eta_extra_for_total(spec, kReferenceEtaTotal);
    return spec;
}

InteractionParams kerr_rates(const ResonatorSpec& spec) {
    spec.validate();
    const double hw = constants::kHbar * spec.omega0();
    const double xpm = 2.0 * spec.q_load * (spec.n2 / spec.n0) * hw * constants::kSpeedOfLight / spec.v_eff;
    return InteractionParams::from_factors(0.5 * xpm, xpm);
}

double loading_efficiency(double q_load, double q_intr) {
    if (!(q_load >= 0.0) || !(q_intr > 0.0)) {
        throw ValidationError("quality factors must be non-negative (q_intr > 0)");
    }
    if (q_load > q_intr) {
        throw ValidationError("q_load exceeds q_intr (" + std::to_string(q_load) + " > " +
                              std::to_string(q_intr) + ")");
    }
    return 1.0 - q_load / q_intr;
}

double eta_extra_for_total(const ResonatorSpec& spec, double eta_total) {
    const double eta_load = loading_efficiency(spec.q_load, spec.q_intr);
    if (!(eta_total > 0.0 && eta_total <= eta_load)) {
        throw ValidationError("eta_total must lie in (0, eta_load = " + std::to_string(eta_load) + "]");
    }
    return eta_total / eta_load;
}

double pump_power(const ResonatorSpec& spec, double n_bar_p) {
    spec.validate();
    if (!(n_bar_p >= 0.0)) throw ValidationError("probe photon number must be >= 0");
    const double w = spec.omega0();
    return constants::kHbar * w * w * n_bar_p / (2.0 * spec.q_load);
}

DesignReport design_report(const ResonatorSpec& spec, double n_bar_s) {
    spec.validate();
    DesignReport r;
    const InteractionParams params = kerr_rates(spec);
    r.spm = params.spm;
    r.xpm = params.xpm;
    r.eta_load = loading_efficiency(spec.q_load, spec.q_intr);
    r.eta_extra = spec.eta_extra;
    r.eta_total = r.eta_load * r.eta_extra;
    if (!(r.eta_total > 0.0)) {
        throw ValidationError("total efficiency is zero (q_load == q_intr)");
    }
    r.n_bar_s = n_bar_s;
    r.sql = analytic::sql(n_bar_s);
    try {
        const double n_p = analytic::optimal_probe_number(params.spm, r.eta_total);
        r.n_p_opt = n_p;
        r.dn2_min = analytic::minimum_error(params, r.eta_total);
        r.pump_power_w = pump_power(spec, n_p);
        r.sub_sql_margin = analytic::sub_sql_margin(params.xpm, n_p, n_bar_s);
    } catch (const UnboundedOptimumError&) {
        r.unbounded_optimum = true;
    }
    return r;
}

}  // namespace resonator
}  // namespace qnd
