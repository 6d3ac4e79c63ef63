#include "qnd/analytic.hpp"

#include "qnd/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qnd {

namespace {

void require_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw ValidationError(std::string(what) + " must be finite");
    }
}

void require_coupling(const InteractionParams& params) {
    if (params.xpm == 0.0) {
        throw NoCouplingError("no coupling: Gamma_X is zero");
    }
}

double checked_cot(double phi) {
    const double s = std::sin(phi);
    if (std::abs(s) < analytic::kSingularSine) {
        throw SingularAngleError("zero transfer function: sin(phi) vanishes at phi = " +
                                 std::to_string(phi));
    }
    return std::cos(phi) / s;
}

}  // namespace

InteractionParams InteractionParams::from_factors(double spm, double xpm) {
    require_finite(spm, "Gamma_S");
    require_finite(xpm, "Gamma_X");
    InteractionParams p;
    p.spm = spm;
    p.xpm = xpm;
    return p;
}

InteractionParams InteractionParams::from_rates(double spm_rate, double xpm_rate, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw ValidationError("interaction time tau must be positive and finite");
    }
    require_finite(spm_rate, "gamma_s");
    require_finite(xpm_rate, "gamma_x");
    InteractionParams p = from_factors(spm_rate * tau, xpm_rate * tau);
    p.spm_rate = spm_rate;
    p.xpm_rate = xpm_rate;
    p.tau = tau;
    return p;
}

ProbePrep ProbePrep::from_mean_photons(double n_bar) {
    if (!(n_bar >= 0.0) || !std::isfinite(n_bar)) {
        throw ValidationError("mean probe photon number must be finite and >= 0");
    }
    return ProbePrep{std::sqrt(n_bar)};
}

double ProbePrep::phase_width() const { return 1.0 / (2.0 * alpha); }
double ProbePrep::number_width() const { return alpha; }

namespace analytic {

void validate_efficiency(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw ValidationError("efficiency eta must lie in (0, 1], got " + std::to_string(eta));
    }
}

double wrap_angle(double angle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(angle, two_pi);  // [-pi, pi]
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

SemiclassicalError semiclassical_error(double phase_width, double number_width,
                                       const InteractionParams& params) {
    if (!(phase_width > 0.0)) throw ValidationError("probe phase width must be > 0");
    if (!(number_width >= 0.0)) throw ValidationError("probe number width must be >= 0");
    require_coupling(params);
    const double spm_noise = params.spm * number_width;
    const double gx = std::abs(params.xpm);
    return {std::hypot(phase_width, spm_noise) / gx, phase_width / gx};
}

std::complex<double> coherent_phase_expectation(double alpha, double lambda) {
    // |alpha|^2 (e^{i lambda} - 1), with cos(lambda) - 1 = -2 sin^2(lambda/2)
    // to keep the real part accurate for small lambda.
    const double a2 = alpha * alpha;
    const double h = std::sin(0.5 * lambda);
    return std::exp(std::complex<double>(-2.0 * a2 * h * h, a2 * std::sin(lambda)));
}

MomentSet exact_quadrature_moments(const ProbePrep& probe, const InteractionParams& params,
                                   double zeta, double n_s) {
    if (!(probe.alpha >= 0.0)) throw ValidationError("probe amplitude must be >= 0");

    const double alpha = probe.alpha;
    const double a2 = alpha * alpha;
    const double g = params.spm;
    const double sh = std::sin(0.5 * g);
    const double sin_g = std::sin(g);
    const double cos_g = std::cos(g);

    // Stable forms of the exponents and phase offsets:
    //   cos(g) - 1                  = -2 sin^2(g/2)
    //   cos(2g) - 2 cos(g) + 1      = -4 sin^2(g/2) cos(g)
    //   sin(2g) - 2 sin(g)          = -4 sin(g) sin^2(g/2)
    const double log_e1 = -2.0 * a2 * sh * sh;
    const double log_e2 = -2.0 * a2 * sin_g * sin_g;
    const double log_ratio = -4.0 * a2 * sh * sh * cos_g;  // log(E2 / E1^2)

    MomentSet m;
    m.e1 = std::exp(log_e1);
    m.e2 = std::exp(log_e2);
    m.phi = a2 * sin_g + params.xpm * n_s + zeta;
    m.delta = -4.0 * a2 * sin_g * sh * sh + g;

    const double e1_sq = m.e1 * m.e1;
    const double one_minus_e1_sq = -std::expm1(2.0 * log_e1);
    const double half_delta = std::sin(0.5 * m.delta);
    // E2 cos(Delta) - E1^2 = E1^2 [expm1(r) cos(Delta) - 2 sin^2(Delta/2)]
    const double b_core =
        e1_sq * (std::expm1(log_ratio) * std::cos(m.delta) - 2.0 * half_delta * half_delta);

    m.a = 0.5 + a2 * one_minus_e1_sq;
    m.b = a2 * b_core;
    m.c = a2 * m.e2 * std::sin(m.delta);

    const double cos_phi = std::cos(m.phi);
    const double sin_phi = std::sin(m.phi);
    m.mean_x = std::numbers::sqrt2 * alpha * m.e1 * cos_phi;
    m.transfer = -std::numbers::sqrt2 * alpha * params.xpm * m.e1 * sin_phi;
    m.var_x = m.a + m.b * std::cos(2.0 * m.phi) - m.c * std::sin(2.0 * m.phi);
    m.mean_x2 = m.var_x + m.mean_x * m.mean_x;
    return m;
}

double exact_number_error(const MomentSet& moments, const ProbePrep& probe,
                          const InteractionParams& params) {
    require_coupling(params);
    if (probe.alpha == 0.0) {
        throw SingularAngleError("zero transfer function: vacuum probe");
    }
    const double cot = checked_cot(moments.phi);
    const double num = (moments.a + moments.b) * cot * cot - 2.0 * moments.c * cot +
                       moments.a - moments.b;
    const double den =
        2.0 * probe.alpha * probe.alpha * params.xpm * params.xpm * moments.e1 * moments.e1;
    return num / den;
}

double asymptotic_phase(const InteractionParams& params, double n_bar_p, double n_s,
                        double zeta) {
    return params.spm * n_bar_p + params.xpm * n_s + zeta;
}

double asymptotic_quadrature_variance(const InteractionParams& params, double n_bar_p,
                                      double phi) {
    const double k = params.spm * n_bar_p;
    const double s = std::sin(phi);
    return 0.5 - k * std::sin(2.0 * phi) + 2.0 * k * k * s * s;
}

double asymptotic_error_with_loss(const InteractionParams& params, double n_bar_p,
                                  double eta, double phi) {
    validate_efficiency(eta);
    require_coupling(params);
    if (!(n_bar_p > 0.0)) throw ValidationError("probe photon number must be > 0");
    const double cot = checked_cot(phi);
    const double k = params.spm * n_bar_p;
    const double offset = cot - 2.0 * eta * k;
    const double shot = (1.0 + offset * offset) / (4.0 * eta * n_bar_p);
    const double back_action = (1.0 - eta) * params.spm * k;
    return (shot + back_action) / (params.xpm * params.xpm);
}

double optimal_phase(const InteractionParams& params, double n_bar_p, double eta) {
    validate_efficiency(eta);
    const double cot = 2.0 * eta * params.spm * n_bar_p;
    if (!std::isfinite(cot)) throw ValidationError("Gamma_S n_p must be finite");
    // arccot on (0, pi): atan2(1, cot) keeps sin(phi) > 0 for either sign of cot.
    return std::atan2(1.0, cot);
}

double optimal_homodyne_angle(const InteractionParams& params, double n_bar_p,
                              double n_bar_s, double eta) {
    const double phi_bar = optimal_phase(params, n_bar_p, eta);
    return wrap_angle(phi_bar - params.spm * n_bar_p - params.xpm * n_bar_s);
}

double optimal_probe_number(double spm, double eta) {
    validate_efficiency(eta);
    if (spm < 0.0) throw ValidationError("Gamma_S must be > 0 for an optimal probe number");
    if (eta == 1.0 || spm == 0.0) {
        throw UnboundedOptimumError(
            "no optimum: error decreases monotonically in n_p (eta = 1 or Gamma_S = 0)");
    }
    return 1.0 / (2.0 * spm * std::sqrt(eta * (1.0 - eta)));
}

double minimum_error(const InteractionParams& params, double eta) {
    validate_efficiency(eta);
    require_coupling(params);
    if (eta == 1.0) {
        throw UnboundedOptimumError(
            "no SPM penalty at eta = 1: the minimum is approached only as n_p -> infinity");
    }
    return params.spm / (params.xpm * params.xpm) * std::sqrt((1.0 - eta) / eta);
}

EpsilonCorrection epsilon_correction(const InteractionParams& params, double n_bar_p,
                                     double eta, double dn) {
    validate_efficiency(eta);
    require_coupling(params);
    if (!(n_bar_p > 0.0)) throw ValidationError("probe photon number must be > 0");
    const double k = eta * params.spm * n_bar_p;
    EpsilonCorrection out;
    out.epsilon = (1.0 + 4.0 * k * k) * params.xpm * dn;
    const double shot = (1.0 + out.epsilon * out.epsilon) / (4.0 * eta * n_bar_p);
    const double back_action = (1.0 - eta) * params.spm * params.spm * n_bar_p;
    out.modified_dn2 = (shot + back_action) / (params.xpm * params.xpm);
    out.outside_asymptotic_regime = std::abs(params.xpm * dn) > 0.1;
    return out;
}

UncertaintyProduct uncertainty_product(const ProbePrep& probe, const InteractionParams& params) {
    require_coupling(params);
    if (!(probe.alpha > 0.0)) throw ValidationError("probe photon number must be > 0");
    const double gx = std::abs(params.xpm);
    UncertaintyProduct u;
    u.dn_meas = 1.0 / (2.0 * gx * probe.alpha);
    u.dphi_pert = gx * probe.alpha;
    u.product = u.dn_meas * u.dphi_pert;
    return u;
}

double sql(double n_bar) {
    if (!(n_bar >= 0.0)) throw ValidationError("mean photon number must be >= 0");
    return std::sqrt(n_bar);
}

double sub_sql_margin(double xpm, double n_bar_p, double n_bar_s) {
    if (!(n_bar_p >= 0.0) || !(n_bar_s >= 0.0)) {
        throw ValidationError("photon numbers must be >= 0");
    }
    return 2.0 * std::abs(xpm) * std::sqrt(n_bar_p * n_bar_s);
}

ErrorBudget error_budget(const ProbePrep& probe, const InteractionParams& params,
                         double n_bar_s, double eta, double dn) {
    const double n_p = probe.mean_photons();
    const EpsilonCorrection eps = epsilon_correction(params, n_p, eta, dn);
    ErrorBudget b;
    b.dn2_meas = eps.modified_dn2;
    b.dphi_pert = uncertainty_product(probe, params).dphi_pert;
    b.sql = sql(n_bar_s);
    b.sub_sql_margin = sub_sql_margin(params.xpm, n_p, n_bar_s);
    b.epsilon = eps.epsilon;
    return b;
}

}  // namespace analytic
}  // namespace qnd
