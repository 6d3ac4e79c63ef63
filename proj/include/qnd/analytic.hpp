#pragma once

// Closed-form sensitivity of a Kerr cross-phase-modulation photon-number
// meter: semiclassical error budget, exact homodyne moments for a coherent
// probe, the asymptotic (weak nonlinearity, strong probe) error with
// detection loss, and the optimal homodyne angle / probe number.
//
// Conventions: all quantities are dimensionless unless noted, angles in
// radians. The quadrature is X_zeta = (a e^{i zeta} + a^dag e^{-i zeta})/sqrt(2),
// vacuum variance 1/2. Photon numbers are doubles so sweeps can be dense.

#include <complex>
#include <optional>

namespace qnd {

// Nonlinear phase factors. `spm` and `xpm` are Gamma_S = gamma_s*tau and
// Gamma_X = gamma_x*tau; the rates are kept when the factors were built from
// them. The two factors are independent here; only the resonator layer ties
// them together.
struct InteractionParams {
    double spm = 0.0;
    double xpm = 0.0;
    std::optional<double> spm_rate;  // rad/s
    std::optional<double> xpm_rate;  // rad/s
    std::optional<double> tau;       // s

    static InteractionParams from_factors(double spm, double xpm);
    static InteractionParams from_rates(double spm_rate, double xpm_rate, double tau);
};

// Coherent probe with real amplitude alpha.
struct ProbePrep {
    double alpha = 0.0;

    static ProbePrep from_mean_photons(double n_bar);

    double mean_photons() const { return alpha * alpha; }
    double phase_width() const;   // 1 / (2 sqrt(n_bar))
    double number_width() const;  // sqrt(n_bar)
};

struct DetectionChain {
    double eta = 1.0;   // unified quantum efficiency, (0, 1]
    double zeta = 0.0;  // homodyne angle
};

// Exact first two moments of X_zeta for |alpha>_p (x) |n_s>_s after the
// Kerr interaction. `phi` uses the exact phase alpha^2 sin(Gamma_S) + ...,
// never the asymptotic Gamma_S alpha^2.
struct MomentSet {
    double e1 = 1.0;
    double e2 = 1.0;
    double phi = 0.0;
    double delta = 0.0;
    double a = 0.5;
    double b = 0.0;
    double c = 0.0;
    double mean_x = 0.0;
    double mean_x2 = 0.5;
    double var_x = 0.5;
    double transfer = 0.0;  // d<X>/dn_s
};

struct SemiclassicalError {
    double phase_readout = 0.0;    // plain phase detection, SPM noise included
    double optimal_readout = 0.0;  // phi_p - Gamma_S n_p readout, SPM evaded
};

struct EpsilonCorrection {
    double epsilon = 0.0;
    double modified_dn2 = 0.0;
    // Gamma_X |n_s - n_bar_s| > 0.1: the linearization behind epsilon is no
    // longer trustworthy.
    bool outside_asymptotic_regime = false;
};

struct UncertaintyProduct {
    double dn_meas = 0.0;
    double dphi_pert = 0.0;
    double product = 0.0;
};

struct ErrorBudget {
    double dn2_meas = 0.0;
    double dphi_pert = 0.0;
    double sql = 0.0;
    double sub_sql_margin = 0.0;
    double epsilon = 0.0;
};

namespace analytic {

// |sin(phi)| below this is treated as a vanishing transfer function.
inline constexpr double kSingularSine = 1e-12;

void validate_efficiency(double eta);

SemiclassicalError semiclassical_error(double phase_width, double number_width,
                                       const InteractionParams& params);

// <alpha| e^{i lambda n} |alpha> = exp[|alpha|^2 (e^{i lambda} - 1)].
std::complex<double> coherent_phase_expectation(double alpha, double lambda);

MomentSet exact_quadrature_moments(const ProbePrep& probe, const InteractionParams& params,
                                   double zeta, double n_s);

// (Delta n_s)^2 = var_X / G^2 from the exact moments.
double exact_number_error(const MomentSet& moments, const ProbePrep& probe,
                          const InteractionParams& params);

// Asymptotic-regime phase phi = Gamma_S n_p + Gamma_X n_s + zeta.
double asymptotic_phase(const InteractionParams& params, double n_bar_p, double n_s,
                        double zeta);

// (Delta X)^2 = 1/2 - Gamma_S n_p sin 2phi + 2 Gamma_S^2 n_p^2 sin^2 phi.
double asymptotic_quadrature_variance(const InteractionParams& params, double n_bar_p,
                                      double phi);

// Lossy asymptotic imprecision at phase phi.
double asymptotic_error_with_loss(const InteractionParams& params, double n_bar_p,
                                  double eta, double phi);

// phi_bar in (0, pi) with cot(phi_bar) = 2 eta Gamma_S n_p.
double optimal_phase(const InteractionParams& params, double n_bar_p, double eta);

// Homodyne angle realizing optimal_phase at the expected signal n_bar_s,
// reduced to (-pi, pi].
double optimal_homodyne_angle(const InteractionParams& params, double n_bar_p,
                              double n_bar_s, double eta);

double optimal_probe_number(double spm, double eta);

double minimum_error(const InteractionParams& params, double eta);

EpsilonCorrection epsilon_correction(const InteractionParams& params, double n_bar_p,
                                     double eta, double dn);

UncertaintyProduct uncertainty_product(const ProbePrep& probe, const InteractionParams& params);

double sql(double n_bar);
double sub_sql_margin(double xpm, double n_bar_p, double n_bar_s);

// Everything above at one working point, with the angle set optimally for
// n_bar_s and the signal deviating by `dn` from it.
ErrorBudget error_budget(const ProbePrep& probe, const InteractionParams& params,
                         double n_bar_s, double eta, double dn = 0.0);

// Reduce an angle to (-pi, pi].
double wrap_angle(double angle);

}  // namespace analytic
}  // namespace qnd
