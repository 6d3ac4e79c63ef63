#pragma once

// Brute-force ground truth in a truncated Fock space: coherent probes,
// diagonal Kerr evolution, homodyne projection through oscillator
// eigenfunctions, and the signal state conditioned on a homodyne outcome.
// Meant for desk-scale amplitudes (alpha^2 <= 100); the analytic module
// covers the large-alpha regime.

#include "qnd/analytic.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qnd {

using Complex = std::complex<double>;

class FockVector {
public:
    FockVector() = default;

    // Takes the amplitudes as-is; `tail_mass` is the probability estimated
    // to lie beyond the truncation.
    explicit FockVector(std::vector<Complex> amplitudes, double tail_mass = 0.0);

    static FockVector number_state(std::size_t n, std::size_t dim);

    std::size_t dim() const { return amps_.size(); }
    std::span<const Complex> amplitudes() const { return amps_; }
    const Complex& operator[](std::size_t m) const { return amps_[m]; }
    double tail_mass() const { return tail_mass_; }

    double norm_squared() const;
    double mean_number() const;
    double mean_number_squared() const;
    std::vector<double> probabilities() const;

private:
    std::vector<Complex> amps_;
    double tail_mass_ = 0.0;
};

// The signal amplitudes and, for each signal index n, the probe state that
// is entangled with |n>_s after the interaction.
struct JointState {
    std::vector<Complex> signal_amplitudes;
    std::vector<FockVector> probe_branches;

    double norm_squared() const;
};

struct OracleMoments {
    double mean_x = 0.0;
    double mean_x2 = 0.0;
    double var() const { return mean_x2 - mean_x * mean_x; }
};

struct ConditionalState {
    FockVector signal_post;
    double density = 0.0;  // marginal W(X)
};

namespace fock {

inline constexpr double kMaxTailMass = 1e-10;

// ceil(alpha^2 + 10 alpha + 20).
std::size_t default_truncation(double alpha);

// Throws TruncationError when dim is below default_truncation(alpha).
FockVector coherent_vector(double alpha, std::size_t dim);
FockVector coherent_vector(double alpha);

// c_m <- c_m exp[i (Gamma_S m(m-1)/2 + Gamma_X n_partner m)].
FockVector kerr_phase_evolve(const FockVector& vec, double spm, double xpm, double n_partner);

// psi_m(X) for m = 0 .. count-1, normalized oscillator eigenfunctions
// (vacuum variance 1/2). Carried with a running scale so that large |X| or
// large m neither overflow nor lose the tail to underflow prematurely.
void hermite_functions(double x, std::span<double> out);
std::vector<double> hermite_functions(double x, std::size_t count);

// <m|X, zeta> = e^{-i m zeta} psi_m(X).
Complex quadrature_overlap(double x, std::size_t m, double zeta);

// <X, zeta|psi> = sum_m c_m e^{i m zeta} psi_m(X).
Complex homodyne_amplitude(const FockVector& vec, double x, double zeta);
double homodyne_density(const FockVector& vec, double x, double zeta);

// Ladder contractions; no position grid involved.
OracleMoments oracle_moments(const FockVector& vec, double zeta);

// sum_m |c_m|^2 e^{i lambda m}.
Complex number_phase_expectation(const FockVector& vec, double lambda);

JointState build_joint_state(const FockVector& signal, double alpha,
                             const InteractionParams& params);

// Per-branch densities |<X, zeta|probe_n>|^2 for every signal index n.
std::vector<double> branch_densities(const JointState& joint, double x, double zeta);

ConditionalState joint_conditional_state(const FockVector& signal, double alpha,
                                         const InteractionParams& params, double zeta,
                                         double x);

// Symmetric grid [-(sqrt(2) alpha + 12), +(sqrt(2) alpha + 12)] with the given step.
std::vector<double> quadrature_grid(double alpha, double step = 1e-3);

// Trapezoidal rule on a uniform grid.
double trapezoid(std::span<const double> values, double step);

}  // namespace fock
}  // namespace qnd
