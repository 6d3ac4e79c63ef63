#pragma once

// Photon-number inference from one homodyne outcome of the probe: the
// position-space Kraus kernel Omega(X, n) in the weak-nonlinearity regime,
// its Gaussian density, Poisson priors, Bayesian posteriors, and a seeded
// forward sampler of measurement records.

#include "qnd/fock.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qnd {

struct KrausParams {
    double alpha = 0.0;
    double spm = 0.0;
    double xpm = 0.0;
    double zeta = 0.0;

    // 1 - 2i Gamma_S alpha^2
    std::complex<double> kappa() const;
    // Gamma_S alpha^2 + Gamma_X n + zeta (asymptotic convention).
    double phase(double n) const;
};

class PhotonDistribution {
public:
    // `weights` over [support_min, support_min + weights.size()); they are
    // normalized here. `truncated_mass` records what was cut off upstream.
    PhotonDistribution(std::size_t support_min, std::vector<double> weights,
                       double truncated_mass = 0.0);

    static PhotonDistribution singleton(std::size_t n);

    std::size_t support_min() const { return support_min_; }
    std::size_t support_max() const { return support_min_ + pmf_.size() - 1; }
    std::size_t size() const { return pmf_.size(); }
    std::span<const double> pmf() const { return pmf_; }
    double probability(std::size_t n) const;
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    double truncated_mass() const { return truncated_mass_; }

private:
    std::size_t support_min_ = 0;
    std::vector<double> pmf_;
    double truncated_mass_ = 0.0;
    double mean_ = 0.0;
    double variance_ = 0.0;
};

struct Posterior {
    PhotonDistribution distribution;
    double evidence = 0.0;  // unconditional density of X
};

struct PosteriorStats {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
};

struct MeasurementRecord {
    std::size_t n_true = 0;
    double x = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

struct CredibleInterval {
    std::size_t lo = 1;
    std::size_t hi = 0;  // lo > hi means empty
    bool contains(std::size_t n) const { return lo <= n && n <= hi; }
};

namespace bayes {

enum class Likelihood {
    gaussian,  // closed-form Gaussian, robust for any alpha (default)
    kernel,    // |Omega(X, n)|^2 from the position-space kernel
};

std::complex<double> kraus_amplitude(double x, std::size_t n, const KrausParams& kp);

double kraus_mean(std::size_t n, const KrausParams& kp);
double kraus_variance(std::size_t n, const KrausParams& kp);
double kraus_density(double x, std::size_t n, const KrausParams& kp);

double likelihood(double x, std::size_t n, const KrausParams& kp, Likelihood mode);

// Default window [0, ceil(n_bar + 10 sqrt(n_bar) + 20)].
std::size_t default_window(double n_bar);
PhotonDistribution poisson_prior(double n_bar, std::optional<std::size_t> window_max = {});

Posterior posterior(double x, const PhotonDistribution& prior, const KrausParams& kp,
                    Likelihood mode = Likelihood::gaussian);

MeasurementRecord sample_record(const PhotonDistribution& prior, const KrausParams& kp,
                                std::uint64_t seed, std::uint64_t index = 0);

PosteriorStats posterior_stats(const PhotonDistribution& dist);

// Central interval on mid-p cumulative probabilities: n belongs to it when
// F(n-1) + p(n)/2 lies in [(1-mass)/2, (1+mass)/2].
CredibleInterval central_interval(const PhotonDistribution& dist, double mass = 0.68);

// Total-variation distance between two pmfs over the union of supports.
double total_variation(const PhotonDistribution& a, const PhotonDistribution& b);

}  // namespace bayes
}  // namespace qnd
