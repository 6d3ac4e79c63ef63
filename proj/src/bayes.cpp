#include "qnd/bayes.hpp"

#include "qnd/errors.hpp"
#include "qnd/rng.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cassert>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace qnd {

std::complex<double> KrausParams::kappa() const { return {1.0, -2.0 * spm * alpha * alpha}; }

double KrausParams::phase(double n) const { return spm * alpha * alpha + xpm * n + zeta; }

PhotonDistribution::PhotonDistribution(std::size_t support_min, std::vector<double> weights,
                                       double truncated_mass)
    : support_min_(support_min), pmf_(std::move(weights)), truncated_mass_(truncated_mass) {
    if (pmf_.empty()) throw ValidationError("photon distribution needs a non-empty support");
    double total = 0.0;
    for (double w : pmf_) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ValidationError("photon distribution weights must be finite and >= 0");
        }
        total += w;
    }
    if (!(total > 0.0)) throw ValidationError("photon distribution has zero total weight");
    for (double& w : pmf_) w /= total;

    double mean = 0.0;
    for (std::size_t i = 0; i < pmf_.size(); ++i) mean += static_cast<double>(support_min_ + i) * pmf_[i];
    double var = 0.0;
    for (std::size_t i = 0; i < pmf_.size(); ++i) {
        const double d = static_cast<double>(support_min_ + i) - mean;
        var += d * d * pmf_[i];
    }
    mean_ = mean;
    variance_ = var;
}

PhotonDistribution PhotonDistribution::singleton(std::size_t n) { return PhotonDistribution(n, {1.0}); }

double PhotonDistribution::probability(std::size_t n) const {
    if (n < support_min_ || n > support_max()) return 0.0;
    return pmf_[n - support_min_];
}

namespace bayes {

std::complex<double> kraus_amplitude(double x, std::size_t n, const KrausParams& kp) {
    using namespace std::complex_literals;
    const double phi = kp.phase(static_cast<double>(n));
    const double s = std::sin(phi);
    if (std::abs(s) < analytic::kSingularSine) {
        throw SingularAngleError("kernel singular at this angle: sin(phi) vanishes for n = " +
                                 std::to_string(n));
    }
    const double cot = std::cos(phi) / s;
    const std::complex<double> kappa = kp.kappa();
    const std::complex<double> den = kappa + 1i * cot;
    const std::complex<double> prefactor =
        1.0 / std::sqrt(std::sqrt(std::numbers::pi) * den * std::abs(s));
    const std::complex<double> exponent =
        (-(1.0 + 1i * kappa * cot) * 0.5 * x * x +
         std::numbers::sqrt2 * 1i * kp.alpha * kappa / s * x -
         1i * kp.alpha * kp.alpha * kappa * cot) /
        den;
    return prefactor * std::exp(exponent);
}

double kraus_mean(std::size_t n, const KrausParams& kp) {
    return std::numbers::sqrt2 * kp.alpha * std::cos(kp.phase(static_cast<double>(n)));
}

double kraus_variance(std::size_t n, const KrausParams& kp) {
    const double phi = kp.phase(static_cast<double>(n));
    const double k = kp.spm * kp.alpha * kp.alpha;
    const double s = std::sin(phi);
    const double var = 0.5 - k * std::sin(2.0 * phi) + 2.0 * k * k * s * s;
    // (sqrt(2) k sin(phi) - cos(phi)/sqrt(2))^2 + sin^2(phi)/2 > 0 for real inputs.
    assert(var > 0.0);
    return var;
}

double kraus_density(double x, std::size_t n, const KrausParams& kp) {
    const double var = kraus_variance(n, kp);
    const double d = x - kraus_mean(n, kp);
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

double likelihood(double x, std::size_t n, const KrausParams& kp, Likelihood mode) {
    if (mode == Likelihood::kernel) return std::norm(kraus_amplitude(x, n, kp));
    return kraus_density(x, n, kp);
}

namespace {

double log_likelihood(double x, std::size_t n, const KrausParams& kp, Likelihood mode) {
    if (mode == Likelihood::kernel) return std::log(std::norm(kraus_amplitude(x, n, kp)));
    const double var = kraus_variance(n, kp);
    const double d = x - kraus_mean(n, kp);
    return -0.5 * d * d / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
}

}  // namespace

std::size_t default_window(double n_bar) {
    return static_cast<std::size_t>(std::ceil(n_bar + 10.0 * std::sqrt(n_bar) + 20.0));
}

PhotonDistribution poisson_prior(double n_bar, std::optional<std::size_t> window_max) {
    if (!(n_bar >= 0.0) || !std::isfinite(n_bar)) {
        throw ValidationError("prior mean photon number must be finite and >= 0");
    }
    const std::size_t top = window_max.value_or(default_window(n_bar));
    std::vector<double> w(top + 1, 0.0);
    if (n_bar == 0.0) {
        w[0] = 1.0;
        return PhotonDistribution(0, std::move(w));
    }
    const double log_mean = std::log(n_bar);
    for (std::size_t n = 0; n <= top; ++n) {
        const double nd = static_cast<double>(n);
        w[n] = std::exp(-n_bar + nd * log_mean - std::lgamma(nd + 1.0));
    }
    // P(N > top)
    const double cut = boost::math::gamma_p(static_cast<double>(top) + 1.0, n_bar);
    return PhotonDistribution(0, std::move(w), cut);
}

Posterior posterior(double x, const PhotonDistribution& prior, const KrausParams& kp,
                    Likelihood mode) {
    if (!std::isfinite(x)) throw ValidationError("homodyne outcome must be finite");
    const auto pmf = prior.pmf();
    std::vector<double> logw(pmf.size(), -std::numeric_limits<double>::infinity());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        if (pmf[i] <= 0.0) continue;
        logw[i] = log_likelihood(x, prior.support_min() + i, kp, mode) + std::log(pmf[i]);
        best = std::max(best, logw[i]);
    }
    if (!(best >= std::log(DBL_MIN))) {
        throw ZeroProbabilityError("outcome outside model support: likelihood vanishes for X = " +
                                   std::to_string(x));
    }
    std::vector<double> w(pmf.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(logw[i] - best);
        sum += w[i];
    }
    const double evidence = std::exp(best) * sum;
    return {PhotonDistribution(prior.support_min(), std::move(w), prior.truncated_mass()), evidence};
}

MeasurementRecord sample_record(const PhotonDistribution& prior, const KrausParams& kp,
                                std::uint64_t seed, std::uint64_t index) {
    const auto u = Philox4x32(seed).uniforms(index);
    const auto pmf = prior.pmf();
    std::size_t pick = pmf.size() - 1;
    double cdf = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        cdf += pmf[i];
        if (u[0] <= cdf) {
            pick = i;
            break;
        }
    }
    MeasurementRecord rec;
    rec.n_true = prior.support_min() + pick;
    rec.x = kraus_mean(rec.n_true, kp) + std::sqrt(kraus_variance(rec.n_true, kp)) * standard_normal(u[1]);
    rec.seed = seed;
    rec.index = index;
    return rec;
}

PosteriorStats posterior_stats(const PhotonDistribution& dist) {
    PosteriorStats s;
    s.mean = dist.mean();
    s.variance = dist.variance();
    if (s.variance > 0.0) {
        double m3 = 0.0;
        const auto pmf = dist.pmf();
        for (std::size_t i = 0; i < pmf.size(); ++i) {
            const double d = static_cast<double>(dist.support_min() + i) - s.mean;
            m3 += d * d * d * pmf[i];
        }
        s.skewness = m3 / std::pow(s.variance, 1.5);
    }
    return s;
}

CredibleInterval central_interval(const PhotonDistribution& dist, double mass) {
    if (!(mass > 0.0 && mass < 1.0)) throw ValidationError("credible mass must lie in (0, 1)");
    const double lower = 0.5 * (1.0 - mass);
    const double upper = 0.5 * (1.0 + mass);
    CredibleInterval ci;
    bool found = false;
    double below = 0.0;
    const auto pmf = dist.pmf();
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        const double mid = below + 0.5 * pmf[i];
        below += pmf[i];
        if (mid < lower || mid > upper) continue;
        const std::size_t n = dist.support_min() + i;
        if (!found) {
            ci.lo = n;
            found = true;
        }
        ci.hi = n;
    }
    return ci;
}

double total_variation(const PhotonDistribution& a, const PhotonDistribution& b) {
    const std::size_t lo = std::min(a.support_min(), b.support_min());
    const std::size_t hi = std::max(a.support_max(), b.support_max());
    double tv = 0.0;
    for (std::size_t n = lo; n <= hi; ++n) tv += std::abs(a.probability(n) - b.probability(n));
    return 0.5 * tv;
}

}  // namespace bayes
}  // namespace qnd
