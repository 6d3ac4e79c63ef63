#pragma once

// Per-point bodies shared by the serial and parallel kernels.

#include "qnd/bayes.hpp"
#include "qnd/kernels.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace qnd::kernels::detail {

inline double homodyne_point(const FockVector& vec, double x, double zeta, std::span<double> scratch) {
    fock::hermite_functions(x, scratch);
    Complex sum = 0.0;
    for (std::size_t m = 0; m < vec.dim(); ++m) {
        sum += vec[m] * std::polar(scratch[m], static_cast<double>(m) * zeta);
    }
    return std::norm(sum);
}

inline RecordSummary summarize_point(const MeasurementRecord& rec, const PhotonDistribution& prior,
                                     const KrausParams& kp, double mass) {
    const Posterior post = bayes::posterior(rec.x, prior, kp);
    RecordSummary s;
    s.posterior_mean = post.distribution.mean();
    s.posterior_variance = post.distribution.variance();
    s.covered = bayes::central_interval(post.distribution, mass).contains(rec.n_true);
    return s;
}

// Strictly better: lower value, ties to the lower linear index.
inline bool better(double value, std::size_t index, double best_value, std::size_t best_index) {
    return value < best_value || (value == best_value && index < best_index);
}

}  // namespace qnd::kernels::detail
