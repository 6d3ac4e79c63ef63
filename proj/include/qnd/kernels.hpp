#pragma once

// Data-parallel loops over grids and record batches. Every kernel exists
// twice with the same signature: `serial` is the reference implementation,
// `parallel` splits the outer loop with OpenMP. Both evaluate each point with
// the same per-point code, so results are bit-identical and independent of
// the thread count and schedule.

#include "qnd/analytic.hpp"
#include "qnd/bayes.hpp"
#include "qnd/fock.hpp"

#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <span>
#include <vector>

namespace qnd::kernels {

namespace detail {

// Keeps the exception thrown at the lowest loop index so that the error a
// parallel loop reports does not depend on the schedule. Exceptions must not
// leave an OpenMP region.
class LoopErrors {
public:
    // Call from inside a catch block.
    void capture(std::size_t index) noexcept {
#pragma omp critical(qnd_loop_errors)
        if (index < index_) {
            index_ = index;
            error_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::exception_ptr error_;
    std::size_t index_ = std::numeric_limits<std::size_t>::max();
};

}  // namespace detail

struct GridMinimum {
    std::size_t zeta_index = 0;
    std::size_t np_index = 0;
    double zeta = 0.0;
    double n_bar_p = 0.0;
    double value = 0.0;
};

struct RecordSummary {
    double posterior_mean = 0.0;
    double posterior_variance = 0.0;
    bool covered = false;  // n_true inside the central credible interval
};

// One point of the lossy error surface; +inf where sin(phi) vanishes.
double error_surface_point(const InteractionParams& params, double eta, double n_s,
                           double zeta, double n_bar_p);

namespace serial {

std::vector<double> homodyne_density_grid(const FockVector& vec, std::span<const double> xs,
                                          double zeta);

std::vector<double> likelihood_grid(std::span<const double> xs, std::size_t n,
                                    const KrausParams& kp, bayes::Likelihood mode);

// Lowest value of the lossy asymptotic error over zetas x n_ps at signal n_s.
// Ties resolve to the lowest (np_index, zeta_index).
GridMinimum minimize_error_grid(const InteractionParams& params, double eta, double n_s,
                                std::span<const double> zetas, std::span<const double> n_ps);

// Records with index first_index .. first_index + count - 1.
std::vector<MeasurementRecord> sample_batch(const PhotonDistribution& prior, const KrausParams& kp,
                                            std::uint64_t seed, std::size_t count,
                                            std::uint64_t first_index = 0);

std::vector<RecordSummary> summarize_records(std::span<const MeasurementRecord> records,
                                             const PhotonDistribution& prior,
                                             const KrausParams& kp, double mass = 0.68);

template <class F>
auto map_indices(std::size_t count, F&& fn) {
    using R = decltype(fn(std::size_t{0}));
    std::vector<R> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
    return out;
}

}  // namespace serial

namespace parallel {

std::vector<double> homodyne_density_grid(const FockVector& vec, std::span<const double> xs,
                                          double zeta);

std::vector<double> likelihood_grid(std::span<const double> xs, std::size_t n,
                                    const KrausParams& kp, bayes::Likelihood mode);

GridMinimum minimize_error_grid(const InteractionParams& params, double eta, double n_s,
                                std::span<const double> zetas, std::span<const double> n_ps);

std::vector<MeasurementRecord> sample_batch(const PhotonDistribution& prior, const KrausParams& kp,
                                            std::uint64_t seed, std::size_t count,
                                            std::uint64_t first_index = 0);

std::vector<RecordSummary> summarize_records(std::span<const MeasurementRecord> records,
                                             const PhotonDistribution& prior,
                                             const KrausParams& kp, double mass = 0.68);

// Results land at their index regardless of completion order. R must be
// default-constructible. An exception from fn is rethrown after the loop
// (the one at the lowest index).
template <class F>
auto map_indices(std::size_t count, F&& fn) {
    using R = decltype(fn(std::size_t{0}));
    std::vector<R> out(count);
    detail::LoopErrors errors;
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k] = fn(k);
        } catch (...) {
            errors.capture(k);
        }
    }
    errors.rethrow();
    return out;
}

int max_threads();

}  // namespace parallel
}  // namespace qnd::kernels
