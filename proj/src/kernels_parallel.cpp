#include "kernel_points.hpp"

#include "qnd/errors.hpp"

#include <omp.h>

#include <limits>

namespace qnd::kernels::parallel {

int max_threads() { return omp_get_max_threads(); }

std::vector<double> homodyne_density_grid(const FockVector& vec, std::span<const double> xs,
                                          double zeta) {
    std::vector<double> out(xs.size());
    const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel
    {
        std::vector<double> scratch(vec.dim());
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            out[k] = detail::homodyne_point(vec, xs[k], zeta, scratch);
        }
    }
    return out;
}

std::vector<double> likelihood_grid(std::span<const double> xs, std::size_t n_signal,
                                    const KrausParams& kp, bayes::Likelihood mode) {
    std::vector<double> out(xs.size());
    detail::LoopErrors errors;
    const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k] = bayes::likelihood(xs[k], n_signal, kp, mode);
        } catch (...) {
            errors.capture(k);
        }
    }
    errors.rethrow();
    return out;
}

GridMinimum minimize_error_grid(const InteractionParams& params, double eta, double n_s,
                                std::span<const double> zetas, std::span<const double> n_ps) {
    analytic::validate_efficiency(eta);
    if (zetas.empty() || n_ps.empty()) throw ValidationError("error grid needs at least one point per axis");
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = std::numeric_limits<std::size_t>::max();
    const auto rows = static_cast<std::ptrdiff_t>(n_ps.size());
#pragma omp parallel
    {
        double local = std::numeric_limits<double>::infinity();
        std::size_t local_index = std::numeric_limits<std::size_t>::max();
#pragma omp for schedule(static)
        for (std::ptrdiff_t jj = 0; jj < rows; ++jj) {
            const auto j = static_cast<std::size_t>(jj);
            for (std::size_t i = 0; i < zetas.size(); ++i) {
                const double v = error_surface_point(params, eta, n_s, zetas[i], n_ps[j]);
                const std::size_t index = j * zetas.size() + i;
                if (detail::better(v, index, local, local_index)) {
                    local = v;
                    local_index = index;
                }
            }
        }
#pragma omp critical(qnd_grid_min)
        if (detail::better(local, local_index, best, best_index)) {
            best = local;
            best_index = local_index;
        }
    }
    GridMinimum g;
    g.np_index = best_index / zetas.size();
    g.zeta_index = best_index % zetas.size();
    g.zeta = zetas[g.zeta_index];
    g.n_bar_p = n_ps[g.np_index];
    g.value = best;
    return g;
}

std::vector<MeasurementRecord> sample_batch(const PhotonDistribution& prior, const KrausParams& kp,
                                            std::uint64_t seed, std::size_t count,
                                            std::uint64_t first_index) {
    std::vector<MeasurementRecord> out(count);
    detail::LoopErrors errors;
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k] = bayes::sample_record(prior, kp, seed, first_index + k);
        } catch (...) {
            errors.capture(k);
        }
    }
    errors.rethrow();
    return out;
}

std::vector<RecordSummary> summarize_records(std::span<const MeasurementRecord> records,
                                             const PhotonDistribution& prior,
                                             const KrausParams& kp, double mass) {
    std::vector<RecordSummary> out(records.size());
    detail::LoopErrors errors;
    const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k] = detail::summarize_point(records[k], prior, kp, mass);
        } catch (...) {
            errors.capture(k);
        }
    }
    errors.rethrow();
    return out;
}

}  // namespace qnd::kernels::parallel
