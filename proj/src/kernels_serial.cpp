#include "kernel_points.hpp"

#include "qnd/errors.hpp"

#include <limits>

namespace qnd::kernels {

double error_surface_point(const InteractionParams& params, double eta, double n_s, double zeta,
                           double n_bar_p) {
    const double phi = analytic::asymptotic_phase(params, n_bar_p, n_s, zeta);
    if (std::abs(std::sin(phi)) < analytic::kSingularSine) return std::numeric_limits<double>::infinity();
    return analytic::asymptotic_error_with_loss(params, n_bar_p, eta, phi);
}

namespace serial {

std::vector<double> homodyne_density_grid(const FockVector& vec, std::span<const double> xs,
                                          double zeta) {
    std::vector<double> out(xs.size());
    std::vector<double> scratch(vec.dim());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = detail::homodyne_point(vec, xs[i], zeta, scratch);
    return out;
}

std::vector<double> likelihood_grid(std::span<const double> xs, std::size_t n,
                                    const KrausParams& kp, bayes::Likelihood mode) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = bayes::likelihood(xs[i], n, kp, mode);
    return out;
}

GridMinimum minimize_error_grid(const InteractionParams& params, double eta, double n_s,
                                std::span<const double> zetas, std::span<const double> n_ps) {
    analytic::validate_efficiency(eta);
    if (zetas.empty() || n_ps.empty()) throw ValidationError("error grid needs at least one point per axis");
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = std::numeric_limits<std::size_t>::max();
    for (std::size_t j = 0; j < n_ps.size(); ++j) {
        for (std::size_t i = 0; i < zetas.size(); ++i) {
            const double v = error_surface_point(params, eta, n_s, zetas[i], n_ps[j]);
            const std::size_t index = j * zetas.size() + i;
            if (detail::better(v, index, best, best_index)) {
                best = v;
                best_index = index;
            }
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
    for (std::size_t i = 0; i < count; ++i) out[i] = bayes::sample_record(prior, kp, seed, first_index + i);
    return out;
}

std::vector<RecordSummary> summarize_records(std::span<const MeasurementRecord> records,
                                             const PhotonDistribution& prior,
                                             const KrausParams& kp, double mass) {
    std::vector<RecordSummary> out(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = detail::summarize_point(records[i], prior, kp, mass);
    return out;
}

}  // namespace serial
}  // namespace qnd::kernels
