#include "qnd/fock.hpp"

#include "qnd/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qnd {

FockVector::FockVector(std::vector<Complex> amplitudes, double tail_mass)
    : amps_(std::move(amplitudes)), tail_mass_(tail_mass) {
    if (amps_.empty()) throw ValidationError("Fock vector needs dim >= 1");
}

FockVector FockVector::number_state(std::size_t n, std::size_t dim) {
    if (n >= dim) throw TruncationError("number state index beyond truncation");
    std::vector<Complex> amps(dim);
    amps[n] = 1.0;
    return FockVector(std::move(amps));
}

double FockVector::norm_squared() const {
    double s = 0.0;
    for (const auto& c : amps_) s += std::norm(c);
    return s;
}

double FockVector::mean_number() const {
    double s = 0.0;
    for (std::size_t m = 0; m < amps_.size(); ++m) s += static_cast<double>(m) * std::norm(amps_[m]);
    return s;
}

double FockVector::mean_number_squared() const {
    double s = 0.0;
    for (std::size_t m = 0; m < amps_.size(); ++m) {
        const double md = static_cast<double>(m);
        s += md * md * std::norm(amps_[m]);
    }
    return s;
}

std::vector<double> FockVector::probabilities() const {
    std::vector<double> p(amps_.size());
    std::transform(amps_.begin(), amps_.end(), p.begin(), [](const Complex& c) { return std::norm(c); });
    return p;
}

double JointState::norm_squared() const {
    double s = 0.0;
    for (std::size_t n = 0; n < signal_amplitudes.size(); ++n) {
        s += std::norm(signal_amplitudes[n]) * probe_branches[n].norm_squared();
    }
    return s;
}

namespace fock {

std::size_t default_truncation(double alpha) {
    return static_cast<std::size_t>(std::ceil(alpha * alpha + 10.0 * alpha + 20.0));
}

FockVector coherent_vector(double alpha, std::size_t dim) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ValidationError("coherent amplitude must be finite and >= 0");
    }
    const std::size_t needed = default_truncation(alpha);
    if (dim < needed) {
        throw TruncationError("truncation too small: dim " + std::to_string(dim) +
                              " < required " + std::to_string(needed) + " for alpha " +
                              std::to_string(alpha));
    }
    std::vector<Complex> amps(dim);
    if (alpha == 0.0) {
        amps[0] = 1.0;
        return FockVector(std::move(amps));
    }
    const double a2 = alpha * alpha;
    const double log_alpha = std::log(alpha);
    for (std::size_t m = 0; m < dim; ++m) {
        const double md = static_cast<double>(m);
        amps[m] = std::exp(-0.5 * a2 + md * log_alpha - 0.5 * std::lgamma(md + 1.0));
    }
    // P(N >= dim) for N ~ Poisson(alpha^2).
    const double tail = boost::math::gamma_p(static_cast<double>(dim), a2);
    if (tail > kMaxTailMass) {
        throw TruncationError("truncation too small: tail mass " + std::to_string(tail));
    }
    return FockVector(std::move(amps), tail);
}

FockVector coherent_vector(double alpha) { return coherent_vector(alpha, default_truncation(alpha)); }

FockVector kerr_phase_evolve(const FockVector& vec, double spm, double xpm, double n_partner) {
    std::vector<Complex> out(vec.amplitudes().begin(), vec.amplitudes().end());
    for (std::size_t m = 0; m < out.size(); ++m) {
        const double md = static_cast<double>(m);
        const double phase = 0.5 * spm * md * (md - 1.0) + xpm * n_partner * md;
        out[m] *= std::polar(1.0, phase);
    }
    return FockVector(std::move(out), vec.tail_mass());
}

void hermite_functions(double x, std::span<double> out) {
    if (out.empty()) return;
    constexpr double kRescale = 1e150;
    constexpr double kInvRescale = 1e-150;
    const double log_rescale = std::log(kRescale);

    double log_scale = -0.5 * x * x;
    double factor = std::exp(log_scale);
    double prev = 0.0;
    double cur = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
    out[0] = cur * factor;
    for (std::size_t m = 0; m + 1 < out.size(); ++m) {
        const double md = static_cast<double>(m);
        const double next =
            std::sqrt(2.0 / (md + 1.0)) * x * cur - std::sqrt(md / (md + 1.0)) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescale) {
            cur *= kInvRescale;
            prev *= kInvRescale;
            log_scale += log_rescale;
            factor = std::exp(log_scale);
        }
        out[m + 1] = cur * factor;
    }
}

std::vector<double> hermite_functions(double x, std::size_t count) {
    std::vector<double> out(count);
    hermite_functions(x, out);
    return out;
}

Complex quadrature_overlap(double x, std::size_t m, double zeta) {
    const auto psi = hermite_functions(x, m + 1);
    return std::polar(1.0, -static_cast<double>(m) * zeta) * psi[m];
}

Complex homodyne_amplitude(const FockVector& vec, double x, double zeta) {
    const auto psi = hermite_functions(x, vec.dim());
    Complex sum = 0.0;
    for (std::size_t m = 0; m < vec.dim(); ++m) {
        sum += vec[m] * std::polar(psi[m], static_cast<double>(m) * zeta);
    }
    return sum;
}

double homodyne_density(const FockVector& vec, double x, double zeta) {
    return std::norm(homodyne_amplitude(vec, x, zeta));
}

OracleMoments oracle_moments(const FockVector& vec, double zeta) {
    const auto c = vec.amplitudes();
    Complex a1 = 0.0;
    Complex a2 = 0.0;
    double n = 0.0;
    double norm = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
        const double md = static_cast<double>(m);
        norm += std::norm(c[m]);
        n += md * std::norm(c[m]);
        if (m >= 1) a1 += std::conj(c[m - 1]) * c[m] * std::sqrt(md);
        if (m >= 2) a2 += std::conj(c[m - 2]) * c[m] * std::sqrt(md * (md - 1.0));
    }
    a1 /= norm;
    a2 /= norm;
    n /= norm;
    OracleMoments out;
    out.mean_x = std::numbers::sqrt2 * (std::polar(1.0, zeta) * a1).real();
    out.mean_x2 = (std::polar(1.0, 2.0 * zeta) * a2).real() + n + 0.5;
    return out;
}

Complex number_phase_expectation(const FockVector& vec, double lambda) {
    Complex sum = 0.0;
    for (std::size_t m = 0; m < vec.dim(); ++m) {
        sum += std::norm(vec[m]) * std::polar(1.0, lambda * static_cast<double>(m));
    }
    return sum;
}

JointState build_joint_state(const FockVector& signal, double alpha,
                             const InteractionParams& params) {
    const FockVector probe = coherent_vector(alpha);
    JointState joint;
    joint.signal_amplitudes.resize(signal.dim());
    joint.probe_branches.reserve(signal.dim());
    for (std::size_t n = 0; n < signal.dim(); ++n) {
        const double nd = static_cast<double>(n);
        joint.signal_amplitudes[n] = signal[n] * std::polar(1.0, 0.5 * params.spm * nd * (nd - 1.0));
        joint.probe_branches.push_back(kerr_phase_evolve(probe, params.spm, params.xpm, nd));
    }
    return joint;
}

std::vector<double> branch_densities(const JointState& joint, double x, double zeta) {
    std::vector<double> out(joint.probe_branches.size());
    if (out.empty()) return out;
    const auto psi = hermite_functions(x, joint.probe_branches.front().dim());
    for (std::size_t n = 0; n < out.size(); ++n) {
        const auto& branch = joint.probe_branches[n];
        Complex amp = 0.0;
        for (std::size_t m = 0; m < branch.dim(); ++m) {
            amp += branch[m] * std::polar(psi[m], static_cast<double>(m) * zeta);
        }
        out[n] = std::norm(amp);
    }
    return out;
}

ConditionalState joint_conditional_state(const FockVector& signal, double alpha,
                                         const InteractionParams& params, double zeta,
                                         double x) {
    const JointState joint = build_joint_state(signal, alpha, params);
    const auto psi = hermite_functions(x, joint.probe_branches.front().dim());

    std::vector<Complex> post(signal.dim());
    double density = 0.0;
    for (std::size_t n = 0; n < signal.dim(); ++n) {
        const auto& branch = joint.probe_branches[n];
        Complex overlap = 0.0;
        for (std::size_t m = 0; m < branch.dim(); ++m) {
            overlap += branch[m] * std::polar(psi[m], static_cast<double>(m) * zeta);
        }
        post[n] = joint.signal_amplitudes[n] * overlap;
        density += std::norm(post[n]);
    }
    if (!(density >= 1e-300)) {
        throw ZeroProbabilityError("zero-probability outcome at X = " + std::to_string(x));
    }
    const double inv = 1.0 / std::sqrt(density);
    for (auto& c : post) c *= inv;
    return {FockVector(std::move(post), signal.tail_mass()), density};
}

std::vector<double> quadrature_grid(double alpha, double step) {
    if (!(step > 0.0)) throw ValidationError("grid step must be > 0");
    const double half_width = std::numbers::sqrt2 * alpha + 12.0;
    const auto k = static_cast<std::ptrdiff_t>(std::ceil(half_width / step));
    std::vector<double> grid(static_cast<std::size_t>(2 * k + 1));
    for (std::ptrdiff_t i = -k; i <= k; ++i) grid[static_cast<std::size_t>(i + k)] = static_cast<double>(i) * step;
    return grid;
}

double trapezoid(std::span<const double> values, double step) {
    if (values.size() < 2) return 0.0;
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
    return s * step;
}

}  // namespace fock
}  // namespace qnd
