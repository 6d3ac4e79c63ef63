#include "qnd/validation.hpp"

#include "qnd/analytic.hpp"
#include "qnd/bayes.hpp"
#include "qnd/errors.hpp"
#include "qnd/fock.hpp"
#include "qnd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qnd::validation {

namespace {

Check make(std::string name, double measured, double tolerance, std::string detail = {}) {
    Check c;
    c.name = std::move(name);
    c.measured = measured;
    c.tolerance = tolerance;
    c.passed = std::isfinite(measured) && measured <= tolerance;
    c.detail = std::move(detail);
    return c;
}

Check failed(std::string name, const std::string& why) {
    Check c;
    c.name = std::move(name);
    c.measured = std::numeric_limits<double>::quiet_NaN();
    c.passed = false;
    c.detail = why;
    return c;
}

FockVector coherent(double alpha, const Options& opt) {
    return opt.truncation == 0 ? fock::coherent_vector(alpha) : fock::coherent_vector(alpha, opt.truncation);
}

double relative(double got, double want) {
    const double scale = std::abs(want);
    return scale > 0.0 ? std::abs(got - want) / scale : std::abs(got - want);
}

double sup_gap(std::span<const double> a, std::span<const double> b) {
    double g = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
    return g;
}

struct KernelGaps {
    double kernel_vs_oracle = 0.0;
    double gaussian_vs_oracle = 0.0;
    double kernel_vs_gaussian = 0.0;
};

KernelGaps kernel_gaps(double alpha, double spm, double xpm, std::size_t n, double zeta,
                       const Options& opt) {
    const double step = opt.grid_step;
    const auto grid = fock::quadrature_grid(alpha, step);
    const FockVector probe = fock::kerr_phase_evolve(coherent(alpha, opt), spm, xpm,
                                                     static_cast<double>(n));
    const auto oracle = kernels::parallel::homodyne_density_grid(probe, grid, zeta);
    const KrausParams kp{alpha, spm, xpm, zeta};
    const auto kernel = kernels::parallel::likelihood_grid(grid, n, kp, bayes::Likelihood::kernel);
    const auto gauss = kernels::parallel::likelihood_grid(grid, n, kp, bayes::Likelihood::gaussian);
    return {sup_gap(kernel, oracle), sup_gap(gauss, oracle), sup_gap(kernel, gauss)};
}

}  // namespace

Check moments_equivalence(const Options& opt) {
    double worst = 0.0;
    std::string where;
    for (double alpha : opt.alphas) {
        const FockVector probe = coherent(alpha, opt);
        for (double gs : opt.spm) {
            const double gx = opt.xpm_ratio * gs;
            InteractionParams closed = InteractionParams::from_factors(gs, gx);
            if (opt.fault == Fault::xpm_sign) closed.xpm = -closed.xpm;
            for (double ns : opt.n_s) {
                const FockVector evolved = fock::kerr_phase_evolve(probe, gs, gx, ns);
                for (double zeta : opt.zetas) {
                    const OracleMoments o = fock::oracle_moments(evolved, zeta);
                    const MomentSet m =
                        analytic::exact_quadrature_moments(ProbePrep{alpha}, closed, zeta, ns);
                    const double dev = std::max(relative(o.mean_x, m.mean_x), relative(o.mean_x2, m.mean_x2));
                    if (where.empty() || dev > worst) {
                        worst = dev;
                        std::ostringstream s;
                        s << "alpha=" << alpha << " Gamma_S=" << gs << " n_s=" << ns << " zeta=" << zeta;
                        where = s.str();
                    }
                }
            }
        }
    }
    return make("moments_equivalence", worst, 1e-8, "worst at " + where);
}

std::vector<Check> run(const Options& opt) {
    std::vector<Check> checks;
    auto guarded = [&](const char* name, auto&& body) {
        try {
            body();
        } catch (const Error& e) {
            checks.push_back(failed(name, e.what()));
        }
    };

    guarded("moments_equivalence", [&] { checks.push_back(moments_equivalence(opt)); });

    guarded("lemma_phase_expectation", [&] {
        // <alpha|e^{i lambda n}|alpha> by series vs exp[|alpha|^2 (e^{i lambda} - 1)].
        const Complex series = fock::number_phase_expectation(coherent(2.0, opt), 0.3);
        const Complex closed = analytic::coherent_phase_expectation(2.0, 0.3);
        std::ostringstream s;
        s.precision(17);
        s << "series=" << series.real() << (series.imag() < 0 ? "" : "+") << series.imag() << "i";
        checks.push_back(make("lemma_phase_expectation", std::abs(series - closed), 1e-12, s.str()));
    });

    const double ka = opt.kernel_alpha;
    const double kspm = opt.kernel_spm_alpha2 / (ka * ka);
    guarded("homodyne_normalization", [&] {
        const auto grid = fock::quadrature_grid(ka, opt.grid_step);
        const FockVector probe = fock::kerr_phase_evolve(coherent(ka, opt), kspm, opt.kernel_xpm,
                                                         static_cast<double>(opt.kernel_n));
        const auto dens = kernels::parallel::homodyne_density_grid(probe, grid, opt.kernel_zeta);
        checks.push_back(make("homodyne_normalization",
                              std::abs(fock::trapezoid(dens, opt.grid_step) - 1.0), 1e-8));
    });
    guarded("kernel_normalization", [&] {
        const auto grid = fock::quadrature_grid(ka, opt.grid_step);
        const KrausParams kp{ka, kspm, opt.kernel_xpm, opt.kernel_zeta};
        double worst = 0.0;
        for (std::size_t n = 0; n <= 10; ++n) {
            const auto dens = kernels::parallel::likelihood_grid(grid, n, kp, bayes::Likelihood::kernel);
            worst = std::max(worst, std::abs(fock::trapezoid(dens, opt.grid_step) - 1.0));
        }
        checks.push_back(make("kernel_normalization", worst, 1e-6, "n = 0..10"));
    });
    guarded("kernel_sup_gap", [&] {
        const KernelGaps g = kernel_gaps(ka, kspm, opt.kernel_xpm, opt.kernel_n, opt.kernel_zeta, opt);
        const double worst = std::max({g.kernel_vs_oracle, g.gaussian_vs_oracle, g.kernel_vs_gaussian});
        std::ostringstream s;
        s << "kernel-oracle=" << g.kernel_vs_oracle << " gaussian-oracle=" << g.gaussian_vs_oracle
          << " kernel-gaussian=" << g.kernel_vs_gaussian;
        checks.push_back(make("kernel_sup_gap", worst, 2e-2, s.str()));
    });
    guarded("kernel_gap_shrinks", [&] {
        // Gap at alpha, 5/3 alpha, 10/3 alpha with Gamma_S alpha^2 fixed must shrink.
        std::vector<double> gaps;
        for (double scale : {1.0, 5.0 / 3.0, 10.0 / 3.0}) {
            const double a = ka * scale;
            gaps.push_back(kernel_gaps(a, opt.kernel_spm_alpha2 / (a * a), opt.kernel_xpm, opt.kernel_n,
                                       opt.kernel_zeta, opt)
                               .kernel_vs_oracle);
        }
        const bool shrinking = gaps[1] < gaps[0] && gaps[2] < gaps[1];
        std::ostringstream s;
        s << "gaps=" << gaps[0] << "," << gaps[1] << "," << gaps[2];
        checks.push_back(make("kernel_gap_shrinks", shrinking ? gaps[2] / gaps[0] : 1.0, 1.0 - 1e-12, s.str()));
    });
    guarded("uncertainty_product", [&] {
        double worst = 0.0;
        for (double n_p : {1.0, 2.5, 1e2, 3.92e6, 1e9}) {
            for (double gx : {8.5e-7, 1e-3, 0.04}) {
                const UncertaintyProduct u = analytic::uncertainty_product(
                    ProbePrep::from_mean_photons(n_p), InteractionParams::from_factors(0.0, gx));
                worst = std::max(worst, std::abs(u.product - 0.5));
            }
        }
        checks.push_back(make("uncertainty_product", worst, 4.0 * std::numeric_limits<double>::epsilon()));
    });
    guarded("posterior_oracle_tv", [&] {
        // Bayesian posterior vs photon-number pmf of the oracle's conditional state.
        const double alpha_s = 2.0;
        const KrausParams kp{ka, kspm, 2.0 * kspm, 0.7};
        const FockVector signal = coherent(alpha_s, opt);
        const PhotonDistribution prior = bayes::poisson_prior(alpha_s * alpha_s, signal.dim() - 1);
        const double x = bayes::kraus_mean(4, kp);
        const Posterior post = bayes::posterior(x, prior, kp);
        const ConditionalState cond = fock::joint_conditional_state(
            signal, ka, InteractionParams::from_factors(kp.spm, kp.xpm), kp.zeta, x);
        const PhotonDistribution oracle(0, cond.signal_post.probabilities());
        double norm_dev = 0.0;
        for (double p : post.distribution.pmf()) norm_dev += p;
        checks.push_back(make("posterior_normalization", std::abs(norm_dev - 1.0), 1e-12));
        checks.push_back(make("posterior_oracle_tv", bayes::total_variation(post.distribution, oracle), 2e-2));
    });
    return checks;
}

bool all_passed(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

}  // namespace qnd::validation
