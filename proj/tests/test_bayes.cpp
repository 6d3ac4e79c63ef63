#include "doctest.h"

#include "qnd/bayes.hpp"
#include "qnd/errors.hpp"
#include "qnd/fock.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace qnd;
using qnd::testing::rel_err;

namespace {

constexpr double kPi = std::numbers::pi;

// Poisson pmf by term recurrence in long double.
std::vector<long double> poisson_ld(double mean, std::size_t top) {
    std::vector<long double> p(top + 1);
    p[0] = std::exp(-static_cast<long double>(mean));
    for (std::size_t n = 1; n <= top; ++n) p[n] = p[n - 1] * mean / static_cast<long double>(n);
    return p;
}

// Gaussian likelihood written out directly from the asymptotic mean and variance.
long double gaussian_ld(double x, std::size_t n, const KrausParams& kp) {
    const long double k = static_cast<long double>(kp.spm) * kp.alpha * kp.alpha;
    const long double phi = k + static_cast<long double>(kp.xpm) * n + kp.zeta;
    const long double mean = std::sqrt(2.0L) * kp.alpha * std::cos(phi);
    const long double var = 0.5L - k * std::sin(2 * phi) + 2 * k * k * std::sin(phi) * std::sin(phi);
    const long double d = x - mean;
    return std::exp(-0.5L * d * d / var) / std::sqrt(2 * std::numbers::pi_v<long double> * var);
}

}  // namespace

TEST_CASE("photon distribution") {
    const PhotonDistribution d(2, {1.0, 3.0});
    CHECK(d.support_max() == 3u);
    CHECK(d.probability(2) == 0.25);
    CHECK(d.probability(3) == 0.75);
    CHECK(d.probability(4) == 0.0);
    CHECK(d.mean() == 2.75);
    CHECK(d.variance() == doctest::Approx(0.1875).epsilon(1e-15));
    CHECK_THROWS_AS(PhotonDistribution(0, {}), ValidationError);
    CHECK_THROWS_AS(PhotonDistribution(0, {0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(PhotonDistribution(0, {1.0, -1.0}), ValidationError);
    const auto s = PhotonDistribution::singleton(7);
    CHECK(s.mean() == 7.0);
    CHECK(s.variance() == 0.0);
}

TEST_CASE("Poisson prior") {
    const auto p = bayes::poisson_prior(4.0);
    CHECK(p.support_max() == bayes::default_window(4.0));
    CHECK(bayes::default_window(4.0) == 44u);
    CHECK(std::abs(p.probability(4) - 0.19536681481316459) < 1e-15);
    CHECK(p.truncated_mass() < 1e-15);
    const auto cut = bayes::poisson_prior(4.0, 4);
    CHECK(std::abs(cut.truncated_mass() - (1.0 - 0.62883693517987)) < 1e-12);
    CHECK(bayes::poisson_prior(0.0).probability(0) == 1.0);
    CHECK_THROWS_AS(bayes::poisson_prior(-1.0), ValidationError);
}

TEST_CASE("kernel density matches the Gaussian") {
    qnd::testing::Gen gen(21);
    for (int i = 0; i < 200; ++i) {
        const KrausParams kp{gen.uniform(0.5, 30.0), 0.0, gen.uniform(0.0, 0.2), gen.uniform(-kPi, kPi)};
        KrausParams with_spm = kp;
        with_spm.spm = gen.uniform(-0.3, 0.3) / (kp.alpha * kp.alpha);
        const std::size_t n = static_cast<std::size_t>(gen.integer(0, 40));
        if (std::abs(std::sin(with_spm.phase(static_cast<double>(n)))) < 1e-3) continue;
        const double x = bayes::kraus_mean(n, with_spm) + gen.uniform(-2.0, 2.0);
        const double g = bayes::kraus_density(x, n, with_spm);
        CHECK(std::abs(bayes::likelihood(x, n, with_spm, bayes::Likelihood::kernel) - g) <= 1e-10 * (1.0 + g));
        CHECK(rel_err(g, static_cast<double>(gaussian_ld(x, n, with_spm))) < 1e-11);
    }
}

TEST_CASE("kernel normalization on a grid") {
    const KrausParams kp{3.0, 0.1 / 9.0, 0.04, 0.0};
    const double lim = std::numbers::sqrt2 * 3.0 + 12.0;
    for (std::size_t n = 0; n <= 10; ++n) {
        const double mass = qnd::testing::integrate(
            [&](double x) { return bayes::likelihood(x, n, kp, bayes::Likelihood::kernel); }, -lim, lim, 1e-3);
        CHECK(std::abs(mass - 1.0) < 1e-6);
    }
}

TEST_CASE("kernel is singular at sin(phi) = 0") {
    KrausParams kp{2.0, 0.0, 0.1, 0.0};
    CHECK_THROWS_AS(bayes::kraus_amplitude(0.0, 0, kp), SingularAngleError);
    // The Gaussian path stays finite: amplitude quadrature is measurable, just useless.
    CHECK(std::isfinite(bayes::kraus_density(0.0, 0, kp)));
}

TEST_CASE("posterior equals direct Bayes rule") {
    const KrausParams kp{5.0, 0.004, 0.05, 0.9};
    const auto prior = bayes::poisson_prior(9.0);
    const auto pois = poisson_ld(9.0, prior.support_max());
    for (double x : {-4.0, 0.3, 2.2, 6.0}) {
        const auto post = bayes::posterior(x, prior, kp);
        long double z = 0.0L;
        for (std::size_t n = 0; n <= prior.support_max(); ++n) z += pois[n] * gaussian_ld(x, n, kp);
        double total = 0.0;
        for (std::size_t n = 0; n <= prior.support_max(); ++n) {
            const double want = static_cast<double>(pois[n] * gaussian_ld(x, n, kp) / z);
            CHECK(std::abs(post.distribution.probability(n) - want) < 1e-12);
            total += post.distribution.probability(n);
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
        CHECK(rel_err(post.evidence, static_cast<double>(z)) < 1e-9);
    }
}

TEST_CASE("posterior in the far tail survives via log-sum-exp") {
    const KrausParams kp{5.0, 0.004, 0.05, 0.9};
    const auto prior = bayes::poisson_prior(9.0);
    // Every likelihood is below 1e-60 here; the normalized ratios are still fine.
    const auto post = bayes::posterior(std::numbers::sqrt2 * kp.alpha + 12.0, prior, kp);
    CHECK(post.evidence < 1e-60);
    CHECK(std::isfinite(post.distribution.mean()));
    double total = 0.0;
    for (double p : post.distribution.pmf()) total += p;
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK_THROWS_AS(bayes::posterior(1e6, prior, kp), ZeroProbabilityError);
    CHECK_THROWS_AS(bayes::posterior(NAN, prior, kp), ValidationError);
}

TEST_CASE("singleton prior is a fixed point") {
    const KrausParams kp{4.0, 0.005, 0.06, 0.3};
    const auto post = bayes::posterior(1.7, PhotonDistribution::singleton(12), kp);
    CHECK(post.distribution.probability(12) == 1.0);
}

TEST_CASE("posterior agrees with the Fock oracle at desk scale") {
    const double alpha = 3.0;
    const KrausParams kp{alpha, 0.1 / 9.0, 0.2 / 9.0, 0.7};
    const auto signal = fock::coherent_vector(2.0);
    const auto prior = bayes::poisson_prior(4.0, signal.dim() - 1);
    for (std::size_t n_true : {2u, 4u, 7u}) {
        const double x = bayes::kraus_mean(n_true, kp);
        const auto post = bayes::posterior(x, prior, kp);
        const auto cond = fock::joint_conditional_state(
            signal, alpha, InteractionParams::from_factors(kp.spm, kp.xpm), kp.zeta, x);
        const PhotonDistribution oracle(0, cond.signal_post.probabilities());
        CHECK(bayes::total_variation(post.distribution, oracle) < 2e-2);
    }
}

TEST_CASE("posterior stats") {
    const PhotonDistribution d(0, {0.5, 0.0, 0.5});
    const auto s = bayes::posterior_stats(d);
    CHECK(s.mean == 1.0);
    CHECK(s.variance == 1.0);
    CHECK(s.skewness == 0.0);
    const auto skewed = bayes::posterior_stats(PhotonDistribution(0, {0.9, 0.1}));
    // mean 0.1, variance 0.09, third central moment 0.072
    CHECK(skewed.skewness == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
    CHECK(bayes::posterior_stats(PhotonDistribution::singleton(3)).skewness == 0.0);
}

TEST_CASE("mid-p central interval") {
    SUBCASE("point mass") {
        const auto ci = bayes::central_interval(PhotonDistribution::singleton(5));
        CHECK(ci.lo == 5u);
        CHECK(ci.hi == 5u);
    }
    SUBCASE("uniform over ten values") {
        // Mid-p values 0.05, 0.15, ..., 0.95; [0.16, 0.84] keeps 0.25 .. 0.75.
        const PhotonDistribution d(10, std::vector<double>(10, 1.0));
        const auto ci = bayes::central_interval(d);
        CHECK(ci.lo == 12u);
        CHECK(ci.hi == 17u);
        CHECK(ci.contains(12));
        CHECK_FALSE(ci.contains(11));
        CHECK_FALSE(ci.contains(18));
    }
    SUBCASE("empty when no mid-p value falls inside") {
        const auto ci = bayes::central_interval(PhotonDistribution(0, {0.5, 0.5}), 0.4);
        CHECK(ci.lo > ci.hi);
        CHECK_FALSE(ci.contains(0));
    }
    CHECK_THROWS_AS(bayes::central_interval(PhotonDistribution::singleton(1), 1.0), ValidationError);
}

TEST_CASE("total variation") {
    const PhotonDistribution a(0, {0.5, 0.5});
    const PhotonDistribution b(1, {0.5, 0.5});
    CHECK(bayes::total_variation(a, a) == 0.0);
    CHECK(bayes::total_variation(a, b) == 0.5);
    CHECK(bayes::total_variation(a, PhotonDistribution::singleton(9)) == 1.0);
}

TEST_CASE("sampled records") {
    const KrausParams kp{5.0, 0.004, 0.05, 0.9};
    const auto prior = bayes::poisson_prior(9.0);
    const auto r1 = bayes::sample_record(prior, kp, 99, 17);
    const auto r2 = bayes::sample_record(prior, kp, 99, 17);
    CHECK(r1.n_true == r2.n_true);
    CHECK(r1.x == r2.x);
    CHECK(r1.seed == 99u);
    CHECK(r1.index == 17u);

    // Photon numbers follow the prior; X given n has the Gaussian moments.
    const int count = 40000;
    double mean_n = 0.0;
    double sum_z = 0.0, sum_z2 = 0.0;
    for (int i = 0; i < count; ++i) {
        const auto r = bayes::sample_record(prior, kp, 7, static_cast<std::uint64_t>(i));
        mean_n += static_cast<double>(r.n_true);
        const double z = (r.x - bayes::kraus_mean(r.n_true, kp)) / std::sqrt(bayes::kraus_variance(r.n_true, kp));
        sum_z += z;
        sum_z2 += z * z;
    }
    mean_n /= count;
    CHECK(std::abs(mean_n - 9.0) < 5.0 * 3.0 / std::sqrt(count));
    CHECK(std::abs(sum_z / count) < 5.0 / std::sqrt(count));
    CHECK(std::abs(sum_z2 / count - 1.0) < 5.0 * std::sqrt(2.0 / count));
}

TEST_CASE("kraus density closed-form values") {
    // phi = pi/2 with Gamma_S alpha^2 = 1: variance 1/2 + 2.
    const KrausParams kp{2.0, 0.25, 0.0, std::numbers::pi / 2 - 1.0};
    CHECK(std::abs(bayes::kraus_variance(0, kp) - 2.5) < 1e-15);
    const KrausParams lin{2.0, 0.0, 0.1, 0.3};
    CHECK(bayes::kraus_variance(4, lin) == 0.5);
    CHECK(std::abs(bayes::kraus_mean(4, lin) - std::numbers::sqrt2 * 2.0 * std::cos(0.7)) < 1e-15);
    CHECK(std::norm(kp.kappa() - std::complex<double>(1.0, -2.0)) == 0.0);
}

TEST_CASE("kraus density integrates to one") {
    qnd::testing::Gen gen(22);
    for (int i = 0; i < 20; ++i) {
        const KrausParams kp{gen.uniform(0.5, 20.0), gen.uniform(-0.01, 0.01), gen.uniform(0.0, 0.3), gen.uniform(-kPi, kPi)};
        const std::size_t n = static_cast<std::size_t>(gen.integer(0, 50));
        const double mu = bayes::kraus_mean(n, kp), sd = std::sqrt(bayes::kraus_variance(n, kp));
        const double mass = qnd::testing::integrate([&](double x) { return bayes::kraus_density(x, n, kp); },
                                                    mu - 40 * sd, mu + 40 * sd, sd * 1e-2);
        CHECK(std::abs(mass - 1.0) < 1e-10);
    }
}

TEST_CASE("kernel vs Gaussian sup-norm at alpha = 5") {
    const KrausParams kp{5.0, 0.1 / 25.0, 0.04, 0.0};
    for (std::size_t n = 0; n <= 10; ++n) {
        double gap = 0.0;
        for (double x = -20.0; x <= 20.0; x += 1e-2) {
            gap = std::max(gap, std::abs(bayes::likelihood(x, n, kp, bayes::Likelihood::kernel) -
                                         bayes::kraus_density(x, n, kp)));
        }
        CHECK(gap < 1e-3);
    }
}

TEST_CASE("no cross-phase: posterior equals prior") {
    const KrausParams kp{4.0, 0.003, 0.0, 0.4};
    const auto prior = bayes::poisson_prior(6.0);
    for (auto mode : {bayes::Likelihood::gaussian, bayes::Likelihood::kernel}) {
        const auto post = bayes::posterior(1.3, prior, kp, mode);
        for (std::size_t n = 0; n <= prior.support_max(); ++n) {
            CHECK(post.distribution.probability(n) == doctest::Approx(prior.probability(n)).epsilon(1e-14));
        }
    }
}

TEST_CASE("Poisson prior moments over the default window") {
    const auto p4 = bayes::poisson_prior(4.0);
    CHECK(std::abs(p4.mean() - 4.0) < 1e-9);
    CHECK(std::abs(p4.variance() - 4.0) < 1e-9);
    const auto p100 = bayes::poisson_prior(100.0);
    CHECK(std::abs(p100.variance() / p100.mean() - 1.0) < 1e-6);
}

TEST_CASE("sampled X without cross-phase centers on the coherent mean") {
    const KrausParams kp{3.0, 0.01, 0.0, 0.5};
    const auto prior = bayes::poisson_prior(5.0);
    const int count = 100000;
    double sum = 0.0;
    for (int i = 0; i < count; ++i) sum += bayes::sample_record(prior, kp, 5, static_cast<std::uint64_t>(i)).x;
    const double want = std::numbers::sqrt2 * 3.0 * std::cos(0.09 + 0.5);
    CHECK(std::abs(sum / count - want) < 5.0 * std::sqrt(bayes::kraus_variance(0, kp) / count));
}
