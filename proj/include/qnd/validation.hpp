#pragma once

// Oracle-versus-closed-form checks run by `qnd validate`. Each check reports
// the measured worst-case deviation next to its tolerance. A library error
// inside a check (e.g. a truncation that is too small) fails that check only.

#include <cstddef>
#include <string>
#include <vector>

namespace qnd::validation {

enum class Fault {
    none,
    xpm_sign,  // flip Gamma_X on the closed-form side only (harness self-test)
};

struct Options {
    std::vector<double> alphas{1.0, 2.0, 3.0};
    std::vector<double> spm{0.01, 0.05};
    double xpm_ratio = 2.0;
    std::vector<double> n_s{0.0, 1.0, 5.0};
    std::vector<double> zetas{0.0, 0.78539816339744831, 1.5707963267948966};
    double grid_step = 1e-3;
    // Fock dimension for the oracle probes; 0 picks fock::default_truncation.
    std::size_t truncation = 0;
    // Kernel comparisons: alpha, Gamma_S alpha^2, Gamma_X, signal n, zeta.
    double kernel_alpha = 3.0;
    double kernel_spm_alpha2 = 0.1;
    double kernel_xpm = 0.04;
    double kernel_zeta = 0.0;
    std::size_t kernel_n = 3;
    Fault fault = Fault::none;
};

struct Check {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

// Moment equivalence only.
Check moments_equivalence(const Options& opt);

std::vector<Check> run(const Options& opt);

bool all_passed(const std::vector<Check>& checks);

}  // namespace qnd::validation
