#pragma once

// Whispering-gallery resonator -> Kerr phase factors, loading efficiency,
// optimal probe photon number, pump power, and the resulting design report.

#include "qnd/analytic.hpp"

#include <optional>

namespace qnd {

struct ResonatorSpec {
    double q_load = 0.0;
    double q_intr = 0.0;      // may be +inf for a lossless host
    double wavelength = 0.0;  // vacuum wavelength, m
    double n0 = 0.0;          // refractive index
    double n2 = 0.0;          // Kerr coefficient, m^2/W
    double v_eff = 0.0;       // effective mode volume, m^3
    double eta_extra = 1.0;   // detection-chain efficiency beyond loading

    double omega0() const;  // 2 pi c / lambda
    void validate() const;
};

struct DesignReport {
    double spm = 0.0;
    double xpm = 0.0;
    double eta_load = 0.0;
    double eta_extra = 0.0;
    double eta_total = 0.0;
    // Empty when eta_total == 1 (no finite optimum).
    std::optional<double> n_p_opt;
    std::optional<double> dn2_min;
    std::optional<double> pump_power_w;
    bool unbounded_optimum = false;
    double n_bar_s = 0.0;
    double sub_sql_margin = 0.0;  // at n_p_opt
    double sql = 0.0;
};

namespace resonator {

// eta_total used for the CaF2 working point when no split is given.
inline constexpr double kReferenceEtaTotal = 0.9;

// The CaF2 whispering-gallery resonator at Q_load = 1e9 with eta_total = 0.9.
ResonatorSpec caf2_reference();

InteractionParams kerr_rates(const ResonatorSpec& spec);

double loading_efficiency(double q_load, double q_intr);

// eta_extra giving the requested eta_total for this spec's loading.
double eta_extra_for_total(const ResonatorSpec& spec, double eta_total);

double pump_power(const ResonatorSpec& spec, double n_bar_p);

DesignReport design_report(const ResonatorSpec& spec, double n_bar_s);

}  // namespace resonator
}  // namespace qnd
