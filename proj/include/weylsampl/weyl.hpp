// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weylsampl/manifold.hpp"
#include "weylsampl/spectral_basis.hpp"

namespace weylsampl {

struct WeylScanRow {
    double omega = 0.0;
    int n_omega = 0;
    int card_min_rho = 0;   // observed min cardinality at rho = omega^{-1/2}
    int card_max_rho = 0;   // observed max at the same density
    int card_min_gamma = 0; // observed min at rho = gamma omega^{-1/2}
    double ratio_lower = 0.0; // N_omega / card_max_rho
    bool upper_ok = false;    // N_omega <= card_min_gamma
    double weyl_ratio = 0.0;  // N_omega / (Vol omega^{d/2})
    bool cert_full_rank = false; // sampling certificate on the min gamma-lattice
    bool skipped = false;
    std::string skip_reason;
};

struct WeylScanReport {
    std::string manifold_id;
    double gamma = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<WeylScanRow> rows; // sorted by omega; includes skipped rows
    // Summary over non-skipped rows.
    double a_empirical = 0.0; // min of ratio_lower
    bool all_upper_ok = false;
    bool vacuous = false;     // no usable rows

    std::vector<const WeylScanRow*> valid_rows() const;
};

struct WeylScanOptions {
    bool certificate = true; // cross-invoke the sampling operator per row
    double tau = 1e-6;       // certificate threshold on B_lower / B_upper
};

/// The headline sweep: per omega, N_omega plus observed extreme lattice
/// cardinalities at densities omega^{-1/2} and gamma omega^{-1/2}. The
/// sup/inf of the double inequality are uncomputable; the report stores
/// observed extremes over the seeded trials, labeled as such. Rows whose rho
/// violates the guard rho < injectivity_radius / 6 are skipped with a reason.
WeylScanReport weyl_scan(const SpectralBasis& b, const ManifoldModel& m,
                         const std::vector<double>& omega_grid, double gamma, int trials,
                         std::uint64_t seed, const WeylScanOptions& opts = {});

/// N_omega / (Vol omega^{d/2}), the classical Weyl normalization.
double weyl_ratio(const SpectralBasis& b, const ManifoldModel& m, double omega);

struct WeylAsymptotic {
    double ratio_tail = 0.0;
    bool stable = false; // relative spread over the top half of the grid <= 10%
};

WeylAsymptotic weyl_asymptotic_check(const WeylScanReport& report, const ManifoldModel& m);

/// Geometric grid with `points_per_decade` points per decade, endpoints included.
std::vector<double> geometric_grid(double omega_min, double omega_max, int points_per_decade);

/// CSV columns: omega,n_omega,card_min_rho,card_max_rho,card_min_gamma,
/// ratio_lower,upper_ok,weyl_ratio (skipped rows omitted).
std::string weyl_report_csv(const WeylScanReport& report);
std::string weyl_report_json(const WeylScanReport& report);

} // namespace weylsampl
