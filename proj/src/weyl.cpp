// SPDX-License-Identifier: Apache-2.0
#include "weylsampl/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "weylsampl/errors.hpp"
#include "weylsampl/lattice.hpp"
#include "weylsampl/sampling.hpp"

namespace weylsampl {

std::vector<const WeylScanRow*> WeylScanReport::valid_rows() const {
    std::vector<const WeylScanRow*> out;
    for (const auto& r : rows)
        if (!r.skipped) out.push_back(&r);
    return out;
}

double weyl_ratio(const SpectralBasis& b, const ManifoldModel& m, double omega) {
    if (!(omega > 0.0)) throw InvalidInput("weyl_ratio: omega must be positive");
    int n = count_eigenvalues(b, omega);
    return n / (m.volume() * std::pow(omega, 0.5 * m.dimension()));
}

WeylScanReport weyl_scan(const SpectralBasis& b, const ManifoldModel& m,
                         const std::vector<double>& omega_grid, double gamma, int trials,
                         std::uint64_t seed, const WeylScanOptions& opts) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput("weyl_scan: gamma must be in (0, 1)");
    if (trials < 1) throw InvalidInput("weyl_scan: trials must be >= 1");

    WeylScanReport rep;
    rep.manifold_id = m.describe();
    rep.gamma = gamma;
    rep.trials = trials;
    rep.seed = seed;

    std::vector<double> grid = omega_grid;
    std::sort(grid.begin(), grid.end());
    if (grid.empty()) {
        rep.vacuous = true;
        rep.all_upper_ok = true; // vacuous truth, flagged via `vacuous`
        return rep;
    }

    const double guard = m.injectivity_radius() / 6.0;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        double omega = grid[gi];
        WeylScanRow row;
        row.omega = omega;
        if (!(omega > 0.0)) {
            row.skipped = true;
            row.skip_reason = "omega must be positive";
            rep.rows.push_back(row);
            continue;
        }
        double rho = 1.0 / std::sqrt(omega);
        if (!(rho < guard)) {
            row.skipped = true;
            std::ostringstream os;
            os << "rho = " << rho << " violates the guard rho < injectivity_radius/6 = " << guard;
            row.skip_reason = os.str();
            rep.rows.push_back(row);
            continue;
        }
        row.n_omega = count_eigenvalues(b, omega);
        row.weyl_ratio = weyl_ratio(b, m, omega);

        std::uint64_t row_seed = seed + 1000000007ULL * (gi + 1);
        LatticeExtremes at_rho = lattice_extremes(m, rho, trials, row_seed);
        LatticeExtremes at_gamma = lattice_extremes(m, gamma * rho, trials, row_seed + 1);
        row.card_min_rho = at_rho.min_card;
        row.card_max_rho = at_rho.max_card;
        row.card_min_gamma = at_gamma.min_card;
        row.ratio_lower = static_cast<double>(row.n_omega) / row.card_max_rho;
        row.upper_ok = row.n_omega <= row.card_min_gamma;
        if (opts.certificate) {
            SamplingOptions sopts;
            sopts.store_matrix = false;
            SamplingOperator op = sampling_operator(b, omega, at_gamma.min_lattice, sopts);
            row.cert_full_rank = op.full_column_rank() && op.b_lower >= opts.tau * op.b_upper;
        }
        rep.rows.push_back(row);
    }

    rep.a_empirical = std::numeric_limits<double>::infinity();
    bool any = false;
    rep.all_upper_ok = true;
    for (const auto& r : rep.rows) {
        if (r.skipped) continue;
        any = true;
        rep.a_empirical = std::min(rep.a_empirical, r.ratio_lower);
        rep.all_upper_ok = rep.all_upper_ok && r.upper_ok;
    }
    if (!any) {
        rep.vacuous = true;
        rep.a_empirical = 0.0;
    }
    return rep;
}

WeylAsymptotic weyl_asymptotic_check(const WeylScanReport& report, const ManifoldModel& m) {
    (void)m;
    auto rows = report.valid_rows();
    if (rows.size() < 3) throw InvalidInput("weyl_asymptotic_check: need at least 3 rows");
    WeylAsymptotic out;
    out.ratio_tail = rows.back()->weyl_ratio;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = rows.size() / 2; i < rows.size(); ++i) {
        lo = std::min(lo, rows[i]->weyl_ratio);
        hi = std::max(hi, rows[i]->weyl_ratio);
    }
    out.stable = hi <= lo * 1.10;
    return out;
}

std::vector<double> geometric_grid(double omega_min, double omega_max, int points_per_decade) {
    if (!(omega_min > 0.0) || !(omega_max >= omega_min))
        throw InvalidInput("geometric_grid: need 0 < omega_min <= omega_max");
    if (points_per_decade < 1) throw InvalidInput("geometric_grid: points_per_decade >= 1");
    std::vector<double> grid;
    double decades = std::log10(omega_max / omega_min);
    int n = std::max(1, static_cast<int>(std::round(decades * points_per_decade)));
    for (int i = 0; i <= n; ++i) grid.push_back(omega_min * std::pow(omega_max / omega_min,
                                                                     static_cast<double>(i) / n));
    grid.back() = omega_max;
    return grid;
}

std::string weyl_report_csv(const WeylScanReport& report) {
    std::ostringstream os;
    os.precision(12);
    os << "omega,n_omega,card_min_rho,card_max_rho,card_min_gamma,ratio_lower,upper_ok,weyl_ratio\n";
    for (const auto& r : report.rows) {
        if (r.skipped) continue;
        os << r.omega << "," << r.n_omega << "," << r.card_min_rho << "," << r.card_max_rho << ","
           << r.card_min_gamma << "," << r.ratio_lower << "," << (r.upper_ok ? 1 : 0) << ","
           << r.weyl_ratio << "\n";
    }
    return os.str();
}

std::string weyl_report_json(const WeylScanReport& report) {
    nlohmann::json j;
    j["manifold"] = report.manifold_id;
    j["gamma"] = report.gamma;
    j["trials"] = report.trials;
    j["seed"] = report.seed;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json row;
        row["omega"] = r.omega;
        if (r.skipped) {
            row["skipped"] = true;
            row["skip_reason"] = r.skip_reason;
        } else {
            row["n_omega"] = r.n_omega;
            row["card_min_rho"] = r.card_min_rho;
            row["card_max_rho"] = r.card_max_rho;
            row["card_min_gamma"] = r.card_min_gamma;
            row["ratio_lower"] = r.ratio_lower;
            row["upper_ok"] = r.upper_ok;
            row["weyl_ratio"] = r.weyl_ratio;
            row["cert_full_rank"] = r.cert_full_rank;
        }
        rows.push_back(row);
    }
    j["rows"] = rows;
    j["summary"] = {{"a_empirical", report.vacuous ? nlohmann::json() : nlohmann::json(report.a_empirical)},
                    {"all_upper_ok", report.all_upper_ok},
                    {"vacuous", report.vacuous}};
    return j.dump(2);
}

} // namespace weylsampl
