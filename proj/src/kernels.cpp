// SPDX-License-Identifier: Apache-2.0
#include "weylsampl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "weylsampl/errors.hpp"
#include "weylsampl/parallel.hpp"

namespace weylsampl {

SpectralMultiplier SpectralMultiplier::indicator(double s) {
    if (s < 0.0) throw InvalidInput("indicator multiplier: s must be >= 0");
    return {[s](double y) { return y <= s ? 1.0 : 0.0; },
            [s](double y0) { return y0 > s ? 0.0 : 1.0; },
            "chi[0," + std::to_string(s) + "]"};
}

SpectralMultiplier SpectralMultiplier::gaussian(double a) { return scaled_gaussian(1.0, a); }

SpectralMultiplier SpectralMultiplier::scaled_gaussian(double c, double a) {
    if (!(a > 0.0) || c < 0.0) throw InvalidInput("gaussian multiplier: need a > 0, c >= 0");
    return {[c, a](double y) { return c * std::exp(-a * y * y); },
            [c, a](double y0) { return c * std::exp(-a * y0 * y0); },
            "gauss(c=" + std::to_string(c) + ",a=" + std::to_string(a) + ")"};
}

SpectralMultiplier SpectralMultiplier::custom(std::function<double(double)> f,
                                              std::function<double(double)> tail,
                                              std::string name) {
    return {std::move(f), std::move(tail), std::move(name)};
}

KernelValue kernel_diag(const SpectralBasis& b, const SpectralMultiplier& F, double t,
                        const Point& x) {
    if (!(t > 0.0)) throw InvalidInput("kernel_diag: t must be positive");
    const auto& ev = b.eigenvalues();
    const int n = b.size();
    // Tail certificate at the truncation edge: the crude eigenvalue count
    // beyond lambda_max is estimated by the enumerated count itself.
    double eps_tail = F.tail_sup(t * std::sqrt(b.lambda_max()));
    double tail = eps_tail * std::max(1, n);
    if (!(tail <= kKernelTailTolerance))
        throw TruncationUnsafe("kernel_diag: tail certificate " + std::to_string(tail) +
                               " exceeds tolerance for multiplier " + F.name);
    Eigen::VectorXd u = b.eval_band(x, n);
    double sum = 0.0;
    for (int l = 0; l < n; ++l) {
        double w = F(t * std::sqrt(ev[l]));
        if (w < -1e-12)
            throw InvalidInput("kernel_diag: multiplier " + F.name +
                               " is negative on the eigenvalue grid");
        sum += w * u[l] * u[l];
    }
    return {sum, tail};
}

double heat_t_min(const SpectralBasis& b) {
    double n = std::max(1, b.size());
    if (b.lambda_max() <= 0.0) return 0.0;
    return (std::log(n) + 12.0 * std::numbers::ln10) / b.lambda_max();
}

namespace {
void require_heat_time(const SpectralBasis& b, double t) {
    double tmin = heat_t_min(b);
    if (t < tmin) {
        std::ostringstream os;
        os << "heat kernel: t = " << t << " below the certified truncation time t_min = " << tmin
           << " (raise lambda_max or t)";
        throw TruncationUnsafe(os.str());
    }
}
} // namespace

double heat_diag(const SpectralBasis& b, double t, const Point& x) {
    require_heat_time(b, t);
    const auto& ev = b.eigenvalues();
    Eigen::VectorXd u = b.eval_band(x, b.size());
    double sum = 0.0;
    for (int l = 0; l < b.size(); ++l) sum += std::exp(-t * ev[l]) * u[l] * u[l];
    return sum;
}

HeatTrace heat_trace(const SpectralBasis& b, double t, const QuadratureRule& quad) {
    require_heat_time(b, t);
    HeatTrace out;
    for (double lam : b.eigenvalues()) out.spectral += std::exp(-t * lam);
    std::vector<double> vals(quad.nodes.size());
    parallel_for(quad.nodes.size(), [&](std::size_t i) { vals[i] = heat_diag(b, t, quad.nodes[i]); });
    for (std::size_t i = 0; i < quad.nodes.size(); ++i) out.quadrature += quad.weights[i] * vals[i];
    return out;
}

double spectral_function(const SpectralBasis& b, double s, const Point& x) {
    if (s < 0.0) throw InvalidInput("spectral_function: s must be >= 0");
    int n = count_eigenvalues(b, s); // throws OutOfBand above lambda_max
    Eigen::VectorXd u = b.eval_band(x, n);
    return u.squaredNorm();
}

SpectralFunctionBounds spectral_function_bounds(const SpectralBasis& b, const ManifoldModel& m,
                                                const std::vector<double>& s_grid,
                                                const std::vector<Point>& points,
                                                bool literal_radius, double s_floor) {
    if (s_grid.empty() || points.empty())
        throw InvalidInput("spectral_function_bounds: empty grid or point set");
    SpectralFunctionBounds out;
    out.a1 = std::numeric_limits<double>::infinity();
    out.a2 = 0.0;
    for (double s : s_grid) {
        if (!(s >= s_floor))
            throw InvalidInput("spectral_function_bounds: s below the floor " +
                               std::to_string(s_floor) + " (the bounds hold for large s only)");
        double radius = literal_radius ? 1.0 / s : 1.0 / std::sqrt(s);
        for (const Point& x : points) {
            double v = spectral_function(b, s, x) * ball_volume(m, x, radius);
            out.a1 = std::min(out.a1, v);
            out.a2 = std::max(out.a2, v);
        }
    }
    return out;
}

bool kernel_monotonicity_check(const SpectralBasis& b, const SpectralMultiplier& F1,
                               const SpectralMultiplier& F2, double t,
                               const std::vector<Point>& points) {
    const auto& ev = b.eigenvalues();
    for (double lam : ev) {
        double y = t * std::sqrt(lam);
        if (F1(y) > F2(y) + 1e-12)
            throw InvalidInput("kernel_monotonicity_check: F1 <= F2 fails at argument " +
                               std::to_string(y));
    }
    for (const Point& x : points) {
        double k1 = kernel_diag(b, F1, t, x).value;
        double k2 = kernel_diag(b, F2, t, x).value;
        if (k1 > k2 + 1e-12) return false;
    }
    return true;
}

GaussianBoundFit gaussian_bound_fit(const SpectralBasis& b, const ManifoldModel& m,
                                    const std::vector<double>& t_grid,
                                    const std::vector<std::pair<Point, Point>>& pairs,
                                    const GaussianFitOptions& opts) {
    if (t_grid.empty() || pairs.empty())
        throw InvalidInput("gaussian_bound_fit: empty t grid or pair set");
    const int d = m.dimension();
    const int n = b.size();
    const auto& ev = b.eigenvalues();

    struct Datum {
        double t, dist2, scaled; // scaled = p_t(x,y) * t^{d/2}
    };
    std::vector<Datum> data;
    GaussianBoundFit fit;
    double diag_min = std::numeric_limits<double>::infinity();
    double diag_max = 0.0;

    for (double t : t_grid) {
        require_heat_time(b, t);
        if (!(t < 1.0))
            throw InvalidInput("gaussian_bound_fit: short-time bounds need t in (t_min, 1)");
        double tail = std::exp(-t * b.lambda_max()) * std::max(1, n);
        for (const auto& [x, y] : pairs) {
            Eigen::VectorXd ux = b.eval_band(x, n);
            Eigen::VectorXd uy = b.eval_band(y, n);
            double p = 0.0, diag_x = 0.0, diag_y = 0.0;
            for (int l = 0; l < n; ++l) {
                double w = std::exp(-t * ev[l]);
                p += w * ux[l] * uy[l];
                diag_x += w * ux[l] * ux[l];
                diag_y += w * uy[l] * uy[l];
            }
            // Skip values indistinguishable from the truncation tail or from
            // the cancellation noise of the sum (eps times its diagonal
            // scale; by Cauchy-Schwarz |p| <= sqrt(diag_x diag_y)).
            double floor = std::max(tail, 1e-15 * std::sqrt(diag_x * diag_y));
            if (p <= 10.0 * floor) {
                ++fit.pairs_skipped;
                continue;
            }
            double dist = geodesic_distance(m, x, y);
            double scaled = p * std::pow(t, 0.5 * d);
            data.push_back({t, dist * dist, scaled});
            ++fit.pairs_used;
            if (dist == 0.0) {
                diag_min = std::min(diag_min, scaled);
                diag_max = std::max(diag_max, scaled);
            }
        }
    }
    if (data.empty())
        throw FitFailure("gaussian_bound_fit: every pair fell below the truncation floor");
    if (!std::isfinite(diag_min)) {
        // No exact diagonal pair supplied; anchor the admissibility scale on
        // the least-separated data instead.
        for (const auto& dd : data) {
            diag_min = std::min(diag_min, dd.scaled);
            diag_max = std::max(diag_max, dd.scaled);
        }
    }

    auto upper_c = [&](double c) { // smallest C2 for rate c
        double worst = 0.0;
        for (const auto& dd : data) worst = std::max(worst, dd.scaled * std::exp(c * dd.dist2 / dd.t));
        return worst;
    };
    auto lower_c = [&](double c) { // largest C1 for rate c
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& dd : data) worst = std::min(worst, dd.scaled * std::exp(c * dd.dist2 / dd.t));
        return worst;
    };

    // Admissible upper rates keep C2 near the diagonal scale; past the true
    // decay rate the far pairs blow C2 up. Symmetrically for the lower bound.
    bool found_upper = false, found_lower = false;
    for (double c = opts.c_min; c <= opts.c_max + 1e-12; c += opts.c_step) {
        double c2v = upper_c(c);
        if (c2v <= opts.slack * diag_max) {
            if (!found_upper || c > fit.c2) {
                fit.c2 = c;
                fit.big_c2 = c2v;
            }
            found_upper = true;
        }
        double c1v = lower_c(c);
        if (c1v >= diag_min / opts.slack) {
            if (!found_lower) { // smallest admissible rate
                fit.c1 = c;
                fit.big_c1 = c1v;
                found_lower = true;
            }
        }
    }
    if (!found_upper || !found_lower) {
        // Report the datum that resists the sandwich hardest.
        const Datum* worst = &data.front();
        for (const auto& dd : data)
            if (dd.scaled * std::exp(opts.c_min * dd.dist2 / dd.t) >
                worst->scaled * std::exp(opts.c_min * worst->dist2 / worst->t))
                worst = &dd;
        std::ostringstream os;
        os << "gaussian_bound_fit: no admissible " << (found_upper ? "lower" : "upper")
           << " rate in [" << opts.c_min << ", " << opts.c_max << "]; worst datum t=" << worst->t
           << " dist=" << std::sqrt(worst->dist2);
        throw FitFailure(os.str());
    }
    fit.ok = fit.big_c1 > 0.0 && std::isfinite(fit.big_c2);
    return fit;
}

double counting_identity_check(const SpectralBasis& b, const QuadratureRule& quad, double omega) {
    int n = count_eigenvalues(b, omega);
    std::vector<double> vals(quad.nodes.size());
    parallel_for(quad.nodes.size(), [&](std::size_t i) {
        vals[i] = spectral_function(b, omega, quad.nodes[i]);
    });
    double integral = 0.0;
    for (std::size_t i = 0; i < quad.nodes.size(); ++i) integral += quad.weights[i] * vals[i];
    return std::fabs(integral - n);
}

HeatDiagnostics heat_diagnostics(const SpectralBasis& b, const ManifoldModel& m,
                                 const std::vector<double>& t_grid,
                                 const std::vector<Point>& points, const QuadratureRule& quad,
                                 bool with_fit) {
    if (t_grid.empty()) throw InvalidInput("heat_diagnostics: empty t grid");
    HeatDiagnostics h;
    h.t_grid = t_grid;
    double prev = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        HeatTrace tr = heat_trace(b, t, quad);
        h.trace_spectral.push_back(tr.spectral);
        h.trace_quadrature.push_back(tr.quadrature);
        h.truncation_estimates.push_back(std::exp(-t * b.lambda_max()) * std::max(1, b.size()));
        if (!(tr.spectral > 0.0)) h.diag_positive = false;
        if (tr.spectral > prev) h.traces_decreasing = false;
        prev = tr.spectral;
        std::vector<double> row(points.size());
        parallel_for(points.size(), [&](std::size_t i) { row[i] = heat_diag(b, t, points[i]); });
        for (double v : row)
            if (!(v > 0.0)) h.diag_positive = false;
        h.diag_values.push_back(std::move(row));
    }
    if (with_fit && points.size() >= 2) {
        std::vector<std::pair<Point, Point>> pairs;
        pairs.reserve(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            pairs.push_back({points[i], points[i]}); // diagonal anchors
            pairs.push_back({points[i], points[(i + 1) % points.size()]});
        }
        h.fit = gaussian_bound_fit(b, m, t_grid, pairs);
        h.fit_present = true;
    }
    return h;
}

std::string heat_diagnostics_to_json(const HeatDiagnostics& h) {
    nlohmann::json j;
    j["t_grid"] = h.t_grid;
    j["trace_spectral"] = h.trace_spectral;
    j["trace_quadrature"] = h.trace_quadrature;
    j["diag_values"] = h.diag_values;
    j["truncation_estimates"] = h.truncation_estimates;
    j["traces_decreasing"] = h.traces_decreasing;
    j["diag_positive"] = h.diag_positive;
    if (h.fit_present)
        j["gaussian_fit"] = {{"C1", h.fit.big_c1}, {"c1", h.fit.c1},     {"C2", h.fit.big_c2},
                             {"c2", h.fit.c2},     {"ok", h.fit.ok},     {"pairs_used", h.fit.pairs_used},
                             {"pairs_skipped", h.fit.pairs_skipped}};
    return j.dump(2);
}

std::string heat_diagnostics_to_csv(const HeatDiagnostics& h) {
    std::ostringstream os;
    os.precision(17);
    os << "t,x_id,p_diag,trace_spectral,trace_quadrature\n";
    for (std::size_t ti = 0; ti < h.t_grid.size(); ++ti)
        for (std::size_t xi = 0; xi < h.diag_values[ti].size(); ++xi)
            os << h.t_grid[ti] << "," << xi << "," << h.diag_values[ti][xi] << ","
               << h.trace_spectral[ti] << "," << h.trace_quadrature[ti] << "\n";
    return os.str();
}

} // namespace weylsampl
