// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "weylsampl/manifold.hpp"
#include "weylsampl/spectral_basis.hpp"

namespace weylsampl {

/// A nonnegative spectral multiplier F(lambda) on [0, inf) together with a
/// tail certificate: tail_sup(y0) bounds sup_{y >= y0} F(y). Kernel sums are
/// truncated at the basis lambda_max and refuse to evaluate when the
/// certified tail contribution is not negligible.
struct SpectralMultiplier {
    std::function<double(double)> fn;
    std::function<double(double)> tail_sup;
    std::string name;

    double operator()(double y) const { return fn(y); }

    /// Indicator chi_[0, s] (closed ties, consistent with count_eigenvalues).
    static SpectralMultiplier indicator(double s);
    /// exp(-a y^2).
    static SpectralMultiplier gaussian(double a = 1.0);
    /// c * exp(-a y^2).
    static SpectralMultiplier scaled_gaussian(double c, double a);
    /// Arbitrary F with a caller-supplied nonincreasing tail bound.
    static SpectralMultiplier custom(std::function<double(double)> f,
                                     std::function<double(double)> tail, std::string name);
};

/// Kernel diagonal value with its attached truncation-tail bound.
struct KernelValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

/// Absolute tail tolerance for truncated kernel sums.
inline constexpr double kKernelTailTolerance = 1e-10;

/// K^F_t(x, x) = sum_l F(t sqrt(lambda_l)) u_l(x)^2, truncated at lambda_max.
/// Throws TruncationUnsafe when the tail certificate exceeds the tolerance.
KernelValue kernel_diag(const SpectralBasis& b, const SpectralMultiplier& F, double t,
                        const Point& x);

/// Smallest heat time with a certified truncation tail:
/// exp(-t lambda_max) * N <= 1e-12.
double heat_t_min(const SpectralBasis& b);

/// Diagonal heat kernel p_t(x, x) = sum_l exp(-t lambda_l) u_l(x)^2.
double heat_diag(const SpectralBasis& b, double t, const Point& x);

struct HeatTrace {
    double spectral = 0.0;   // sum_l exp(-t lambda_l)
    double quadrature = 0.0; // integral of p_t(x, x) via the supplied rule
};

HeatTrace heat_trace(const SpectralBasis& b, double t, const QuadratureRule& quad);

/// Spectral function e(s; x) = sum_{lambda_l <= s} u_l(x)^2.
double spectral_function(const SpectralBasis& b, double s, const Point& x);

struct SpectralFunctionBounds {
    double a1 = 0.0; // min over (s, x) of e(s; x) |B(x, radius(s))|
    double a2 = 0.0; // max of the same
};

/// radius(s) = s^{-1/2} by default (dimensionally consistent with the heat
/// bounds); literal_radius = true evaluates the printed s^{-1} form instead.
/// Grid values must be >= s_floor ("sufficiently large s").
SpectralFunctionBounds spectral_function_bounds(const SpectralBasis& b, const ManifoldModel& m,
                                                const std::vector<double>& s_grid,
                                                const std::vector<Point>& points,
                                                bool literal_radius = false, double s_floor = 4.0);

/// True iff kernel_diag(F1) <= kernel_diag(F2) + 1e-12 at every point.
/// Verifies F1 <= F2 on the eigenvalue grid first (the hypothesis the
/// comparison rests on); throws InvalidInput when that fails.
bool kernel_monotonicity_check(const SpectralBasis& b, const SpectralMultiplier& F1,
                               const SpectralMultiplier& F2, double t,
                               const std::vector<Point>& points);

struct GaussianBoundFit {
    double c1 = 0.0, big_c1 = 0.0; // lower: big_c1 t^{-d/2} exp(-c1 dist^2/t) <= p_t
    double c2 = 0.0, big_c2 = 0.0; // upper: p_t <= big_c2 t^{-d/2} exp(-c2 dist^2/t)
    bool ok = false;
    std::size_t pairs_used = 0;
    std::size_t pairs_skipped = 0; // truncated value under 10x its tail bound
};

struct GaussianFitOptions {
    double c_min = 0.05, c_max = 2.0, c_step = 0.05;
    // A rate c is admissible when its fitted constant stays within this
    // factor of the diagonal scale (a rate past the true decay blows up on
    // far pairs and gets rejected).
    double slack = 10.0;
};

/// Fits two-sided Gaussian bounds for p_t over a (t, point-pair) data set:
/// c2 = largest admissible rate for the upper bound (with the smallest C2),
/// c1 = smallest admissible rate for the lower bound (with the largest C1).
/// Throws FitFailure, naming the violating datum, when no rate works.
GaussianBoundFit gaussian_bound_fit(const SpectralBasis& b, const ManifoldModel& m,
                                    const std::vector<double>& t_grid,
                                    const std::vector<std::pair<Point, Point>>& pairs,
                                    const GaussianFitOptions& opts = {});

/// |quadrature(e(omega; .)) - N_omega|.
double counting_identity_check(const SpectralBasis& b, const QuadratureRule& quad, double omega);

/// Bundled heat diagnostics for reporting: traces, diagonal values and the
/// Gaussian-bound fit over a t-grid and a point sample.
struct HeatDiagnostics {
    std::vector<double> t_grid;
    std::vector<double> trace_spectral;
    std::vector<double> trace_quadrature;
    std::vector<std::vector<double>> diag_values; // [t][point]
    std::vector<double> truncation_estimates;     // exp(-t lambda_max) * N per t
    GaussianBoundFit fit;
    bool fit_present = false;
    bool traces_decreasing = true;
    bool diag_positive = true;
};

HeatDiagnostics heat_diagnostics(const SpectralBasis& b, const ManifoldModel& m,
                                 const std::vector<double>& t_grid,
                                 const std::vector<Point>& points, const QuadratureRule& quad,
                                 bool with_fit);

std::string heat_diagnostics_to_json(const HeatDiagnostics& h);
std::string heat_diagnostics_to_csv(const HeatDiagnostics& h);

} // namespace weylsampl
