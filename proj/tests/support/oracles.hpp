// SPDX-License-Identifier: Apache-2.0
// Independent reference computations for tests: closed-form eigenvalue
// counts, direct exponential sums and brute-force lattice verifiers. These
// deliberately avoid the library code paths they are used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracles {

/// Circle (L = 2 pi): N_omega = 1 + 2 floor(sqrt(omega)).
inline int circle_count(double omega) {
    return 1 + 2 * static_cast<int>(std::floor(std::sqrt(omega) + 1e-12));
}

/// Sphere: N_omega = (L+1)^2 with L = floor((-1 + sqrt(1 + 4 omega)) / 2).
inline int sphere_count(double omega) {
    int L = static_cast<int>(std::floor((-1.0 + std::sqrt(1.0 + 4.0 * omega)) / 2.0 + 1e-12));
    return (L + 1) * (L + 1);
}

/// Direct theta-series sum: sum over k in Z of exp(-t k^2), truncated when
/// the terms vanish at double precision.
inline double circle_heat_trace(double t) {
    double sum = 1.0;
    for (int k = 1;; ++k) {
        double term = std::exp(-t * static_cast<double>(k) * k);
        if (term < 1e-300) break;
        sum += 2.0 * term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

/// Direct sum over degrees: sum_l (2l+1) exp(-t l(l+1)).
inline double sphere_heat_trace(double t) {
    double sum = 0.0;
    for (int l = 0;; ++l) {
        double term = (2.0 * l + 1.0) * std::exp(-t * static_cast<double>(l) * (l + 1));
        sum += term;
        if (term < 1e-18 * sum && l > 2) break;
    }
    return sum;
}

/// Brute-force pairwise check: all geodesic distances >= rho - tol.
template <class DistFn, class PointT>
bool packing_ok_bruteforce(const std::vector<PointT>& pts, double rho, double tol, DistFn dist) {
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (dist(pts[i], pts[j]) < rho - tol) return false;
    return true;
}

/// Brute-force maximality: no pool point can be added to the set.
template <class DistFn, class PointT>
bool maximal_bruteforce(const std::vector<PointT>& pts, const std::vector<PointT>& pool,
                        double rho, DistFn dist) {
    for (const auto& c : pool) {
        bool admissible = true;
        for (const auto& p : pts)
            if (dist(c, p) < rho) {
                admissible = false;
                break;
            }
        if (admissible) return false;
    }
    return true;
}

/// Brute-force covering radius of `pts` over `pool`.
template <class DistFn, class PointT>
double covering_radius_bruteforce(const std::vector<PointT>& pts, const std::vector<PointT>& pool,
                                  DistFn dist) {
    double worst = 0.0;
    for (const auto& c : pool) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) best = std::min(best, dist(c, p));
        worst = std::max(worst, best);
    }
    return worst;
}

/// Brute-force cover multiplicity: max # of pts within rho of a pool point.
template <class DistFn, class PointT>
int multiplicity_bruteforce(const std::vector<PointT>& pts, const std::vector<PointT>& pool,
                            double rho, DistFn dist) {
    int worst = 0;
    for (const auto& c : pool) {
        int n = 0;
        for (const auto& p : pts)
            if (dist(c, p) <= rho) ++n;
        worst = std::max(worst, n);
    }
    return worst;
}

/// Composite trapezoid integral of f over [0, L) with n nodes (periodic).
template <class Fn>
double periodic_trapezoid(Fn f, double L, int n) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += f(L * i / n);
    return sum * L / n;
}

} // namespace oracles
