// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "weylsampl/manifold.hpp"
#include "weylsampl/point.hpp"

namespace weylsampl {

struct LatticeDiagnostics {
    bool packing_ok = false;      // min pairwise distance >= rho - tol_pack
    double min_pairwise = 0.0;
    double covering_radius = 0.0; // max over test points of distance to the lattice
    int multiplicity = 0;         // max # lattice points within rho of a test point
    std::size_t candidate_count = 0;
    std::uint64_t seed = 0;
};

/// A metric rho-lattice candidate: pairwise distances >= rho (balls of radius
/// rho/2 disjoint) and, by greedy maximality over the pool, rho-balls cover.
struct Lattice {
    ManifoldModel manifold;
    double rho = 0.0;
    std::vector<Point> points;
    LatticeDiagnostics diagnostics;
};

enum class SweepOrder {
    Shuffled,      // seed-shuffled pool index order
    FarthestPoint, // deterministic farthest-point-sampling order
};

/// Greedy maximal rho-packing over the candidate pool: a candidate is accepted
/// iff its distance to every accepted point is >= rho. Maximal w.r.t. the
/// pool, deterministic in (pool, seed, order). Diagnostics are computed
/// against the pool as test set.
Lattice build_lattice(const ManifoldModel& m, double rho, const std::vector<Point>& pool,
                      std::uint64_t seed, SweepOrder order = SweepOrder::Shuffled);

/// Wraps an explicit point set as a Lattice (diagnostics vs. the given test
/// points; packing tolerance 1e-9 * diameter, one mesh edge on meshes).
Lattice lattice_from_points(const ManifoldModel& m, double rho, std::vector<Point> points,
                            const std::vector<Point>& test_points);

/// Recomputes diagnostics of a lattice against an arbitrary test set.
LatticeDiagnostics lattice_diagnostics(const Lattice& lat, const std::vector<Point>& test_points);

struct LatticeExtremes {
    int min_card = 0;
    int max_card = 0;
    int trials = 0;
    Lattice min_lattice; // a smallest-cardinality lattice observed
};

/// Observed extreme cardinalities over `trials` seeded greedy builds plus one
/// farthest-point-ordering build, all over the same base_seed pool. These are
/// one-sided proxies: the observed min upper-bounds the true inf, the observed
/// max lower-bounds the true sup.
LatticeExtremes lattice_extremes(const ManifoldModel& m, double rho, int trials,
                                 std::uint64_t base_seed);

/// Default candidate-pool size at scale rho: max(10^4, 50 (diameter/rho)^d).
std::size_t default_pool_size(const ManifoldModel& m, double rho);

std::string lattice_to_json(const Lattice& lat);
std::string lattice_to_csv(const Lattice& lat);

} // namespace weylsampl
