// SPDX-License-Identifier: Apache-2.0
#include "weylsampl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "weylsampl/errors.hpp"
#include "weylsampl/rng.hpp"

namespace weylsampl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double chord_of_arc(double geo) { return 2.0 * std::sin(std::min(geo, std::numbers::pi) / 2.0); }

// Spatial hash over a growing point set on one analytic manifold. Cell size
// is tied to the packing radius so the greedy accept test touches O(3^d)
// cells. Sphere cells live in the embedding cube; queries convert geodesic
// radii to chord lengths. Insert and query may interleave.
class PointGrid {
public:
    PointGrid(const ManifoldModel& m, double rho) : m_(&m), kind_(m.kind()) {
        switch (kind_) {
            case ManifoldKind::Circle: {
                double L = m.circle_circumference();
                nbins_[0] = static_cast<int>(std::clamp(std::floor(L / rho), 1.0, 4096.0));
                width_[0] = L / nbins_[0];
                dims_ = 1;
                wrap_ = true;
                break;
            }
            case ManifoldKind::FlatTorus: {
                dims_ = m.dimension();
                wrap_ = true;
                for (int i = 0; i < dims_; ++i) {
                    double L = m.torus_lengths()[i];
                    nbins_[i] = static_cast<int>(std::clamp(std::floor(L / rho), 1.0, 4096.0));
                    width_[i] = L / nbins_[i];
                }
                break;
            }
            case ManifoldKind::Sphere2: {
                dims_ = 3;
                wrap_ = false;
                double h = std::clamp(chord_of_arc(rho), 1e-4, 2.0);
                for (int i = 0; i < 3; ++i) {
                    // width >= chord(rho) keeps rho-queries within one ring
                    nbins_[i] = std::max(1, static_cast<int>(std::floor(2.0 / h)));
                    width_[i] = 2.0 / nbins_[i];
                }
                break;
            }
            case ManifoldKind::Mesh:
                throw InvalidInput("PointGrid: mesh lattices use the graph path");
        }
    }

    void insert(std::int32_t id, const Point& p) {
        cells_[cell_key(p)].push_back(static_cast<std::int32_t>(points_.size()));
        points_.push_back(p);
        ids_.push_back(id);
    }

    std::size_t size() const { return points_.size(); }

    /// True iff some inserted point lies at geodesic distance < r from p.
    bool any_closer_than(const Point& p, double r) const {
        bool found = false;
        visit_cells(p, r, [&](const std::vector<std::int32_t>& cell) {
            for (std::int32_t slot : cell)
                if (dist(p, points_[slot]) < r) {
                    found = true;
                    return true;
                }
            return false;
        });
        return found;
    }

    int count_within(const Point& p, double r) const {
        int count = 0;
        visit_cells(p, r, [&](const std::vector<std::int32_t>& cell) {
            for (std::int32_t slot : cell)
                if (dist(p, points_[slot]) <= r) ++count;
            return false;
        });
        return count;
    }

    /// Distance to the nearest inserted point via expanding ring search;
    /// `exclude` skips one slot (for nearest-other queries). +inf when empty.
    double nearest_distance(const Point& p, double start_radius, std::int32_t exclude = -1) const {
        if (points_.empty()) return kInf;
        double r = std::max(start_radius, width_[0]);
        double best = kInf;
        while (true) {
            visit_cells(p, r, [&](const std::vector<std::int32_t>& cell) {
                for (std::int32_t slot : cell)
                    if (slot != exclude) best = std::min(best, dist(p, points_[slot]));
                return false;
            });
            // A hit within r is definitely the nearest; beyond r a closer
            // point could hide in an unvisited cell, so widen and retry.
            if (best <= r || r >= m_->diameter()) return best;
            r = std::min(2.0 * r, m_->diameter() * 1.0000001);
        }
    }

    /// Calls fn(slot, distance) for every inserted point within r of p.
    template <class Fn>
    void for_each_within(const Point& p, double r, Fn&& fn) const {
        visit_cells(p, r, [&](const std::vector<std::int32_t>& cell) {
            for (std::int32_t slot : cell) {
                double d = dist(p, points_[slot]);
                if (d <= r) fn(slot, d);
            }
            return false;
        });
    }

    std::int32_t id_of(std::int32_t slot) const { return ids_[slot]; }
    const Point& point_of(std::int32_t slot) const { return points_[slot]; }

    double dist(const Point& a, const Point& b) const {
        switch (kind_) {
            case ManifoldKind::Circle: {
                double L = m_->circle_circumference();
                double d = std::fabs(a.c[0] - b.c[0]);
                return std::min(d, L - d);
            }
            case ManifoldKind::FlatTorus: {
                double s = 0.0;
                for (int i = 0; i < m_->dimension(); ++i) {
                    double d = std::fabs(a.c[i] - b.c[i]);
                    d = std::min(d, m_->torus_lengths()[i] - d);
                    s += d * d;
                }
                return std::sqrt(s);
            }
            case ManifoldKind::Sphere2: {
                double dot = a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
                double cx = a.c[1] * b.c[2] - a.c[2] * b.c[1];
                double cy = a.c[2] * b.c[0] - a.c[0] * b.c[2];
                double cz = a.c[0] * b.c[1] - a.c[1] * b.c[0];
                return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
            }
            default: return kInf;
        }
    }

private:
    std::array<double, 3> coords(const Point& p) const {
        if (kind_ == ManifoldKind::Sphere2)
            return {p.c[0] + 1.0, p.c[1] + 1.0, p.c[2] + 1.0}; // shift into [0,2]^3
        return p.c;
    }

    std::int64_t cell_key(const Point& p) const {
        auto c = coords(p);
        std::int64_t key = 0;
        for (int i = 0; i < dims_; ++i) {
            int b = static_cast<int>(std::floor(c[i] / width_[i]));
            b = std::clamp(b, 0, nbins_[i] - 1);
            key = key * 8192 + b;
        }
        return key;
    }

    // Visits every cell overlapping the ball B(p, r), center cell first so
    // early-exit callers (the greedy accept test) usually stop after one
    // lookup; fn returns true to stop.
    template <class Fn>
    void visit_cells(const Point& p, double r, Fn&& fn) const {
        double rr = kind_ == ManifoldKind::Sphere2 ? chord_of_arc(r) : r;
        auto c = coords(p);
        int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0}, base[3] = {0, 0, 0};
        for (int i = 0; i < dims_; ++i) {
            base[i] = std::clamp(static_cast<int>(std::floor(c[i] / width_[i])), 0, nbins_[i] - 1);
            // A ball of radius rr reaches at most ceil(rr/width) cells away.
            int span = std::max(1, static_cast<int>(std::ceil(rr / width_[i] - 1e-12)));
            if (wrap_ && 2 * span + 1 >= nbins_[i]) {
                lo[i] = -base[i];
                hi[i] = nbins_[i] - 1 - base[i];
            } else {
                lo[i] = -span;
                hi[i] = span;
            }
        }
        if (auto it = cells_.find(cell_key(p)); it != cells_.end())
            if (fn(it->second)) return;
        int idx[3];
        for (idx[0] = lo[0]; idx[0] <= hi[0]; ++idx[0])
            for (idx[1] = lo[1]; idx[1] <= hi[1]; ++idx[1])
                for (idx[2] = lo[2]; idx[2] <= hi[2]; ++idx[2]) {
                    if (idx[0] == 0 && idx[1] == 0 && idx[2] == 0) continue; // center done
                    std::int64_t key = 0;
                    bool valid = true;
                    for (int i = 0; i < dims_; ++i) {
                        int b = base[i] + idx[i];
                        if (wrap_) {
                            b %= nbins_[i];
                            if (b < 0) b += nbins_[i];
                        } else if (b < 0 || b >= nbins_[i]) {
                            valid = false;
                            break;
                        }
                        key = key * 8192 + b;
                    }
                    if (!valid) continue;
                    auto it = cells_.find(key);
                    if (it == cells_.end()) continue;
                    if (fn(it->second)) return;
                }
    }

    const ManifoldModel* m_;
    ManifoldKind kind_;
    int dims_ = 1;
    bool wrap_ = false;
    std::array<int, 3> nbins_{1, 1, 1};
    std::array<double, 3> width_{1.0, 1.0, 1.0};
    std::unordered_map<std::int64_t, std::vector<std::int32_t>> cells_;
    std::vector<Point> points_;
    std::vector<std::int32_t> ids_;
};

double packing_tolerance(const ManifoldModel& m) {
    if (m.is_mesh()) return m.mesh_data().max_edge_length;
    return 1e-9 * m.diameter();
}

// ---------------------------------------------------------------------------
// Greedy sweeps (analytic models)

std::vector<std::int32_t> shuffled_order(std::size_t n, std::uint64_t seed) {
    std::vector<std::int32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::int32_t>(i);
    CounterRng rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

std::vector<Point> greedy_analytic(double rho, const std::vector<Point>& pool,
                                   std::uint64_t seed, PointGrid& accepted) {
    std::vector<Point> out;
    auto order = shuffled_order(pool.size(), seed);
    for (std::int32_t i : order) {
        if (!accepted.any_closer_than(pool[i], rho)) {
            accepted.insert(static_cast<std::int32_t>(out.size()), pool[i]);
            out.push_back(pool[i]);
        }
    }
    return out;
}

// Farthest-point sampling, stopped when the selection radius drops below rho.
// Equivalent to the greedy sweep in farthest-first order; yields near-extremal
// (low) cardinalities. Lazy max-heap over pool distances-to-accepted, with
// updates confined to the ball of the selection radius around each new point.
std::vector<Point> fps_analytic(const ManifoldModel& m, double rho, const std::vector<Point>& pool,
                                PointGrid& accepted) {
    const std::size_t n = pool.size();
    PointGrid pool_grid(m, rho);
    for (std::size_t i = 0; i < n; ++i)
        pool_grid.insert(static_cast<std::int32_t>(i), pool[i]);

    std::vector<double> dist_to_acc(n, kInf);
    std::vector<Point> out;
    using Item = std::pair<double, std::int32_t>;
    std::priority_queue<Item> heap;

    auto accept = [&](std::int32_t i, double radius) {
        accepted.insert(static_cast<std::int32_t>(out.size()), pool[i]);
        out.push_back(pool[i]);
        pool_grid.for_each_within(pool[i], radius, [&](std::int32_t slot, double d) {
            if (d < dist_to_acc[slot]) {
                dist_to_acc[slot] = d;
                if (d >= rho) heap.push({d, slot});
            }
        });
    };

    accept(0, m.diameter() * 1.0000001);
    while (!heap.empty()) {
        auto [d, i] = heap.top();
        heap.pop();
        if (d != dist_to_acc[i]) { // stale entry
            if (dist_to_acc[i] >= rho) heap.push({dist_to_acc[i], i});
            continue;
        }
        if (d < rho) continue;
        accept(i, d);
        dist_to_acc[i] = 0.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mesh sweeps (graph distances)

std::vector<std::int32_t> pool_vertices(const std::vector<Point>& pool) {
    std::vector<std::int32_t> v(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) v[i] = pool[i].vertex;
    return v;
}

// Relaxes `nearest` with distances from `source`, stopping at `cutoff`
// (or when no entry improves).
void dijkstra_relax(const MeshData& mesh, std::int32_t source, double cutoff,
                    std::vector<double>& nearest) {
    using Item = std::pair<double, std::int32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    if (nearest[source] <= 0.0) return;
    nearest[source] = 0.0;
    heap.push({0.0, source});
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d > nearest[v]) continue;
        if (d > cutoff) break;
        for (std::int32_t e = mesh.adj_offset[v]; e < mesh.adj_offset[v + 1]; ++e) {
            std::int32_t u = mesh.adj_vertex[e];
            double nd = d + mesh.adj_length[e];
            if (nd < nearest[u]) {
                nearest[u] = nd;
                heap.push({nd, u});
            }
        }
    }
}

std::vector<Point> greedy_mesh(const ManifoldModel& m, double rho, const std::vector<Point>& pool,
                               std::uint64_t seed, SweepOrder order_kind) {
    const MeshData& mesh = m.mesh_data();
    std::vector<double> nearest(mesh.vertex_count(), kInf);
    std::vector<Point> out;
    auto verts = pool_vertices(pool);

    if (order_kind == SweepOrder::Shuffled) {
        auto order = shuffled_order(pool.size(), seed);
        for (std::int32_t i : order) {
            std::int32_t v = verts[i];
            if (nearest[v] >= rho) {
                out.push_back(pool[i]);
                dijkstra_relax(mesh, v, rho, nearest);
            }
        }
        return out;
    }
    // Farthest-point order: argmax over pool of distance-to-accepted.
    out.push_back(pool[0]);
    dijkstra_relax(mesh, verts[0], kInf, nearest);
    while (true) {
        double best = -1.0;
        std::int32_t arg = -1;
        for (std::size_t i = 0; i < verts.size(); ++i)
            if (nearest[verts[i]] > best) {
                best = nearest[verts[i]];
                arg = static_cast<std::int32_t>(i);
            }
        if (arg < 0 || best < rho) break;
        out.push_back(pool[arg]);
        dijkstra_relax(mesh, verts[arg], kInf, nearest);
    }
    return out;
}

LatticeDiagnostics diagnostics_impl(const ManifoldModel& m, double rho,
                                    const std::vector<Point>& points,
                                    const std::vector<Point>& test_points, std::uint64_t seed) {
    LatticeDiagnostics d;
    d.seed = seed;
    d.candidate_count = test_points.size();
    double tol = packing_tolerance(m);

    if (!m.is_mesh()) {
        PointGrid grid(m, rho);
        for (std::size_t i = 0; i < points.size(); ++i)
            grid.insert(static_cast<std::int32_t>(i), points[i]);

        double min_pair = kInf;
        for (std::size_t i = 0; i < points.size(); ++i)
            min_pair = std::min(min_pair,
                                grid.nearest_distance(points[i], rho, static_cast<std::int32_t>(i)));
        d.min_pairwise = min_pair;
        d.packing_ok = !(min_pair < rho - tol);

        double cover = 0.0;
        int mult = 0;
        for (const Point& t : test_points) {
            cover = std::max(cover, grid.nearest_distance(t, rho));
            mult = std::max(mult, grid.count_within(t, rho));
        }
        d.covering_radius = cover;
        d.multiplicity = mult;
        return d;
    }

    const MeshData& mesh = m.mesh_data();
    std::vector<std::int32_t> sources;
    sources.reserve(points.size());
    for (const Point& p : points) sources.push_back(p.vertex);

    // Min pairwise: per-source truncated sweep against the other sources.
    std::vector<bool> is_source(mesh.vertex_count(), false);
    for (auto s : sources) is_source[s] = true;
    double min_pair = kInf;
    for (auto s : sources) {
        auto dist = mesh.dijkstra(s, std::min(min_pair, 2.0 * rho));
        for (auto t : sources)
            if (t != s && dist[t] < min_pair) min_pair = dist[t];
    }
    d.min_pairwise = min_pair;
    d.packing_ok = !(min_pair < rho - tol);

    auto dist_all = mesh.dijkstra_multi(sources);
    double cover = 0.0;
    for (const Point& t : test_points) cover = std::max(cover, dist_all[t.vertex]);
    d.covering_radius = cover;

    // Multiplicity: accumulate per-source coverage counts within rho.
    std::vector<int> count(mesh.vertex_count(), 0);
    for (auto s : sources) {
        auto dist = mesh.dijkstra(s, rho);
        for (int v = 0; v < mesh.vertex_count(); ++v)
            if (dist[v] <= rho) ++count[v];
    }
    int mult = 0;
    for (const Point& t : test_points) mult = std::max(mult, count[t.vertex]);
    d.multiplicity = mult;
    return d;
}

} // namespace

// ---------------------------------------------------------------------------
// Public operations

Lattice build_lattice(const ManifoldModel& m, double rho, const std::vector<Point>& pool,
                      std::uint64_t seed, SweepOrder order) {
    if (!(rho > 0.0)) throw InvalidInput("build_lattice: rho must be positive");
    if (pool.empty()) throw InvalidInput("build_lattice: empty candidate pool");

    Lattice lat;
    lat.manifold = m;
    lat.rho = rho;
    if (m.is_mesh()) {
        lat.points = greedy_mesh(m, rho, pool, seed, order);
    } else {
        PointGrid accepted(m, rho);
        lat.points = order == SweepOrder::Shuffled ? greedy_analytic(rho, pool, seed, accepted)
                                                   : fps_analytic(m, rho, pool, accepted);
    }
    // Diagnostics use the pool as test set; above the cap, a deterministic
    // stride subsample keeps large scans affordable (covering radius is then
    // a lower estimate, already bounded by rho through greedy maximality).
    constexpr std::size_t kDiagnosticTestCap = 100000;
    if (pool.size() <= kDiagnosticTestCap) {
        lat.diagnostics = diagnostics_impl(m, rho, lat.points, pool, seed);
    } else {
        std::size_t stride = (pool.size() + kDiagnosticTestCap - 1) / kDiagnosticTestCap;
        std::vector<Point> subset;
        subset.reserve(pool.size() / stride + 1);
        for (std::size_t i = 0; i < pool.size(); i += stride) subset.push_back(pool[i]);
        lat.diagnostics = diagnostics_impl(m, rho, lat.points, subset, seed);
        lat.diagnostics.candidate_count = pool.size();
    }
    return lat;
}

Lattice lattice_from_points(const ManifoldModel& m, double rho, std::vector<Point> points,
                            const std::vector<Point>& test_points) {
    if (!(rho > 0.0)) throw InvalidInput("lattice_from_points: rho must be positive");
    if (points.empty()) throw InvalidInput("lattice_from_points: empty point set");
    for (const Point& p : points) m.validate_point(p);
    Lattice lat;
    lat.manifold = m;
    lat.rho = rho;
    lat.points = std::move(points);
    lat.diagnostics = diagnostics_impl(m, rho, lat.points, test_points, 0);
    return lat;
}

LatticeDiagnostics lattice_diagnostics(const Lattice& lat, const std::vector<Point>& test_points) {
    if (test_points.empty()) throw InvalidInput("lattice_diagnostics: empty test set");
    return diagnostics_impl(lat.manifold, lat.rho, lat.points, test_points, lat.diagnostics.seed);
}

std::size_t default_pool_size(const ManifoldModel& m, double rho) {
    double suggested = 50.0 * std::pow(m.diameter() / rho, m.dimension());
    double capped = std::min(suggested, 8.0e6); // keeps desk-scale runs in memory
    return static_cast<std::size_t>(std::max(1.0e4, capped));
}

LatticeExtremes lattice_extremes(const ManifoldModel& m, double rho, int trials,
                                 std::uint64_t base_seed) {
    if (trials < 1) throw InvalidInput("lattice_extremes: trials must be >= 1");
    auto pool = candidate_pool(m, default_pool_size(m, rho), base_seed);

    LatticeExtremes ext;
    ext.trials = trials;
    ext.min_card = std::numeric_limits<int>::max();
    ext.max_card = 0;
    auto consider = [&](Lattice&& lat) {
        int card = static_cast<int>(lat.points.size());
        ext.max_card = std::max(ext.max_card, card);
        if (card < ext.min_card) {
            ext.min_card = card;
            ext.min_lattice = std::move(lat);
        }
    };
    for (int t = 0; t < trials; ++t)
        consider(build_lattice(m, rho, pool, base_seed + 1000003ULL * (t + 1)));
    consider(build_lattice(m, rho, pool, base_seed, SweepOrder::FarthestPoint));
    return ext;
}

std::string lattice_to_json(const Lattice& lat) {
    nlohmann::json j;
    j["manifold"] = lat.manifold.describe();
    j["rho"] = lat.rho;
    j["seed"] = lat.diagnostics.seed;
    nlohmann::json pts = nlohmann::json::array();
    for (const Point& p : lat.points) {
        if (lat.manifold.is_mesh()) pts.push_back(p.vertex);
        else {
            std::vector<double> c;
            int nc = lat.manifold.kind() == ManifoldKind::Sphere2 ? 3 : lat.manifold.dimension();
            for (int i = 0; i < nc; ++i) c.push_back(p.c[i]);
            pts.push_back(c);
        }
    }
    j["points"] = pts;
    j["diagnostics"] = {{"packing_ok", lat.diagnostics.packing_ok},
                        {"min_pairwise", std::isfinite(lat.diagnostics.min_pairwise)
                                             ? nlohmann::json(lat.diagnostics.min_pairwise)
                                             : nlohmann::json()},
                        {"covering_radius", lat.diagnostics.covering_radius},
                        {"multiplicity", lat.diagnostics.multiplicity},
                        {"candidate_count", lat.diagnostics.candidate_count},
                        {"seed", lat.diagnostics.seed}};
    return j.dump(2);
}

std::string lattice_to_csv(const Lattice& lat) {
    std::ostringstream os;
    os.precision(17);
    if (lat.manifold.is_mesh()) {
        os << "vertex\n";
        for (const Point& p : lat.points) os << p.vertex << "\n";
        return os.str();
    }
    int nc = lat.manifold.kind() == ManifoldKind::Sphere2 ? 3 : lat.manifold.dimension();
    for (int i = 0; i < nc; ++i) os << (i ? "," : "") << "c" << i;
    os << "\n";
    for (const Point& p : lat.points) {
        for (int i = 0; i < nc; ++i) os << (i ? "," : "") << p.c[i];
        os << "\n";
    }
    return os.str();
}

} // namespace weylsampl
