// SPDX-License-Identifier: Apache-2.0
#include "weylsampl/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <sstream>

#include <Eigen/Geometry>

#include "weylsampl/errors.hpp"
#include "weylsampl/rng.hpp"

namespace weylsampl {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_delta(double a, double b, double period) {
    double d = std::fabs(a - b);
    d = std::fmod(d, period);
    return std::min(d, period - d);
}

// Area of the intersection of a disk of radius r centered at the origin with
// the axis-aligned rectangle [-a, a] x [-b, b]. Used for flat-torus balls that
// wrap around the fundamental domain.
double disk_rect_area(double r, double a, double b) {
    if (r <= 0.0) return 0.0;
    auto quarter = [](double r_, double a_, double b_) {
        // integral over x in [0, min(a, r)] of min(b, sqrt(r^2 - x^2))
        double xa = std::min(a_, r_);
        if (xa <= 0.0) return 0.0;
        auto circ = [&](double x0, double x1) {
            auto anti = [&](double x) {
                x = std::min(x, r_);
                return 0.5 * (x * std::sqrt(std::max(0.0, r_ * r_ - x * x)) +
                              r_ * r_ * std::asin(std::clamp(x / r_, -1.0, 1.0)));
            };
            return anti(x1) - anti(x0);
        };
        if (b_ >= r_) return circ(0.0, xa);
        double xb = std::sqrt(std::max(0.0, r_ * r_ - b_ * b_)); // circle crosses height b here
        if (xa <= xb) return b_ * xa;
        return b_ * xb + circ(xb, xa);
    };
    return 4.0 * quarter(r, a, b);
}

} // namespace

std::string kind_name(ManifoldKind k) {
    switch (k) {
        case ManifoldKind::Circle: return "circle";
        case ManifoldKind::FlatTorus: return "torus";
        case ManifoldKind::Sphere2: return "sphere";
        case ManifoldKind::Mesh: return "mesh";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// MeshData

double MeshData::edge_length(std::int32_t a, std::int32_t b) const {
    for (std::int32_t e = adj_offset[a]; e < adj_offset[a + 1]; ++e)
        if (adj_vertex[e] == b) return adj_length[e];
    throw InvalidInput("edge_length: vertices " + std::to_string(a) + " and " +
                       std::to_string(b) + " are not adjacent");
}

std::vector<double> MeshData::dijkstra(std::int32_t source, double cutoff) const {
    return dijkstra_multi({source}, cutoff);
}

std::vector<double> MeshData::dijkstra_multi(const std::vector<std::int32_t>& sources,
                                             double cutoff) const {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(vertices.size(), inf);
    using Item = std::pair<double, std::int32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::int32_t s : sources) {
        dist[s] = 0.0;
        heap.push({0.0, s});
    }
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        if (d > cutoff) break;
        for (std::int32_t e = adj_offset[v]; e < adj_offset[v + 1]; ++e) {
            std::int32_t u = adj_vertex[e];
            double nd = d + adj_length[e];
            if (nd < dist[u]) {
                dist[u] = nd;
                heap.push({nd, u});
            }
        }
    }
    return dist;
}

// ---------------------------------------------------------------------------
// ManifoldModel construction

ManifoldModel ManifoldModel::circle(double circumference) {
    if (!(circumference > 0.0)) throw InvalidInput("circle: circumference must be positive");
    ManifoldModel m;
    m.kind_ = ManifoldKind::Circle;
    m.dimension_ = 1;
    m.circumference_ = circumference;
    m.volume_ = circumference;
    m.injectivity_radius_ = circumference / 2.0;
    m.diameter_ = circumference / 2.0;
    return m;
}

ManifoldModel ManifoldModel::flat_torus(std::vector<double> lengths) {
    if (lengths.empty() || lengths.size() > 3)
        throw InvalidInput("flat_torus: supported dimensions are 1, 2 and 3");
    double vol = 1.0, mn = std::numeric_limits<double>::infinity(), diam2 = 0.0;
    for (double L : lengths) {
        if (!(L > 0.0)) throw InvalidInput("flat_torus: side lengths must be positive");
        vol *= L;
        mn = std::min(mn, L);
        diam2 += (L / 2.0) * (L / 2.0);
    }
    ManifoldModel m;
    m.kind_ = ManifoldKind::FlatTorus;
    m.dimension_ = static_cast<int>(lengths.size());
    m.torus_lengths_ = std::move(lengths);
    m.volume_ = vol;
    m.injectivity_radius_ = mn / 2.0;
    m.diameter_ = std::sqrt(diam2);
    return m;
}

ManifoldModel ManifoldModel::sphere() {
    ManifoldModel m;
    m.kind_ = ManifoldKind::Sphere2;
    m.dimension_ = 2;
    m.volume_ = 4.0 * kPi;
    m.injectivity_radius_ = kPi;
    m.diameter_ = kPi;
    return m;
}

namespace {

std::shared_ptr<MeshData> build_mesh_data(
    std::vector<Eigen::Vector3d> vertices,
    std::vector<std::array<std::int32_t, 3>> triangles,
    const std::function<double(std::int32_t, std::int32_t)>* length_fn) {
    auto mesh = std::make_shared<MeshData>();
    mesh->vertices = std::move(vertices);
    mesh->triangles = std::move(triangles);
    const int nv = mesh->vertex_count();
    if (nv < 3 || mesh->triangles.empty())
        throw InvalidInput("mesh: need at least 3 vertices and 1 triangle");

    std::map<std::pair<std::int32_t, std::int32_t>, double> edges;
    auto edge_len = [&](std::int32_t a, std::int32_t b) {
        if (length_fn) return (*length_fn)(a, b);
        return (mesh->vertices[a] - mesh->vertices[b]).norm();
    };
    for (const auto& t : mesh->triangles) {
        for (int i = 0; i < 3; ++i) {
            if (t[i] < 0 || t[i] >= nv)
                throw InvalidInput("mesh: triangle references invalid vertex " +
                                   std::to_string(t[i]));
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw InvalidInput("mesh: triangle with repeated vertex");
        for (int i = 0; i < 3; ++i) {
            std::int32_t a = t[i], b = t[(i + 1) % 3];
            auto key = std::minmax(a, b);
            double len = edge_len(key.first, key.second);
            if (!(len > 0.0)) throw InvalidInput("mesh: non-positive edge length");
            edges.emplace(std::pair{key.first, key.second}, len);
        }
    }

    // Triangle areas from edge lengths (Heron); rejects degenerate triangles.
    mesh->tri_area.resize(mesh->triangles.size());
    mesh->lumped_mass.assign(nv, 0.0);
    double scale2 = 0.0;
    for (const auto& [key, len] : edges) scale2 = std::max(scale2, len * len);
    for (std::size_t ti = 0; ti < mesh->triangles.size(); ++ti) {
        const auto& t = mesh->triangles[ti];
        double a = edges.at(std::minmax(t[1], t[2]));
        double b = edges.at(std::minmax(t[0], t[2]));
        double c = edges.at(std::minmax(t[0], t[1]));
        double s = 0.5 * (a + b + c);
        double h2 = s * (s - a) * (s - b) * (s - c);
        double area = h2 > 0.0 ? std::sqrt(h2) : 0.0;
        if (!(area > 1e-12 * scale2))
            throw InvalidInput("mesh: degenerate (zero-area) triangle at index " +
                               std::to_string(ti));
        mesh->tri_area[ti] = area;
        for (int i = 0; i < 3; ++i) mesh->lumped_mass[t[i]] += area / 3.0;
        mesh->total_area += area;
    }

    // CSR adjacency.
    std::vector<std::vector<std::pair<std::int32_t, double>>> adj(nv);
    for (const auto& [key, len] : edges) {
        adj[key.first].push_back({key.second, len});
        adj[key.second].push_back({key.first, len});
    }
    mesh->adj_offset.assign(nv + 1, 0);
    mesh->min_edge_length = std::numeric_limits<double>::infinity();
    for (int v = 0; v < nv; ++v) {
        std::sort(adj[v].begin(), adj[v].end());
        mesh->adj_offset[v + 1] = mesh->adj_offset[v] + static_cast<std::int32_t>(adj[v].size());
        for (auto [u, len] : adj[v]) {
            mesh->adj_vertex.push_back(u);
            mesh->adj_length.push_back(len);
            mesh->min_edge_length = std::min(mesh->min_edge_length, len);
            mesh->max_edge_length = std::max(mesh->max_edge_length, len);
        }
    }

    // Edge-connectivity check via one sweep.
    auto d0 = mesh->dijkstra(0);
    for (int v = 0; v < nv; ++v)
        if (!std::isfinite(d0[v])) throw InvalidInput("mesh: not edge-connected");

    // Two-sweep diameter estimate.
    auto far0 = static_cast<std::int32_t>(std::max_element(d0.begin(), d0.end()) - d0.begin());
    auto d1 = mesh->dijkstra(far0);
    mesh->diameter_estimate = *std::max_element(d1.begin(), d1.end());
    return mesh;
}

} // namespace

ManifoldModel ManifoldModel::mesh(std::vector<Eigen::Vector3d> vertices,
                                  std::vector<std::array<std::int32_t, 3>> triangles,
                                  std::optional<double> injectivity_override) {
    ManifoldModel m;
    m.kind_ = ManifoldKind::Mesh;
    m.dimension_ = 2;
    m.mesh_ = build_mesh_data(std::move(vertices), std::move(triangles), nullptr);
    m.volume_ = m.mesh_->total_area;
    m.diameter_ = m.mesh_->diameter_estimate;
    // Injectivity radius is not well-defined discretely; diameter/4 is a
    // conservative stand-in, overridable from config.
    m.injectivity_radius_ = injectivity_override.value_or(m.diameter_ / 4.0);
    if (!(m.injectivity_radius_ > 0.0))
        throw InvalidInput("mesh: injectivity radius override must be positive");
    return m;
}

ManifoldModel ManifoldModel::mesh_intrinsic(
    std::vector<Eigen::Vector3d> vertices, std::vector<std::array<std::int32_t, 3>> triangles,
    const std::function<double(std::int32_t, std::int32_t)>& length_fn,
    std::optional<double> injectivity_override) {
    ManifoldModel m;
    m.kind_ = ManifoldKind::Mesh;
    m.dimension_ = 2;
    m.mesh_ = build_mesh_data(std::move(vertices), std::move(triangles), &length_fn);
    m.volume_ = m.mesh_->total_area;
    m.diameter_ = m.mesh_->diameter_estimate;
    m.injectivity_radius_ = injectivity_override.value_or(m.diameter_ / 4.0);
    if (!(m.injectivity_radius_ > 0.0))
        throw InvalidInput("mesh: injectivity radius override must be positive");
    return m;
}

double ManifoldModel::circle_circumference() const {
    if (kind_ != ManifoldKind::Circle) throw UnsupportedModel("not a circle model");
    return circumference_;
}

const std::vector<double>& ManifoldModel::torus_lengths() const {
    if (kind_ != ManifoldKind::FlatTorus) throw UnsupportedModel("not a torus model");
    return torus_lengths_;
}

const MeshData& ManifoldModel::mesh_data() const {
    if (kind_ != ManifoldKind::Mesh) throw UnsupportedModel("not a mesh model");
    return *mesh_;
}

std::string ManifoldModel::describe() const {
    std::ostringstream os;
    os.precision(6);
    switch (kind_) {
        case ManifoldKind::Circle: os << "circle(L=" << circumference_ << ")"; break;
        case ManifoldKind::FlatTorus: {
            os << "torus(";
            for (std::size_t i = 0; i < torus_lengths_.size(); ++i)
                os << (i ? "x" : "") << torus_lengths_[i];
            os << ")";
            break;
        }
        case ManifoldKind::Sphere2: os << "sphere"; break;
        case ManifoldKind::Mesh:
            os << "mesh(V=" << mesh_->vertex_count() << ",F=" << mesh_->triangle_count() << ")";
            break;
    }
    return os.str();
}

void ManifoldModel::validate_point(const Point& p) const {
    switch (kind_) {
        case ManifoldKind::Circle:
            if (!(p.c[0] >= 0.0 && p.c[0] < circumference_))
                throw InvalidInput("point out of domain: circle arclength must be in [0, L)");
            return;
        case ManifoldKind::FlatTorus:
            for (int i = 0; i < dimension_; ++i)
                if (!(p.c[i] >= 0.0 && p.c[i] < torus_lengths_[i]))
                    throw InvalidInput("point out of domain: torus coordinate out of [0, L_i)");
            return;
        case ManifoldKind::Sphere2: {
            double n2 = p.c[0] * p.c[0] + p.c[1] * p.c[1] + p.c[2] * p.c[2];
            if (std::fabs(std::sqrt(n2) - 1.0) > 1e-12)
                throw InvalidInput("point out of domain: sphere point must have unit norm");
            return;
        }
        case ManifoldKind::Mesh:
            if (p.vertex < 0 || p.vertex >= mesh_->vertex_count())
                throw InvalidInput("point out of domain: mesh vertex index out of range");
            return;
    }
}

// ---------------------------------------------------------------------------
// Operations

double QuadratureRule::weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

double geodesic_distance(const ManifoldModel& m, const Point& x, const Point& y) {
    m.validate_point(x);
    m.validate_point(y);
    switch (m.kind()) {
        case ManifoldKind::Circle:
            return wrap_delta(x.c[0], y.c[0], m.circle_circumference());
        case ManifoldKind::FlatTorus: {
            double s = 0.0;
            for (int i = 0; i < m.dimension(); ++i) {
                double d = wrap_delta(x.c[i], y.c[i], m.torus_lengths()[i]);
                s += d * d;
            }
            return std::sqrt(s);
        }
        case ManifoldKind::Sphere2: {
            Eigen::Vector3d a(x.c[0], x.c[1], x.c[2]), b(y.c[0], y.c[1], y.c[2]);
            return std::atan2(a.cross(b).norm(), a.dot(b));
        }
        case ManifoldKind::Mesh: {
            if (x.vertex == y.vertex) return 0.0;
            auto d = m.mesh_data().dijkstra(x.vertex);
            return d[y.vertex];
        }
    }
    return 0.0;
}

double ball_volume(const ManifoldModel& m, const Point& x, double rho) {
    if (!(rho > 0.0)) throw InvalidInput("ball_volume: rho must be positive");
    m.validate_point(x);
    switch (m.kind()) {
        case ManifoldKind::Circle:
            return std::min(2.0 * rho, m.circle_circumference());
        case ManifoldKind::FlatTorus: {
            const auto& L = m.torus_lengths();
            if (m.dimension() == 1) return std::min(2.0 * rho, L[0]);
            if (m.dimension() == 2) return disk_rect_area(rho, L[0] / 2.0, L[1] / 2.0);
            // d = 3: closed form only below the injectivity radius.
            double mn = *std::min_element(L.begin(), L.end());
            if (rho < mn / 2.0) return 4.0 / 3.0 * kPi * rho * rho * rho;
            throw InvalidInput("ball_volume: no closed form for 3-torus balls with rho >= min(L)/2");
        }
        case ManifoldKind::Sphere2:
            return 2.0 * kPi * (1.0 - std::cos(std::min(rho, kPi)));
        case ManifoldKind::Mesh: {
            auto d = m.mesh_data().dijkstra(x.vertex, rho);
            double vol = 0.0;
            for (int v = 0; v < m.mesh_data().vertex_count(); ++v)
                if (d[v] <= rho) vol += m.mesh_data().lumped_mass[v];
            return vol;
        }
    }
    return 0.0;
}

BallConstants ball_constants(const ManifoldModel& m, const std::vector<double>& rho_grid,
                             int n_centers, std::uint64_t seed) {
    if (rho_grid.empty()) throw InvalidInput("ball_constants: empty rho grid");
    for (double r : rho_grid)
        if (!(r > 0.0 && r < m.injectivity_radius()))
            throw InvalidInput("ball_constants: rho values must lie in (0, injectivity radius)");

    // The analytic models are homogeneous, so one center suffices there.
    int centers = m.is_mesh() ? n_centers : 1;
    auto xs = candidate_pool(m, static_cast<std::size_t>(centers), seed);

    const int d = m.dimension();
    BallConstants out;
    out.a1 = std::numeric_limits<double>::infinity();
    out.a2 = 0.0;
    std::vector<std::vector<double>> vols(xs.size());
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
        vols[xi].resize(rho_grid.size());
        for (std::size_t ri = 0; ri < rho_grid.size(); ++ri) {
            double v = ball_volume(m, xs[xi], rho_grid[ri]);
            vols[xi][ri] = v;
            double ratio = v / std::pow(rho_grid[ri], d);
            out.a1 = std::min(out.a1, ratio);
            out.a2 = std::max(out.a2, ratio);
        }
    }
    // Minimal doubling constant over sampled (sigma < lambda) pairs; the
    // degenerate sigma = lambda pair forces c >= 1.
    out.c = 1.0;
    for (std::size_t xi = 0; xi < xs.size(); ++xi)
        for (std::size_t i = 0; i < rho_grid.size(); ++i)
            for (std::size_t j = 0; j < rho_grid.size(); ++j) {
                if (!(rho_grid[i] < rho_grid[j])) continue;
                double need = vols[xi][j] * std::pow(rho_grid[i] / rho_grid[j], d) / vols[xi][i];
                out.c = std::max(out.c, need);
            }
    out.n_mult = std::pow(12.0, d) * out.c * out.a2 / out.a1;
    return out;
}

QuadratureRule quadrature(const ManifoldModel& m, int resolution) {
    if (resolution < 1) throw InvalidInput("quadrature: resolution must be >= 1");
    QuadratureRule q;
    switch (m.kind()) {
        case ManifoldKind::Circle: {
            double L = m.circle_circumference();
            double w = L / resolution;
            for (int i = 0; i < resolution; ++i) {
                q.nodes.push_back(Point::circle(i * w));
                q.weights.push_back(w);
            }
            return q;
        }
        case ManifoldKind::FlatTorus: {
            const auto& L = m.torus_lengths();
            int d = m.dimension();
            std::vector<int> idx(d, 0);
            double w = m.volume() / std::pow(resolution, d);
            while (true) {
                Point p;
                for (int i = 0; i < d; ++i) p.c[i] = idx[i] * L[i] / resolution;
                q.nodes.push_back(p);
                q.weights.push_back(w);
                int i = 0;
                for (; i < d; ++i) {
                    if (++idx[i] < resolution) break;
                    idx[i] = 0;
                }
                if (i == d) break;
            }
            return q;
        }
        case ManifoldKind::Sphere2: {
            std::vector<double> gl_x, gl_w;
            gauss_legendre(resolution, gl_x, gl_w);
            int nphi = 2 * resolution;
            double wphi = 2.0 * kPi / nphi;
            for (int i = 0; i < resolution; ++i) {
                double ct = gl_x[i];
                double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                for (int j = 0; j < nphi; ++j) {
                    double phi = j * wphi;
                    q.nodes.push_back(Point::sphere(st * std::cos(phi), st * std::sin(phi), ct));
                    q.weights.push_back(gl_w[i] * wphi);
                }
            }
            return q;
        }
        case ManifoldKind::Mesh: {
            const auto& mesh = m.mesh_data();
            for (int v = 0; v < mesh.vertex_count(); ++v) {
                q.nodes.push_back(Point::mesh_vertex(v));
                q.weights.push_back(mesh.lumped_mass[v]);
            }
            return q;
        }
    }
    return q;
}

std::vector<Point> candidate_pool(const ManifoldModel& m, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw InvalidInput("candidate_pool: n must be >= 1");
    std::vector<Point> pool;
    CounterRng rng(seed);
    switch (m.kind()) {
        case ManifoldKind::Circle: {
            pool.reserve(n);
            double L = m.circle_circumference();
            for (std::size_t i = 0; i < n; ++i) pool.push_back(Point::circle(rng.uniform() * L));
            return pool;
        }
        case ManifoldKind::FlatTorus: {
            pool.reserve(n);
            const auto& L = m.torus_lengths();
            for (std::size_t i = 0; i < n; ++i) {
                Point p;
                for (int k = 0; k < m.dimension(); ++k) p.c[k] = rng.uniform() * L[k];
                pool.push_back(p);
            }
            return pool;
        }
        case ManifoldKind::Sphere2: {
            pool.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                double x, y, z, norm;
                do {
                    x = rng.normal();
                    y = rng.normal();
                    z = rng.normal();
                    norm = std::sqrt(x * x + y * y + z * z);
                } while (norm < 1e-12);
                pool.push_back(Point::sphere(x / norm, y / norm, z / norm));
            }
            return pool;
        }
        case ManifoldKind::Mesh: {
            const auto& mesh = m.mesh_data();
            std::size_t nv = static_cast<std::size_t>(mesh.vertex_count());
            if (n >= nv) {
                pool.reserve(nv);
                for (std::size_t v = 0; v < nv; ++v)
                    pool.push_back(Point::mesh_vertex(static_cast<std::int32_t>(v)));
                return pool;
            }
            // Mass-weighted subsample without replacement (Efraimidis-Spirakis
            // keys u^(1/w), keep the n largest).
            std::vector<std::pair<double, std::int32_t>> keys(nv);
            for (std::size_t v = 0; v < nv; ++v) {
                double u = std::max(rng.uniform(), 1e-300);
                keys[v] = {std::log(u) / mesh.lumped_mass[v], static_cast<std::int32_t>(v)};
            }
            std::partial_sort(keys.begin(), keys.begin() + n, keys.end(),
                              [](const auto& a, const auto& b) { return a.first > b.first; });
            std::vector<std::int32_t> chosen(n);
            for (std::size_t i = 0; i < n; ++i) chosen[i] = keys[i].second;
            std::sort(chosen.begin(), chosen.end());
            pool.reserve(n);
            for (auto v : chosen) pool.push_back(Point::mesh_vertex(v));
            return pool;
        }
    }
    return pool;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    // Newton iteration from Chebyshev initial guesses; symmetric pairs share work.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

} // namespace weylsampl
