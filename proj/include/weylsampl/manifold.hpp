// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "weylsampl/point.hpp"

namespace weylsampl {

enum class ManifoldKind { Circle, FlatTorus, Sphere2, Mesh };

std::string kind_name(ManifoldKind k);

/// Triangle mesh with precomputed connectivity and metric quantities.
/// Edge lengths default to Euclidean distances between vertex positions but
/// may be overridden with intrinsic lengths (the cotangent weights, triangle
/// areas and graph distances are all derived from lengths alone).
struct MeshData {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<std::int32_t, 3>> triangles;

    // CSR vertex adjacency with per-entry edge length.
    std::vector<std::int32_t> adj_offset;
    std::vector<std::int32_t> adj_vertex;
    std::vector<double> adj_length;

    std::vector<double> tri_area;    // per triangle
    std::vector<double> lumped_mass; // per vertex: one third of incident areas
    double total_area = 0.0;
    double min_edge_length = 0.0;
    double max_edge_length = 0.0;
    double diameter_estimate = 0.0;  // two-sweep Dijkstra estimate

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }

    /// Length of edge (a, b); throws InvalidInput if not adjacent.
    double edge_length(std::int32_t a, std::int32_t b) const;

    /// Single-source graph distances (Dijkstra over edges). Entries beyond
    /// `cutoff` may remain +inf.
    std::vector<double> dijkstra(std::int32_t source,
                                 double cutoff = std::numeric_limits<double>::infinity()) const;

    /// Multi-source variant: distance to the nearest of `sources`.
    std::vector<double> dijkstra_multi(const std::vector<std::int32_t>& sources,
                                       double cutoff = std::numeric_limits<double>::infinity()) const;
};

/// A compact manifold model: one of three analytic homogeneous models or a
/// triangle mesh. Immutable after construction; cheap to copy (mesh data is
/// shared). All member queries are pure.
class ManifoldModel {
public:
    /// Empty model; assign a factory result before use.
    ManifoldModel() = default;

    static ManifoldModel circle(double circumference);
    static ManifoldModel flat_torus(std::vector<double> lengths); // d = 1, 2 or 3
    static ManifoldModel sphere();                                // unit 2-sphere

    /// Builds a mesh model. Validates indices, rejects degenerate (zero-area)
    /// triangles and edge-disconnected meshes.
    static ManifoldModel mesh(std::vector<Eigen::Vector3d> vertices,
                              std::vector<std::array<std::int32_t, 3>> triangles,
                              std::optional<double> injectivity_override = std::nullopt);

    /// Same, but edge lengths come from `length_fn(a, b)` instead of vertex
    /// positions (intrinsic metric; positions are kept for I/O only).
    static ManifoldModel mesh_intrinsic(std::vector<Eigen::Vector3d> vertices,
                                        std::vector<std::array<std::int32_t, 3>> triangles,
                                        const std::function<double(std::int32_t, std::int32_t)>& length_fn,
                                        std::optional<double> injectivity_override = std::nullopt);

    ManifoldKind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    double volume() const { return volume_; }
    double injectivity_radius() const { return injectivity_radius_; }
    double diameter() const { return diameter_; }

    double circle_circumference() const;
    const std::vector<double>& torus_lengths() const;
    const MeshData& mesh_data() const;
    bool is_mesh() const { return kind_ == ManifoldKind::Mesh; }

    /// Short identifier for reports, e.g. "circle(L=6.2832)".
    std::string describe() const;

    /// Throws InvalidInput when p is not a valid point of this model.
    void validate_point(const Point& p) const;

private:
    ManifoldKind kind_ = ManifoldKind::Circle;
    int dimension_ = 1;
    double volume_ = 0.0;
    double injectivity_radius_ = 0.0;
    double diameter_ = 0.0;
    double circumference_ = 0.0;
    std::vector<double> torus_lengths_;
    std::shared_ptr<const MeshData> mesh_;
};

struct QuadratureRule {
    std::vector<Point> nodes;
    std::vector<double> weights;
    double weight_sum() const;
};

/// Fitted ball-volume constants over a rho grid: a1 <= |B(x,rho)|/rho^d <= a2,
/// doubling constant c, and the derived cover-multiplicity bound
/// N_M = 12^d * c * a2 / a1.
struct BallConstants {
    double a1 = 0.0;
    double a2 = 0.0;
    double c = 1.0;
    double n_mult = 0.0;
};

/// Geodesic distance d(x, y). Mesh points are vertices; distances are
/// shortest paths over the edge graph.
double geodesic_distance(const ManifoldModel& m, const Point& x, const Point& y);

/// Riemannian volume of the ball B(x, rho). Closed forms for the analytic
/// models; on meshes, the lumped mass of vertices within graph distance rho.
double ball_volume(const ManifoldModel& m, const Point& x, double rho);

/// Empirical ball constants over the given rho grid (all in (0, injectivity
/// radius)), sampled over `n_centers` seeded center points.
BallConstants ball_constants(const ManifoldModel& m, const std::vector<double>& rho_grid,
                             int n_centers = 16, std::uint64_t seed = 1);

/// Quadrature rules: Circle/FlatTorus trapezoid (exact for band < resolution),
/// Sphere2 Gauss-Legendre x trapezoid product (exact for harmonics of degree
/// < resolution), Mesh lumped vertex masses.
QuadratureRule quadrature(const ManifoldModel& m, int resolution);

/// n points drawn uniformly w.r.t. the Riemannian measure, deterministic in
/// seed. Mesh: all vertices when n >= vertex count, else a mass-weighted
/// subsample without replacement.
std::vector<Point> candidate_pool(const ManifoldModel& m, std::size_t n, std::uint64_t seed);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace weylsampl
