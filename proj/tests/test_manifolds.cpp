// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "support/oracles.hpp"
#include "support/test_meshes.hpp"
#include "weylsampl/errors.hpp"
#include "weylsampl/manifold.hpp"
#include "weylsampl/off_io.hpp"
#include "weylsampl/rng.hpp"

using namespace weylsampl;

namespace {
constexpr double kPi = std::numbers::pi;
const ManifoldModel kCircle = ManifoldModel::circle(2.0 * kPi);
const ManifoldModel kTorus = ManifoldModel::flat_torus({1.0, 1.0});
const ManifoldModel kSphere = ManifoldModel::sphere();
} // namespace

TEST_CASE("geodesic distances on the analytic models") {
    CHECK(geodesic_distance(kCircle, Point::circle(0.0), Point::circle(kPi)) == doctest::Approx(kPi));
    CHECK(geodesic_distance(kSphere, Point::sphere(0, 0, 1), Point::sphere(0, 0, -1)) ==
          doctest::Approx(kPi));
    // wrap-around is shorter
    CHECK(geodesic_distance(kTorus, Point::torus2(0.0, 0.0), Point::torus2(0.6, 0.0)) ==
          doctest::Approx(0.4));
    CHECK(geodesic_distance(kCircle, Point::circle(1.0), Point::circle(1.0)) == 0.0);
    CHECK_THROWS_AS(geodesic_distance(kCircle, Point::circle(-1.0), Point::circle(0.0)),
                    InvalidInput);
    CHECK_THROWS_AS(geodesic_distance(kSphere, Point::sphere(0, 0, 2), Point::sphere(0, 0, 1)),
                    InvalidInput);
}

TEST_CASE("triangle inequality holds for random triples") {
    CounterRng rng(42);
    for (const ManifoldModel& m : {kCircle, kTorus, kSphere}) {
        auto pts = candidate_pool(m, 30, 7);
        for (int t = 0; t < 200; ++t) {
            const Point& a = pts[rng.uniform_below(pts.size())];
            const Point& b = pts[rng.uniform_below(pts.size())];
            const Point& c = pts[rng.uniform_below(pts.size())];
            CHECK(geodesic_distance(m, a, c) <=
                  geodesic_distance(m, a, b) + geodesic_distance(m, b, c) + 1e-10);
        }
    }
}

TEST_CASE("ball volumes: closed forms") {
    CHECK(ball_volume(kCircle, Point::circle(0.3), 0.5) == doctest::Approx(1.0));
    CHECK(ball_volume(kSphere, Point::sphere(1, 0, 0), kPi) == doctest::Approx(4.0 * kPi));
    CHECK(ball_volume(kTorus, Point::torus2(0.5, 0.5), 0.1) ==
          doctest::Approx(kPi * 0.01).epsilon(1e-12));
    CHECK_THROWS_AS(ball_volume(kCircle, Point::circle(0.0), 0.0), InvalidInput);
    CHECK_THROWS_AS(ball_volume(kCircle, Point::circle(0.0), -0.1), InvalidInput);
}

TEST_CASE("torus ball volume handles wrap-around (disk-rectangle area)") {
    // Monte-Carlo oracle for the wrapped ball area on the unit square torus.
    CounterRng rng(5);
    for (double rho : {0.3, 0.55, 0.8}) {
        int hits = 0;
        const int n = 400000;
        for (int i = 0; i < n; ++i) {
            double x = rng.uniform(), y = rng.uniform();
            double dx = std::min(x, 1.0 - x), dy = std::min(y, 1.0 - y);
            if (dx * dx + dy * dy <= rho * rho) ++hits;
        }
        double mc = static_cast<double>(hits) / n;
        double exact = ball_volume(kTorus, Point::torus2(0.2, 0.9), rho);
        CHECK(exact == doctest::Approx(mc).epsilon(0.02));
    }
    // full torus once rho reaches the far corner
    CHECK(ball_volume(kTorus, Point::torus2(0, 0), 0.75) == doctest::Approx(1.0));
}

TEST_CASE("ball volume is nondecreasing in rho and bounded by the volume") {
    for (const ManifoldModel& m : {kCircle, kTorus, kSphere}) {
        Point x = candidate_pool(m, 1, 3)[0];
        double prev = 0.0;
        for (double rho = 0.05; rho < 1.2 * m.diameter(); rho += 0.05) {
            double v = ball_volume(m, x, rho);
            CHECK(v >= prev - 1e-12);
            CHECK(v <= m.volume() + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("ball constants on the circle: a1 = a2 = 2, c = 1, N_M = 12") {
    auto bc = ball_constants(kCircle, {0.1, 0.5, 1.0});
    CHECK(bc.a1 == doctest::Approx(2.0));
    CHECK(bc.a2 == doctest::Approx(2.0));
    CHECK(bc.c == doctest::Approx(1.0));
    CHECK(bc.n_mult == doctest::Approx(12.0));
}

TEST_CASE("ball constants on the flat torus: a1 = a2 = pi, N_M = 144") {
    auto bc = ball_constants(kTorus, {0.05, 0.2});
    CHECK(bc.a1 == doctest::Approx(kPi));
    CHECK(bc.a2 == doctest::Approx(kPi));
    CHECK(bc.c == doctest::Approx(1.0));
    CHECK(bc.n_mult == doctest::Approx(144.0));
}

TEST_CASE("ball constants on the sphere match 2 pi (1 - cos rho) / rho^2") {
    auto ratio = [](double rho) { return 2.0 * kPi * (1.0 - std::cos(rho)) / (rho * rho); };
    auto bc = ball_constants(kSphere, {0.1, 1.0});
    CHECK(bc.a1 == doctest::Approx(ratio(1.0)));  // ~2.8884, the min on this grid
    CHECK(bc.a2 == doctest::Approx(ratio(0.1)));  // ~3.1413
    CHECK(bc.c >= 1.0);
    CHECK(bc.n_mult == doctest::Approx(144.0 * bc.c * bc.a2 / bc.a1));
    CHECK_THROWS_AS(ball_constants(kSphere, {}), InvalidInput);
    CHECK_THROWS_AS(ball_constants(kSphere, {4.0}), InvalidInput); // above injectivity radius
}

TEST_CASE("two-point ball comparability (a1/a2 sandwich)") {
    for (const ManifoldModel& m : {kCircle, kTorus, kSphere}) {
        std::vector<double> grid;
        for (double r = 0.1; r < m.injectivity_radius(); r += 0.2) grid.push_back(r);
        auto bc = ball_constants(m, grid);
        auto pts = candidate_pool(m, 10, 11);
        for (double rho : grid)
            for (std::size_t i = 0; i < pts.size(); ++i)
                for (std::size_t j = 0; j < pts.size(); ++j) {
                    double vi = ball_volume(m, pts[i], rho);
                    double vj = ball_volume(m, pts[j], rho);
                    CHECK(vi >= bc.a1 / bc.a2 * vj - 1e-12);
                    CHECK(vi <= bc.a2 / bc.a1 * vj + 1e-12);
                }
    }
}

TEST_CASE("quadrature: circle trapezoid nodes and weights") {
    auto q = quadrature(kCircle, 4);
    REQUIRE(q.nodes.size() == 4);
    CHECK(q.nodes[1].c[0] == doctest::Approx(kPi / 2));
    CHECK(q.nodes[2].c[0] == doctest::Approx(kPi));
    for (double w : q.weights) CHECK(w == doctest::Approx(kPi / 2));
}

TEST_CASE("quadrature weight sums equal the volume") {
    CHECK(quadrature(kSphere, 8).weight_sum() == doctest::Approx(4.0 * kPi).epsilon(1e-12));
    auto qt = quadrature(kTorus, 10);
    CHECK(qt.nodes.size() == 100);
    for (double w : qt.weights) CHECK(w == doctest::Approx(0.01));
    CHECK_THROWS_AS(quadrature(kCircle, 0), InvalidInput);
}

TEST_CASE("circle resolution-64 trapezoid integrates cos(kx)cos(mx) exactly for k,m <= 31") {
    auto q = quadrature(kCircle, 64);
    for (int k = 0; k <= 31; k += 7)
        for (int m = 0; m <= 31; m += 5) {
            double sum = 0.0;
            for (std::size_t i = 0; i < q.nodes.size(); ++i)
                sum += q.weights[i] * std::cos(k * q.nodes[i].c[0]) * std::cos(m * q.nodes[i].c[0]);
            double expect = k == m ? (k == 0 ? 2.0 * kPi : kPi) : 0.0;
            CHECK(sum == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
        }
}

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
    std::vector<double> x, w;
    gauss_legendre(8, x, w);
    double s = 0.0;
    for (double wi : w) s += wi;
    CHECK(s == doctest::Approx(2.0));
    for (int p = 0; p <= 15; ++p) {
        double integral = 0.0;
        for (int i = 0; i < 8; ++i) integral += w[i] * std::pow(x[i], p);
        double exact = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
        CHECK(integral == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("candidate pools are deterministic in the seed") {
    for (const ManifoldModel& m : {kCircle, kTorus, kSphere}) {
        auto a = candidate_pool(m, 3, 7);
        auto b = candidate_pool(m, 3, 7);
        auto c = candidate_pool(m, 3, 8);
        REQUIRE(a.size() == 3);
        bool same = true, differs = false;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) {
                same = same && a[i].c[k] == b[i].c[k];
                differs = differs || a[i].c[k] != c[i].c[k];
            }
        CHECK(same);
        CHECK(differs);
    }
}

TEST_CASE("sphere pool concentration: mean of 10000 uniform points is near zero") {
    auto pts = candidate_pool(kSphere, 10000, 1);
    double mx = 0, my = 0, mz = 0;
    for (const Point& p : pts) {
        mx += p.c[0];
        my += p.c[1];
        mz += p.c[2];
        CHECK(std::fabs(std::hypot(p.c[0], p.c[1], p.c[2]) - 1.0) <= 1e-12);
    }
    double n = static_cast<double>(pts.size());
    CHECK(std::hypot(mx / n, my / n, mz / n) <= 0.05);
}

TEST_CASE("mesh candidate pool caps at the vertex set") {
    auto m = test_meshes::icosphere_model(2); // 162 vertices
    auto pts = candidate_pool(m, 1000000, 9);
    CHECK(pts.size() == 162);
    auto sub = candidate_pool(m, 40, 9);
    CHECK(sub.size() == 40);
    auto sub2 = candidate_pool(m, 40, 9);
    for (std::size_t i = 0; i < sub.size(); ++i) CHECK(sub[i].vertex == sub2[i].vertex);
}

TEST_CASE("mesh model: geodesics, ball volume, quadrature mass") {
    auto m = test_meshes::icosphere_model(2);
    CHECK(m.volume() == doctest::Approx(4.0 * kPi).epsilon(0.02)); // inscribed polyhedron
    CHECK(m.dimension() == 2);

    // graph distance between antipodal vertices is close to pi (paths
    // along edges overshoot the great circle slightly)
    double d = geodesic_distance(m, Point::mesh_vertex(0), Point::mesh_vertex(3));
    CHECK(d > 2.8);
    CHECK(d < 3.6);

    auto q = quadrature(m, 1);
    CHECK(q.weight_sum() == doctest::Approx(m.volume()));

    double full = ball_volume(m, Point::mesh_vertex(0), 10.0);
    CHECK(full == doctest::Approx(m.volume()));
    double half = ball_volume(m, Point::mesh_vertex(0), kPi / 2);
    CHECK(half > 0.3 * m.volume());
    CHECK(half < 0.7 * m.volume());
}

TEST_CASE("mesh construction rejects invalid input") {
    using V = std::vector<Eigen::Vector3d>;
    using T = std::vector<std::array<std::int32_t, 3>>;
    V quad = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    CHECK_THROWS_AS(ManifoldModel::mesh(quad, T{{0, 1, 7}}), InvalidInput);    // bad index
    CHECK_THROWS_AS(ManifoldModel::mesh(quad, T{{0, 1, 1}}), InvalidInput);    // repeated vertex
    V line = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    CHECK_THROWS_AS(ManifoldModel::mesh(line, T{{0, 1, 2}}), InvalidInput);    // degenerate
    V two = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 0, 0}, {6, 0, 0}, {5, 1, 0}};
    CHECK_THROWS_AS(ManifoldModel::mesh(two, T{{0, 1, 2}, {3, 4, 5}}), InvalidInput); // disconnected
}

TEST_CASE("OFF round trip and parse errors with line numbers") {
    auto ico = test_meshes::icosphere(1);
    OffMesh off{ico.vertices, ico.triangles};
    std::stringstream ss;
    write_off(ss, off);
    OffMesh back = read_off(ss);
    REQUIRE(back.vertices.size() == off.vertices.size());
    REQUIRE(back.triangles.size() == off.triangles.size());
    CHECK((back.vertices[5] - off.vertices[5]).norm() == 0.0);

    auto expect_line = [](const std::string& text, int line) {
        std::istringstream in(text);
        try {
            read_off(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
        }
    };
    expect_line("NOT_OFF\n", 1);
    expect_line("OFF\nbogus\n", 2);
    expect_line("OFF\n3 1 0\n0 0 0\n1 zero 0\n0 1 0\n3 0 1 2\n", 4);
    expect_line("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2\n", 6);   // non-triangle face
    expect_line("OFF\n3 2 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n", 6);   // missing face line
}

TEST_CASE("point validation per model") {
    CHECK_THROWS_AS(kTorus.validate_point(Point::torus2(1.5, 0.0)), InvalidInput);
    CHECK_NOTHROW(kTorus.validate_point(Point::torus2(0.999, 0.0)));
    auto m = test_meshes::icosphere_model(0);
    CHECK_THROWS_AS(m.validate_point(Point::mesh_vertex(-1)), InvalidInput);
    CHECK_THROWS_AS(m.validate_point(Point::mesh_vertex(12)), InvalidInput);
    CHECK_NOTHROW(m.validate_point(Point::mesh_vertex(11)));
}

TEST_CASE("derived model quantities") {
    CHECK(kCircle.injectivity_radius() == doctest::Approx(kPi));
    CHECK(kTorus.injectivity_radius() == doctest::Approx(0.5));
    CHECK(kSphere.injectivity_radius() == doctest::Approx(kPi));
    CHECK(kCircle.volume() == doctest::Approx(2 * kPi));
    CHECK(kTorus.volume() == doctest::Approx(1.0));
    auto mesh = test_meshes::icosphere_model(1);
    CHECK(mesh.injectivity_radius() == doctest::Approx(mesh.diameter() / 4.0));
    auto overridden = ManifoldModel::mesh(test_meshes::icosphere(1).vertices,
                                          test_meshes::icosphere(1).triangles, 0.7);
    CHECK(overridden.injectivity_radius() == doctest::Approx(0.7));
}
