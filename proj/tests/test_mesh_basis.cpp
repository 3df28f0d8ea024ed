// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "support/test_meshes.hpp"
#include "weylsampl/errors.hpp"
#include "weylsampl/lanczos.hpp"
#include "weylsampl/spectral_basis.hpp"

using namespace weylsampl;

namespace {
constexpr double kPi = std::numbers::pi;

double max_rel_error_vs_sphere(const SpectralBasis& b, int count) {
    // reference pattern: l(l+1) with multiplicity 2l+1, skipping lambda_0
    std::vector<double> ref;
    for (int l = 0; static_cast<int>(ref.size()) < count; ++l)
        for (int m = 0; m < 2 * l + 1 && static_cast<int>(ref.size()) < count; ++m)
            ref.push_back(static_cast<double>(l) * (l + 1));
    double worst = 0.0;
    for (int i = 1; i < count; ++i)
        worst = std::max(worst, std::fabs(b.eigenvalues()[i] - ref[i]) / ref[i]);
    return worst;
}
} // namespace

TEST_CASE("icosphere subdiv-3 spectrum approximates l(l+1) (dense path)") {
    auto m = test_meshes::icosphere_model(3); // 642 vertices
    auto b = mesh_basis(m, 16);
    CHECK(b.truncated());
    CHECK(b.provenance() == BasisProvenance::MeshDiscrete);
    CHECK(b.eigenvalues()[0] == 0.0);
    CHECK(max_rel_error_vs_sphere(b, 16) < 0.03);
    CHECK(b.lambda_max() == doctest::Approx(b.eigenvalues().back()));
}

TEST_CASE("constant eigenfunction is 1/sqrt(total mass)") {
    auto m = test_meshes::icosphere_model(2);
    auto b = mesh_basis(m, 1);
    double expect = 1.0 / std::sqrt(m.volume());
    for (int v = 0; v < m.mesh_data().vertex_count(); ++v)
        CHECK(b.eval(0, Point::mesh_vertex(v)) == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("mesh eigenvectors are D-orthonormal") {
    auto m = test_meshes::icosphere_model(2);
    auto b = mesh_basis(m, 10);
    const auto& V = b.mesh_vectors();
    const auto& mass = m.mesh_data().lumped_mass;
    for (int i = 0; i < 10; ++i)
        for (int j = i; j < 10; ++j) {
            double dot = 0.0;
            for (int v = 0; v < V.rows(); ++v) dot += V(v, i) * V(v, j) * mass[v];
            CHECK(std::fabs(dot - (i == j ? 1.0 : 0.0)) <= 1e-10);
        }
}

TEST_CASE("lanczos path agrees with the dense path") {
    auto m = test_meshes::icosphere_model(3);
    MeshEigOptions dense;
    dense.method = MeshEigOptions::Method::Dense;
    MeshEigOptions lanczos;
    lanczos.method = MeshEigOptions::Method::Lanczos;
    auto bd = mesh_basis(m, 12, dense);
    auto bl = mesh_basis(m, 12, lanczos);
    for (int i = 0; i < 12; ++i)
        CHECK(bl.eigenvalues()[i] ==
              doctest::Approx(bd.eigenvalues()[i]).epsilon(1e-8).scale(1.0));
    CHECK(bl.solver_diagnostics().find("converged") != std::string::npos);
}

TEST_CASE("flat torus mesh: 0 then a 4 pi^2 quadruple within 2%") {
    auto m = test_meshes::flat_torus_mesh(64, 1.0);
    CHECK(m.volume() == doctest::Approx(1.0).epsilon(1e-10));
    auto b = mesh_basis(m, 5, [] {
        MeshEigOptions o;
        o.method = MeshEigOptions::Method::Lanczos; // 4096 vertices
        return o;
    }());
    CHECK(b.eigenvalues()[0] == 0.0);
    for (int i = 1; i <= 4; ++i)
        CHECK(b.eigenvalues()[i] == doctest::Approx(4.0 * kPi * kPi).epsilon(0.02));
}

TEST_CASE("mesh refinement reduces the eigenvalue error") {
    auto b3 = mesh_basis(test_meshes::icosphere_model(3), 16);
    auto b4 = mesh_basis(test_meshes::icosphere_model(4), 16);
    CHECK(max_rel_error_vs_sphere(b4, 16) < max_rel_error_vs_sphere(b3, 16));
}

TEST_CASE("mesh_basis argument validation") {
    auto m = test_meshes::icosphere_model(1); // 42 vertices
    CHECK_THROWS_AS(mesh_basis(m, 0), InvalidInput);
    CHECK_THROWS_AS(mesh_basis(m, 43), InvalidInput);
    CHECK_NOTHROW(mesh_basis(m, 42));
}

TEST_CASE("lanczos rejects bad subspace requests and reports diagnostics") {
    auto m = test_meshes::icosphere_model(2);
    Eigen::SparseMatrix<double> S;
    Eigen::VectorXd D;
    mesh_laplacian_matrices(m.mesh_data(), S, D);
    CHECK_THROWS_AS(lanczos_smallest_nonzero(S, D, 0), InvalidInput);
    LanczosOptions strict;
    strict.tol = 1e-30; // unreachable tolerance
    strict.max_restarts = 0;
    strict.max_subspace = 8;
    try {
        lanczos_smallest_nonzero(S, D, 6, strict);
        FAIL("expected NumericalFailure");
    } catch (const NumericalFailure& e) {
        CHECK(std::string(e.what()).find("iterations") != std::string::npos);
    }
}

TEST_CASE("stiffness matrix is positive semidefinite with the constant kernel") {
    auto m = test_meshes::icosphere_model(1);
    Eigen::SparseMatrix<double> S;
    Eigen::VectorXd D;
    mesh_laplacian_matrices(m.mesh_data(), S, D);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(S.rows());
    CHECK((S * ones).norm() <= 1e-12);
    Eigen::MatrixXd Sd(S);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sd);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("mesh basis JSON serializes vertex-sampled eigenvectors") {
    auto m = test_meshes::icosphere_model(1);
    auto b = mesh_basis(m, 3);
    auto j = basis_to_json(b);
    CHECK(j.find("mesh-discrete") != std::string::npos);
    CHECK(j.find("\"eigenvectors\"") != std::string::npos);
    CHECK(j.find("\"truncated\": true") != std::string::npos);

    auto back = basis_from_json(j, m);
    REQUIRE(back.size() == 3);
    for (int l = 0; l < 3; ++l) {
        CHECK(back.eigenvalues()[l] == doctest::Approx(b.eigenvalues()[l]));
        CHECK(back.eval(l, Point::mesh_vertex(7)) ==
              doctest::Approx(b.eval(l, Point::mesh_vertex(7))));
    }
    // loading a mesh basis needs a mesh model of matching size
    CHECK_THROWS_AS(basis_from_json(j), InvalidInput);
    auto other = test_meshes::icosphere_model(2);
    CHECK_THROWS_AS(basis_from_json(j, other), InvalidInput);
}
