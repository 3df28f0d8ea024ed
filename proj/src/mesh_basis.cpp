// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "weylsampl/errors.hpp"
#include "weylsampl/lanczos.hpp"
#include "weylsampl/spectral_basis.hpp"

namespace weylsampl {

void mesh_laplacian_matrices(const MeshData& mesh, Eigen::SparseMatrix<double>& stiffness,
                             Eigen::VectorXd& mass_diag) {
    const int n = mesh.vertex_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(mesh.triangles.size() * 12);
    for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        const auto& t = mesh.triangles[ti];
        // Edge lengths opposite each corner; cotangents from lengths alone,
        // cot C = (a^2 + b^2 - c^2) / (4 Area), so intrinsic metrics work too.
        double a = mesh.edge_length(t[1], t[2]);
        double b = mesh.edge_length(t[0], t[2]);
        double c = mesh.edge_length(t[0], t[1]);
        double area4 = 4.0 * mesh.tri_area[ti];
        double cot0 = (b * b + c * c - a * a) / area4; // at vertex t[0], opposite edge a
        double cot1 = (a * a + c * c - b * b) / area4;
        double cot2 = (a * a + b * b - c * c) / area4;
        auto add_edge = [&](int u, int v, double cot) {
            double w = 0.5 * cot;
            trips.emplace_back(u, v, -w);
            trips.emplace_back(v, u, -w);
            trips.emplace_back(u, u, w);
            trips.emplace_back(v, v, w);
        };
        add_edge(t[1], t[2], cot0);
        add_edge(t[0], t[2], cot1);
        add_edge(t[0], t[1], cot2);
    }
    stiffness.resize(n, n);
    stiffness.setFromTriplets(trips.begin(), trips.end());
    stiffness.makeCompressed();
    mass_diag = Eigen::Map<const Eigen::VectorXd>(mesh.lumped_mass.data(), n);
}

class MeshBasisBuilder {
public:
    static SpectralBasis build(const ManifoldModel& m, int k, const MeshEigOptions& opts) {
        const MeshData& mesh = m.mesh_data();
        const int n = mesh.vertex_count();
        if (k < 1 || k > n) throw InvalidInput("mesh_basis: k must be in [1, vertex count]");

        Eigen::SparseMatrix<double> S;
        Eigen::VectorXd D;
        mesh_laplacian_matrices(mesh, S, D);

        SpectralBasis b;
        b.manifold_ = m;
        b.provenance_ = BasisProvenance::MeshDiscrete;
        b.truncated_ = true;

        bool dense = opts.method == MeshEigOptions::Method::Dense ||
                     (opts.method == MeshEigOptions::Method::Auto && n < opts.dense_vertex_limit);

        Eigen::VectorXd values;
        Eigen::MatrixXd vectors;
        if (dense) {
            // D diagonal: fold D^{-1/2} into a standard symmetric problem.
            Eigen::VectorXd dinv_sqrt = D.cwiseSqrt().cwiseInverse();
            Eigen::MatrixXd C = dinv_sqrt.asDiagonal() * Eigen::MatrixXd(S) * dinv_sqrt.asDiagonal();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
            if (es.info() != Eigen::Success)
                throw NumericalFailure("mesh_basis: dense eigendecomposition failed");
            values = es.eigenvalues().head(k);
            vectors = dinv_sqrt.asDiagonal() * es.eigenvectors().leftCols(k);
            b.solver_diagnostics_ = "dense n=" + std::to_string(n);
        } else {
            LanczosOptions lopts;
            lopts.tol = opts.tol;
            lopts.max_subspace = opts.max_subspace;
            lopts.max_restarts = opts.max_restarts;
            lopts.seed = opts.seed;
            values.resize(k);
            vectors.resize(n, k);
            values[0] = 0.0;
            vectors.col(0) = Eigen::VectorXd::Ones(n) / std::sqrt(D.sum());
            if (k > 1) {
                LanczosResult lr = lanczos_smallest_nonzero(S, D, k - 1, lopts);
                values.tail(k - 1) = lr.eigenvalues;
                vectors.rightCols(k - 1) = lr.eigenvectors;
                b.solver_diagnostics_ = lr.diagnostics;
            }
        }

        double dust = 1e-12 * std::max(1.0, std::fabs(values[k - 1]));
        for (int i = 0; i < k; ++i) {
            if (values[i] < -1e-9)
                throw NumericalFailure("mesh_basis: eigenvalue " + std::to_string(values[i]) +
                                       " below the -1e-9 clamp window");
            if (values[i] < dust) values[i] = 0.0; // kernel roundoff
            // Deterministic sign: make each eigenvector's mass-weighted sum
            // (or largest component) positive.
            double s = vectors.col(i).dot(D);
            if (std::fabs(s) < 1e-12) {
                int arg = 0;
                vectors.col(i).cwiseAbs().maxCoeff(&arg);
                s = vectors.col(i)[arg];
            }
            if (s < 0.0) vectors.col(i) = -vectors.col(i);
        }

        // Both paths produce ascending eigenvalues; clamping cannot reorder.
        b.eigenvalues_.assign(values.data(), values.data() + k);
        b.mesh_vectors_ = std::move(vectors);
        b.lambda_max_ = b.eigenvalues_.back();
        return b;
    }
};

SpectralBasis mesh_basis(const ManifoldModel& m, int k, const MeshEigOptions& opts) {
    return MeshBasisBuilder::build(m, k, opts);
}

} // namespace weylsampl
