// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace weylsampl {

struct LanczosOptions {
    double tol = 1e-10;       // relative Ritz residual threshold
    int max_subspace = 0;     // 0 = automatic (grows across restarts)
    int max_restarts = 4;
    std::uint64_t seed = 1;
    double shift_scale = 1e-3; // sigma = -shift_scale * (tr S / tr D)
};

struct LanczosResult {
    Eigen::VectorXd eigenvalues;  // ascending, excluding the deflated kernel
    Eigen::MatrixXd eigenvectors; // D-orthonormal columns
    int iterations = 0;
    int restarts = 0;
    std::string diagnostics;
};

/// Shift-invert Lanczos for the generalized symmetric pencil S v = lambda D v
/// with S positive semidefinite (kernel spanned by the constant vector) and
/// D a positive diagonal. Runs in the D-inner product on the operator
/// (S - sigma D)^{-1} D with a small negative sigma, deflating the known
/// constant-vector kernel; returns the k smallest nonzero eigenpairs.
/// Throws NumericalFailure with iteration diagnostics on non-convergence.
LanczosResult lanczos_smallest_nonzero(const Eigen::SparseMatrix<double>& stiffness,
                                       const Eigen::VectorXd& mass_diag, int k,
                                       const LanczosOptions& opts = {});

} // namespace weylsampl
