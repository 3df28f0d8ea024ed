// SPDX-License-Identifier: Apache-2.0
#include "weylsampl/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "weylsampl/errors.hpp"
#include "weylsampl/rng.hpp"

namespace weylsampl {

// Deflation-restart shift-invert Lanczos. A single Krylov space carries at
// most one copy of a degenerate eigenvalue, so converged Ritz vectors are
// locked and the iteration restarts with a fresh deflated start vector until
// k pairs are accumulated; each restart converges the smallest remaining
// eigenvalues first, so the accumulated set is the k smallest overall.
LanczosResult lanczos_smallest_nonzero(const Eigen::SparseMatrix<double>& S,
                                       const Eigen::VectorXd& D, int k,
                                       const LanczosOptions& opts) {
    const int n = static_cast<int>(S.rows());
    if (k < 1 || k > n - 1) throw InvalidInput("lanczos: k must be in [1, n-1]");

    // sigma < 0 keeps S - sigma D positive definite; the spectral map
    // mu = 1/(lambda - sigma) sends the smallest lambda to the largest mu.
    const double scale = S.diagonal().sum() / D.sum();
    const double sigma = -std::max(1e-12, opts.shift_scale * scale);

    Eigen::SparseMatrix<double> A = S;
    for (int i = 0; i < n; ++i) A.coeffRef(i, i) -= sigma * D[i];
    A.makeCompressed();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("lanczos: LDLT factorization of shifted stiffness failed");

    auto d_dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return a.dot(D.cwiseProduct(b));
    };

    // Locked directions: the known constant kernel of S plus every converged
    // Ritz vector, all D-orthonormal.
    std::vector<Eigen::VectorXd> locked;
    std::vector<double> locked_mu;
    locked.push_back(Eigen::VectorXd::Ones(n) / std::sqrt(D.sum()));

    int total_iters = 0;
    int m = opts.max_subspace > 0 ? opts.max_subspace : std::min(n - 1, std::max(2 * k + 20, 40));
    // Zero-progress runs count against max_restarts; productive runs are
    // bounded only by the certification logic below (each adds >= 1 pair).
    int stalls = 0;
    bool certified = false;

    for (int run = 0; run < 50 * k + opts.max_restarts && !certified; ++run) {
        int have = static_cast<int>(locked.size()) - 1;
        if (have >= n - 1) break;
        m = std::min(m, n - static_cast<int>(locked.size()));
        if (m < 1) break;

        Eigen::MatrixXd V(n, m);
        std::vector<double> alpha, beta;
        CounterRng rng(opts.seed + 1000003ULL * run);

        auto project_out = [&](Eigen::VectorXd& w) {
            for (const auto& q : locked) w -= d_dot(q, w) * q;
        };

        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = rng.normal();
        project_out(v);
        double vn = std::sqrt(d_dot(v, v));
        if (vn < 1e-14) continue; // unlucky start, retry
        V.col(0) = v / vn;

        int built = 0;
        for (int j = 0; j < m; ++j) {
            ++total_iters;
            Eigen::VectorXd w = solver.solve(D.cwiseProduct(V.col(j)));
            double a = d_dot(w, V.col(j));
            alpha.push_back(a);
            w -= a * V.col(j);
            if (j > 0) w -= beta[j - 1] * V.col(j - 1);
            for (int pass = 0; pass < 2; ++pass) { // full reorthogonalization
                project_out(w);
                for (int i = 0; i <= j; ++i) w -= d_dot(V.col(i), w) * V.col(i);
            }
            double b = std::sqrt(d_dot(w, w));
            built = j + 1;
            if (!(b > 1e-13 * std::fabs(alpha[0]))) break; // invariant subspace
            beta.push_back(b);
            if (j + 1 < m) V.col(j + 1) = w / b;
        }

        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(built, built);
        for (int i = 0; i < built; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < built) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        if (es.info() != Eigen::Success)
            throw NumericalFailure("lanczos: tridiagonal eigendecomposition failed");

        std::vector<int> order(built);
        for (int i = 0; i < built; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return es.eigenvalues()[a] > es.eigenvalues()[b]; });

        double beta_last = static_cast<int>(beta.size()) == built ? beta.back() : 0.0;
        bool exhausted = built < m;

        // When k pairs are already locked, this run certifies completeness:
        // its top Ritz value is the smallest eigenvalue still outside the
        // locked set. Stop once that exceeds the current k-th smallest.
        double kth_mu = 0.0;
        if (have >= k) {
            std::vector<double> mus = locked_mu;
            std::nth_element(mus.begin(), mus.begin() + (k - 1), mus.end(), std::greater<>());
            kth_mu = mus[k - 1];
        }

        int added = 0;
        int cap = std::max(1, (k - have) + 2); // >= 1 so certification runs inspect the top pair
        for (int i = 0; i < built && added < cap; ++i) {
            double mu = es.eigenvalues()[order[i]];
            if (!(mu > 0.0)) break; // below the shift: not a pencil eigenvalue
            double resid = std::fabs(beta_last * es.eigenvectors()(built - 1, order[i]));
            if (!exhausted && resid > opts.tol * std::max(std::fabs(mu), 1e-30)) break;
            if (have >= k && i == 0 && mu <= kth_mu * (1.0 + 1e-10)) {
                certified = true; // nothing smaller remains outside the locked set
                break;
            }
            Eigen::VectorXd x = V.leftCols(built) * es.eigenvectors().col(order[i]);
            for (const auto& q : locked) x -= d_dot(q, x) * q;
            double xn = std::sqrt(d_dot(x, x));
            if (xn < 1e-10) continue; // collapsed onto the locked set
            locked.push_back(x / xn);
            locked_mu.push_back(mu);
            ++added;
        }
        if (certified) break;
        if (added == 0) {
            if (++stalls > opts.max_restarts) break;
            m = std::min(n - 1, m * 2); // no progress: widen the subspace
        }
    }

    int have = static_cast<int>(locked.size()) - 1;
    if (have < k || (!certified && have < n - 1)) {
        std::ostringstream diag;
        diag << "lanczos did not converge: " << have << "/" << k
             << " certified eigenpairs after " << total_iters << " iterations (max subspace " << m
             << ", tol " << opts.tol << ", " << stalls << " stalled restarts)";
        throw NumericalFailure(diag.str());
    }

    // Sort the accumulated pairs by eigenvalue lambda = sigma + 1/mu.
    std::vector<int> idx(have);
    for (int i = 0; i < have; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return locked_mu[a] > locked_mu[b]; });

    LanczosResult res;
    res.eigenvalues.resize(k);
    res.eigenvectors.resize(n, k);
    for (int i = 0; i < k; ++i) {
        res.eigenvalues[i] = sigma + 1.0 / locked_mu[idx[i]];
        res.eigenvectors.col(i) = locked[1 + idx[i]];
    }
    res.iterations = total_iters;
    std::ostringstream diag;
    diag << "converged k=" << k << " iterations=" << total_iters << " sigma=" << sigma;
    res.diagnostics = diag.str();
    return res;
}

} // namespace weylsampl
