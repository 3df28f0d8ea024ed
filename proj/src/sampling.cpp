// SPDX-License-Identifier: Apache-2.0
#include "weylsampl/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "weylsampl/errors.hpp"
#include "weylsampl/parallel.hpp"
#include "weylsampl/rng.hpp"

namespace weylsampl {

namespace {

// Singular values of U without materializing the tall factorization:
// eigenvalues of the Gram matrix U^T U, accumulated in row blocks.
Eigen::VectorXd singular_values_via_gram(const SpectralBasis& b,
                                         const std::vector<Point>& points, int n_band,
                                         Eigen::MatrixXd* store) {
    const int rows = static_cast<int>(points.size());
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n_band, n_band);
    const int block = 2048;
    Eigen::MatrixXd buf(std::min(block, rows), n_band);
    for (int r0 = 0; r0 < rows; r0 += block) {
        int nb = std::min(block, rows - r0);
        parallel_for(static_cast<std::size_t>(nb), [&](std::size_t i) {
            buf.row(static_cast<int>(i)) =
                b.eval_band(points[r0 + static_cast<int>(i)], n_band).transpose();
        });
        gram.selfadjointView<Eigen::Lower>().rankUpdate(buf.topRows(nb).transpose());
        if (store) store->middleRows(r0, nb) = buf.topRows(nb);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        gram.selfadjointView<Eigen::Lower>());
    if (es.info() != Eigen::Success)
        throw NumericalFailure("sampling_operator: Gram eigendecomposition failed");
    Eigen::VectorXd sv(n_band);
    for (int i = 0; i < n_band; ++i) {
        double lam = es.eigenvalues()[n_band - 1 - i];
        sv[i] = lam > 0.0 ? std::sqrt(lam) : 0.0;
    }
    return sv;
}

} // namespace

double SamplingOperator::condition_number() const {
    double smin = sigma_min();
    return smin > 0.0 ? sigma_max() / smin : std::numeric_limits<double>::infinity();
}

SamplingOperator sampling_operator(const SpectralBasis& b, double omega, const Lattice& lat,
                                   const SamplingOptions& opts) {
    if (lat.manifold.kind() != b.manifold().kind())
        throw InvalidInput("sampling_operator: lattice and basis manifolds differ");
    if (lat.points.empty()) throw InvalidInput("sampling_operator: empty lattice");
    const int n_band = count_eigenvalues(b, omega);
    const int rows = static_cast<int>(lat.points.size());

    SamplingOperator op;
    op.basis = &b;
    op.omega = omega;
    op.lattice = lat;
    op.n_points = rows;
    op.n_band = n_band;
    op.rho = lat.rho;

    if (opts.store_matrix) op.matrix.resize(rows, n_band);

    double rank_floor_rel;
    if (rows <= opts.svd_row_limit) {
        Eigen::MatrixXd U(rows, n_band);
        parallel_for(static_cast<std::size_t>(rows), [&](std::size_t j) {
            U.row(static_cast<int>(j)) =
                b.eval_band(lat.points[j], n_band).transpose();
        });
        Eigen::BDCSVD<Eigen::MatrixXd> svd(U);
        Eigen::VectorXd sv = Eigen::VectorXd::Zero(n_band);
        sv.head(svd.singularValues().size()) = svd.singularValues();
        op.singular_values = sv;
        if (opts.store_matrix) op.matrix = std::move(U);
        rank_floor_rel = n_band * 1e-13;
    } else {
        op.singular_values = singular_values_via_gram(b, lat.points, n_band,
                                                      opts.store_matrix ? &op.matrix : nullptr);
        // The Gram route resolves sigma_min only down to sqrt(eps) * sigma_max.
        rank_floor_rel = std::sqrt(static_cast<double>(n_band)) * 1e-7;
    }

    const int d = b.manifold().dimension();
    double scale = std::pow(op.rho, d);
    double smax = op.sigma_max();
    double smin = rows >= n_band ? op.singular_values[n_band - 1] : 0.0;
    if (smin <= smax * rank_floor_rel) smin = 0.0;
    op.b_upper = scale * smax * smax;
    op.b_lower = scale * smin * smin;
    return op;
}

BandlimitedFunction reconstruct(const SamplingOperator& op, const Eigen::VectorXd& samples) {
    if (samples.size() != op.n_points)
        throw InvalidInput("reconstruct: sample count does not match lattice size");
    if (!op.full_column_rank())
        throw NotASamplingSet("reconstruct: not a sampling set (rank-deficient operator); " +
                                  std::to_string(op.n_band) + " points are required at least",
                              op.sigma_min(), op.n_band);
    if (op.matrix.size() == 0)
        throw InvalidInput("reconstruct: operator was built without a stored matrix");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(op.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    BandlimitedFunction f;
    f.basis = op.basis;
    f.omega = op.omega;
    f.coefficients = svd.solve(samples);
    return f;
}

double pp_constant(const SamplingOperator& op, int trials, std::uint64_t seed) {
    if (trials < 1) throw InvalidInput("pp_constant: trials must be >= 1");
    if (!op.full_column_rank())
        throw NotASamplingSet("pp_constant: operator has no positive lower frame bound",
                              op.sigma_min(), op.n_band);
    if (op.matrix.size() == 0)
        throw InvalidInput("pp_constant: operator was built without a stored matrix");

    const int d = op.basis->manifold().dimension();
    const double rho_half = std::pow(op.rho, 0.5 * d);
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
        CounterRng rng(seed + 977ULL * t);
        Eigen::VectorXd c(op.n_band);
        for (int i = 0; i < op.n_band; ++i) c[i] = rng.normal();
        double cn = c.norm();
        if (cn == 0.0) continue;
        c /= cn;
        double discrete = (op.matrix * c).norm();
        if (discrete > 0.0) best = std::max(best, 1.0 / (rho_half * discrete));
    }
    double exact = 1.0 / std::sqrt(op.b_lower);
    if (best > exact * (1.0 + 1e-9))
        throw NumericalFailure("pp_constant: random maximum exceeded the SVD extremal value");
    return best;
}

double find_gamma(const SpectralBasis& b, const ManifoldModel& m, double omega, int trials,
                  const FindGammaOptions& opts) {
    if (trials < 1) throw InvalidInput("find_gamma: trials must be >= 1");
    if (omega < 0.0) throw InvalidInput("find_gamma: omega must be >= 0");
    const double gamma_hi = std::min(1.0, m.injectivity_radius() * std::sqrt(omega));
    // Degenerate band (only the constant): every nonempty lattice samples it.
    if (count_eigenvalues(b, omega) <= 1) return gamma_hi;
    if (omega < 1.0) throw InvalidInput("find_gamma: omega must be >= 1");
    const int grid = opts.grid;
    int hi = static_cast<int>(std::floor(gamma_hi * grid + 1e-12));
    if (hi < 1) throw SearchFailure("find_gamma: gamma grid empty under the injectivity guard");

    auto passes = [&](int gi) {
        double gamma = static_cast<double>(gi) / grid;
        double rho = gamma / std::sqrt(omega);
        SamplingOptions sopts;
        sopts.store_matrix = false;
        for (int t = 0; t < trials; ++t) {
            std::uint64_t seed = opts.seed + 7919ULL * t;
            auto pool = candidate_pool(m, default_pool_size(m, rho), seed);
            Lattice lat = build_lattice(m, rho, pool, seed);
            SamplingOperator op = sampling_operator(b, omega, lat, sopts);
            if (!(op.b_lower >= opts.tau * op.b_upper)) return false;
        }
        return true;
    };

    // Oversampling only improves as gamma shrinks, so the pass predicate is
    // treated as monotone and bisected.
    if (passes(hi)) return static_cast<double>(hi) / grid;
    int lo = 0; // sentinel: "passes" (not evaluated)
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (passes(mid)) lo = mid;
        else hi = mid;
    }
    if (lo == 0)
        throw SearchFailure("find_gamma: no gamma on the 1/" + std::to_string(grid) +
                            " grid passed at tau=" + std::to_string(opts.tau) + " with " +
                            std::to_string(trials) + " trials");
    return static_cast<double>(lo) / grid;
}

double poincare_constant(const SpectralBasis& b, const ManifoldModel& m, const Lattice& lat, int k,
                         int trials, std::uint64_t seed) {
    if (!(k > m.dimension() / 2.0)) throw InvalidInput("poincare_constant: k must exceed d/2");
    if (trials < 1) throw InvalidInput("poincare_constant: trials must be >= 1");

    const int d = m.dimension();
    const double rho = lat.rho;
    const double rho_half = std::pow(rho, 0.5 * d);
    const double rho_k = std::pow(rho, k);
    const double lmax = b.lambda_max();
    const std::array<double, 3> bands{lmax / 16.0, lmax / 4.0, lmax};
    const auto& ev = b.eigenvalues();

    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
        for (std::size_t bi = 0; bi < bands.size(); ++bi) {
            double band = bands[bi];
            BandlimitedFunction f = random_bandlimited(b, band, seed + 31ULL * t + 101ULL * bi);
            Eigen::VectorXd values(lat.points.size());
            for (std::size_t j = 0; j < lat.points.size(); ++j)
                values[static_cast<int>(j)] = f.evaluate(lat.points[j]);
            double smooth = 0.0;
            for (int l = 0; l < f.coefficients.size(); ++l)
                smooth += std::pow(ev[l], k) * f.coefficients[l] * f.coefficients[l];
            double denom = rho_half * values.norm() + rho_k * std::sqrt(smooth);
            if (denom > 0.0) best = std::max(best, f.norm() / denom);
        }
    }
    return best;
}

std::string sampling_report_json(const SamplingOperator& op) {
    nlohmann::json j;
    j["omega"] = op.omega;
    j["rho"] = op.rho;
    j["n_points"] = op.n_points;
    j["n_band"] = op.n_band;
    j["sigma_min"] = op.sigma_min();
    j["sigma_max"] = op.sigma_max();
    j["B_lower"] = op.b_lower;
    j["B_upper"] = op.b_upper;
    double cond = op.condition_number();
    j["cond"] = std::isfinite(cond) ? nlohmann::json(cond) : nlohmann::json();
    return j.dump(2);
}

} // namespace weylsampl
