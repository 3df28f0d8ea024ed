// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "weylsampl/lattice.hpp"
#include "weylsampl/spectral_basis.hpp"

namespace weylsampl {

/// The sampling matrix U[j, l] = u_l(x_j) over a lattice and a band, with its
/// singular-value summary. Frame bounds are the scaled extreme squared
/// singular values B = rho^d sigma^2; B_lower > 0 iff U has full column rank.
struct SamplingOperator {
    const SpectralBasis* basis = nullptr;
    double omega = 0.0;
    Lattice lattice;
    Eigen::MatrixXd matrix;          // empty when built with store_matrix = false
    Eigen::VectorXd singular_values; // length = n_band, descending (zeros appended
                                     // when there are fewer rows than columns)
    int n_points = 0;
    int n_band = 0;
    double rho = 0.0;
    double b_upper = 0.0;
    double b_lower = 0.0;

    bool full_column_rank() const { return b_lower > 0.0; }
    double sigma_max() const { return singular_values.size() ? singular_values[0] : 0.0; }
    double sigma_min() const {
        return singular_values.size() ? singular_values[singular_values.size() - 1] : 0.0;
    }
    double condition_number() const;
};

struct SamplingOptions {
    bool store_matrix = true;
    // SVD route below this row count; Gram-matrix eigenvalues above (the
    // singular values agree, the Gram route just skips the tall factorization).
    int svd_row_limit = 8192;
};

/// Assembles U by eigenfunction evaluation and populates the singular-value
/// summary. The band is {l : lambda_l <= omega}, ties included.
SamplingOperator sampling_operator(const SpectralBasis& b, double omega, const Lattice& lat,
                                   const SamplingOptions& opts = {});

/// Least-squares recovery of band coefficients from point samples (SVD
/// pseudo-inverse). Noiseless samples of a band function are recovered to
/// relative 1e-10. Throws NotASamplingSet when B_lower = 0.
BandlimitedFunction reconstruct(const SamplingOperator& op, const Eigen::VectorXd& samples);

/// Empirical Plancherel-Polya constant: max over seeded random band functions
/// of ||f|| / (rho^{d/2} ||f(x_j)||_2). The exact extremal value is
/// B_lower^{-1/2}; the random maximum is asserted to stay below it (one-sided).
double pp_constant(const SamplingOperator& op, int trials, std::uint64_t seed);

struct FindGammaOptions {
    double tau = 1e-6;    // required B_lower / B_upper
    int grid = 64;        // gamma resolution: multiples of 1/grid
    std::uint64_t seed = 1;
};

/// Largest gamma on the 1/grid bisection grid such that `trials` seeded
/// lattices at rho = gamma omega^{-1/2} all give B_lower >= tau B_upper.
/// Returns the empirical gamma; throws SearchFailure when nothing passes.
double find_gamma(const SpectralBasis& b, const ManifoldModel& m, double omega, int trials,
                  const FindGammaOptions& opts = {});

/// Empirical Poincare constant over random band functions at several bands:
/// max of ||f|| / (rho^{d/2} ||f(x_j)|| + rho^k ||Delta^{k/2} f||), the last
/// norm computed spectrally. Requires k > d/2.
double poincare_constant(const SpectralBasis& b, const ManifoldModel& m, const Lattice& lat, int k,
                         int trials, std::uint64_t seed);

std::string sampling_report_json(const SamplingOperator& op);

} // namespace weylsampl
