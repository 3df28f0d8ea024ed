// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "weylsampl/manifold.hpp"
#include "weylsampl/point.hpp"

namespace weylsampl {

enum class BasisProvenance { Analytic, MeshDiscrete };

/// Ordered eigenvalues of the Laplace-Beltrami operator with evaluable
/// orthonormal eigenfunctions, complete up to lambda_max (every eigenvalue
/// <= lambda_max appears with full multiplicity; mesh bases are truncated
/// and carry truncated() = true).
///
/// Real conventions throughout:
///   Circle      1/sqrt(L), sqrt(2/L) cos(2 pi k s / L), sqrt(2/L) sin(...)
///   FlatTorus   1/sqrt(V), sqrt(2/V) cos(2 pi k.theta), sqrt(2/V) sin(...)
///               over canonical representatives k of each +-k pair
///   Sphere2     real orthonormal spherical harmonics, Condon-Shortley-free:
///               Y_{l,0} = Pbar_{l,0}(cos th),
///               Y_{l,m>0} = sqrt(2) Pbar_{l,m}(cos th) cos(m phi),
///               Y_{l,m<0} = sqrt(2) Pbar_{l,|m|}(cos th) sin(|m| phi),
///               with fully normalized Pbar (4 pi normalization included)
class SpectralBasis {
public:
    const ManifoldModel& manifold() const { return manifold_; }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    double lambda_max() const { return lambda_max_; }
    bool truncated() const { return truncated_; }
    BasisProvenance provenance() const { return provenance_; }
    int size() const { return static_cast<int>(eigenvalues_.size()); }

    /// Value of the l-th eigenfunction at x.
    double eval(int l, const Point& x) const;

    /// Values of the first `count` eigenfunctions at x (count <= size()).
    Eigen::VectorXd eval_band(const Point& x, int count) const;

    /// Vertex-sampled eigenvectors (mesh bases only), D-orthonormal columns.
    const Eigen::MatrixXd& mesh_vectors() const;

    /// Residual diagnostics for iterative mesh solves (empty for analytic).
    const std::string& solver_diagnostics() const { return solver_diagnostics_; }

private:
    friend SpectralBasis analytic_basis(const ManifoldModel&, double);
    friend class MeshBasisBuilder;
    friend struct BasisJsonIO;

    ManifoldModel manifold_;
    std::vector<double> eigenvalues_;
    double lambda_max_ = 0.0;
    bool truncated_ = false;
    BasisProvenance provenance_ = BasisProvenance::Analytic;

    struct CircleMode {
        std::int32_t k;
        bool sine;
    };
    struct TorusMode {
        std::array<std::int32_t, 3> k;
        bool sine;
    };
    struct SphereMode {
        std::int32_t l;
        std::int32_t m; // 0 zonal, +m cosine, -m sine
    };
    std::vector<CircleMode> circle_modes_;
    std::vector<TorusMode> torus_modes_;
    std::vector<SphereMode> sphere_modes_;
    int sphere_lmax_ = -1;

    Eigen::MatrixXd mesh_vectors_; // V x size, D-orthonormal
    std::string solver_diagnostics_;
};

/// Coefficients on the band {l : lambda_l <= omega} of a basis.
struct BandlimitedFunction {
    const SpectralBasis* basis = nullptr;
    double omega = 0.0;
    Eigen::VectorXd coefficients; // length = N_omega

    double evaluate(const Point& x) const;
    /// Spectral L2 norm = ||coefficients||.
    double norm() const { return coefficients.norm(); }
};

/// Enumerates all eigenpairs with lambda <= lambda_max for an analytic model.
SpectralBasis analytic_basis(const ManifoldModel& m, double lambda_max);

/// Options for the mesh eigensolver.
struct MeshEigOptions {
    enum class Method { Auto, Dense, Lanczos };
    Method method = Method::Auto;
    int dense_vertex_limit = 3000; // Auto uses the dense path below this
    double tol = 1e-10;
    int max_subspace = 0; // 0 = automatic
    int max_restarts = 4;
    std::uint64_t seed = 1;
};

/// k smallest eigenpairs of the cotangent-stiffness / lumped-mass pencil
/// S v = lambda D v; eigenfunctions D-orthonormal, eigenvalues clamped to 0
/// when within -1e-9. The result is truncated: lambda_max = lambda_{k-1}.
SpectralBasis mesh_basis(const ManifoldModel& m, int k, const MeshEigOptions& opts = {});

/// N_omega = #{l : lambda_l <= omega}, ties at the band edge included.
/// omega must not exceed basis.lambda_max (the count would be untrustworthy).
int count_eigenvalues(const SpectralBasis& b, double omega);

/// ||Delta^k f|| / ||f|| computed spectrally.
double bernstein_ratio(const BandlimitedFunction& f, int k);

/// Seeded i.i.d. normal coefficients on the band, normalized to ||f|| = 1.
BandlimitedFunction random_bandlimited(const SpectralBasis& b, double omega, std::uint64_t seed);

/// Cotangent stiffness matrix (positive semidefinite) and lumped mass diagonal.
void mesh_laplacian_matrices(const MeshData& mesh, Eigen::SparseMatrix<double>& stiffness,
                             Eigen::VectorXd& mass_diag);

/// Groups eigenvalues agreeing within relative 1e-6 for reporting:
/// (representative value, multiplicity) pairs, ascending.
std::vector<std::pair<double, int>> eigenvalue_multiplicities(const SpectralBasis& b,
                                                              double rel_tol = 1e-6);

std::string basis_to_json(const SpectralBasis& b);

/// Rebuilds a basis from its JSON export. Analytic bases re-enumerate their
/// eigenfunctions from the embedded manifold parameters; mesh bases restore
/// the serialized vertex-sampled eigenvectors onto the supplied mesh model.
SpectralBasis basis_from_json(const std::string& json_text);
SpectralBasis basis_from_json(const std::string& json_text, const ManifoldModel& mesh_model);

} // namespace weylsampl
