// SPDX-License-Identifier: Apache-2.0
#include "weylsampl/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "weylsampl/errors.hpp"
#include "weylsampl/rng.hpp"
#include "weylsampl/sphere_harmonics.hpp"

namespace weylsampl {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

// ---------------------------------------------------------------------------
// Evaluation

double SpectralBasis::eval(int l, const Point& x) const {
    if (l < 0 || l >= size()) throw InvalidInput("eigenfunction index out of range");
    switch (manifold_.kind()) {
        case ManifoldKind::Circle: {
            const auto& md = circle_modes_[l];
            double L = manifold_.circle_circumference();
            if (md.k == 0) return 1.0 / std::sqrt(L);
            double arg = kTwoPi * md.k * x.c[0] / L;
            double nrm = std::sqrt(2.0 / L);
            return nrm * (md.sine ? std::sin(arg) : std::cos(arg));
        }
        case ManifoldKind::FlatTorus: {
            const auto& md = torus_modes_[l];
            const auto& L = manifold_.torus_lengths();
            double vol = manifold_.volume();
            bool zero = true;
            double arg = 0.0;
            for (int i = 0; i < manifold_.dimension(); ++i) {
                if (md.k[i] != 0) zero = false;
                arg += kTwoPi * md.k[i] * x.c[i] / L[i];
            }
            if (zero) return 1.0 / std::sqrt(vol);
            double nrm = std::sqrt(2.0 / vol);
            return nrm * (md.sine ? std::sin(arg) : std::cos(arg));
        }
        case ManifoldKind::Sphere2: {
            const auto& md = sphere_modes_[l];
            std::vector<double> table;
            sh_eval_all(md.l, x.c[0], x.c[1], x.c[2], table);
            int idx = md.l * md.l + (md.m == 0 ? 0 : (md.m > 0 ? 2 * md.m - 1 : -2 * md.m));
            return table[idx];
        }
        case ManifoldKind::Mesh:
            manifold_.validate_point(x);
            return mesh_vectors_(x.vertex, l);
    }
    return 0.0;
}

Eigen::VectorXd SpectralBasis::eval_band(const Point& x, int count) const {
    if (count < 0 || count > size()) throw InvalidInput("eval_band: count out of range");
    Eigen::VectorXd out(count);
    switch (manifold_.kind()) {
        case ManifoldKind::Circle: {
            double L = manifold_.circle_circumference();
            double nrm = std::sqrt(2.0 / L);
            for (int l = 0; l < count; ++l) {
                const auto& md = circle_modes_[l];
                if (md.k == 0) {
                    out[l] = 1.0 / std::sqrt(L);
                    continue;
                }
                double arg = kTwoPi * md.k * x.c[0] / L;
                out[l] = nrm * (md.sine ? std::sin(arg) : std::cos(arg));
            }
            return out;
        }
        case ManifoldKind::FlatTorus: {
            const auto& L = manifold_.torus_lengths();
            double vol = manifold_.volume();
            double nrm = std::sqrt(2.0 / vol);
            for (int l = 0; l < count; ++l) {
                const auto& md = torus_modes_[l];
                bool zero = true;
                double arg = 0.0;
                for (int i = 0; i < manifold_.dimension(); ++i) {
                    if (md.k[i] != 0) zero = false;
                    arg += kTwoPi * md.k[i] * x.c[i] / L[i];
                }
                out[l] = zero ? 1.0 / std::sqrt(vol) : nrm * (md.sine ? std::sin(arg) : std::cos(arg));
            }
            return out;
        }
        case ManifoldKind::Sphere2: {
            if (count == 0) return out;
            int lmax = sphere_modes_[count - 1].l;
            std::vector<double> table;
            sh_eval_all(lmax, x.c[0], x.c[1], x.c[2], table);
            for (int l = 0; l < count; ++l) {
                const auto& md = sphere_modes_[l];
                int idx = md.l * md.l + (md.m == 0 ? 0 : (md.m > 0 ? 2 * md.m - 1 : -2 * md.m));
                out[l] = table[idx];
            }
            return out;
        }
        case ManifoldKind::Mesh:
            manifold_.validate_point(x);
            return mesh_vectors_.row(x.vertex).head(count).transpose();
    }
    return out;
}

const Eigen::MatrixXd& SpectralBasis::mesh_vectors() const {
    if (provenance_ != BasisProvenance::MeshDiscrete)
        throw UnsupportedModel("mesh_vectors: analytic basis has no vertex samples");
    return mesh_vectors_;
}

double BandlimitedFunction::evaluate(const Point& x) const {
    Eigen::VectorXd u = basis->eval_band(x, static_cast<int>(coefficients.size()));
    return u.dot(coefficients);
}

// ---------------------------------------------------------------------------
// Analytic enumeration

SpectralBasis analytic_basis(const ManifoldModel& m, double lambda_max) {
    if (m.is_mesh()) throw UnsupportedModel("analytic_basis: mesh models use mesh_basis");
    if (lambda_max < 0.0) throw InvalidInput("analytic_basis: lambda_max must be >= 0");

    SpectralBasis b;
    b.manifold_ = m;
    b.lambda_max_ = lambda_max;
    b.provenance_ = BasisProvenance::Analytic;
    b.truncated_ = false;

    switch (m.kind()) {
        case ManifoldKind::Circle: {
            double L = m.circle_circumference();
            int kmax = static_cast<int>(std::floor(std::sqrt(lambda_max) * L / kTwoPi + 1e-12));
            b.eigenvalues_.push_back(0.0);
            b.circle_modes_.push_back({0, false});
            for (int k = 1; k <= kmax; ++k) {
                double lam = std::pow(kTwoPi * k / L, 2);
                if (lam > lambda_max * (1.0 + 1e-14)) break;
                b.eigenvalues_.push_back(lam);
                b.circle_modes_.push_back({k, false});
                b.eigenvalues_.push_back(lam);
                b.circle_modes_.push_back({k, true});
            }
            break;
        }
        case ManifoldKind::FlatTorus: {
            const auto& L = m.torus_lengths();
            int d = m.dimension();
            std::array<int, 3> kmax{0, 0, 0};
            for (int i = 0; i < d; ++i)
                kmax[i] = static_cast<int>(std::floor(std::sqrt(lambda_max) * L[i] / kTwoPi + 1e-12));
            struct Entry {
                double lam;
                SpectralBasis::TorusMode mode;
            };
            std::vector<Entry> entries;
            std::array<int, 3> k{0, 0, 0};
            std::function<void(int)> rec = [&](int axis) {
                if (axis == d) {
                    // canonical representative of the +-k pair: first nonzero > 0
                    int first = 0;
                    for (int i = 0; i < d; ++i)
                        if (k[i] != 0) {
                            first = k[i];
                            break;
                        }
                    if (first < 0) return;
                    double lam = 0.0;
                    for (int i = 0; i < d; ++i) lam += std::pow(kTwoPi * k[i] / L[i], 2);
                    if (lam > lambda_max * (1.0 + 1e-14)) return;
                    if (first == 0) {
                        entries.push_back({0.0, {{0, 0, 0}, false}});
                    } else {
                        std::array<std::int32_t, 3> kk{k[0], k[1], k[2]};
                        entries.push_back({lam, {kk, false}});
                        entries.push_back({lam, {kk, true}});
                    }
                    return;
                }
                for (k[axis] = -kmax[axis]; k[axis] <= kmax[axis]; ++k[axis]) rec(axis + 1);
            };
            rec(0);
            std::stable_sort(entries.begin(), entries.end(),
                             [](const Entry& a, const Entry& b_) { return a.lam < b_.lam; });
            for (const auto& e : entries) {
                b.eigenvalues_.push_back(e.lam);
                b.torus_modes_.push_back(e.mode);
            }
            break;
        }
        case ManifoldKind::Sphere2: {
            int lmax = 0;
            while (static_cast<double>(lmax + 1) * (lmax + 2) <= lambda_max * (1.0 + 1e-14)) ++lmax;
            for (int l = 0; l <= lmax; ++l) {
                double lam = static_cast<double>(l) * (l + 1);
                b.eigenvalues_.push_back(lam);
                b.sphere_modes_.push_back({l, 0});
                for (int mm = 1; mm <= l; ++mm) {
                    b.eigenvalues_.push_back(lam);
                    b.sphere_modes_.push_back({l, mm});
                    b.eigenvalues_.push_back(lam);
                    b.sphere_modes_.push_back({l, -mm});
                }
            }
            b.sphere_lmax_ = lmax;
            break;
        }
        case ManifoldKind::Mesh:
            break; // unreachable
    }
    return b;
}

// ---------------------------------------------------------------------------
// Counting, Bernstein, random band functions

int count_eigenvalues(const SpectralBasis& b, double omega) {
    if (omega < 0.0) throw InvalidInput("count_eigenvalues: omega must be >= 0");
    if (omega > b.lambda_max() * (1.0 + 1e-12))
        throw OutOfBand("count_eigenvalues: omega exceeds basis lambda_max " +
                        std::to_string(b.lambda_max()));
    const auto& ev = b.eigenvalues();
    // ties included ("not greater than omega"); tolerate roundoff at the edge
    double edge = omega * (1.0 + 1e-12);
    return static_cast<int>(std::upper_bound(ev.begin(), ev.end(), edge) - ev.begin());
}

double bernstein_ratio(const BandlimitedFunction& f, int k) {
    if (k < 1) throw InvalidInput("bernstein_ratio: k must be >= 1");
    double den = f.coefficients.squaredNorm();
    if (!(den > 0.0)) throw InvalidInput("bernstein_ratio: zero function");
    const auto& ev = f.basis->eigenvalues();
    double num = 0.0;
    for (int l = 0; l < f.coefficients.size(); ++l)
        num += std::pow(ev[l], 2 * k) * f.coefficients[l] * f.coefficients[l];
    return std::sqrt(num / den);
}

BandlimitedFunction random_bandlimited(const SpectralBasis& b, double omega, std::uint64_t seed) {
    int n = count_eigenvalues(b, omega);
    BandlimitedFunction f;
    f.basis = &b;
    f.omega = omega;
    f.coefficients.resize(n);
    CounterRng rng(seed);
    for (int l = 0; l < n; ++l) f.coefficients[l] = rng.normal();
    double nrm = f.coefficients.norm();
    if (nrm == 0.0) f.coefficients[0] = 1.0; // measure-zero fallback
    else f.coefficients /= nrm;
    return f;
}

std::vector<std::pair<double, int>> eigenvalue_multiplicities(const SpectralBasis& b,
                                                              double rel_tol) {
    std::vector<std::pair<double, int>> groups;
    for (double lam : b.eigenvalues()) {
        if (!groups.empty() &&
            lam - groups.back().first <= rel_tol * std::max(std::fabs(lam), 1.0)) {
            ++groups.back().second;
        } else {
            groups.push_back({lam, 1});
        }
    }
    return groups;
}

// ---------------------------------------------------------------------------
// Export

std::string basis_to_json(const SpectralBasis& b) {
    nlohmann::json j;
    j["manifold"] = b.manifold().describe();
    nlohmann::json spec;
    spec["kind"] = kind_name(b.manifold().kind());
    switch (b.manifold().kind()) {
        case ManifoldKind::Circle:
            spec["circumference"] = b.manifold().circle_circumference();
            break;
        case ManifoldKind::FlatTorus: spec["lengths"] = b.manifold().torus_lengths(); break;
        case ManifoldKind::Sphere2: break;
        case ManifoldKind::Mesh:
            spec["vertex_count"] = b.manifold().mesh_data().vertex_count();
            break;
    }
    j["manifold_spec"] = spec;
    j["lambda_max"] = b.lambda_max();
    j["eigenvalues"] = b.eigenvalues();
    j["provenance"] = b.provenance() == BasisProvenance::Analytic ? "analytic" : "mesh-discrete";
    j["truncated"] = b.truncated();
    nlohmann::json groups = nlohmann::json::array();
    for (auto [lam, mult] : eigenvalue_multiplicities(b))
        groups.push_back({{"value", lam}, {"multiplicity", mult}});
    j["multiplicity_groups"] = groups;
    if (b.provenance() == BasisProvenance::MeshDiscrete) {
        const auto& V = b.mesh_vectors();
        std::vector<std::vector<double>> vecs(V.cols());
        for (int c = 0; c < V.cols(); ++c) {
            vecs[c].resize(V.rows());
            for (int r = 0; r < V.rows(); ++r) vecs[c][r] = V(r, c);
        }
        j["eigenvectors"] = vecs;
    }
    return j.dump(2);
}

struct BasisJsonIO {
    static SpectralBasis load(const std::string& text, const ManifoldModel* mesh_model);
};

SpectralBasis BasisJsonIO::load(const std::string& text, const ManifoldModel* mesh_model) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("basis_from_json: not valid JSON: ") + e.what());
    }
    for (const char* key : {"manifold_spec", "lambda_max", "eigenvalues", "provenance"})
        if (!j.contains(key)) throw InvalidInput(std::string("basis_from_json: missing ") + key);

    std::string prov = j["provenance"].get<std::string>();
    if (prov == "analytic") {
        auto spec = j["manifold_spec"];
        std::string kind = spec.at("kind").get<std::string>();
        ManifoldModel m;
        if (kind == "circle") m = ManifoldModel::circle(spec.at("circumference").get<double>());
        else if (kind == "torus")
            m = ManifoldModel::flat_torus(spec.at("lengths").get<std::vector<double>>());
        else if (kind == "sphere") m = ManifoldModel::sphere();
        else throw InvalidInput("basis_from_json: analytic basis with kind " + kind);
        SpectralBasis b = analytic_basis(m, j["lambda_max"].get<double>());
        if (b.size() != static_cast<int>(j["eigenvalues"].size()))
            throw InvalidInput("basis_from_json: eigenvalue count mismatch on re-enumeration");
        return b;
    }
    if (prov != "mesh-discrete")
        throw InvalidInput("basis_from_json: unknown provenance " + prov);
    if (!mesh_model || !mesh_model->is_mesh())
        throw InvalidInput("basis_from_json: mesh basis needs the mesh model to load onto");
    auto values = j["eigenvalues"].get<std::vector<double>>();
    auto vecs = j.at("eigenvectors").get<std::vector<std::vector<double>>>();
    if (vecs.size() != values.size())
        throw InvalidInput("basis_from_json: eigenvector/eigenvalue count mismatch");
    const int nv = mesh_model->mesh_data().vertex_count();
    SpectralBasis b;
    b.manifold_ = *mesh_model;
    b.provenance_ = BasisProvenance::MeshDiscrete;
    b.truncated_ = true;
    b.eigenvalues_ = std::move(values);
    b.lambda_max_ = j["lambda_max"].get<double>();
    b.mesh_vectors_.resize(nv, static_cast<int>(vecs.size()));
    for (std::size_t c = 0; c < vecs.size(); ++c) {
        if (static_cast<int>(vecs[c].size()) != nv)
            throw InvalidInput("basis_from_json: eigenvector length does not match the mesh");
        for (int r = 0; r < nv; ++r) b.mesh_vectors_(r, static_cast<int>(c)) = vecs[c][r];
    }
    return b;
}

SpectralBasis basis_from_json(const std::string& json_text) {
    return BasisJsonIO::load(json_text, nullptr);
}

SpectralBasis basis_from_json(const std::string& json_text, const ManifoldModel& mesh_model) {
    return BasisJsonIO::load(json_text, &mesh_model);
}

} // namespace weylsampl
