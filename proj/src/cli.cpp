// SPDX-License-Identifier: Apache-2.0
#include "weylsampl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "weylsampl/errors.hpp"
#include "weylsampl/kernels.hpp"
#include "weylsampl/lattice.hpp"
#include "weylsampl/manifold.hpp"
#include "weylsampl/off_io.hpp"
#include "weylsampl/parallel.hpp"
#include "weylsampl/sampling.hpp"
#include "weylsampl/spectral_basis.hpp"
#include "weylsampl/version.hpp"
#include "weylsampl/weyl.hpp"

namespace weylsampl {

namespace {

struct RunConfig {
    std::string manifold = "circle";
    double circumference = 2.0 * std::numbers::pi;
    std::vector<double> lengths{1.0, 1.0};
    std::string mesh_path;
    double inj_radius = 0.0; // mesh override, 0 = derived
    double lambda_max = -1.0;
    int k = 16;
    std::string method = "auto";
    double omega = -1.0;
    double omega_min = 100.0;
    double omega_max = 10000.0;
    int grid_points = 0; // 0 = 8 per decade
    double gamma = 0.0;  // 0 = find_gamma at the median omega
    int trials = 8;
    double tau = 1e-6;
    double rho = 0.0;
    std::vector<double> t_grid{0.02, 0.1};
    int n_points = 32;
    int resolution = 0; // 0 = model default
    std::string order = "greedy";
    long long pool = 0; // 0 = default_pool_size
    bool fit = true;
    bool certificate = true;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
    int threads = 0;
};

const std::set<std::string> kConfigKeys = {
    "manifold", "circumference", "lengths",    "mesh",   "inj_radius", "lambda_max",
    "k",        "method",        "omega",      "omega_min", "omega_max", "grid_points",
    "gamma",    "trials",        "tau",        "rho",    "t_grid",     "n_points",
    "resolution", "order",       "pool",       "fit",    "certificate", "seed",
    "out",      "format",        "threads"};

void apply_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidInput("config file must hold a JSON object");
    for (const auto& [key, val] : j.items()) {
        if (!kConfigKeys.count(key)) throw InvalidInput("unknown config key: " + key);
        try {
            if (key == "manifold") cfg.manifold = val.get<std::string>();
            else if (key == "circumference") cfg.circumference = val.get<double>();
            else if (key == "lengths") cfg.lengths = val.get<std::vector<double>>();
            else if (key == "mesh") cfg.mesh_path = val.get<std::string>();
            else if (key == "inj_radius") cfg.inj_radius = val.get<double>();
            else if (key == "lambda_max") cfg.lambda_max = val.get<double>();
            else if (key == "k") cfg.k = val.get<int>();
            else if (key == "method") cfg.method = val.get<std::string>();
            else if (key == "omega") cfg.omega = val.get<double>();
            else if (key == "omega_min") cfg.omega_min = val.get<double>();
            else if (key == "omega_max") cfg.omega_max = val.get<double>();
            else if (key == "grid_points") cfg.grid_points = val.get<int>();
            else if (key == "gamma") cfg.gamma = val.get<double>();
            else if (key == "trials") cfg.trials = val.get<int>();
            else if (key == "tau") cfg.tau = val.get<double>();
            else if (key == "rho") cfg.rho = val.get<double>();
            else if (key == "t_grid") cfg.t_grid = val.get<std::vector<double>>();
            else if (key == "n_points") cfg.n_points = val.get<int>();
            else if (key == "resolution") cfg.resolution = val.get<int>();
            else if (key == "order") cfg.order = val.get<std::string>();
            else if (key == "pool") cfg.pool = val.get<long long>();
            else if (key == "fit") cfg.fit = val.get<bool>();
            else if (key == "certificate") cfg.certificate = val.get<bool>();
            else if (key == "seed") cfg.seed = val.get<std::uint64_t>();
            else if (key == "out") cfg.out = val.get<std::string>();
            else if (key == "format") cfg.format = val.get<std::string>();
            else if (key == "threads") cfg.threads = val.get<int>();
        } catch (const nlohmann::json::exception&) {
            throw InvalidInput("config key '" + key + "' has the wrong type");
        }
    }
}

ManifoldModel make_manifold(const RunConfig& cfg) {
    if (cfg.manifold == "circle") return ManifoldModel::circle(cfg.circumference);
    if (cfg.manifold == "torus") return ManifoldModel::flat_torus(cfg.lengths);
    if (cfg.manifold == "sphere") return ManifoldModel::sphere();
    if (cfg.manifold == "mesh") {
        if (cfg.mesh_path.empty()) throw InvalidInput("mesh manifold requires --mesh <file.off>");
        OffMesh off = read_off_file(cfg.mesh_path);
        std::optional<double> inj;
        if (cfg.inj_radius > 0.0) inj = cfg.inj_radius;
        return ManifoldModel::mesh(std::move(off.vertices), std::move(off.triangles), inj);
    }
    throw InvalidInput("unknown manifold kind: " + cfg.manifold +
                       " (expected circle|torus|sphere|mesh)");
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string config_hash(const RunConfig& cfg, const std::string& subcommand) {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["manifold"] = cfg.manifold;
    j["circumference"] = cfg.circumference;
    j["lengths"] = cfg.lengths;
    j["mesh"] = cfg.mesh_path;
    j["inj_radius"] = cfg.inj_radius;
    j["lambda_max"] = cfg.lambda_max;
    j["k"] = cfg.k;
    j["method"] = cfg.method;
    j["omega"] = cfg.omega;
    j["omega_min"] = cfg.omega_min;
    j["omega_max"] = cfg.omega_max;
    j["grid_points"] = cfg.grid_points;
    j["gamma"] = cfg.gamma;
    j["trials"] = cfg.trials;
    j["tau"] = cfg.tau;
    j["rho"] = cfg.rho;
    j["t_grid"] = cfg.t_grid;
    j["n_points"] = cfg.n_points;
    j["resolution"] = cfg.resolution;
    j["order"] = cfg.order;
    j["pool"] = cfg.pool;
    j["fit"] = cfg.fit;
    j["certificate"] = cfg.certificate;
    j["seed"] = cfg.seed;
    j["format"] = cfg.format;
    std::ostringstream os;
    os << std::hex << fnv1a(j.dump());
    return os.str();
}

struct Provenance {
    std::string hash;
    std::uint64_t seed;
};

void emit(const RunConfig& cfg, const Provenance& prov, const std::string& body, bool csv) {
    std::string content;
    if (csv) {
        std::ostringstream os;
        os << "# config_hash=" << prov.hash << " seed=" << prov.seed << " version=" << kVersion
           << "\n"
           << body;
        content = os.str();
    } else {
        nlohmann::json j = nlohmann::json::parse(body);
        j["run_provenance"] = {{"config_hash", prov.hash}, {"seed", prov.seed},
                               {"version", kVersion}};
        content = j.dump(2) + "\n";
    }
    if (cfg.out.empty()) {
        std::cout << content;
    } else {
        std::ofstream out(cfg.out);
        if (!out) throw InvalidInput("cannot open output file: " + cfg.out);
        out << content;
    }
    std::cerr << "weylsampl " << kVersion << " config_hash=" << prov.hash << " seed=" << prov.seed
              << (cfg.out.empty() ? "" : " out=" + cfg.out) << "\n";
}

std::vector<double> total_geometric_grid(double lo, double hi, int n) {
    if (n < 1) throw InvalidInput("grid_points must be >= 1");
    if (!(lo > 0.0) || !(hi >= lo)) throw InvalidInput("need 0 < omega_min <= omega_max");
    std::vector<double> g;
    if (n == 1) {
        if (hi != lo) throw InvalidInput("grid_points = 1 requires omega_min == omega_max");
        g.push_back(lo);
        return g;
    }
    for (int i = 0; i < n; ++i)
        g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    g.back() = hi;
    return g;
}

int run_spectrum(const RunConfig& cfg, const Provenance& prov) {
    ManifoldModel m = make_manifold(cfg);
    std::string body;
    if (m.is_mesh()) {
        MeshEigOptions opts;
        opts.seed = cfg.seed;
        if (cfg.method == "dense") opts.method = MeshEigOptions::Method::Dense;
        else if (cfg.method == "lanczos") opts.method = MeshEigOptions::Method::Lanczos;
        else if (cfg.method != "auto") throw InvalidInput("method must be auto|dense|lanczos");
        body = basis_to_json(mesh_basis(m, cfg.k, opts));
    } else {
        if (cfg.lambda_max < 0.0) throw InvalidInput("spectrum: --lambda-max is required");
        body = basis_to_json(analytic_basis(m, cfg.lambda_max));
    }
    emit(cfg, prov, body, false);
    return 0;
}

int run_lattice(const RunConfig& cfg, const Provenance& prov) {
    ManifoldModel m = make_manifold(cfg);
    if (!(cfg.rho > 0.0)) throw InvalidInput("lattice: --rho must be positive");
    if (cfg.rho >= m.injectivity_radius() / 6.0)
        std::cerr << "warning: rho = " << cfg.rho
                  << " is at or above the lattice guard injectivity_radius/6 = "
                  << m.injectivity_radius() / 6.0 << "; constants are not certified there\n";
    std::size_t pool_n =
        cfg.pool > 0 ? static_cast<std::size_t>(cfg.pool) : default_pool_size(m, cfg.rho);
    auto pool = candidate_pool(m, pool_n, cfg.seed);
    SweepOrder order = SweepOrder::Shuffled;
    if (cfg.order == "fps") order = SweepOrder::FarthestPoint;
    else if (cfg.order != "greedy") throw InvalidInput("order must be greedy|fps");
    Lattice lat = build_lattice(m, cfg.rho, pool, cfg.seed, order);
    bool csv = cfg.format == "csv";
    emit(cfg, prov, csv ? lattice_to_csv(lat) : lattice_to_json(lat), csv);
    return 0;
}

int run_sample(const RunConfig& cfg, const Provenance& prov) {
    ManifoldModel m = make_manifold(cfg);
    if (cfg.lambda_max < 0.0) throw InvalidInput("sample: --lambda-max is required");
    if (cfg.omega < 0.0) throw InvalidInput("sample: --omega is required");
    if (!(cfg.rho > 0.0)) throw InvalidInput("sample: --rho must be positive");
    SpectralBasis b = analytic_basis(m, cfg.lambda_max);
    auto pool = candidate_pool(
        m, cfg.pool > 0 ? static_cast<std::size_t>(cfg.pool) : default_pool_size(m, cfg.rho),
        cfg.seed);
    Lattice lat = build_lattice(m, cfg.rho, pool, cfg.seed);
    SamplingOperator op = sampling_operator(b, cfg.omega, lat);
    emit(cfg, prov, sampling_report_json(op), false);
    return 0;
}

int run_heat(const RunConfig& cfg, const Provenance& prov) {
    ManifoldModel m = make_manifold(cfg);
    if (cfg.lambda_max < 0.0) throw InvalidInput("heat: --lambda-max is required");
    SpectralBasis b = analytic_basis(m, cfg.lambda_max);
    int res = cfg.resolution > 0 ? cfg.resolution : 64;
    QuadratureRule quad = quadrature(m, res);
    auto points = candidate_pool(m, static_cast<std::size_t>(std::max(2, cfg.n_points)), cfg.seed);
    std::vector<double> ts = cfg.t_grid;
    std::sort(ts.begin(), ts.end());
    HeatDiagnostics h = heat_diagnostics(b, m, ts, points, quad, cfg.fit);
    bool csv = cfg.format == "csv";
    emit(cfg, prov, csv ? heat_diagnostics_to_csv(h) : heat_diagnostics_to_json(h), csv);
    return 0;
}

int run_gamma(const RunConfig& cfg, const Provenance& prov) {
    ManifoldModel m = make_manifold(cfg);
    if (cfg.omega < 0.0) throw InvalidInput("gamma: --omega is required");
    double lmax = cfg.lambda_max >= 0.0 ? cfg.lambda_max : cfg.omega;
    if (lmax < cfg.omega) throw InvalidInput("gamma: lambda_max must cover omega");
    SpectralBasis b = analytic_basis(m, lmax);
    FindGammaOptions opts;
    opts.tau = cfg.tau;
    opts.seed = cfg.seed;
    double g = find_gamma(b, m, cfg.omega, cfg.trials, opts);
    nlohmann::json j;
    j["gamma"] = g;
    j["omega"] = cfg.omega;
    j["trials"] = cfg.trials;
    j["tau"] = cfg.tau;
    j["label"] = "empirical gamma (observed over seeded trials; the theoretical "
                 "gamma(M) exists but is non-constructive)";
    emit(cfg, prov, j.dump(2), false);
    return 0;
}

int run_weyl_scan(const RunConfig& cfg, const Provenance& prov) {
    ManifoldModel m = make_manifold(cfg);
    std::vector<double> grid =
        cfg.grid_points > 0 ? total_geometric_grid(cfg.omega_min, cfg.omega_max, cfg.grid_points)
                            : geometric_grid(cfg.omega_min, cfg.omega_max, 8);
    double lmax = cfg.lambda_max >= 0.0 ? cfg.lambda_max : cfg.omega_max;
    if (lmax < cfg.omega_max) throw InvalidInput("weyl-scan: lambda_max must cover omega_max");
    SpectralBasis b = analytic_basis(m, lmax);

    double gamma = cfg.gamma;
    if (!(gamma > 0.0)) {
        double med = grid[grid.size() / 2];
        FindGammaOptions gopts;
        gopts.tau = cfg.tau;
        gopts.seed = cfg.seed;
        gamma = std::min(find_gamma(b, m, med, cfg.trials, gopts), 1.0 - 1.0 / 64.0);
        std::cerr << "weyl-scan: gamma defaulted to find_gamma(median omega = " << med
                  << ") = " << gamma << "\n";
    }
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput("weyl-scan: gamma must be in (0,1)");

    WeylScanOptions wopts;
    wopts.certificate = cfg.certificate;
    wopts.tau = cfg.tau;
    WeylScanReport rep = weyl_scan(b, m, grid, gamma, cfg.trials, cfg.seed, wopts);
    for (const auto& r : rep.rows)
        if (r.skipped)
            std::cerr << "weyl-scan: skipped omega = " << r.omega << ": " << r.skip_reason << "\n";
    bool csv = cfg.format == "csv";
    emit(cfg, prov, csv ? weyl_report_csv(rep) : weyl_report_json(rep), csv);
    return 0;
}

int run_mesh_eig(const RunConfig& cfg, const Provenance& prov) {
    if (cfg.mesh_path.empty()) throw InvalidInput("mesh-eig: --mesh <file.off> is required");
    RunConfig mc = cfg;
    mc.manifold = "mesh";
    return run_spectrum(mc, prov);
}

} // namespace

int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"weylsampl: lattices, sampling operators and eigenvalue-count "
                 "experiments on compact manifolds"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    // Pre-scan for --config so file values become defaults that flags override.
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") config_path = args[i + 1];
    try {
        if (!config_path.empty()) apply_config_file(config_path, cfg);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags override it)");
        sub->add_option("--manifold", cfg.manifold, "circle|torus|sphere|mesh");
        sub->add_option("--circumference", cfg.circumference, "circle circumference");
        sub->add_option("--lengths", cfg.lengths, "torus side lengths")->delimiter(',');
        sub->add_option("--mesh", cfg.mesh_path, "OFF mesh path");
        sub->add_option("--inj-radius", cfg.inj_radius, "mesh injectivity radius override");
        sub->add_option("--seed", cfg.seed, "PRNG seed (always recorded in outputs)");
        sub->add_option("--out", cfg.out, "output path (default stdout)");
        sub->add_option("--format", cfg.format, "json|csv");
        sub->add_option("--threads", cfg.threads, "worker thread cap");
    };

    CLI::App* spectrum = app.add_subcommand("spectrum", "enumerate a spectral basis");
    add_common(spectrum);
    spectrum->add_option("--lambda-max", cfg.lambda_max, "completeness threshold");
    spectrum->add_option("--k", cfg.k, "mesh eigenpair count");
    spectrum->add_option("--method", cfg.method, "mesh solver: auto|dense|lanczos");

    CLI::App* lattice = app.add_subcommand("lattice", "build a metric rho-lattice");
    add_common(lattice);
    lattice->add_option("--rho", cfg.rho, "lattice density parameter")->required();
    lattice->add_option("--order", cfg.order, "greedy|fps");
    lattice->add_option("--pool", cfg.pool, "candidate pool size (0 = default)");

    CLI::App* sample = app.add_subcommand("sample", "sampling operator frame report");
    add_common(sample);
    sample->add_option("--lambda-max", cfg.lambda_max, "basis threshold");
    sample->add_option("--omega", cfg.omega, "band limit");
    sample->add_option("--rho", cfg.rho, "lattice density");
    sample->add_option("--pool", cfg.pool, "candidate pool size (0 = default)");

    CLI::App* heat = app.add_subcommand("heat", "heat kernel diagnostics");
    add_common(heat);
    heat->add_option("--lambda-max", cfg.lambda_max, "basis threshold");
    heat->add_option("--t", cfg.t_grid, "t grid")->delimiter(',');
    heat->add_option("--points", cfg.n_points, "diagnostic point count");
    heat->add_option("--resolution", cfg.resolution, "quadrature resolution");
    heat->add_flag("--fit,!--no-fit", cfg.fit, "Gaussian-bound fit");

    CLI::App* gamma = app.add_subcommand("gamma", "empirical gamma search");
    add_common(gamma);
    gamma->add_option("--omega", cfg.omega, "band limit")->required();
    gamma->add_option("--lambda-max", cfg.lambda_max, "basis threshold (default omega)");
    gamma->add_option("--trials", cfg.trials, "lattices per gamma");
    gamma->add_option("--tau", cfg.tau, "frame-ratio threshold");

    CLI::App* weylscan = app.add_subcommand("weyl-scan", "eigenvalue count vs lattice cardinality");
    add_common(weylscan);
    weylscan->add_option("--omega-min", cfg.omega_min, "grid start");
    weylscan->add_option("--omega-max", cfg.omega_max, "grid end");
    weylscan->add_option("--points", cfg.grid_points, "total grid points (0 = 8 per decade)");
    weylscan->add_option("--lambda-max", cfg.lambda_max, "basis threshold (default omega_max)");
    weylscan->add_option("--gamma", cfg.gamma, "gamma (0 = find_gamma at median omega)");
    weylscan->add_option("--trials", cfg.trials, "lattice trials per density");
    weylscan->add_option("--tau", cfg.tau, "certificate threshold");
    weylscan->add_flag("--cert,!--no-cert", cfg.certificate, "full-rank certificate per row");

    CLI::App* mesheig = app.add_subcommand("mesh-eig", "mesh Laplacian eigenpairs");
    add_common(mesheig);
    mesheig->add_option("--k", cfg.k, "eigenpair count");
    mesheig->add_option("--method", cfg.method, "auto|dense|lanczos");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cfg.threads == 0) {
            if (const char* env = std::getenv("WEYLSAMPL_THREADS")) cfg.threads = std::atoi(env);
        }
        set_thread_limit(cfg.threads);
        if (cfg.format != "json" && cfg.format != "csv")
            throw InvalidInput("format must be json or csv");

        auto sub = app.get_subcommands().front();
        Provenance prov{config_hash(cfg, sub->get_name()), cfg.seed};
        if (sub == spectrum) return run_spectrum(cfg, prov);
        if (sub == lattice) return run_lattice(cfg, prov);
        if (sub == sample) return run_sample(cfg, prov);
        if (sub == heat) return run_heat(cfg, prov);
        if (sub == gamma) return run_gamma(cfg, prov);
        if (sub == weylscan) return run_weyl_scan(cfg, prov);
        if (sub == mesheig) return run_mesh_eig(cfg, prov);
        throw InvalidInput("unknown subcommand");
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

int cli_run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_run(args);
}

} // namespace weylsampl
