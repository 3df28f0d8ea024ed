// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support/test_meshes.hpp"
#include "weylsampl/cli.hpp"
#include "weylsampl/off_io.hpp"

using namespace weylsampl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("weylsampl_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("spectrum subcommand writes the sphere basis with 16 eigenvalues") {
    TempDir tmp;
    auto out = tmp.file("spec.json");
    int rc = cli_run({"spectrum", "--manifold", "sphere", "--lambda-max", "12", "--out", out});
    CHECK(rc == 0);
    auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["eigenvalues"].size() == 16);
    CHECK(j["run_provenance"]["version"].is_string());
    CHECK(j["run_provenance"]["seed"] == 1);
    CHECK(j["run_provenance"]["config_hash"].is_string());
}

TEST_CASE("exit codes: validation errors map to 1") {
    CHECK(cli_run({"spectrum", "--manifold", "nowhere", "--lambda-max", "4"}) == 1);
    CHECK(cli_run({"spectrum", "--manifold", "circle"}) == 1);            // missing lambda-max
    CHECK(cli_run({"lattice", "--manifold", "circle"}) == 1);             // missing rho
    CHECK(cli_run({"bogus-subcommand"}) == 1);
    CHECK(cli_run({"spectrum", "--manifold", "circle", "--lambda-max", "4", "--format", "yaml"}) ==
          1);
}

TEST_CASE("lattice subcommand: guard warning path still exits 0 with one point") {
    TempDir tmp;
    auto out = tmp.file("lat.json");
    int rc = cli_run({"lattice", "--manifold", "circle", "--rho", "10", "--seed", "1", "--out",
                      out, "--pool", "2000"});
    CHECK(rc == 0);
    auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["points"].size() == 1);
    CHECK(j["diagnostics"]["multiplicity"] == 1);
}

TEST_CASE("weyl-scan CSV: deterministic, header row, provenance comment") {
    TempDir tmp;
    auto out1 = tmp.file("scan1.csv");
    auto out2 = tmp.file("scan2.csv");
    std::vector<std::string> args{"weyl-scan", "--manifold", "circle",
                                  "--omega-min", "100",     "--omega-max",
                                  "1600",       "--points", "3",
                                  "--gamma",    "0.5",      "--trials",
                                  "4",          "--seed",   "1",
                                  "--format",   "csv"};
    auto a1 = args;
    a1.push_back("--out");
    a1.push_back(out1);
    auto a2 = args;
    a2.push_back("--out");
    a2.push_back(out2);
    CHECK(cli_run(a1) == 0);
    CHECK(cli_run(a2) == 0);
    auto s1 = slurp(out1);
    CHECK(s1 == slurp(out2)); // byte-identical

    std::istringstream in(s1);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# config_hash=", 0) == 0);
    CHECK(line.find("seed=1") != std::string::npos);
    std::getline(in, line);
    CHECK(line ==
          "omega,n_omega,card_min_rho,card_max_rho,card_min_gamma,ratio_lower,upper_ok,weyl_ratio");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);
    // n_omega of the first row is 21
    CHECK(s1.find("\n100,21,") != std::string::npos);
}

TEST_CASE("config file provides defaults, flags override, unknown keys rejected") {
    TempDir tmp;
    auto cfg = tmp.file("run.json");
    {
        std::ofstream out(cfg);
        out << R"({"manifold": "sphere", "lambda_max": 12.0, "seed": 9})";
    }
    auto out = tmp.file("spec.json");
    CHECK(cli_run({"spectrum", "--config", cfg, "--out", out}) == 0);
    auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["eigenvalues"].size() == 16);
    CHECK(j["run_provenance"]["seed"] == 9);

    // flag overrides the file value
    CHECK(cli_run({"spectrum", "--config", cfg, "--lambda-max", "6", "--out", out}) == 0);
    j = nlohmann::json::parse(slurp(out));
    CHECK(j["eigenvalues"].size() == 9);

    auto bad = tmp.file("bad.json");
    {
        std::ofstream o(bad);
        o << R"({"manifold": "sphere", "volume": 12.0})";
    }
    CHECK(cli_run({"spectrum", "--config", bad, "--lambda-max", "6"}) == 1);
    auto notjson = tmp.file("notjson.json");
    {
        std::ofstream o(notjson);
        o << "not json at all {";
    }
    CHECK(cli_run({"spectrum", "--config", notjson, "--lambda-max", "6"}) == 1);
}

TEST_CASE("mesh-eig reads OFF and reports eigenvalues; parse errors exit 1") {
    TempDir tmp;
    auto meshfile = tmp.file("ico.off");
    auto ico = test_meshes::icosphere(2);
    write_off_file(meshfile, OffMesh{ico.vertices, ico.triangles});
    auto out = tmp.file("eig.json");
    CHECK(cli_run({"mesh-eig", "--mesh", meshfile, "--k", "5", "--out", out}) == 0);
    auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j["eigenvalues"].size() == 5);
    CHECK(j["eigenvalues"][0] == 0.0);
    CHECK(j["run_provenance"]["config_hash"].is_string());
    CHECK(j["truncated"] == true);

    auto broken = tmp.file("broken.off");
    {
        std::ofstream o(broken);
        o << "OFF\n3 1 0\n0 0 0\n1 0 0\n";
    }
    CHECK(cli_run({"mesh-eig", "--mesh", broken, "--k", "2"}) == 1);
    CHECK(cli_run({"mesh-eig", "--k", "2"}) == 1); // missing --mesh
}

TEST_CASE("sample and gamma subcommands produce frame reports") {
    TempDir tmp;
    auto out = tmp.file("sample.json");
    CHECK(cli_run({"sample", "--manifold", "circle", "--lambda-max", "101", "--omega", "100",
                   "--rho", "0.05", "--seed", "2", "--out", out}) == 0);
    auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["n_band"] == 21);
    CHECK(j["n_points"].get<int>() >= 21);
    CHECK(j["B_lower"].get<double>() > 0.0);
    CHECK(j["sigma_min"].get<double>() > 0.0);

    auto gout = tmp.file("gamma.json");
    CHECK(cli_run({"gamma", "--manifold", "circle", "--omega", "100", "--trials", "2", "--seed",
                   "4", "--out", gout}) == 0);
    auto g = nlohmann::json::parse(slurp(gout));
    CHECK(g["gamma"].get<double>() > 0.0);
    CHECK(g["gamma"].get<double>() <= 1.0);
    CHECK(g["label"].get<std::string>().find("empirical") != std::string::npos);
}

TEST_CASE("heat subcommand emits the CSV schema") {
    TempDir tmp;
    auto out = tmp.file("heat.csv");
    CHECK(cli_run({"heat", "--manifold", "circle", "--lambda-max", "2600", "--t", "0.02,0.1",
                   "--points", "3", "--format", "csv", "--out", out}) == 0);
    auto s = slurp(out);
    CHECK(s.find("t,x_id,p_diag,trace_spectral,trace_quadrature") != std::string::npos);
    // 2 t-values x 3 points plus provenance and header lines
    CHECK(std::count(s.begin(), s.end(), '\n') == 2 + 6);
}

TEST_CASE("numerical failures map to exit 2") {
    // gamma search that cannot pass: tau = 1 demands B_lower >= B_upper
    CHECK(cli_run({"gamma", "--manifold", "circle", "--omega", "100", "--trials", "1", "--tau",
                   "1.5"}) == 2);
}

TEST_CASE("thread cap: flag and environment fallback are accepted") {
    TempDir tmp;
    auto out = tmp.file("spec.json");
    CHECK(cli_run({"spectrum", "--manifold", "circle", "--lambda-max", "4", "--threads", "2",
                   "--out", out}) == 0);
    ::setenv("WEYLSAMPL_THREADS", "3", 1);
    CHECK(cli_run({"spectrum", "--manifold", "circle", "--lambda-max", "4", "--out", out}) == 0);
    ::unsetenv("WEYLSAMPL_THREADS");
}
