#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hcap/report_io.hpp"
#include "hcap/surface_spec.hpp"

using namespace hcap;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("hcap_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("curvature subcommand writes the documented table") {
    TempDir dir;
    const std::string spec = dir.file(
        "cap.json",
        R"({"model":"halfspace","family":"sphere_cap","params":{"h":2,"r":1},"domain_radius":0.6})");
    RunConfig cfg;
    cfg.subcommand = "curvature";
    cfg.spec_path = spec;
    cfg.out_dir = dir.str();
    CHECK(run(cfg) == 0);
    const std::string csv = report::read_file(dir.str() + "/curvature.csv");
    CHECK(csv.rfind("x1,x2,u,w,nu_vertical,kappa1,kappa2", 0) == 0);
    // umbilic cap: every kappa column equals 2
    CHECK(csv.find(",2,2,") != std::string::npos);
}

TEST_CASE("curvature on a raw-expression ball spec works") {
    TempDir dir;
    const std::string spec = dir.file(
        "sphere.json", R"({"model":"ball","family":"ball_sphere","params":{"a":0.5}})");
    RunConfig cfg;
    cfg.subcommand = "curvature";
    cfg.spec_path = spec;
    cfg.out_dir = dir.str();
    CHECK(run(cfg) == 0);
    const std::string csv = report::read_file(dir.str() + "/curvature.csv");
    CHECK(csv.rfind("s,t,E,F,G,L,M,N", 0) == 0);
}

TEST_CASE("identities subcommand gates on residuals with --check") {
    TempDir dir;
    const std::string spec = dir.file(
        "horo.json",
        R"({"model":"halfspace","family":"horosphere","params":{"c":2},"domain_radius":0.7})");
    RunConfig cfg;
    cfg.subcommand = "identities";
    cfg.spec_path = spec;
    cfg.out_dir = dir.str();
    cfg.check = true;
    CHECK(run(cfg) == 0);
}

TEST_CASE("transform then curvature consumes the emitted record") {
    TempDir dir;
    const std::string spec = dir.file(
        "sphere.json", R"({"model":"ball","family":"ball_sphere","params":{"a":0.5}})");
    RunConfig cfg;
    cfg.subcommand = "transform";
    cfg.spec_path = spec;
    cfg.out_dir = dir.str();
    cfg.at = {0.1, 0.2};
    cfg.target_height = 2.0;
    CHECK(run(cfg) == 0);

    RunConfig cfg2;
    cfg2.subcommand = "curvature";
    cfg2.spec_path = dir.str() + "/transform.json";
    cfg2.out_dir = dir.str() + "/round2";
    CHECK(run(cfg2) == 0);
    const std::string csv = report::read_file(cfg2.out_dir + "/curvature.csv");
    // curvature of the normalized sphere is 1.25 at every sampled point
    CHECK(csv.find("1.25") != std::string::npos);
}

TEST_CASE("solve subcommand emits grid and stage report, exit 0 on convergence") {
    TempDir dir;
    const std::string spec = dir.file("prob.json", R"json({
        "domain_radius": 0.6,
        "K": "4",
        "boundary": {"trace": "(add 2 (sqrt (sub 1 (add (mul x1 x1) (mul x2 x2)))))"},
        "shifts": [0.5, 0.0],
        "dx": 0.05,
        "tol": 1e-10})json");
    RunConfig cfg;
    cfg.subcommand = "solve";
    cfg.spec_path = spec;
    cfg.out_dir = dir.str();
    CHECK(run(cfg) == 0);
    CHECK(fs::exists(dir.path / "solution.csv"));
    const std::string stages = report::read_file(dir.str() + "/stages.json");
    CHECK(stages.find("\"all_converged\": true") != std::string::npos);
}

TEST_CASE("solve exits 1 when a stage cannot converge") {
    TempDir dir;
    const std::string spec = dir.file("bad.json", R"({
        "domain_radius": 0.5,
        "K": "-1",
        "boundary": 2.0,
        "shifts": [0.1],
        "dx": 0.1,
        "tol": 1e-10})");
    RunConfig cfg;
    cfg.subcommand = "solve";
    cfg.spec_path = spec;
    cfg.out_dir = dir.str();
    CHECK(run(cfg) == 1);
}

TEST_CASE("estimates on a surface spec writes the per-point table") {
    TempDir dir;
    const std::string spec = dir.file(
        "pcap.json",
        R"({"model":"halfspace","family":"perturbed_cap","params":{"h":2,"r":1,"amplitude":0.02},"domain_radius":0.6})");
    RunConfig cfg;
    cfg.subcommand = "estimates";
    cfg.spec_path = spec;
    cfg.out_dir = dir.str();
    CHECK(run(cfg) == 0);
    const std::string csv = report::read_file(dir.str() + "/estimates.csv");
    CHECK(csv.rfind("x1,x2,K_ext,H_mean,H_trace,sigma,L_sigma", 0) == 0);
    CHECK(fs::exists(dir.path / "estimates.json"));
}

TEST_CASE("malformed specs exit with the usage code") {
    TempDir dir;
    const std::string bad = dir.file("bad.json", R"({"model":"halfspace","family":"nonsense"})");
    RunConfig cfg;
    cfg.subcommand = "curvature";
    cfg.spec_path = bad;
    cfg.out_dir = dir.str();
    CHECK(run(cfg) == 2);
    cfg.spec_path = dir.str() + "/missing.json";
    CHECK(run(cfg) == 2);
    cfg.subcommand = "frobnicate";
    CHECK(run(cfg) == 2);
}

TEST_CASE("identical configs reproduce byte-identical tables") {
    TempDir dir;
    const std::string spec = dir.file(
        "cap.json",
        R"({"model":"halfspace","family":"sphere_cap","params":{"h":2,"r":1},"domain_radius":0.6})");
    RunConfig cfg;
    cfg.subcommand = "curvature";
    cfg.spec_path = spec;
    cfg.seed = 7;
    cfg.out_dir = dir.str() + "/a";
    CHECK(run(cfg) == 0);
    cfg.out_dir = dir.str() + "/b";
    CHECK(run(cfg) == 0);
    CHECK(report::read_file(dir.str() + "/a/curvature.csv") ==
          report::read_file(dir.str() + "/b/curvature.csv"));
    // a different seed samples different points
    cfg.seed = 8;
    cfg.out_dir = dir.str() + "/c";
    CHECK(run(cfg) == 0);
    CHECK(report::read_file(dir.str() + "/a/curvature.csv") !=
          report::read_file(dir.str() + "/c/curvature.csv"));
}
