#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qotto/config.hpp"
#include "qotto/errors.hpp"
#include "qotto/outputs.hpp"
#include "qotto/sweep.hpp"

using namespace qotto;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    return d;
}

CycleConfig tiny() {
    CycleConfig c;
    c.dims = {8, 8};
    c.params.nbar_th = 1.0;
    c.t1 = c.t3 = 4.0;
    c.t2 = 20.0;
    c.n_traj = 10;
    c.stepper.dt = 1e-2;
    c.meas = {Scheme::dispersive, 0.2};
    return c;
}

void write_run(const fs::path& dir, const CycleConfig& c, int workers) {
    OutputWriter out(dir);
    RunManifest m;
    m.config = c;
    m.output_dir = dir.string();
    out.write_manifest(m);
    out.begin();
    EnsembleOptions opt;
    opt.workers = workers;
    out.append(c.meas.scheme, c.meas.lambda, run_cycle(c, opt).result);
}

}  // namespace

TEST_SUITE("outputs") {

TEST_CASE("dry run: manifest and header-only CSVs") {
    const fs::path d = fresh_dir("qotto_out_dry");
    OutputWriter out(d);
    RunManifest m;
    m.verb = "dry-run";
    out.write_manifest(m);
    out.begin();
    CHECK(slurp(d / "summary.csv") == "scheme,lambda,mean_work,sem_work,var_work,q_in,efficiency,n_traj\n");
    CHECK(slurp(d / "populations.csv") == "scheme,lambda,t,delta,n_a,N_A,N_B\n");
    CHECK(slurp(d / "work_hist.csv") == "scheme,lambda,bin_center,probability\n");
    const std::string manifest = slurp(d / "manifest.conf");
    CHECK(manifest.find("# verb: dry-run") != std::string::npos);
    CHECK(manifest.find("\r") == std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("manifest parses back to the same configuration") {
    RunManifest m;
    m.config = tiny();
    m.config.stepper.seed = 99;
    m.timestamp = utc_timestamp();
    const CycleConfig back = parse_config_text(format_manifest(m));
    CHECK(emit_config(back) == emit_config(m.config));
}

TEST_CASE("unwritable directory fails before any work") {
    const fs::path d = fresh_dir("qotto_out_blocked");
    fs::create_directories(d);
    std::ofstream(d / "file") << "x";
    CHECK_THROWS_AS(OutputWriter(d / "file" / "sub"), IoError);
    fs::remove_all(d);
}

TEST_CASE("run output: normalized histogram, t = 0 populations") {
    const fs::path d = fresh_dir("qotto_out_run");
    CycleConfig c = tiny();
    c.meas = {Scheme::none, 0.0};
    write_run(d, c, 1);
    std::ifstream hist(d / "work_hist.csv");
    std::string line;
    std::getline(hist, line);
    double total = 0;
    int rows = 0;
    while (std::getline(hist, line)) {
        total += std::stod(line.substr(line.rfind(',') + 1));
        ++rows;
    }
    CHECK(rows == c.output.hist.bins());
    CHECK(std::abs(total - 1.0) < 1e-9);

    std::ifstream pop(d / "populations.csv");
    std::getline(pop, line);
    std::getline(pop, line);
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    REQUIRE(f.size() == 7);
    CHECK(f[0] == "none");
    CHECK(f[2] == "0");
    CHECK(std::stod(f[5]) < 1e-6);  // N_A(0)
    CHECK(std::stod(f[6]) > 0.0);

    std::ifstream sum(d / "summary.csv");
    std::getline(sum, line);
    std::getline(sum, line);
    CHECK(line.rfind("none,0,", 0) == 0);
    CHECK(line.substr(line.rfind(',') + 1) == "10");
    fs::remove_all(d);
}

TEST_CASE("identical manifests give byte-identical CSVs for any worker count") {
    const CycleConfig c = tiny();
    const fs::path a = fresh_dir("qotto_out_a"), b = fresh_dir("qotto_out_b"), e = fresh_dir("qotto_out_c");
    write_run(a, c, 1);
    write_run(b, c, 1);
    write_run(e, parse_config_text(slurp(a / "manifest.conf")), 3);
    for (const char* f : {"summary.csv", "populations.csv", "work_hist.csv"}) {
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(slurp(a / f) == slurp(e / f));
    }
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(e);
}

TEST_CASE("undefined efficiency is written as nan") {
    const fs::path d = fresh_dir("qotto_out_nan");
    OutputWriter out(d);
    out.begin();
    CycleResult r;
    r.efficiency = std::nan("");
    r.histogram.spec = HistogramSpec{};
    r.histogram.mass.assign(r.histogram.spec.bins(), 0.0);
    out.append(Scheme::absorptive, 0.01, r);
    const std::string s = slurp(d / "summary.csv");
    CHECK(s.find("absorptive,0.01,0,0,0,0,nan,0\n") != std::string::npos);
    fs::remove_all(d);
}

}

TEST_SUITE("sweep") {

TEST_CASE("grid") {
    CycleConfig c;
    CHECK(sweep_grid(c).size() == 8);
    c.sweep.schemes = {Scheme::none};
    c.sweep.lambdas = {0.0, 0.01};
    const auto g = sweep_grid(c);
    REQUIRE(g.size() == 1);
    CHECK(g[0].first == Scheme::none);
    CHECK(g[0].second == 0.0);
}

TEST_CASE("point configs keep the master seed") {
    CycleConfig c;
    c.stepper.seed = 5;
    const CycleConfig p = sweep_point_config(c, Scheme::dispersive, 0.02);
    CHECK(p.meas.scheme == Scheme::dispersive);
    CHECK(p.meas.lambda == 0.02);
    CHECK(p.stepper.seed == 5);
}

TEST_CASE("a none-only sweep equals a plain run") {
    CycleConfig c = tiny();
    c.meas = {Scheme::none, 0.0};
    c.sweep.schemes = {Scheme::none};
    c.sweep.lambdas = {0.0};
    int calls = 0;
    const auto points = run_sweep(c, {}, [&](const SweepPoint&) { ++calls; });
    REQUIRE(points.size() == 1);
    CHECK(calls == 1);
    const CycleResult plain = run_cycle(c).result;
    CHECK(points[0].result.mean_work == plain.mean_work);
    CHECK(points[0].result.var_work == plain.var_work);
}

TEST_CASE("lambda = 0 points of both schemes coincide with none") {
    CycleConfig c = tiny();
    c.sweep.schemes = {Scheme::absorptive, Scheme::dispersive};
    c.sweep.lambdas = {0.0};
    const auto points = run_sweep(c);
    c.meas = {Scheme::none, 0.0};
    const CycleResult none = run_cycle(c).result;
    for (const auto& p : points) {
        CHECK(std::abs(p.result.mean_work - none.mean_work) <= 2 * none.sem_work);
    }
}

TEST_CASE("an invalid point aborts before any ensemble runs") {
    CycleConfig c = tiny();
    c.sweep.lambdas = {0.0, 5.0};  // dt * lambda too large
    int calls = 0;
    CHECK_THROWS_AS(run_sweep(c, {}, [&](const SweepPoint&) { ++calls; }), ConfigError);
    CHECK(calls == 0);
}

}
