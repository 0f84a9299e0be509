#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qotto/config.hpp"
#include "qotto/errors.hpp"

using namespace qotto;

TEST_SUITE("config") {

TEST_CASE("empty file is the full default configuration") {
    const CycleConfig c = parse_config_text("");
    CHECK(c.params.G == 0.2);
    CHECK(c.params.delta_i == -3.0);
    CHECK(c.params.delta_f == -0.4);
    CHECK(c.params.kappa == 5e-3);
    CHECK(c.params.gamma == 1e-4);
    CHECK(c.params.nbar_th == 4.0);
    CHECK(c.meas.scheme == Scheme::none);
    CHECK(c.meas.lambda == 0.0);
    CHECK(c.t1 == 40.0);
    CHECK(c.t2 == 400.0);
    CHECK(c.t3 == 40.0);
    CHECK(c.t4 == 4e4);
    CHECK(c.n_traj == 20000);
    CHECK(c.dims == SpaceDims{20, 20});
    CHECK(c.stroke4_mode == Stroke4Mode::resample);
    CHECK(c.initial_basis == InitialBasis::polariton);
}

TEST_CASE("dispersive run at lambda 0.04") {
    const CycleConfig c = parse_config_text("# dispersive, strongest record\nmeas.scheme = dispersive\nmeas.lambda = 0.04  # strength\n");
    CHECK(c.meas.scheme == Scheme::dispersive);
    CHECK(c.meas.lambda == 0.04);
}

TEST_CASE("errors name the key and the line") {
    CHECK_THROWS_WITH_AS(parse_config_text("model.delta_i = -1.0\nmodel.delta_f = -1.5\n", "c.conf"),
                         doctest::Contains("c.conf:"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("\n\nmodel.G = 0.1\nmodel.bogus = 3\n", "c.conf"),
                         "c.conf:4: model.bogus: unknown key", ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("space.n_photon = ten\n", "c.conf"),
                         doctest::Contains("c.conf:1: space.n_photon"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("model.G = 0.1\nmodel.G = 0.2\n", "c.conf"),
                         doctest::Contains("c.conf:2: model.G: duplicate key"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("just words\n", "c.conf"),
                         doctest::Contains("c.conf:1:"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("\nmodel.kappa = -1\n", "c.conf"),
                         doctest::Contains("c.conf:2: model.kappa"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("cycle.stroke4_mode = sometimes\n"),
                         doctest::Contains("cycle.stroke4_mode"), ConfigError);
}

TEST_CASE("ordering invariant error points at a key") {
    try {
        parse_config_text("model.delta_i = -1.0\nmodel.delta_f = -1.5\n", "c.conf");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK((what.find("model.delta_f") != std::string::npos || what.find("model.delta_i") != std::string::npos));
    }
}

TEST_CASE("overrides apply after the file") {
    const CycleConfig c = parse_config_text("model.G = 0.1\n", "c", {"model.G=0.15", "cycle.n_traj = 7"});
    CHECK(c.params.G == 0.15);
    CHECK(c.n_traj == 7);
    CHECK_THROWS_AS(parse_config_text("", "c", {"model.G"}), ConfigError);
    CHECK_THROWS_AS(parse_config_text("", "c", {"nope=1"}), ConfigError);
}

TEST_CASE("emit and parse round-trip every key") {
    CycleConfig c;
    c.params.G = 0.123456789012345;
    c.params.nbar_th = 2.5;
    c.meas = {Scheme::absorptive, 0.02};
    c.stepper.seed = 987654321987ULL;
    c.stepper.renorm_every_step = false;
    c.dissipation = {false, true, false, true};
    c.stroke4_mode = Stroke4Mode::evolve;
    c.initial_basis = InitialBasis::bare;
    c.schedule_kind = ScheduleKind::linear;
    c.monitor_all_strokes = true;
    c.last_stroke = 3;
    c.output.full_resolution = true;
    c.sweep.lambdas = {0.0, 0.005, 1.0 / 3.0};
    c.sweep.schemes = {Scheme::dispersive};
    const std::string text = emit_config(c);
    const CycleConfig back = parse_config_text(text);
    CHECK(emit_config(back) == text);
    CHECK(back.params.G == c.params.G);
    CHECK(back.sweep.lambdas[2] == 1.0 / 3.0);
    CHECK(back.stepper.seed == c.stepper.seed);
    // every key appears exactly once
    for (const auto& key : config_keys()) {
        CHECK(text.find(key + " = ") != std::string::npos);
    }
}

TEST_CASE("shortest round-trip number text") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(40) == "40");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("files") {
    const auto dir = std::filesystem::temp_directory_path() / "qotto_config_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "a.conf";
    std::ofstream(path) << "meas.scheme = absorptive\nmeas.lambda = 0.01\n";
    const CycleConfig c = parse_config_file(path.string());
    CHECK(c.meas.scheme == Scheme::absorptive);
    CHECK_THROWS_WITH_AS(parse_config_file((dir / "missing.conf").string()),
                         doctest::Contains("missing.conf"), ConfigError);
    std::filesystem::remove_all(dir);
}

}
