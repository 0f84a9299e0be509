#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int qotto(const std::string& args) {
    const std::string cmd = std::string(QOTTO_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
    const fs::path d = fs::temp_directory_path() / "qotto_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    CHECK(qotto("dry-run --out " + (d / "out").string()) == 0);
    CHECK(fs::exists(d / "out" / "manifest.conf"));
    CHECK(fs::file_size(d / "out" / "summary.csv") > 0);
    CHECK(qotto("dry-run --out " + (d / "out2").string() + " --set model.bogus=1") == 2);
    CHECK(qotto("dry-run --out " + (d / "out2").string() + " --config " + (d / "nope.conf").string()) == 2);
    std::ofstream(d / "blocker") << "x";
    CHECK(qotto("dry-run --out " + (d / "blocker" / "sub").string()) == 4);
    CHECK(qotto("frobnicate") == 2);
    CHECK(qotto("") == 2);
    CHECK(qotto("--help") == 0);
    CHECK(qotto("validate") == 0);
    fs::remove_all(d);
}

TEST_CASE("manifest from dry-run is a usable config") {
    const fs::path d = fs::temp_directory_path() / "qotto_cli_manifest";
    fs::remove_all(d);
    CHECK(qotto("dry-run --quick --seed 17 --out " + d.string()) == 0);
    std::ifstream in(d / "manifest.conf");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("cycle.n_traj = 2000") != std::string::npos);
    CHECK(text.find("stepper.seed = 17") != std::string::npos);
    CHECK(qotto("dry-run --config " + (d / "manifest.conf").string() + " --out " + (d / "again").string()) == 0);
    fs::remove_all(d);
}

}
