// qotto: optomechanical Otto cycle ensembles from the command line.
//
//   qotto run      --config cycle.conf --out results/
//   qotto sweep    --config cycle.conf --out results/ --quick
//   qotto validate
//   qotto dry-run  --out results/
//
// Exit codes: 0 ok, 1 unexpected error, 2 bad configuration or usage,
// 3 integrator / stability / domain failure, 4 I/O failure, 5 validation
// check failed.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qotto/config.hpp"
#include "qotto/errors.hpp"
#include "qotto/outputs.hpp"
#include "qotto/sweep.hpp"
#include "qotto/validate.hpp"

namespace {

enum Exit { ok = 0, other = 1, config_error = 2, numeric_error = 3, io_error = 4, check_failed = 5 };

struct Common {
    std::string config_path;
    std::string out_dir = "qotto_out";
    std::optional<std::uint64_t> seed;
    bool quick = false;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c, bool with_out) {
    cmd->add_option("--config", c.config_path, "configuration file (key = value lines)");
    if (with_out) cmd->add_option("--out", c.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_flag("--quick", c.quick, "2000 trajectories instead of the configured count");
    cmd->add_option("--set", c.sets, "override, key=value (repeatable)")->allow_extra_args(false);
}

qotto::CycleConfig load(const Common& c) {
    std::vector<std::string> overrides = c.sets;
    if (c.seed) overrides.push_back("stepper.seed=" + std::to_string(*c.seed));
    if (c.quick) overrides.push_back("cycle.n_traj=2000");
    if (c.config_path.empty()) return qotto::parse_config_text("", "<defaults>", overrides);
    return qotto::parse_config_file(c.config_path, overrides);
}

qotto::RunManifest manifest(const qotto::CycleConfig& config, const std::string& verb,
                            const qotto::OutputWriter& out) {
    qotto::RunManifest m;
    m.config = config;
    m.verb = verb;
    m.timestamp = qotto::utc_timestamp();
    m.output_dir = out.dir().string();
    return m;
}

qotto::EnsembleOptions progress_options() {
    qotto::EnsembleOptions opt;
    opt.progress = [](int done, int total) {
        std::fprintf(stderr, "\r  %d / %d trajectories", done, total);
        if (done == total) std::fputc('\n', stderr);
    };
    return opt;
}

void print_result(qotto::Scheme scheme, double lambda, const qotto::CycleResult& r) {
    std::printf("%-10s lambda=%-6g <W>=%.5f +- %.5f  var=%.5f  Q_in=%.5f  eta=%.4f%s\n",
                qotto::to_string(scheme), lambda, r.mean_work, r.sem_work, r.var_work, r.q_in,
                r.efficiency, r.heat_flag ? "  (Q_in <= 0, efficiency undefined)" : "");
}

int cmd_run(const Common& c) {
    const qotto::CycleConfig config = load(c);
    qotto::OutputWriter out(c.out_dir);
    out.write_manifest(manifest(config, "run", out));
    out.begin();
    std::fprintf(stderr, "run: %s, lambda %g, %d trajectories, %d workers\n",
                 qotto::to_string(config.meas.scheme), config.meas.lambda, config.n_traj,
                 qotto::default_workers());
    const qotto::CycleOutcome outcome = qotto::run_cycle(config, progress_options());
    out.append(config.meas.scheme, config.meas.lambda, outcome.result);
    print_result(config.meas.scheme, config.meas.lambda, outcome.result);
    return ok;
}

int cmd_sweep(const Common& c) {
    const qotto::CycleConfig config = load(c);
    qotto::OutputWriter out(c.out_dir);
    out.write_manifest(manifest(config, "sweep", out));
    out.begin();
    const auto grid = qotto::sweep_grid(config);
    std::fprintf(stderr, "sweep: %zu points, %d trajectories each, %d workers\n", grid.size(),
                 config.n_traj, qotto::default_workers());
    qotto::run_sweep(config, progress_options(), [&](const qotto::SweepPoint& p) {
        out.append(p.scheme, p.lambda, p.result);
        print_result(p.scheme, p.lambda, p.result);
        std::fflush(stdout);
    });
    return ok;
}

int cmd_validate(const Common& c) {
    const qotto::CycleConfig config = load(c);
    int failed = 0;
    for (const auto& r : qotto::run_validation(config)) {
        std::printf("[%s] %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        failed += !r.passed;
    }
    std::printf("%d check(s) failed\n", failed);
    return failed ? check_failed : ok;
}

int cmd_dry_run(const Common& c) {
    const qotto::CycleConfig config = load(c);
    qotto::OutputWriter out(c.out_dir);
    out.write_manifest(manifest(config, "dry-run", out));
    out.begin();
    std::printf("wrote manifest and empty CSVs to %s\n", out.dir().string().c_str());
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optomechanical quantum Otto cycle under continuous measurement"};
    app.set_version_flag("--version", std::string(QOTTO_VERSION));
    app.require_subcommand(1);
    app.footer("Worker threads: QOTTO_WORKERS (default: all cores).\n"
               "Exit codes: 0 ok, 1 other, 2 config/usage, 3 integrator/stability, 4 I/O, "
               "5 validation failed.");

    Common common;
    auto* run = app.add_subcommand("run", "one ensemble with the configured scheme and lambda");
    auto* sweep = app.add_subcommand("sweep", "one ensemble per (scheme, lambda) in sweep.*");
    auto* validate = app.add_subcommand("validate", "closed-form and kernel self-checks");
    auto* dry = app.add_subcommand("dry-run", "resolve the config, write manifest and headers only");
    add_common(run, common, true);
    add_common(sweep, common, true);
    add_common(validate, common, false);
    add_common(dry, common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (*run) return cmd_run(common);
        if (*sweep) return cmd_sweep(common);
        if (*validate) return cmd_validate(common);
        if (*dry) return cmd_dry_run(common);
        return config_error;
    } catch (const qotto::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config_error;
    } catch (const qotto::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return io_error;
    } catch (const qotto::IntegratorError& e) {
        std::fprintf(stderr, "integrator error: %s\n", e.what());
        return numeric_error;
    } catch (const qotto::StabilityError& e) {
        std::fprintf(stderr, "stability error: %s\n", e.what());
        return numeric_error;
    } catch (const qotto::DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return numeric_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return other;
    }
}
