#pragma once

// Four-stroke Otto cycle on a single quantum trajectory, plus the ensemble
// reduction into work statistics.
//
// Stroke 1 sweeps Delta_i -> Delta_f, stroke 2 holds Delta_f, stroke 3 sweeps
// back and stroke 4 holds Delta_i (or resamples a thermal state). Work is
// -<n_a> dDelta accumulated on the sweeps only.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qotto/kernel.hpp"
#include "qotto/model.hpp"
#include "qotto/qops.hpp"
#include "qotto/rng.hpp"
#include "qotto/traj.hpp"

namespace qotto {

enum class Stroke4Mode { evolve, resample };

/// Basis of the initial thermal Fock states: polariton levels |N_A = 0, N_B = n>
/// of H(delta_i), or bare |0_photon, n_phonon>.
enum class InitialBasis { polariton, bare };

struct HistogramSpec {
    double lo = -1.0;
    double hi = 6.0;
    double width = 0.1;

    int bins() const;
    void validate() const;
};

struct OutputConfig {
    double stride = 0.5;          ///< time-series spacing, 1/omega_m
    bool full_resolution = false; ///< record every integration step instead
    HistogramSpec hist;
};

/// Lambda grid and schemes for the `sweep` verb.
struct SweepSpec {
    std::vector<double> lambdas{0.0, 0.01, 0.02, 0.04};
    std::vector<Scheme> schemes{Scheme::absorptive, Scheme::dispersive};
};

struct CycleConfig {
    ModelParams params;
    SpaceDims dims;
    MeasurementConfig meas;
    StepperConfig stepper;
    double t1 = 40.0;
    double t2 = 400.0;
    double t3 = 40.0;
    double t4 = 4e4;
    int n_traj = 20000;
    Stroke4Mode stroke4_mode = Stroke4Mode::resample;
    InitialBasis initial_basis = InitialBasis::polariton;
    ScheduleKind schedule_kind = ScheduleKind::gap_adaptive;
    std::array<bool, 4> dissipation{true, true, true, true};
    bool monitor_all_strokes = false;
    int last_stroke = 4;  ///< run strokes 1..last_stroke
    OutputConfig output;
    SweepSpec sweep;

    /// Checks every invariant; throws ConfigError naming the key.
    void validate() const;
    double stroke_duration(int stroke) const;
};

/// Level n drawn from the truncated Bose-Einstein distribution at nbar_th.
class InitialStateSampler {
public:
    /// Throws ConfigError when the distribution puts more than 5% of its
    /// mass above the phonon cutoff.
    InitialStateSampler(double nbar, int n_phonon);

    int draw(RngStream& rng) const;
    double probability(int level) const { return prob_[level]; }
    int levels() const { return int(prob_.size()); }

private:
    std::vector<double> prob_;
    std::vector<double> cdf_;
};

/// Eigenstates of the truncated H(delta) with N_A = 0 and N_B = n, for
/// n = 0..n_phonon-1. Level n is the eigenvector with the largest overlap with
/// |0, n>, phased so that overlap is positive.
std::vector<CVector> polariton_ladder(const ModelParams& params, double delta, SpaceDims dims);

/// One thermal draw at delta_i: level n of the chosen basis.
QState sample_initial_state(const ModelParams& params, SpaceDims dims, RngStream& rng,
                            InitialBasis basis = InitialBasis::polariton);

struct TimeSeries {
    std::vector<double> t;
    std::vector<double> delta;
    std::vector<double> n_a;
    std::vector<double> N_A;
    std::vector<double> N_B;

    std::size_t size() const { return t.size(); }
    void clear();
};

struct TrajectoryRecord {
    std::int64_t index = 0;
    std::uint64_t seed = 0;  ///< stream is RngStream(seed, index)
    double work = 0.0;
    std::array<double, 4> stroke_work{};  ///< nonzero on sweeps only
    /// <H> at the start (0) and at the end of each executed stroke.
    std::array<double, 5> energy{};
    double q_in = 0.0;        ///< heat absorbed during stroke 4
    int initial_level = -1;   ///< sampled thermal level, -1 for a given state
    int jump_count = 0;
    int strokes_run = 0;
    TimeSeries series;
};

/// Everything shared read-only by the trajectories of one configuration.
class CyclePlan {
public:
    explicit CyclePlan(const CycleConfig& config);
    ~CyclePlan();
    CyclePlan(const CyclePlan&) = delete;
    CyclePlan& operator=(const CyclePlan&) = delete;

    const CycleConfig& config() const noexcept { return config_; }
    const FockKernel& kernel() const noexcept { return kernel_; }
    const InitialStateSampler& sampler() const noexcept { return sampler_; }
    /// Initial state for thermal level n.
    CVector initial_state(int level) const;

    /// Sample times and detunings common to every trajectory.
    const std::vector<double>& sample_times() const noexcept { return sample_t_; }
    const std::vector<double>& sample_deltas() const noexcept { return sample_delta_; }

    struct Stroke;

private:
    friend class TrajectoryRunner;
    CycleConfig config_;
    FockKernel kernel_;
    InitialStateSampler sampler_;
    BathRates rates_;
    std::vector<std::unique_ptr<Stroke>> strokes_;
    std::vector<double> sample_t_;
    std::vector<double> sample_delta_;
    Eigen::Matrix4d initial_S_;
    std::vector<CVector> ladder_;  // polariton basis only
};

/// Runs trajectory `index` from a thermally sampled initial state.
TrajectoryRecord run_trajectory(const CyclePlan& plan, std::int64_t index);
/// Runs trajectory `index` from a given initial state (initial_level = -1).
TrajectoryRecord run_trajectory(const CyclePlan& plan, std::int64_t index, const QState& initial);
TrajectoryRecord run_trajectory(const CycleConfig& config, std::int64_t index);

/// -<n_a> delta_step for a normalized state.
double work_increment(const QState& state, double delta_step);

/// Heat absorbed in stroke 4: <H> gain over that stroke. In resample mode the
/// fresh thermal state is the trajectory's own initial state. NaN when the
/// record stops before stroke 4.
double heat_bookkeeping(const TrajectoryRecord& record);

struct Histogram {
    HistogramSpec spec;
    std::vector<double> mass;  ///< normalized; out-of-range values go to the edge bins

    double center(int bin) const { return spec.lo + (bin + 0.5) * spec.width; }
};

struct PopulationCurves {
    std::vector<double> t;
    std::vector<double> delta;
    std::vector<double> n_a;
    std::vector<double> N_A;
    std::vector<double> N_B;
};

struct CycleResult {
    double mean_work = 0.0;
    double var_work = 0.0;     ///< population variance, divisor N
    double sem_work = 0.0;
    double var_work_se = 0.0;  ///< standard error of var_work
    Histogram histogram;       ///< of -W
    double q_in = 0.0;
    double q_in_sem = 0.0;
    double efficiency = 0.0;   ///< NaN when q_in <= 0
    bool heat_flag = false;    ///< set when q_in <= 0
    int n_traj_used = 0;
    double mean_jumps = 0.0;
    PopulationCurves curves;
};

/// Deterministic reduction over records sorted by index. Population curves
/// are averaged when every record carries a time series.
CycleResult ensemble_statistics(const std::vector<TrajectoryRecord>& records,
                                const HistogramSpec& bins);

struct EnsembleOptions {
    int workers = 0;          ///< 0: QOTTO_WORKERS, else the OpenMP default
    bool serial = false;      ///< plain loop, no OpenMP
    bool keep_series = false; ///< keep per-trajectory series in the records
    /// Start every trajectory from this state instead of a thermal draw.
    std::shared_ptr<const QState> initial;
    std::function<void(int done, int total)> progress;
};

struct EnsembleRun {
    std::vector<TrajectoryRecord> records;  ///< sorted by index
    PopulationCurves curves;                ///< ensemble means, index order
};

/// Worker count from QOTTO_WORKERS, falling back to the OpenMP default.
int default_workers();

/// Runs trajectories 0..n_traj-1. Results do not depend on the worker count.
/// The first failing trajectory (lowest index) is rethrown with its index.
EnsembleRun run_ensemble(const CyclePlan& plan, const EnsembleOptions& options = {});

struct CycleOutcome {
    CycleResult result;
    std::vector<TrajectoryRecord> records;
};

CycleOutcome run_cycle(const CycleConfig& config, const EnsembleOptions& options = {});

const char* to_string(Scheme scheme);
const char* to_string(InitialBasis basis);
const char* to_string(Stroke4Mode mode);
const char* to_string(ScheduleKind kind);

}  // namespace qotto
