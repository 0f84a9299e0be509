#include "qotto/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/Eigenvalues>
#include <limits>
#include <mutex>
#include <string>
#include <tuple>

#include "qotto/errors.hpp"

namespace qotto {

namespace {

constexpr double kMaxTailMass = 0.05;

long step_count(double duration, double dt) {
    return std::max(1L, std::lround(duration / dt));
}

double max_upper_frequency(const ModelParams& p) {
    // omega_A grows with |Delta| on the red-detuned side, but scan anyway
    double w = 0.0;
    constexpr int kPoints = 64;
    for (int k = 0; k <= kPoints; ++k) {
        const double d = p.delta_i + (p.delta_f - p.delta_i) * k / kPoints;
        w = std::max(w, normal_mode_frequencies(p, d).omega_A);
    }
    return w;
}

// Diagonalizing H_eff dominates plan construction, and sweep points share
// their thermalization strokes, so the evolvers are memoized.
std::shared_ptr<const ConstantDetuningEvolver> shared_evolver(const ModelParams& p, double delta,
                                                              SpaceDims dims, BathRates rates) {
    using Key = std::tuple<double, double, double, int, int, double, double, double>;
    constexpr std::size_t kCapacity = 8;
    static std::mutex mutex;
    static std::deque<std::pair<Key, std::shared_ptr<const ConstantDetuningEvolver>>> cache;
    const Key key{p.omega_m, p.G, delta, dims.n_photon, dims.n_phonon,
                  rates.kappa, rates.phonon_down, rates.phonon_up};
    {
        std::lock_guard<std::mutex> lock(mutex);
        for (const auto& [k, ev] : cache) {
            if (k == key) return ev;
        }
    }
    auto ev = std::make_shared<const ConstantDetuningEvolver>(p, delta, dims, rates);
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace_back(key, ev);
    if (cache.size() > kCapacity) cache.pop_front();
    return ev;
}

}  // namespace

int HistogramSpec::bins() const {
    return int(std::lround((hi - lo) / width));
}

void HistogramSpec::validate() const {
    if (!(width > 0.0)) throw ConfigError("output.hist_width: must be positive");
    if (!(hi > lo)) throw ConfigError("output.hist_max: must exceed output.hist_min");
    const double n = (hi - lo) / width;
    if (std::abs(n - std::round(n)) > 1e-9 * n) {
        throw ConfigError("output.hist_width: must divide hist_max - hist_min");
    }
}

double CycleConfig::stroke_duration(int stroke) const {
    switch (stroke) {
        case 1: return t1;
        case 2: return t2;
        case 3: return t3;
        case 4: return t4;
        default: throw DomainError("stroke number must be 1..4");
    }
}

void CycleConfig::validate() const {
    params.validate();
    dims.validate();
    meas.validate();
    if (!(t1 > 0.0)) throw ConfigError("cycle.t1: must be positive");
    if (!(t2 >= 0.0)) throw ConfigError("cycle.t2: must be >= 0");
    if (!(t3 > 0.0)) throw ConfigError("cycle.t3: must be positive");
    if (!(t4 >= 0.0)) throw ConfigError("cycle.t4: must be >= 0");
    if (n_traj < 1) throw ConfigError("cycle.n_traj: must be >= 1");
    if (last_stroke < 1 || last_stroke > 4) throw ConfigError("cycle.last_stroke: must be 1..4");
    if (!(output.stride > 0.0)) throw ConfigError("output.stride: must be positive");
    output.hist.validate();
    if (sweep.lambdas.empty()) throw ConfigError("sweep.lambdas: empty list");
    for (double l : sweep.lambdas) {
        if (!(l >= 0.0)) throw ConfigError("sweep.lambdas: values must be >= 0");
    }
    if (sweep.schemes.empty()) throw ConfigError("sweep.schemes: empty list");
    stepper.validate(meas.active() ? meas.lambda : 0.0, max_upper_frequency(params));
    const double q = params.nbar_th / (1.0 + params.nbar_th);
    const double tail = std::pow(q, dims.n_phonon);
    if (tail > kMaxTailMass) {
        throw ConfigError("model.nbar_th: thermal tail mass " + std::to_string(tail) +
                          " above the phonon cutoff exceeds 5%; raise space.n_phonon");
    }
}

InitialStateSampler::InitialStateSampler(double nbar, int n_phonon) {
    if (n_phonon < 1) throw ConfigError("space.n_phonon: must be positive");
    if (!(nbar >= 0.0)) throw ConfigError("model.nbar_th: must be >= 0");
    prob_.assign(n_phonon, 0.0);
    if (nbar == 0.0) {
        prob_[0] = 1.0;
    } else {
        const double q = nbar / (1.0 + nbar);
        const double tail = std::pow(q, n_phonon);
        if (tail > kMaxTailMass) {
            throw ConfigError("model.nbar_th: thermal tail mass " + std::to_string(tail) +
                              " above the phonon cutoff exceeds 5%");
        }
        double p = 1.0 / (1.0 + nbar);
        for (int n = 0; n < n_phonon; ++n) {
            prob_[n] = p / (1.0 - tail);
            p *= q;
        }
    }
    cdf_.resize(n_phonon);
    double acc = 0.0;
    for (int n = 0; n < n_phonon; ++n) {
        acc += prob_[n];
        cdf_[n] = acc;
    }
    cdf_.back() = 1.0;
}

int InitialStateSampler::draw(RngStream& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return int(std::min<std::ptrdiff_t>(it - cdf_.begin(), std::ptrdiff_t(cdf_.size()) - 1));
}

std::vector<CVector> polariton_ladder(const ModelParams& params, double delta, SpaceDims dims) {
    dims.validate();
    const Eigen::MatrixXd h = hamiltonian(params, delta, dims).matrix().real();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    if (eig.info() != Eigen::Success) throw DomainError("polariton_ladder: eigensolver failed");
    const Eigen::MatrixXd& v = eig.eigenvectors();
    std::vector<CVector> out;
    std::vector<bool> used(v.cols(), false);
    for (int n = 0; n < dims.n_phonon; ++n) {
        Eigen::Index best = 0;
        v.row(dims.index(0, n)).cwiseAbs().maxCoeff(&best);
        if (used[best]) throw DomainError("polariton_ladder: level " + std::to_string(n) + " is ambiguous");
        used[best] = true;
        Eigen::VectorXd col = v.col(best);
        if (col(dims.index(0, n)) < 0.0) col = -col;
        out.push_back(col.cast<cplx>());
    }
    return out;
}

QState sample_initial_state(const ModelParams& params, SpaceDims dims, RngStream& rng,
                            InitialBasis basis) {
    dims.validate();
    const InitialStateSampler sampler(params.nbar_th, dims.n_phonon);
    const int level = sampler.draw(rng);
    if (basis == InitialBasis::bare) return QState::fock(dims, 0, level);
    return QState(dims, polariton_ladder(params, params.delta_i, dims)[level]);
}

void TimeSeries::clear() {
    t.clear();
    delta.clear();
    n_a.clear();
    N_A.clear();
    N_B.clear();
    t.shrink_to_fit();
    delta.shrink_to_fit();
    n_a.shrink_to_fit();
    N_A.shrink_to_fit();
    N_B.shrink_to_fit();
}

struct CyclePlan::Stroke {
    int number = 0;
    double t0 = 0.0;
    double duration = 0.0;
    double delta_end = 0.0;
    bool sweep = false;
    bool dissipative = false;
    bool monitored = false;
    bool resample = false;
    // stepped strokes
    bool stepped = false;
    long steps = 0;
    double h = 0.0;
    long record_every = 1;
    std::vector<double> node;  // Delta at step boundaries, steps + 1
    std::vector<double> mid;   // Delta at step midpoints
    BathStep bath;
    // constant strokes without measurement
    std::shared_ptr<const ConstantDetuningEvolver> evolver;
    // polariton transforms for this stroke's samples, in order
    std::vector<Eigen::Matrix4d> sample_S;
};

CyclePlan::CyclePlan(const CycleConfig& config)
    : config_(config),
      kernel_(config.dims, config.params.omega_m, config.params.G),
      sampler_(config.params.nbar_th, config.dims.n_phonon),
      rates_(BathRates::from(config.params)) {
    config_.validate();
    const ModelParams& p = config_.params;
    const double dt = config_.stepper.dt;
    double t = 0.0;
    sample_t_.push_back(0.0);
    sample_delta_.push_back(p.delta_i);
    initial_S_ = williamson_decomposition(p, p.delta_i).S;
    if (config_.initial_basis == InitialBasis::polariton) ladder_ = polariton_ladder(p, p.delta_i, config_.dims);
    for (int s = 1; s <= config_.last_stroke; ++s) {
        auto st = std::make_unique<Stroke>();
        st->number = s;
        st->t0 = t;
        st->duration = config_.stroke_duration(s);
        st->sweep = (s == 1 || s == 3);
        const double d_start = (s == 1 || s == 4) ? p.delta_i : p.delta_f;
        st->delta_end = (s == 1 || s == 2) ? p.delta_f : p.delta_i;
        st->dissipative = config_.dissipation[s - 1] && rates_.any();
        st->monitored = config_.meas.active() && (st->sweep || config_.monitor_all_strokes);
        st->resample = (s == 4 && config_.stroke4_mode == Stroke4Mode::resample);
        if (st->resample) {
            // no evolution and no sample; the next cycle starts from a fresh draw
        } else if (st->sweep || (st->monitored && st->duration > 0.0)) {
            st->stepped = true;
            st->steps = step_count(st->duration, dt);
            st->h = st->duration / double(st->steps);
            st->record_every = config_.output.full_resolution
                                   ? 1
                                   : std::max(1L, std::lround(config_.output.stride / st->h));
            if (st->dissipative) st->bath = kernel_.bath_step(rates_, st->h);
            st->node.resize(st->steps + 1);
            st->mid.resize(st->steps);
            if (st->sweep) {
                const Schedule sched(config_.schedule_kind, st->duration, d_start, st->delta_end, p);
                for (long k = 0; k <= st->steps; ++k) {
                    st->node[k] = k == st->steps ? st->delta_end : sched.delta(k * st->h);
                }
                for (long k = 0; k < st->steps; ++k) st->mid[k] = sched.delta((k + 0.5) * st->h);
            } else {
                std::fill(st->node.begin(), st->node.end(), d_start);
                std::fill(st->mid.begin(), st->mid.end(), d_start);
            }
            for (long k = 1; k <= st->steps; ++k) {
                if (k % st->record_every == 0 || k == st->steps) {
                    sample_t_.push_back(k == st->steps ? t + st->duration : t + k * st->h);
                    sample_delta_.push_back(st->node[k]);
                    st->sample_S.push_back(williamson_decomposition(p, st->node[k]).S);
                }
            }
        } else {
            if (st->duration > 0.0) {
                st->evolver = shared_evolver(p, d_start, config_.dims,
                                             st->dissipative ? rates_ : BathRates{});
            }
            sample_t_.push_back(t + st->duration);
            sample_delta_.push_back(d_start);
            st->sample_S.push_back(williamson_decomposition(p, d_start).S);
        }
        t += st->duration;
        strokes_.push_back(std::move(st));
    }
}

CyclePlan::~CyclePlan() = default;

CVector CyclePlan::initial_state(int level) const {
    if (level < 0 || level >= config_.dims.n_phonon) throw DomainError("initial_state: level out of range");
    if (!ladder_.empty()) return ladder_[level];
    CVector psi = CVector::Zero(config_.dims.size());
    psi(config_.dims.index(0, level)) = 1.0;
    return psi;
}

class TrajectoryRunner {
public:
    TrajectoryRunner(const CyclePlan& plan, std::int64_t index, RngStream& rng)
        : plan_(plan), cfg_(plan.config_), kernel_(plan.kernel_), ws_(cfg_.dims.size()), rng_(rng) {
        rec_.index = index;
        rec_.seed = cfg_.stepper.seed;
        const std::size_t n = plan.sample_t_.size();
        rec_.series.t.reserve(n);
        rec_.series.delta.reserve(n);
        rec_.series.n_a.reserve(n);
        rec_.series.N_A.reserve(n);
        rec_.series.N_B.reserve(n);
    }

    TrajectoryRecord run(CVector psi, int level) {
        rec_.initial_level = level;
        const ModelParams& p = cfg_.params;
        rec_.energy[0] = kernel_.energy(p.delta_i, psi, ws_);
        sample(psi, plan_.initial_S_);
        for (const auto& st : plan_.strokes_) {
            try {
                run_stroke(*st, psi);
                rec_.strokes_run = st->number;
            } catch (const IntegratorError& e) {
                throw IntegratorError("trajectory " + std::to_string(rec_.index) + ", stroke " +
                                      std::to_string(st->number) + ": " + e.what());
            }
        }
        rec_.work = 0.0;
        for (double w : rec_.stroke_work) rec_.work += w;
        rec_.q_in = heat_bookkeeping(rec_);
        return std::move(rec_);
    }

private:
    void sample(const CVector& psi, const Eigen::Matrix4d& S) {
        const std::size_t j = rec_.series.t.size();
        const NormalModes occ = polariton_occupations(S, psi, cfg_.dims);
        rec_.series.t.push_back(plan_.sample_t_[j]);
        rec_.series.delta.push_back(plan_.sample_delta_[j]);
        rec_.series.n_a.push_back(kernel_.photon_number(psi));
        rec_.series.N_A.push_back(occ.omega_A);
        rec_.series.N_B.push_back(occ.omega_B);
    }

    void run_stroke(const CyclePlan::Stroke& st, CVector& psi) {
        const int s = st.number;
        if (st.resample) {
            rec_.energy[s] = rec_.energy[0];
            return;
        }
        if (st.stepped) {
            run_stepped(st, psi);
        } else {
            if (st.evolver) rec_.jump_count += st.evolver->evolve(psi, st.duration, rng_, kernel_);
            sample(psi, st.sample_S.front());
        }
        rec_.energy[s] = kernel_.energy(st.delta_end, psi, ws_);
    }

    void run_stepped(const CyclePlan::Stroke& st, CVector& psi) {
        const double lambda = cfg_.meas.lambda;
        const Scheme scheme = st.monitored ? cfg_.meas.scheme : Scheme::none;
        const double h = st.h;
        double n_old = kernel_.photon_number(psi);
        double work = 0.0;
        std::size_t next_sample = 0;
        for (long k = 0; k < st.steps; ++k) {
            kernel_.propagate(st.mid[k], h, psi, ws_);
            if (cfg_.stepper.renorm_every_step) kernel_.renormalize(psi);
            if (scheme == Scheme::dispersive) {
                kernel_.dispersive_step(psi, lambda, h, rng_.wiener(h));
            } else if (scheme == Scheme::absorptive) {
                kernel_.absorptive_step(psi, lambda, h, rng_.wiener(h), ws_);
            }
            if (st.dissipative && kernel_.jump_step(psi, st.bath, rng_)) ++rec_.jump_count;
            const double n_new = kernel_.photon_number(psi);
            work -= 0.5 * (n_old + n_new) * (st.node[k + 1] - st.node[k]);
            n_old = n_new;
            const long done = k + 1;
            if (done % st.record_every == 0 || done == st.steps) {
                sample(psi, st.sample_S[next_sample++]);
            }
        }
        rec_.stroke_work[st.number - 1] = work;
    }

    const CyclePlan& plan_;
    const CycleConfig& cfg_;
    const FockKernel& kernel_;
    KernelWorkspace ws_;
    RngStream& rng_;
    TrajectoryRecord rec_;
};

TrajectoryRecord run_trajectory(const CyclePlan& plan, std::int64_t index) {
    const CycleConfig& cfg = plan.config();
    RngStream rng(cfg.stepper.seed, std::uint64_t(index));
    const int level = plan.sampler().draw(rng);
    return TrajectoryRunner(plan, index, rng).run(plan.initial_state(level), level);
}

TrajectoryRecord run_trajectory(const CyclePlan& plan, std::int64_t index, const QState& initial) {
    const CycleConfig& cfg = plan.config();
    if (!(initial.dims() == cfg.dims)) throw ShapeError("run_trajectory: initial state dims mismatch");
    RngStream rng(cfg.stepper.seed, std::uint64_t(index));
    return TrajectoryRunner(plan, index, rng).run(initial.vector(), -1);
}

TrajectoryRecord run_trajectory(const CycleConfig& config, std::int64_t index) {
    const CyclePlan plan(config);
    return run_trajectory(plan, index);
}

double work_increment(const QState& state, double delta_step) {
    const QOperator n = number_op(state.dims(), Mode::photon);
    return -expectation(state, n).real() * delta_step;
}

double heat_bookkeeping(const TrajectoryRecord& record) {
    if (record.strokes_run < 4) return std::numeric_limits<double>::quiet_NaN();
    return record.energy[4] - record.energy[3];
}

const char* to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::none: return "none";
        case Scheme::absorptive: return "absorptive";
        case Scheme::dispersive: return "dispersive";
    }
    return "?";
}

const char* to_string(InitialBasis basis) {
    return basis == InitialBasis::polariton ? "polariton" : "bare";
}

const char* to_string(Stroke4Mode mode) {
    return mode == Stroke4Mode::evolve ? "evolve" : "resample";
}

const char* to_string(ScheduleKind kind) {
    return kind == ScheduleKind::linear ? "linear" : "gap_adaptive";
}

}  // namespace qotto
