#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <string>

#include <omp.h>

#include "qotto/engine.hpp"
#include "qotto/errors.hpp"

namespace qotto {

namespace {

constexpr int kChunk = 256;

// Running sums of the time series, added strictly in trajectory-index order.
struct CurveSums {
    std::vector<double> n_a, N_A, N_B;
    long count = 0;

    void add(const TimeSeries& s) {
        if (n_a.empty()) {
            n_a.assign(s.size(), 0.0);
            N_A.assign(s.size(), 0.0);
            N_B.assign(s.size(), 0.0);
        }
        for (std::size_t j = 0; j < s.size(); ++j) {
            n_a[j] += s.n_a[j];
            N_A[j] += s.N_A[j];
            N_B[j] += s.N_B[j];
        }
        ++count;
    }

    PopulationCurves finish(const std::vector<double>& t, const std::vector<double>& delta) const {
        PopulationCurves c;
        if (count == 0) return c;
        c.t = t;
        c.delta = delta;
        c.n_a.resize(n_a.size());
        c.N_A.resize(n_a.size());
        c.N_B.resize(n_a.size());
        for (std::size_t j = 0; j < n_a.size(); ++j) {
            c.n_a[j] = n_a[j] / double(count);
            c.N_A[j] = N_A[j] / double(count);
            c.N_B[j] = N_B[j] / double(count);
        }
        return c;
    }
};

}  // namespace

int default_workers() {
    if (const char* env = std::getenv("QOTTO_WORKERS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n >= 1) return int(n);
    }
    return std::max(1, omp_get_max_threads());
}

EnsembleRun run_ensemble(const CyclePlan& plan, const EnsembleOptions& options) {
    const int n = plan.config().n_traj;
    const int workers = options.workers > 0 ? options.workers : default_workers();
    EnsembleRun out;
    out.records.reserve(n);
    CurveSums sums;
    for (int start = 0; start < n; start += kChunk) {
        const int m = std::min(kChunk, n - start);
        std::vector<TrajectoryRecord> buf(m);
        std::vector<std::exception_ptr> err(m);
        if (options.serial || workers == 1) {
            for (int i = 0; i < m; ++i) {
                try {
                    buf[i] = options.initial ? run_trajectory(plan, start + i, *options.initial)
                                             : run_trajectory(plan, start + i);
                } catch (...) {
                    err[i] = std::current_exception();
                }
            }
        } else {
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
            for (int i = 0; i < m; ++i) {
                try {
                    buf[i] = options.initial ? run_trajectory(plan, start + i, *options.initial)
                                             : run_trajectory(plan, start + i);
                } catch (...) {
                    err[i] = std::current_exception();
                }
            }
        }
        for (int i = 0; i < m; ++i) {
            if (err[i]) std::rethrow_exception(err[i]);
        }
        for (auto& rec : buf) {
            sums.add(rec.series);
            if (!options.keep_series) rec.series.clear();
            out.records.push_back(std::move(rec));
        }
        if (options.progress) options.progress(start + m, n);
    }
    out.curves = sums.finish(plan.sample_times(), plan.sample_deltas());
    return out;
}

CycleResult ensemble_statistics(const std::vector<TrajectoryRecord>& records,
                                const HistogramSpec& bins) {
    if (records.empty()) throw DomainError("ensemble_statistics: no records");
    bins.validate();
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return records[a].index < records[b].index;
    });
    const double n = double(records.size());

    CycleResult r;
    r.n_traj_used = int(records.size());
    double sum = 0.0;
    for (std::size_t k : order) sum += records[k].work;
    r.mean_work = sum / n;
    double m2 = 0.0, m4 = 0.0;
    for (std::size_t k : order) {
        const double d = records[k].work - r.mean_work;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    r.var_work = m2 / n;
    r.sem_work = records.size() > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
    r.var_work_se = std::sqrt(std::max(0.0, m4 / n - r.var_work * r.var_work) / n);

    r.histogram.spec = bins;
    const int nb = bins.bins();
    std::vector<long> counts(nb, 0);
    for (std::size_t k : order) {
        const double x = -records[k].work;
        long b = long(std::floor((x - bins.lo) / bins.width));
        b = std::clamp(b, 0L, long(nb - 1));
        ++counts[b];
    }
    r.histogram.mass.resize(nb);
    for (int b = 0; b < nb; ++b) r.histogram.mass[b] = double(counts[b]) / n;

    double q = 0.0, q2 = 0.0, jumps = 0.0;
    for (std::size_t k : order) {
        q += records[k].q_in;
        jumps += records[k].jump_count;
    }
    r.q_in = q / n;
    for (std::size_t k : order) q2 += (records[k].q_in - r.q_in) * (records[k].q_in - r.q_in);
    r.q_in_sem = records.size() > 1 ? std::sqrt(q2 / (n - 1.0) / n) : 0.0;
    r.mean_jumps = jumps / n;
    if (std::isnan(r.q_in)) {
        r.efficiency = std::numeric_limits<double>::quiet_NaN();
    } else if (r.q_in > 0.0) {
        r.efficiency = -r.mean_work / r.q_in;
    } else {
        r.heat_flag = true;
        r.efficiency = std::numeric_limits<double>::quiet_NaN();
    }

    const std::size_t len = records[order.front()].series.size();
    const bool have_series =
        len > 0 && std::all_of(records.begin(), records.end(),
                               [&](const TrajectoryRecord& rec) { return rec.series.size() == len; });
    if (have_series) {
        CurveSums sums;
        for (std::size_t k : order) sums.add(records[k].series);
        const TimeSeries& s = records[order.front()].series;
        r.curves = sums.finish(s.t, s.delta);
    }
    return r;
}

CycleOutcome run_cycle(const CycleConfig& config, const EnsembleOptions& options) {
    const CyclePlan plan(config);
    EnsembleRun run = run_ensemble(plan, options);
    CycleOutcome out;
    out.result = ensemble_statistics(run.records, config.output.hist);
    if (out.result.curves.t.empty()) out.result.curves = std::move(run.curves);
    out.records = std::move(run.records);
    return out;
}

}  // namespace qotto
