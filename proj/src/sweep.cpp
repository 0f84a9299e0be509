#include "qotto/sweep.hpp"

namespace qotto {

std::vector<std::pair<Scheme, double>> sweep_grid(const CycleConfig& base) {
    std::vector<std::pair<Scheme, double>> grid;
    for (Scheme scheme : base.sweep.schemes) {
        if (scheme == Scheme::none) {
            grid.emplace_back(scheme, 0.0);
            continue;
        }
        for (double lambda : base.sweep.lambdas) grid.emplace_back(scheme, lambda);
    }
    return grid;
}

CycleConfig sweep_point_config(const CycleConfig& base, Scheme scheme, double lambda) {
    CycleConfig c = base;
    c.meas.scheme = scheme;
    c.meas.lambda = scheme == Scheme::none ? 0.0 : lambda;
    c.validate();
    return c;
}

std::vector<SweepPoint> run_sweep(const CycleConfig& base, const EnsembleOptions& options,
                                  const std::function<void(const SweepPoint&)>& on_point) {
    const auto grid = sweep_grid(base);
    // validate every point before spending time on any of them
    for (const auto& [scheme, lambda] : grid) sweep_point_config(base, scheme, lambda);
    std::vector<SweepPoint> points;
    for (const auto& [scheme, lambda] : grid) {
        SweepPoint p;
        p.scheme = scheme;
        p.lambda = lambda;
        p.result = run_cycle(sweep_point_config(base, scheme, lambda), options).result;
        if (on_point) on_point(p);
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace qotto
