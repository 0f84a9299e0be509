#pragma once

// Lambda sweeps: one ensemble per (scheme, lambda) point.

#include <functional>
#include <vector>

#include "qotto/engine.hpp"

namespace qotto {

struct SweepPoint {
    Scheme scheme = Scheme::none;
    double lambda = 0.0;
    CycleResult result;
};

/// The (scheme, lambda) grid of `base.sweep`; scheme `none` contributes a
/// single lambda = 0 point.
std::vector<std::pair<Scheme, double>> sweep_grid(const CycleConfig& base);

/// Config of one sweep point. Every point keeps the master seed, so all
/// points start from the same thermal draws.
CycleConfig sweep_point_config(const CycleConfig& base, Scheme scheme, double lambda);

/// Runs every point in grid order. `on_point` sees each finished point
/// before the next one starts; an exception aborts the remaining points.
std::vector<SweepPoint> run_sweep(const CycleConfig& base, const EnsembleOptions& options = {},
                                  const std::function<void(const SweepPoint&)>& on_point = {});

}  // namespace qotto
