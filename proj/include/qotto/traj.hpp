#pragma once

// Stochastic integrators on QState values. These are the reference
// implementations: they work on generic QOperator matrices and allocate
// freely. The ensemble engine runs the same update rules through FockKernel
// (kernel.hpp), which is checked against these in the tests.

#include <cstdint>

#include "qotto/model.hpp"
#include "qotto/qops.hpp"
#include "qotto/rng.hpp"

namespace qotto {

enum class Scheme { none, absorptive, dispersive };

struct MeasurementConfig {
    Scheme scheme = Scheme::none;
    double lambda = 0.0;  ///< lambda_a or lambda_d, in omega_m

    bool active() const noexcept { return scheme != Scheme::none && lambda > 0.0; }
    void validate() const;
};

struct StepperConfig {
    double dt = 5e-3;
    std::uint64_t seed = 20150611;
    bool renorm_every_step = true;

    /// Enforces dt * lambda <= 0.01 and dt * omega_max <= 0.05.
    void validate(double lambda, double omega_max) const;
};

/// Rates of the three bath jump channels: sqrt(kappa) a,
/// sqrt(gamma (nbar+1)) b and sqrt(gamma nbar) b^dag.
struct BathRates {
    double kappa = 0.0;
    double phonon_down = 0.0;
    double phonon_up = 0.0;

    static BathRates from(const ModelParams& params);
    bool any() const noexcept { return kappa > 0.0 || phonon_down > 0.0 || phonon_up > 0.0; }
};

/// Single-step norm below which a stochastic update is rejected.
inline constexpr double kNormCollapse = 1e-8;
/// Largest allowed total jump probability in one bath step.
inline constexpr double kMaxJumpProbability = 0.1;

/// Euler-Maruyama update of the SSEs before renormalization.
CVector sse_update_dispersive(const QState& state, const QOperator& n_op, double lambda_d, double dt,
                              double dw);
CVector sse_update_absorptive(const QState& state, const QOperator& a_op, double lambda_a, double dt,
                              double dw);

QState sse_step_dispersive(const QState& state, const QOperator& n_op, double lambda_d, double dt,
                           double dw);
QState sse_step_absorptive(const QState& state, const QOperator& a_op, double lambda_a, double dt,
                           double dw);

/// Monte-Carlo wave-function step for the cavity and mechanical baths.
/// Draws one uniform for the jump decision and, on a jump, one more for the
/// channel.
QState jump_step_baths(const QState& state, const ModelParams& params, double dt, RngStream& rng);
QState jump_step_baths(const QState& state, const BathRates& rates, double dt, RngStream& rng);

/// exp(-i H dt)|psi> by a Taylor series summed to round-off; H is the
/// Hamiltonian at the midpoint of the step. Output is not renormalized.
CVector propagate(const QOperator& h, const CVector& psi, double dt);

/// One unitary micro-step with the midpoint Hamiltonian.
QState hamiltonian_step(const QState& state, const QOperator& h_mid, double dt);

}  // namespace qotto
