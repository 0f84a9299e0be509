#include "qotto/traj.hpp"

#include <cmath>
#include <string>

#include "qotto/errors.hpp"

namespace qotto {

namespace {

constexpr double kTaylorTolerance = 1e-15;
constexpr int kTaylorMaxTerms = 80;

QState renormalized(SpaceDims dims, CVector v, const char* where) {
    const double norm = v.norm();
    if (!(norm >= kNormCollapse) || !std::isfinite(norm)) {
        throw IntegratorError(std::string(where) + ": state norm collapsed to " +
                              std::to_string(norm) + "; reduce dt");
    }
    return QState(dims, std::move(v));
}

}  // namespace

void MeasurementConfig::validate() const {
    if (!(lambda >= 0.0)) throw ConfigError("meas.lambda: must be >= 0");
}

void StepperConfig::validate(double lambda, double omega_max) const {
    if (!(dt > 0.0)) throw ConfigError("stepper.dt: must be positive");
    if (dt * lambda > 0.01 + 1e-15) {
        throw ConfigError("stepper.dt: dt * lambda = " + std::to_string(dt * lambda) + " exceeds 0.01");
    }
    if (dt * omega_max > 0.05 + 1e-15) {
        throw ConfigError("stepper.dt: dt * omega_A,max = " + std::to_string(dt * omega_max) +
                          " exceeds 0.05");
    }
}

BathRates BathRates::from(const ModelParams& params) {
    return {params.kappa, params.gamma * (params.nbar_th + 1.0), params.gamma * params.nbar_th};
}

CVector sse_update_dispersive(const QState& state, const QOperator& n_op, double lambda_d, double dt,
                              double dw) {
    const CVector& psi = state.vector();
    const double mean = expectation(state, n_op).real();
    const CVector shifted = n_op.sparse() * psi - mean * psi;                 // (n - <n>)psi
    const CVector shifted2 = n_op.sparse() * shifted - mean * shifted;        // (n - <n>)^2 psi
    return psi - 0.5 * lambda_d * dt * shifted2 + std::sqrt(lambda_d) * dw * shifted;
}

CVector sse_update_absorptive(const QState& state, const QOperator& a_op, double lambda_a, double dt,
                              double dw) {
    const CVector& psi = state.vector();
    const CVector a_psi = a_op.sparse() * psi;
    const double x = 2.0 * psi.dot(a_psi).real();  // <a + a^dag>
    const CVector ada_psi = a_op.sparse().adjoint() * a_psi;
    const CVector drift = ada_psi - x * a_psi + 0.25 * x * x * psi;
    const CVector diffusion = a_psi - 0.5 * x * psi;
    return psi - 0.5 * lambda_a * dt * drift + std::sqrt(lambda_a) * dw * diffusion;
}

QState sse_step_dispersive(const QState& state, const QOperator& n_op, double lambda_d, double dt,
                           double dw) {
    if (lambda_d == 0.0) return state;
    return renormalized(state.dims(), sse_update_dispersive(state, n_op, lambda_d, dt, dw),
                        "sse_step_dispersive");
}

QState sse_step_absorptive(const QState& state, const QOperator& a_op, double lambda_a, double dt,
                           double dw) {
    if (lambda_a == 0.0) return state;
    return renormalized(state.dims(), sse_update_absorptive(state, a_op, lambda_a, dt, dw),
                        "sse_step_absorptive");
}

QState jump_step_baths(const QState& state, const ModelParams& params, double dt, RngStream& rng) {
    return jump_step_baths(state, BathRates::from(params), dt, rng);
}

QState jump_step_baths(const QState& state, const BathRates& rates, double dt, RngStream& rng) {
    const SpaceDims dims = state.dims();
    const QOperator a = annihilation(dims, Mode::photon);
    const QOperator b = annihilation(dims, Mode::phonon);
    const QOperator bd = creation(dims, Mode::phonon);
    const std::array<const QOperator*, 3> ops{&a, &b, &bd};
    const std::array<double, 3> rate{rates.kappa, rates.phonon_down, rates.phonon_up};

    std::array<double, 3> p{};
    CMatrix k = CMatrix::Zero(dims.size(), dims.size());
    for (int c = 0; c < 3; ++c) {
        const CMatrix ldl = ops[c]->matrix().adjoint() * ops[c]->matrix();
        k += rate[c] * ldl;
        p[c] = dt * rate[c] * state.vector().dot(ldl * state.vector()).real();
    }
    const double total = p[0] + p[1] + p[2];
    if (total > kMaxJumpProbability) {
        throw IntegratorError("jump_step_baths: jump probability " + std::to_string(total) +
                              " per step exceeds 0.1; reduce dt");
    }
    const double u = rng.uniform();
    if (u < total) {
        const double v = rng.uniform() * total;
        int c = 0;
        double acc = p[0];
        while (c < 2 && v >= acc) acc += p[++c];
        return renormalized(dims, apply(*ops[c], state), "jump_step_baths");
    }
    // K is diagonal in the Fock basis
    CVector next = state.vector();
    for (int i = 0; i < dims.size(); ++i) next(i) *= std::exp(-0.5 * dt * k(i, i).real());
    return renormalized(dims, std::move(next), "jump_step_baths");
}

CVector propagate(const QOperator& h, const CVector& psi, double dt) {
    if (psi.size() != h.dims().size()) throw ShapeError("propagate: dimension mismatch");
    CVector acc = psi;
    CVector term = psi;
    const double scale = psi.norm();
    for (int k = 1; k <= kTaylorMaxTerms; ++k) {
        term = (h.sparse() * term) * cplx(0.0, -dt / k);
        acc += term;
        if (term.norm() <= kTaylorTolerance * scale) return acc;
    }
    throw IntegratorError("propagate: Taylor series did not converge; reduce dt");
}

QState hamiltonian_step(const QState& state, const QOperator& h_mid, double dt) {
    return QState(state.dims(), propagate(h_mid, state.vector(), dt));
}

}  // namespace qotto
