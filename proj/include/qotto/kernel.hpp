#pragma once

// In-place trajectory kernels specialised to the two-mode Hamiltonian.
// H(delta) = -delta n_a + omega_m n_b + G (a + a^dag)(b + b^dag) is applied as
// a five-point stencil on the n_photon x n_phonon amplitude grid, so a step
// costs O(dim) instead of a dense O(dim^2) product.

#include <array>
#include <memory>
#include <vector>

#include "qotto/model.hpp"
#include "qotto/qops.hpp"
#include "qotto/rng.hpp"
#include "qotto/traj.hpp"

namespace qotto {

/// Scratch buffers owned by one trajectory worker.
struct KernelWorkspace {
    CVector term;
    CVector next;
    CVector tmp;
    explicit KernelWorkspace(int dim) : term(dim), next(dim), tmp(dim) {}
};

/// Bath rates with the per-amplitude no-jump damping for a fixed step.
struct BathStep {
    BathRates rates;
    double dt = 0.0;
    std::vector<double> rate;     ///< diagonal of sum_k L_k^dag L_k per interleaved double
    std::vector<double> damping;  ///< exp(-dt rate / 2)
};

class FockKernel {
public:
    FockKernel(SpaceDims dims, double omega_m, double G);

    const SpaceDims& dims() const noexcept { return dims_; }

    /// out = H(delta) in; `tmp` is clobbered.
    void apply_h(double delta, const CVector& in, CVector& out, CVector& tmp) const;
    /// <psi|H(delta)|psi> / <psi|psi>.
    double energy(double delta, const CVector& psi, KernelWorkspace& ws) const;
    double photon_number(const CVector& psi) const;
    double phonon_number(const CVector& psi) const;

    /// psi <- exp(-i H(delta) dt) psi, Taylor-summed to 1e-12 relative.
    void propagate(double delta, double dt, CVector& psi, KernelWorkspace& ws) const;
    void renormalize(CVector& psi) const;

    void dispersive_step(CVector& psi, double lambda, double dt, double dw) const;
    void absorptive_step(CVector& psi, double lambda, double dt, double dw, KernelWorkspace& ws) const;

    /// MCWF bath step with the same draw pattern as jump_step_baths().
    /// Returns true when a jump happened.
    bool jump_step(CVector& psi, const BathRates& rates, double dt, RngStream& rng) const;
    bool jump_step(CVector& psi, const BathStep& step, RngStream& rng) const;
    BathStep bath_step(const BathRates& rates, double dt) const;

    /// Applies one of the bath jump operators (0: a, 1: b, 2: b^dag) and
    /// renormalizes.
    void apply_jump(int channel, CVector& psi) const;
    /// dt-free jump weights <L^dag L> * rate for the three channels.
    std::array<double, 3> jump_weights(const CVector& psi, const BathRates& rates) const;

private:
    // amplitudes as a (2 n_phonon) x n_photon real matrix, (re, im) interleaved
    Eigen::Map<const Eigen::MatrixXd> real_view(const CVector& psi) const;

    SpaceDims dims_;
    double omega_m_;
    double G_;
    std::vector<double> sqrt_;  // sqrt(k) for k = 0..max cutoff
    // per interleaved double: ladder factors, n_a, omega_m n_b
    std::vector<double> b_lower_, b_upper_;
    std::vector<double> photon_count_;
    std::vector<double> phonon_energy_;
};

void normalize_or_throw(CVector& psi, const char* where);

/// Exact no-jump propagator at fixed detuning, for strokes without
/// measurement. The non-Hermitian H_eff = H - i K / 2 is diagonalised once;
/// jump times are then found by the waiting-time method instead of by small
/// time steps.
class ConstantDetuningEvolver {
public:
    ConstantDetuningEvolver(const ModelParams& params, double delta, SpaceDims dims, BathRates rates);

    double delta() const noexcept { return delta_; }
    bool dissipative() const noexcept { return rates_.any(); }

    /// Evolves psi (normalized in, normalized out) for `duration`, drawing
    /// one uniform per waiting time and one per jump channel choice.
    /// Returns the number of jumps.
    int evolve(CVector& psi, double duration, RngStream& rng, const FockKernel& kernel) const;

    /// Squared norm of the no-jump evolution exp(-i H_eff tau) psi0 given
    /// c = V^{-1} psi0.
    double no_jump_norm2(const CVector& c, double tau) const;

private:
    CVector evolved(const CVector& c, double tau) const;

    double delta_;
    BathRates rates_;
    CVector eigenvalues_;
    CMatrix vecs_;
    CMatrix inv_vecs_;
    CMatrix gram_;
};

}  // namespace qotto
