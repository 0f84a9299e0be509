#pragma once

// Linearized optomechanical Hamiltonian, its normal modes, and detuning
// schedules. Units: hbar = 1 and omega_m = 1; every frequency, rate and
// energy is expressed in units of omega_m.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "qotto/qops.hpp"

namespace qotto {

struct ModelParams {
    double omega_m = 1.0;
    double G = 0.2;
    double delta_i = -3.0;
    double delta_f = -0.4;
    double kappa = 5e-3;
    double gamma = 1e-4;
    double nbar_th = 4.0;

    /// Checks delta_i < -omega_m < delta_f < 0, G < omega_m / 2 and
    /// non-negative rates. Throws ConfigError naming the violated key.
    void validate() const;
};

struct NormalModes {
    double omega_A;  ///< upper branch
    double omega_B;  ///< lower branch
};

/// -delta n_a + omega_m n_b + G (a + a^dag)(b + b^dag), real symmetric.
QOperator hamiltonian(const ModelParams& params, double delta, SpaceDims dims);

/// Closed-form normal-mode frequencies of the quadratic Hamiltonian, using
/// the discriminant (delta^2 - omega_m^2)^2 - 16 G^2 delta omega_m.
/// Throws StabilityError when either frequency would be imaginary.
NormalModes normal_mode_frequencies(const ModelParams& params, double delta);

/// omega_A - omega_B; the avoided-crossing gap.
double normal_mode_gap(const ModelParams& params, double delta);

/// Quadrature-space Hamiltonian matrix M with H = r^T M r / 2 + const,
/// r = (x_a, p_a, x_b, p_b), x = (c + c^dag)/sqrt2, p = (c - c^dag)/(i sqrt2).
Eigen::Matrix4d quadrature_hamiltonian(const ModelParams& params, double delta);

/// Standard symplectic form, blocks [[0, 1], [-1, 0]] per mode.
Eigen::Matrix4d symplectic_form();

struct Williamson {
    double omega_A;
    double omega_B;
    /// Symplectic S with M = S^T diag(wA, wA, wB, wB) S. Rows of S give the
    /// polariton quadratures (X_A, P_A, X_B, P_B) in terms of r.
    Eigen::Matrix4d S;
};

/// Williamson normal form of the positive-definite quadrature Hamiltonian,
/// computed numerically from a real Schur decomposition of
/// M^{1/2} Omega M^{1/2}. Independent of the closed-form frequencies.
Williamson williamson_decomposition(const ModelParams& params, double delta);

struct PolaritonData {
    double omega_A;
    double omega_B;
    Eigen::Matrix4d bogoliubov;  ///< the symplectic S above
    double constant;             ///< H = wA N_A + wB N_B + constant
    QOperator N_A_op;
    QOperator N_B_op;
};

PolaritonData polariton_data(const ModelParams& params, double delta, SpaceDims dims);

/// Polariton occupation <N_A>, <N_B> from the quadrature second moments of a
/// state. Same value as expectation(state, N_X_op) with the truncated
/// operators, without building them.
NormalModes polariton_occupations(const Eigen::Matrix4d& S, const CVector& psi, SpaceDims dims);

enum class ScheduleKind { linear, gap_adaptive };

/// Detuning ramp Delta(t) on [0, t_stroke]. The gap-adaptive kind moves with
/// |dDelta/dt| proportional to (omega_A - omega_B)^2, which keeps the
/// adiabaticity ratio constant along the sweep.
class Schedule {
public:
    Schedule(ScheduleKind kind, double t_stroke, double delta_start, double delta_end,
             const ModelParams& params);

    ScheduleKind kind() const noexcept { return kind_; }
    double t_stroke() const noexcept { return t_stroke_; }
    double delta_start() const noexcept { return delta_start_; }
    double delta_end() const noexcept { return delta_end_; }

    /// Throws DomainError for t outside [0, t_stroke].
    double delta(double t) const;
    /// dDelta/dt.
    double rate(double t) const;

private:
    ScheduleKind kind_;
    double t_stroke_;
    double delta_start_;
    double delta_end_;
    // gap_adaptive: cumulative time at uniform detuning nodes
    std::vector<double> node_delta_;
    std::vector<double> node_time_;
    std::vector<double> node_speed_;
};

double schedule_delta(const Schedule& schedule, double t);

}  // namespace qotto
