#include "qotto/validate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qotto/kernel.hpp"

namespace qotto {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

CheckResult normal_mode_oracle(SpaceDims dims) {
    RngStream rng(7, 0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        ModelParams p;
        p.G = 0.02 + 0.18 * rng.uniform();
        const double delta = -0.3 - 3.2 * rng.uniform();
        const NormalModes w = normal_mode_frequencies(p, delta);
        const Eigen::VectorXd e =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hamiltonian(p, delta, dims).matrix().real(),
                                                           Eigen::EigenvaluesOnly)
                .eigenvalues();
        double best_a = 1e300;
        for (int j = 1; j < e.size(); ++j) best_a = std::min(best_a, std::abs(e[j] - e[0] - w.omega_A));
        worst = std::max({worst, std::abs(e[1] - e[0] - w.omega_B), best_a});
    }
    ModelParams p;
    p.G = 0.1;
    const NormalModes w = normal_mode_frequencies(p, -1.0);
    const double anchor = std::max(std::abs(w.omega_A - std::sqrt(1.2)), std::abs(w.omega_B - std::sqrt(0.8)));
    return {"normal modes vs dense diagonalization", worst < 1e-6 && anchor < 1e-12,
            "max deviation " + fmt(worst) + ", anchor " + fmt(anchor)};
}

CheckResult derivative_identity(const ModelParams& p, SpaceDims dims) {
    const double eps = 1e-3;
    const double d0 = -1.7;
    const CMatrix fd = (hamiltonian(p, d0 + eps, dims).matrix() - hamiltonian(p, d0 - eps, dims).matrix()) /
                       (2.0 * eps);
    const double err = (fd + number_op(dims, Mode::photon).matrix()).cwiseAbs().maxCoeff();
    return {"dH/dDelta = -n_a", err < 1e-10, "max element error " + fmt(err)};
}

CheckResult williamson_check(const ModelParams& p) {
    const Eigen::Matrix4d omega = symplectic_form();
    double sym = 0.0, res = 0.0, freq = 0.0;
    for (int k = 0; k <= 40; ++k) {
        const double d = p.delta_i + (p.delta_f - p.delta_i) * k / 40.0;
        const Williamson w = williamson_decomposition(p, d);
        sym = std::max(sym, (w.S * omega * w.S.transpose() - omega).cwiseAbs().maxCoeff());
        Eigen::Vector4d diag(w.omega_A, w.omega_A, w.omega_B, w.omega_B);
        res = std::max(res, (w.S.transpose() * diag.asDiagonal() * w.S - quadrature_hamiltonian(p, d))
                                .cwiseAbs()
                                .maxCoeff());
        const NormalModes nm = normal_mode_frequencies(p, d);
        freq = std::max({freq, std::abs(nm.omega_A - w.omega_A), std::abs(nm.omega_B - w.omega_B)});
    }
    return {"symplectic Bogoliubov transform", sym < 1e-10 && res < 1e-10 && freq < 1e-10,
            "S Omega S^T " + fmt(sym) + ", M residual " + fmt(res) + ", frequencies " + fmt(freq)};
}

CheckResult avoided_crossing(const ModelParams& base) {
    bool ok = true;
    std::string detail;
    for (double g : {0.05, 0.1, 0.2}) {
        ModelParams p = base;
        p.G = g;
        double best_d = 0.0, best_gap = 1e300;
        for (int k = 0; k <= 20000; ++k) {
            const double d = -1.5 + k * 5e-5;
            const double gap = normal_mode_gap(p, d);
            if (gap < best_gap) {
                best_gap = gap;
                best_d = d;
            }
        }
        const bool here = std::abs(best_d + 1.0) < 1e-2 && std::abs(best_gap / (2 * g) - 1.0) < 0.05;
        ok = ok && here;
        detail += "G=" + fmt(g) + ": min at " + fmt(best_d) + ", gap/2G " + fmt(best_gap / (2 * g)) + "; ";
    }
    return {"avoided crossing near -omega_m with gap 2G", ok, detail};
}

CheckResult polariton_residual(const ModelParams& p, SpaceDims dims) {
    const PolaritonData pd = polariton_data(p, p.delta_i, dims);
    const CMatrix r = hamiltonian(p, p.delta_i, dims).matrix() - pd.omega_A * pd.N_A_op.matrix() -
                      pd.omega_B * pd.N_B_op.matrix() -
                      pd.constant * CMatrix::Identity(dims.size(), dims.size());
    double worst = 0.0;
    for (int i = 0; i < dims.size(); ++i) {
        for (int j = 0; j < dims.size(); ++j) {
            const int na_i = i / dims.n_phonon, nb_i = i % dims.n_phonon;
            const int na_j = j / dims.n_phonon, nb_j = j % dims.n_phonon;
            if (std::max(na_i, na_j) >= dims.n_photon - 2 || std::max(nb_i, nb_j) >= dims.n_phonon - 2) continue;
            worst = std::max(worst, std::abs(r(i, j)));
        }
    }
    return {"H = wA N_A + wB N_B + c below the top Fock levels", worst < 1e-8, "max residual " + fmt(worst)};
}

CheckResult schedule_check(const CycleConfig& c) {
    const Schedule s(ScheduleKind::gap_adaptive, c.t1, c.params.delta_i, c.params.delta_f, c.params);
    bool monotone = true;
    double prev = s.delta(0.0);
    for (int k = 1; k <= 4000; ++k) {
        const double d = s.delta(c.t1 * k / 4000.0);
        monotone = monotone && d >= prev;
        prev = d;
    }
    // rate at the crossing vs rate at the start
    double t_cross = 0.0;
    for (int k = 0; k <= 4000; ++k) {
        if (s.delta(c.t1 * k / 4000.0) >= -c.params.omega_m) {
            t_cross = c.t1 * k / 4000.0;
            break;
        }
    }
    const double ratio = std::abs(s.rate(0.0) / s.rate(t_cross));
    const bool ends = s.delta(0.0) == c.params.delta_i && s.delta(c.t1) == c.params.delta_f;
    return {"gap-adaptive schedule", monotone && ends && ratio >= 4.0,
            "endpoints exact " + std::string(ends ? "yes" : "no") + ", rate ratio " + fmt(ratio)};
}

CheckResult kernel_consistency(const ModelParams& p) {
    const SpaceDims dims{6, 5};
    const FockKernel kernel(dims, p.omega_m, p.G);
    KernelWorkspace ws(dims.size());
    RngStream rng(11, 0);
    CVector v(dims.size());
    for (auto& z : v) z = cplx(rng.normal(), rng.normal());
    v.normalize();
    const QState state(dims, v);
    const double delta = -1.3;
    const QOperator h = hamiltonian(p, delta, dims);
    CVector hv(dims.size());
    kernel.apply_h(delta, v, hv, ws.tmp);
    double err = (hv - h.matrix() * v).cwiseAbs().maxCoeff();

    CVector prop = v;
    kernel.propagate(delta, 5e-3, prop, ws);
    err = std::max(err, (prop - propagate(h, v, 5e-3)).cwiseAbs().maxCoeff());

    CVector disp = v;
    kernel.dispersive_step(disp, 0.04, 5e-3, 0.03);
    err = std::max(err, (disp - sse_step_dispersive(state, number_op(dims, Mode::photon), 0.04, 5e-3, 0.03)
                                    .vector())
                            .cwiseAbs()
                            .maxCoeff());
    CVector absorb = v;
    kernel.absorptive_step(absorb, 0.04, 5e-3, -0.02, ws);
    err = std::max(err, (absorb - sse_step_absorptive(state, annihilation(dims, Mode::photon), 0.04, 5e-3, -0.02)
                                      .vector())
                            .cwiseAbs()
                            .maxCoeff());
    const BathRates rates{0.3, 0.2, 0.1};
    for (std::uint64_t k = 0; k < 50; ++k) {
        RngStream r1(3, k), r2(3, k);
        CVector fast = v;
        kernel.jump_step(fast, rates, 0.01, r1);
        const QState ref = jump_step_baths(state, rates, 0.01, r2);
        err = std::max(err, (fast - ref.vector()).cwiseAbs().maxCoeff());
    }
    return {"stencil kernels vs reference integrators", err < 1e-11, "max deviation " + fmt(err)};
}

CheckResult wiener_moments() {
    const int n = 1000000;
    const double dt = 5e-3;
    RngStream rng(2015, 1);
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double w = rng.wiener(dt);
        s1 += w;
        s2 += w * w;
        s4 += w * w * w * w;
    }
    const double mean = s1 / n;
    const double var = s2 / n;
    const double z_mean = mean / std::sqrt(dt / n);
    const double z_var = (var - dt) / std::sqrt((s4 / n - var * var) / n);
    return {"Wiener increments: E[dw] = 0, E[dw^2] = dt", std::abs(z_mean) < 4 && std::abs(z_var) < 4,
            "z-scores " + fmt(z_mean) + ", " + fmt(z_var)};
}

}  // namespace

std::vector<CheckResult> run_validation(const CycleConfig& config) {
    std::vector<std::function<CheckResult()>> checks{
        [&] { return normal_mode_oracle(config.dims); },
        [&] { return derivative_identity(config.params, config.dims); },
        [&] { return williamson_check(config.params); },
        [&] { return avoided_crossing(config.params); },
        [&] { return polariton_residual(config.params, config.dims); },
        [&] { return schedule_check(config); },
        [&] { return kernel_consistency(config.params); },
        [] { return wiener_moments(); },
    };
    std::vector<CheckResult> out;
    for (auto& check : checks) {
        try {
            out.push_back(check());
        } catch (const std::exception& e) {
            out.push_back({"(check threw)", false, e.what()});
        }
    }
    return out;
}

}  // namespace qotto
