#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "qotto/engine.hpp"
#include "qotto/errors.hpp"
#include "qotto/kernel.hpp"
#include "qotto/traj.hpp"

using namespace qotto;

namespace {

CVector random_state(SpaceDims d, std::uint64_t seed, int max_photon = 99) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n;
    CVector v = CVector::Zero(d.size());
    for (int na = 0; na < std::min(d.n_photon, max_photon + 1); ++na)
        for (int nb = 0; nb < d.n_phonon; ++nb) v(d.index(na, nb)) = cplx(n(gen), n(gen));
    return v.normalized();
}

// E over dw ~ N(0, dt) of |update|^2 - 1, exact by 3-point Gauss-Hermite
// (the update is linear in dw).
template <class F>
double mean_norm_drift(F update, double dt) {
    const double x = std::sqrt(3.0 * dt);
    const double w[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
    const double node[3] = {-x, 0.0, x};
    double e = 0.0;
    for (int k = 0; k < 3; ++k) e += w[k] * update(node[k]).squaredNorm();
    return e - 1.0;
}

}  // namespace

TEST_SUITE("traj") {

TEST_CASE("H = 0 step is the identity") {
    const SpaceDims d{3, 3};
    const QState s(d, random_state(d, 1));
    const QOperator zero(d, CMatrix::Zero(9, 9), true);
    CHECK((hamiltonian_step(s, zero, 0.1).vector() - s.vector()).norm() < 1e-15);
}

TEST_CASE("photon Fock state at G = 0 only picks up the phase exp(i delta t)") {
    ModelParams p;
    p.G = 0.0;
    const SpaceDims d{4, 3};
    const double delta = -1.3;
    const QOperator h = hamiltonian(p, delta, d);
    QState s = QState::fock(d, 1, 0);
    for (int k = 0; k < 200; ++k) s = hamiltonian_step(s, h, 0.01);
    CHECK(std::abs(s.vector()(d.index(1, 0)) - std::polar(1.0, delta * 2.0)) < 1e-10);
    CHECK(expectation(s, number_op(d, Mode::photon)).real() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("midpoint step matches the exact propagator and preserves the norm") {
    const ModelParams p;
    const SpaceDims d{6, 6};
    const CVector v = random_state(d, 2);
    const QOperator h = hamiltonian(p, -1.1, d);
    const CVector exact = oracle::unitary(h.matrix(), 0.05) * v;
    CHECK((propagate(h, v, 0.05) - exact).norm() < 1e-12);
    CHECK(std::abs(hamiltonian_step(QState(d, v), h, 0.05).vector().norm() - 1.0) < 1e-10);
}

TEST_CASE("beat revival at delta = -omega_m, G = 0.1") {
    ModelParams p;
    p.G = 0.1;
    const SpaceDims d{8, 8};
    const NormalModes w = normal_mode_frequencies(p, -1.0);
    const double period = 2 * M_PI / (w.omega_A - w.omega_B);
    const QOperator h = hamiltonian(p, -1.0, d);
    const QState start = QState::fock(d, 0, 1);
    const long n = 4000;
    QState s = start;
    for (long k = 0; k < n; ++k) s = hamiltonian_step(s, h, period / n);
    const QState exact(d, oracle::unitary(h.matrix(), period) * start.vector());
    CHECK(fidelity(s, exact) > 0.999);
    // counter-rotating terms keep the physical revival just short of perfect
    CHECK(fidelity(s, start) > 0.99);
    // halfway the excitation sits mostly in the photon
    const QState half(d, oracle::unitary(h.matrix(), period / 2) * start.vector());
    CHECK(expectation(half, number_op(d, Mode::photon)).real() > 0.9);
}

TEST_CASE("SSE steps leave eigenstates alone and keep unit norm") {
    const SpaceDims d{5, 3};
    const QOperator n = number_op(d, Mode::photon);
    const QOperator a = annihilation(d, Mode::photon);
    const QState fock = QState::fock(d, 2, 1);
    CHECK((sse_step_dispersive(fock, n, 0.3, 0.01, 0.07).vector() - fock.vector()).norm() < 1e-14);
    const QState vac = QState::fock(d, 0, 2);
    CHECK((sse_step_absorptive(vac, a, 0.3, 0.01, 0.07).vector() - vac.vector()).norm() < 1e-14);
    const QState r(d, random_state(d, 4));
    CHECK((sse_step_dispersive(r, n, 0.0, 0.01, 0.5).vector() - r.vector()).norm() == 0.0);
    CHECK(std::abs(sse_step_absorptive(r, a, 0.3, 0.01, 0.1).vector().norm() - 1.0) < 1e-10);
}

TEST_CASE("norm drift before renormalization vanishes faster than dt^1.5") {
    const SpaceDims d{6, 3};
    const QState s(d, random_state(d, 5));
    const QOperator n = number_op(d, Mode::photon);
    const QOperator a = annihilation(d, Mode::photon);
    for (int scheme = 0; scheme < 2; ++scheme) {
        std::vector<double> drift;
        for (double dt : {4e-3, 2e-3, 1e-3, 5e-4}) {
            drift.push_back(std::abs(mean_norm_drift(
                [&](double dw) {
                    return scheme == 0 ? sse_update_dispersive(s, n, 0.2, dt, dw)
                                       : sse_update_absorptive(s, a, 0.2, dt, dw);
                },
                dt)));
        }
        const double slope = std::log2(drift[0] / drift[3]) / 3.0;
        CAPTURE(scheme);
        CHECK(slope > 1.5);
    }
}

TEST_CASE("bath step: jump probabilities and the no-jump branch") {
    const SpaceDims d{4, 4};
    const BathRates none{};
    RngStream rng(1, 0);
    const QState s(d, random_state(d, 6));
    CHECK((jump_step_baths(s, none, 0.01, rng).vector() - s.vector()).norm() < 1e-15);
    const BathRates huge{50.0, 0.0, 0.0};
    CHECK_THROWS_AS(jump_step_baths(QState::fock(d, 3, 0), huge, 0.01, rng), IntegratorError);
    // a single photon with kappa dt = 0.05: jump fraction 0.05
    const BathRates k{5.0, 0.0, 0.0};
    int jumps = 0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
        RngStream r(2, t);
        const QState out = jump_step_baths(QState::fock(d, 1, 2), k, 0.01, r);
        if (std::abs(out.vector()(d.index(0, 2))) > 0.5) ++jumps;
    }
    CHECK(std::abs(jumps / double(trials) - 0.05) < 4 * std::sqrt(0.05 * 0.95 / trials));
}

TEST_CASE("stencil kernel agrees with the reference integrators") {
    const ModelParams p;
    const SpaceDims d{7, 5};
    const FockKernel kernel(d, p.omega_m, p.G);
    KernelWorkspace ws(d.size());
    const CVector v = random_state(d, 7);
    const QState s(d, v);
    const double delta = -0.9;
    const QOperator h = hamiltonian(p, delta, d);

    CVector out(d.size());
    kernel.apply_h(delta, v, out, ws.tmp);
    CHECK((out - h.matrix() * v).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(kernel.energy(delta, v, ws) == doctest::Approx(expectation(s, h).real()).epsilon(1e-12));
    CHECK(kernel.photon_number(v) == doctest::Approx(expectation(s, number_op(d, Mode::photon)).real()));
    CHECK(kernel.phonon_number(v) == doctest::Approx(expectation(s, number_op(d, Mode::phonon)).real()));

    CVector u = v;
    kernel.propagate(delta, 5e-3, u, ws);
    CHECK((u - oracle::unitary(h.matrix(), 5e-3) * v).cwiseAbs().maxCoeff() < 1e-12);

    CVector x = v;
    kernel.dispersive_step(x, 0.04, 5e-3, 0.05);
    CHECK((x - sse_step_dispersive(s, number_op(d, Mode::photon), 0.04, 5e-3, 0.05).vector())
              .cwiseAbs()
              .maxCoeff() < 1e-13);
    CVector y = v;
    kernel.absorptive_step(y, 0.04, 5e-3, -0.05, ws);
    CHECK((y - sse_step_absorptive(s, annihilation(d, Mode::photon), 0.04, 5e-3, -0.05).vector())
              .cwiseAbs()
              .maxCoeff() < 1e-13);

    const BathRates rates{0.4, 0.3, 0.2};
    const BathStep step = kernel.bath_step(rates, 0.01);
    int jumped = 0;
    for (int k = 0; k < 200; ++k) {
        RngStream r1(9, k), r2(9, k), r3(9, k);
        CVector a = v, b = v;
        jumped += kernel.jump_step(a, step, r1);
        kernel.jump_step(b, rates, 0.01, r3);
        const QState ref = jump_step_baths(s, rates, 0.01, r2);
        CHECK((a - ref.vector()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
        CHECK(r1.next_u64() == r2.next_u64());
    }
    CHECK(jumped > 0);
}

TEST_CASE("jump operators") {
    const SpaceDims d{4, 4};
    const FockKernel kernel(d, 1.0, 0.2);
    CVector v = QState::fock(d, 2, 1).vector();
    kernel.apply_jump(0, v);
    CHECK(std::abs(v(d.index(1, 1))) == doctest::Approx(1.0));
    kernel.apply_jump(2, v);
    CHECK(std::abs(v(d.index(1, 2))) == doctest::Approx(1.0));
    kernel.apply_jump(1, v);
    CHECK(std::abs(v(d.index(1, 1))) == doctest::Approx(1.0));
    const auto w = kernel.jump_weights(v, {2.0, 3.0, 5.0});
    CHECK(w[0] == doctest::Approx(2.0));
    CHECK(w[1] == doctest::Approx(3.0));
    CHECK(w[2] == doctest::Approx(10.0));
}

TEST_CASE("constant-detuning evolver without baths is the exact propagator") {
    const ModelParams p;
    const SpaceDims d{6, 6};
    const FockKernel kernel(d, p.omega_m, p.G);
    const ConstantDetuningEvolver ev(p, -0.4, d, BathRates{});
    CVector v = random_state(d, 8);
    const CVector expect = oracle::unitary(hamiltonian(p, -0.4, d).matrix(), 37.5) * v;
    RngStream rng(1, 1);
    CHECK(ev.evolve(v, 37.5, rng, kernel) == 0);
    CHECK((v - expect).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("waiting-time evolver reproduces the Lindblad solution") {
    ModelParams p;
    p.G = 0.2;
    const SpaceDims d{4, 4};
    const BathRates rates{0.3, 0.2, 0.1};
    const FockKernel kernel(d, p.omega_m, p.G);
    const ConstantDetuningEvolver ev(p, -0.8, d, rates);
    const oracle::Ops ops(4, 4);
    oracle::Lindblad l{ops.hamiltonian(-0.8, 1.0, p.G),
                       {std::sqrt(0.3) * ops.a, std::sqrt(0.2) * ops.b, std::sqrt(0.1) * ops.b.adjoint()}};
    const CVector v = QState::fock(d, 1, 1).vector();
    const int m = 2000;
    oracle::Mat mean = oracle::Mat::Zero(d.size(), d.size());
    for (int j = 0; j < m; ++j) {
        CVector psi = v;
        RngStream rng(5, j);
        ev.evolve(psi, 3.0, rng, kernel);
        mean += oracle::projector(psi) / double(m);
    }
    oracle::Mat rho = oracle::projector(v);
    l.evolve(rho, 3.0, 1e-3);
    CHECK(oracle::trace_distance(mean, rho) < 3.0 / std::sqrt(double(m)));
}

TEST_CASE("unraveling consistency on (4,4), each scheme with baths") {
    oracle::Unraveling u;
    u.params.G = 0.2;
    u.delta = -1.0;
    u.dims = {4, 4};
    u.dt = 5e-3;
    u.rates = {0.1, 0.05, 0.02};
    oracle::Vec psi0 = oracle::Vec::Zero(16);
    psi0(u.dims.index(1, 0)) = 1.0 / std::sqrt(2.0);
    psi0(u.dims.index(2, 1)) = 1.0 / std::sqrt(2.0);
    const int m = 600;
    for (Scheme s : {Scheme::dispersive, Scheme::absorptive}) {
        u.scheme = s;
        u.lambda = 0.3;
        CAPTURE(to_string(s));
        CHECK(u.worst_distance(psi0, {0.5, 1.0, 1.5}, m, 77) < std::max(3.0 / std::sqrt(m), 5 * u.dt));
    }
}

}
