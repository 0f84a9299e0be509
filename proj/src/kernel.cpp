#include "qotto/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "qotto/errors.hpp"

namespace qotto {

namespace {
// Far below the O(dt^3) midpoint error and the 1e-10 per-step norm budget.
constexpr double kTaylorTolerance = 1e-12;
constexpr int kTaylorMaxTerms = 80;
// |psi|^2 through a real view; the complex reductions do not vectorize well.
Eigen::Map<const Eigen::VectorXd> doubles(const CVector& psi) {
    return {reinterpret_cast<const double*>(psi.data()), 2 * psi.size()};
}

double norm2_of(const CVector& psi) { return doubles(psi).squaredNorm(); }

}  // namespace

void normalize_or_throw(CVector& psi, const char* where) {
    const double norm = std::sqrt(norm2_of(psi));
    if (!(norm >= kNormCollapse) || !std::isfinite(norm)) {
        throw IntegratorError(std::string(where) + ": state norm collapsed to " +
                              std::to_string(norm) + "; reduce dt");
    }
    psi /= norm;
}

FockKernel::FockKernel(SpaceDims dims, double omega_m, double G)
    : dims_(dims), omega_m_(omega_m), G_(G) {
    dims_.validate();
    const int top = std::max(dims_.n_photon, dims_.n_phonon) + 1;
    sqrt_.resize(top);
    for (int k = 0; k < top; ++k) sqrt_[k] = std::sqrt(double(k));
    // Per-double coefficients over the whole interleaved (re, im) amplitude
    // array, zero where a ladder operator leaves the truncated space.
    const int nb = dims_.n_phonon;
    const int n2 = 2 * dims_.size();
    b_lower_.assign(n2, 0.0);
    b_upper_.assign(n2, 0.0);
    photon_count_.assign(n2, 0.0);
    phonon_energy_.assign(n2, 0.0);
    for (int j = 0; j < n2; ++j) {
        const int na = j / (2 * nb);
        const int m = (j / 2) % nb;
        b_lower_[j] = sqrt_[m];
        b_upper_[j] = m + 1 < nb ? sqrt_[m + 1] : 0.0;
        photon_count_[j] = na;
        phonon_energy_[j] = omega_m_ * m;
    }
}

void FockKernel::apply_h(double delta, const CVector& in, CVector& out, CVector& tmp) const {
    const int n2 = 2 * dims_.size();
    const int w = 2 * dims_.n_phonon;  // doubles per photon row
    const double* x = reinterpret_cast<const double*>(in.data());
    double* t = reinterpret_cast<double*>(tmp.data());
    double* o = reinterpret_cast<double*>(out.data());
    const double* bl = b_lower_.data();
    const double* bu = b_upper_.data();
    const double* eb = phonon_energy_.data();

    // tmp = (b + b^dag) in; coefficients vanish across photon-row boundaries
    t[0] = bu[0] * x[2];
    t[1] = bu[1] * x[3];
    for (int j = 2; j < n2 - 2; ++j) t[j] = bl[j] * x[j - 2] + bu[j] * x[j + 2];
    t[n2 - 2] = bl[n2 - 2] * x[n2 - 4];
    t[n2 - 1] = bl[n2 - 1] * x[n2 - 3];

    // out = (-delta n_a + omega_m n_b) in + G (a + a^dag) tmp, row by row
    const int np = dims_.n_photon;
    const double* s = sqrt_.data();
    for (int na = 0; na < np; ++na) {
        const double* xr = x + na * w;
        const double* tl = t + (na - 1) * w;
        const double* tu = t + (na + 1) * w;
        double* orow = o + na * w;
        const double da = -delta * na;
        if (na == 0) {
            const double cu = G_ * s[1];
            for (int j = 0; j < w; ++j) orow[j] = (da + eb[j]) * xr[j] + cu * tu[j];
        } else if (na + 1 == np) {
            const double cl = G_ * s[na];
            for (int j = 0; j < w; ++j) orow[j] = (da + eb[j]) * xr[j] + cl * tl[j];
        } else {
            const double cl = G_ * s[na];
            const double cu = G_ * s[na + 1];
            for (int j = 0; j < w; ++j) orow[j] = (da + eb[j]) * xr[j] + cl * tl[j] + cu * tu[j];
        }
    }
}

double FockKernel::energy(double delta, const CVector& psi, KernelWorkspace& ws) const {
    apply_h(delta, psi, ws.next, ws.tmp);
    // Re <psi|H psi> is the real dot product of the interleaved arrays
    return doubles(psi).dot(doubles(ws.next)) / norm2_of(psi);
}

Eigen::Map<const Eigen::MatrixXd> FockKernel::real_view(const CVector& psi) const {
    return {reinterpret_cast<const double*>(psi.data()), 2 * dims_.n_phonon, dims_.n_photon};
}

double FockKernel::photon_number(const CVector& psi) const {
    const Eigen::VectorXd rows = real_view(psi).colwise().squaredNorm().transpose();
    double acc = 0.0;
    for (int na = 1; na < dims_.n_photon; ++na) acc += na * rows[na];
    return acc / rows.sum();
}

double FockKernel::phonon_number(const CVector& psi) const {
    const Eigen::VectorXd cols = real_view(psi).rowwise().squaredNorm();
    double acc = 0.0;
    for (int j = 2; j < cols.size(); ++j) acc += (j / 2) * cols[j];
    return acc / cols.sum();
}

void FockKernel::renormalize(CVector& psi) const {
    psi *= 1.0 / std::sqrt(norm2_of(psi));
}

void FockKernel::propagate(double delta, double dt, CVector& psi, KernelWorkspace& ws) const {
    // The series is summed for H - E with E the diagonal part's expectation,
    // which keeps the terms small for near-Fock states; the phase
    // exp(-i E dt) is restored at the end.
    const int n2 = 2 * dims_.size();
    const auto x = doubles(psi).array();
    const Eigen::Map<const Eigen::ArrayXd> na(photon_count_.data(), n2);
    const Eigen::Map<const Eigen::ArrayXd> eb(phonon_energy_.data(), n2);
    const double norm2 = x.square().sum();
    const double e = ((-delta) * na + eb).cwiseProduct(x.square()).sum() / norm2;
    const double tol2 = kTaylorTolerance * kTaylorTolerance * norm2;
    ws.term = psi;
    double* term = reinterpret_cast<double*>(ws.term.data());
    const double* next = reinterpret_cast<const double*>(ws.next.data());
    double* acc = reinterpret_cast<double*>(psi.data());
    for (int k = 1; k <= kTaylorMaxTerms; ++k) {
        apply_h(delta, ws.term, ws.next, ws.tmp);
        // term <- -i (dt / k) (H - E) term
        const double f = dt / k;
        for (int j = 0; j < n2; j += 2) {
            const double re = f * (next[j + 1] - e * term[j + 1]);
            const double im = -f * (next[j] - e * term[j]);
            term[j] = re;
            term[j + 1] = im;
            acc[j] += re;
            acc[j + 1] += im;
        }
        if (norm2_of(ws.term) <= tol2) {
            psi *= std::polar(1.0, -e * dt);
            return;
        }
    }
    throw IntegratorError("hamiltonian step: Taylor series did not converge; reduce dt");
}

void FockKernel::dispersive_step(CVector& psi, double lambda, double dt, double dw) const {
    if (lambda == 0.0) return;
    const int np = dims_.n_photon;
    const int nb = dims_.n_phonon;
    const double mean = photon_number(psi);
    const double sq = std::sqrt(lambda);
    for (int na = 0; na < np; ++na) {
        const double shift = na - mean;
        const double factor = 1.0 - 0.5 * lambda * dt * shift * shift + sq * dw * shift;
        cplx* row = psi.data() + na * nb;
        for (int m = 0; m < nb; ++m) row[m] *= factor;
    }
    normalize_or_throw(psi, "sse_step_dispersive");
}

void FockKernel::absorptive_step(CVector& psi, double lambda, double dt, double dw,
                                 KernelWorkspace&) const {
    if (lambda == 0.0) return;
    const int np = dims_.n_photon;
    const int nb = dims_.n_phonon;
    const double* s = sqrt_.data();
    // x = <a + a^dag> = 2 Re <psi|a|psi>
    const auto d = doubles(psi);
    const int w = 2 * nb;
    double overlap = 0.0;  // Re <psi|a|psi>
    for (int na = 0; na + 1 < np; ++na) {
        overlap += s[na + 1] * d.segment(na * w, w).dot(d.segment((na + 1) * w, w));
    }
    const double x = 2.0 * overlap / d.squaredNorm();
    const double sq = std::sqrt(lambda);
    const double c_a = 0.5 * lambda * dt * x + sq * dw;  // coefficient of a psi
    // ascending rows: row na + 1 is still unmodified when row na is updated
    for (int na = 0; na < np; ++na) {
        const double c_psi = 1.0 - 0.5 * lambda * dt * (na + 0.25 * x * x) - 0.5 * sq * dw * x;
        cplx* row = psi.data() + na * nb;
        if (na + 1 < np) {
            const cplx* up = row + nb;
            const double c = c_a * s[na + 1];
            for (int m = 0; m < nb; ++m) row[m] = c_psi * row[m] + c * up[m];
        } else {
            for (int m = 0; m < nb; ++m) row[m] *= c_psi;
        }
    }
    normalize_or_throw(psi, "sse_step_absorptive");
}

std::array<double, 3> FockKernel::jump_weights(const CVector& psi, const BathRates& rates) const {
    const auto view = real_view(psi);
    const Eigen::VectorXd rows = view.colwise().squaredNorm().transpose();
    const Eigen::VectorXd cols = view.rowwise().squaredNorm();
    const double norm2 = rows.sum();
    double na_sum = 0.0;
    for (int na = 1; na < dims_.n_photon; ++na) na_sum += na * rows[na];
    double nb_sum = 0.0;
    double up_sum = 0.0;
    const int top = int(cols.size()) - 2;  // b b^dag vanishes on the top phonon level
    for (int j = 0; j < int(cols.size()); ++j) {
        nb_sum += (j / 2) * cols[j];
        if (j < top) up_sum += (j / 2 + 1) * cols[j];
    }
    return {rates.kappa * na_sum / norm2, rates.phonon_down * nb_sum / norm2,
            rates.phonon_up * up_sum / norm2};
}

void FockKernel::apply_jump(int channel, CVector& psi) const {
    const int np = dims_.n_photon;
    const int nb = dims_.n_phonon;
    const double* s = sqrt_.data();
    cplx* p = psi.data();
    switch (channel) {
        case 0:  // a
            for (int na = 0; na + 1 < np; ++na) {
                for (int m = 0; m < nb; ++m) p[na * nb + m] = s[na + 1] * p[(na + 1) * nb + m];
            }
            for (int m = 0; m < nb; ++m) p[(np - 1) * nb + m] = 0.0;
            break;
        case 1:  // b
            for (int na = 0; na < np; ++na) {
                cplx* row = p + na * nb;
                for (int m = 0; m + 1 < nb; ++m) row[m] = s[m + 1] * row[m + 1];
                row[nb - 1] = 0.0;
            }
            break;
        default:  // b^dag
            for (int na = 0; na < np; ++na) {
                cplx* row = p + na * nb;
                for (int m = nb - 1; m > 0; --m) row[m] = s[m] * row[m - 1];
                row[0] = 0.0;
            }
            break;
    }
    normalize_or_throw(psi, "jump_step_baths");
}

BathStep FockKernel::bath_step(const BathRates& rates, double dt) const {
    BathStep step;
    step.rates = rates;
    step.dt = dt;
    const int n2 = 2 * dims_.size();
    const int nb = dims_.n_phonon;
    step.rate.resize(n2);
    step.damping.resize(n2);
    for (int j = 0; j < n2; ++j) {
        const int m = (j / 2) % nb;
        // diagonal of K = kappa n_a + down n_b + up b b^dag
        const double k = rates.kappa * photon_count_[j] + rates.phonon_down * m +
                         (m + 1 < nb ? rates.phonon_up * (m + 1) : 0.0);
        step.rate[j] = k;
        step.damping[j] = std::exp(-0.5 * dt * k);
    }
    return step;
}

bool FockKernel::jump_step(CVector& psi, const BathRates& rates, double dt, RngStream& rng) const {
    return jump_step(psi, bath_step(rates, dt), rng);
}

bool FockKernel::jump_step(CVector& psi, const BathStep& step, RngStream& rng) const {
    const int n2 = 2 * dims_.size();
    const auto x = doubles(psi).array();
    const Eigen::Map<const Eigen::ArrayXd> rate(step.rate.data(), n2);
    const double total = step.dt * (rate * x.square()).sum() / x.square().sum();
    if (total > kMaxJumpProbability) {
        throw IntegratorError("jump_step_baths: jump probability " + std::to_string(total) +
                              " per step exceeds 0.1; reduce dt");
    }
    const double u = rng.uniform();
    if (u < total) {
        const auto w = jump_weights(psi, step.rates);
        const double wsum = w[0] + w[1] + w[2];
        const double v = rng.uniform() * wsum;
        int c = 0;
        double acc = w[0];
        while (c < 2 && v >= acc) acc += w[++c];
        apply_jump(c, psi);
        return true;
    }
    Eigen::Map<Eigen::ArrayXd> y(reinterpret_cast<double*>(psi.data()), n2);
    y *= Eigen::Map<const Eigen::ArrayXd>(step.damping.data(), n2);
    normalize_or_throw(psi, "jump_step_baths");
    return false;
}

ConstantDetuningEvolver::ConstantDetuningEvolver(const ModelParams& params, double delta,
                                                 SpaceDims dims, BathRates rates)
    : delta_(delta), rates_(rates) {
    const QOperator h = hamiltonian(params, delta, dims);
    const int dim = dims.size();
    if (!rates_.any()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix().real());
        eigenvalues_ = es.eigenvalues().cast<cplx>();
        vecs_ = es.eigenvectors().cast<cplx>();
        inv_vecs_ = vecs_.adjoint();
        gram_ = CMatrix::Identity(dim, dim);
        return;
    }
    CMatrix heff = h.matrix();
    for (int na = 0; na < dims.n_photon; ++na) {
        for (int m = 0; m < dims.n_phonon; ++m) {
            const double k = rates_.kappa * na + rates_.phonon_down * m +
                             (m + 1 < dims.n_phonon ? rates_.phonon_up * (m + 1) : 0.0);
            const int i = dims.index(na, m);
            heff(i, i) -= cplx(0.0, 0.5 * k);
        }
    }
    Eigen::ComplexEigenSolver<CMatrix> es(heff);
    if (es.info() != Eigen::Success) {
        throw IntegratorError("constant-detuning evolver: eigendecomposition failed");
    }
    eigenvalues_ = es.eigenvalues();
    vecs_ = es.eigenvectors();
    inv_vecs_ = vecs_.partialPivLu().inverse();
    const double defect = (inv_vecs_ * vecs_ - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (!(defect < 1e-8)) {
        throw IntegratorError("constant-detuning evolver: ill-conditioned eigenbasis (defect " +
                              std::to_string(defect) + ")");
    }
    gram_ = vecs_.adjoint() * vecs_;
}

CVector ConstantDetuningEvolver::evolved(const CVector& c, double tau) const {
    CVector phased(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        phased(k) = std::exp(cplx(0.0, -tau) * eigenvalues_(k)) * c(k);
    }
    return vecs_ * phased;
}

double ConstantDetuningEvolver::no_jump_norm2(const CVector& c, double tau) const {
    CVector phased(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        phased(k) = std::exp(cplx(0.0, -tau) * eigenvalues_(k)) * c(k);
    }
    return phased.dot(gram_ * phased).real();
}

int ConstantDetuningEvolver::evolve(CVector& psi, double duration, RngStream& rng,
                                    const FockKernel& kernel) const {
    if (!(duration > 0.0)) return 0;
    CVector c = inv_vecs_ * psi;
    if (!dissipative()) {
        psi = evolved(c, duration);
        normalize_or_throw(psi, "constant-detuning stroke");
        return 0;
    }
    int jumps = 0;
    double t = 0.0;
    double r = rng.uniform();
    for (;;) {
        const double remaining = duration - t;
        const double end_norm = no_jump_norm2(c, remaining);
        if (end_norm > r) {
            psi = evolved(c, remaining);
            normalize_or_throw(psi, "constant-detuning stroke");
            return jumps;
        }
        // Illinois regula falsi on log|psi(tau)|^2 = log r
        const double log_r = std::log(r);
        double a = 0.0, fa = -log_r;
        double b = remaining, fb = std::log(end_norm) - log_r;
        double tau = b;
        int side = 0;
        for (int it = 0; it < 200; ++it) {
            tau = (a * fb - b * fa) / (fb - fa);
            if (!(tau > a && tau < b)) tau = 0.5 * (a + b);
            const double f = std::log(no_jump_norm2(c, tau)) - log_r;
            if (std::abs(f) < 1e-13 || b - a < 1e-12 * (1.0 + remaining)) break;
            if (f > 0.0) {
                a = tau;
                fa = f;
                if (side == 1) fb *= 0.5;
                side = 1;
            } else {
                b = tau;
                fb = f;
                if (side == -1) fa *= 0.5;
                side = -1;
            }
        }
        psi = evolved(c, tau);
        normalize_or_throw(psi, "constant-detuning stroke");
        const auto w = kernel.jump_weights(psi, rates_);
        const double total = w[0] + w[1] + w[2];
        const double v = rng.uniform() * total;
        if (total > 0.0) {
            int ch = 0;
            double acc = w[0];
            while (ch < 2 && v >= acc) acc += w[++ch];
            kernel.apply_jump(ch, psi);
            ++jumps;
        }
        t += tau;
        c = inv_vecs_ * psi;
        r = rng.uniform();
    }
}

}  // namespace qotto
