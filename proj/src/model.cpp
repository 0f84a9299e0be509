#include "qotto/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "qotto/errors.hpp"

namespace qotto {

namespace {

constexpr int kScheduleNodes = 4096;

[[noreturn]] void unstable(double delta, const std::string& why) {
    std::ostringstream os;
    os.precision(17);
    os << "unstable parameters at delta = " << delta << ": " << why;
    throw StabilityError(os.str(), delta);
}

using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

// Truncated single-mode quadrature matrices, embedded in the two-mode space.
std::array<SpMat, 4> quadrature_ops(SpaceDims dims) {
    const SpMat a = annihilation(dims, Mode::photon).sparse();
    const SpMat b = annihilation(dims, Mode::phonon).sparse();
    const SpMat ad = a.adjoint();
    const SpMat bd = b.adjoint();
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    return {SpMat((a + ad) * s), SpMat((ad - a) * (i * s)), SpMat((b + bd) * s),
            SpMat((bd - b) * (i * s))};
}

}  // namespace

void ModelParams::validate() const {
    auto fail = [](const std::string& key, const std::string& msg) {
        throw ConfigError("model." + key + ": " + msg);
    };
    if (!(omega_m > 0.0)) fail("omega_m", "must be positive");
    if (!(delta_i < -omega_m)) fail("delta_i", "must satisfy delta_i < -omega_m");
    if (!(delta_f > -omega_m && delta_f < 0.0)) fail("delta_f", "must satisfy -omega_m < delta_f < 0");
    if (!(G >= 0.0 && G < omega_m / 2.0)) fail("G", "must satisfy 0 <= G < omega_m/2");
    if (!(kappa >= 0.0)) fail("kappa", "must be >= 0");
    if (!(gamma >= 0.0)) fail("gamma", "must be >= 0");
    if (!(nbar_th >= 0.0)) fail("nbar_th", "must be >= 0");
    // both endpoints of the sweep must be dynamically stable
    if (!(-delta_f * omega_m > 4.0 * G * G)) fail("delta_f", "unstable: requires -delta_f * omega_m > 4 G^2");
}

QOperator hamiltonian(const ModelParams& params, double delta, SpaceDims dims) {
    dims.validate();
    const int d = dims.size();
    CMatrix h = CMatrix::Zero(d, d);
    for (int na = 0; na < dims.n_photon; ++na) {
        for (int nb = 0; nb < dims.n_phonon; ++nb) {
            const int i = dims.index(na, nb);
            h(i, i) = -delta * na + params.omega_m * nb;
            // G (a + a^dag)(b + b^dag) couples to n_a +- 1, n_b +- 1
            for (int da : {-1, 1}) {
                const int ma = na + da;
                if (ma < 0 || ma >= dims.n_photon) continue;
                const double ca = std::sqrt(double(std::max(na, ma)));
                for (int db : {-1, 1}) {
                    const int mb = nb + db;
                    if (mb < 0 || mb >= dims.n_phonon) continue;
                    const double cb = std::sqrt(double(std::max(nb, mb)));
                    h(dims.index(ma, mb), i) = params.G * ca * cb;
                }
            }
        }
    }
    return QOperator(dims, std::move(h), true);
}

NormalModes normal_mode_frequencies(const ModelParams& params, double delta) {
    const double wm = params.omega_m;
    const double d2 = delta * delta;
    const double w2 = wm * wm;
    const double disc = (d2 - w2) * (d2 - w2) - 16.0 * params.G * params.G * delta * wm;
    if (disc < 0.0) unstable(delta, "negative discriminant");
    const double root = std::sqrt(disc);
    const double upper = 0.5 * (d2 + w2 + root);
    const double lower = 0.5 * (d2 + w2 - root);
    if (!(lower > 0.0)) unstable(delta, "lower normal mode has imaginary frequency");
    return {std::sqrt(upper), std::sqrt(lower)};
}

double normal_mode_gap(const ModelParams& params, double delta) {
    const auto m = normal_mode_frequencies(params, delta);
    return m.omega_A - m.omega_B;
}

Eigen::Matrix4d quadrature_hamiltonian(const ModelParams& params, double delta) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = m(1, 1) = -delta;
    m(2, 2) = m(3, 3) = params.omega_m;
    m(0, 2) = m(2, 0) = 2.0 * params.G;
    return m;
}

Eigen::Matrix4d symplectic_form() {
    Eigen::Matrix4d o = Eigen::Matrix4d::Zero();
    o(0, 1) = o(2, 3) = 1.0;
    o(1, 0) = o(3, 2) = -1.0;
    return o;
}

Williamson williamson_decomposition(const ModelParams& params, double delta) {
    const Eigen::Matrix4d m = quadrature_hamiltonian(params, delta);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
    const Eigen::Vector4d ev = es.eigenvalues();
    if (!(ev.minCoeff() > 0.0)) unstable(delta, "quadrature Hamiltonian is not positive definite");

    const Eigen::Matrix4d& v = es.eigenvectors();
    const Eigen::Matrix4d sqrt_m = v * ev.cwiseSqrt().asDiagonal() * v.transpose();
    const Eigen::Matrix4d k = sqrt_m * symplectic_form() * sqrt_m;

    Eigen::RealSchur<Eigen::Matrix4d> schur(k);
    Eigen::Matrix4d u = schur.matrixU();
    const Eigen::Matrix4d& t = schur.matrixT();

    // Orient each 2x2 block as w [[0, 1], [-1, 0]] with w > 0.
    std::array<double, 2> w{};
    for (int blk = 0; blk < 2; ++blk) {
        const int j = 2 * blk;
        w[blk] = t(j, j + 1);
        if (w[blk] < 0.0) {
            u.col(j).swap(u.col(j + 1));
            w[blk] = -w[blk];
        }
    }
    // Upper branch first.
    if (w[1] > w[0]) {
        Eigen::Matrix4d swapped = u;
        swapped.leftCols<2>() = u.rightCols<2>();
        swapped.rightCols<2>() = u.leftCols<2>();
        u = swapped;
        std::swap(w[0], w[1]);
    }
    const Eigen::Vector4d inv_sqrt_d(1.0 / std::sqrt(w[0]), 1.0 / std::sqrt(w[0]),
                                     1.0 / std::sqrt(w[1]), 1.0 / std::sqrt(w[1]));
    Williamson out;
    out.omega_A = w[0];
    out.omega_B = w[1];
    out.S = inv_sqrt_d.asDiagonal() * u.transpose() * sqrt_m;
    return out;
}

PolaritonData polariton_data(const ModelParams& params, double delta, SpaceDims dims) {
    dims.validate();
    const Williamson wd = williamson_decomposition(params, delta);
    const auto r = quadrature_ops(dims);

    auto combination = [&](int row) {
        SpMat acc(dims.size(), dims.size());
        for (int j = 0; j < 4; ++j) {
            if (wd.S(row, j) != 0.0) acc += r[j] * cplx(wd.S(row, j));
        }
        return acc;
    };
    auto occupation = [&](int first_row) {
        const SpMat x = combination(first_row);
        const SpMat p = combination(first_row + 1);
        SpMat n = SpMat(x * x + p * p) * cplx(0.5);
        CMatrix dense = CMatrix(n);
        dense -= 0.5 * CMatrix::Identity(dims.size(), dims.size());
        // exact Hermitian symmetrization removes rounding-level asymmetry
        dense = 0.5 * (dense + dense.adjoint()).eval();
        return QOperator(dims, std::move(dense), true);
    };

    return PolaritonData{wd.omega_A,
                         wd.omega_B,
                         wd.S,
                         0.5 * (wd.omega_A + wd.omega_B + delta - params.omega_m),
                         occupation(0),
                         occupation(2)};
}

NormalModes polariton_occupations(const Eigen::Matrix4d& S, const CVector& psi, SpaceDims dims) {
    const int np = dims.n_photon;
    const int nb = dims.n_phonon;
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    // r_j |psi> for the four truncated quadratures
    std::array<CVector, 4> rpsi;
    for (auto& v : rpsi) v = CVector::Zero(psi.size());
    for (int na = 0; na < np; ++na) {
        for (int mb = 0; mb < nb; ++mb) {
            const int idx = na * nb + mb;
            const cplx c = psi(idx);
            // photon: a|na> = sqrt(na)|na-1>, a^dag|na> = sqrt(na+1)|na+1>
            if (na > 0) {
                const cplx lo = std::sqrt(double(na)) * c;  // component of a psi at na-1
                rpsi[0](idx - nb) += s * lo;
                rpsi[1](idx - nb) += -i * s * lo;
            }
            if (na + 1 < np) {
                const cplx hi = std::sqrt(double(na + 1)) * c;
                rpsi[0](idx + nb) += s * hi;
                rpsi[1](idx + nb) += i * s * hi;
            }
            if (mb > 0) {
                const cplx lo = std::sqrt(double(mb)) * c;
                rpsi[2](idx - 1) += s * lo;
                rpsi[3](idx - 1) += -i * s * lo;
            }
            if (mb + 1 < nb) {
                const cplx hi = std::sqrt(double(mb + 1)) * c;
                rpsi[2](idx + 1) += s * hi;
                rpsi[3](idx + 1) += i * s * hi;
            }
        }
    }
    Eigen::Matrix4d c;
    for (int a = 0; a < 4; ++a) {
        for (int b = a; b < 4; ++b) c(a, b) = c(b, a) = rpsi[a].dot(rpsi[b]).real();
    }
    const double norm2 = psi.squaredNorm();
    c /= norm2;
    auto occ = [&](int row) {
        const double xx = S.row(row) * c * S.row(row).transpose();
        const double pp = S.row(row + 1) * c * S.row(row + 1).transpose();
        return 0.5 * (xx + pp) - 0.5;
    };
    return {occ(0), occ(2)};
}

Schedule::Schedule(ScheduleKind kind, double t_stroke, double delta_start, double delta_end,
                   const ModelParams& params)
    : kind_(kind), t_stroke_(t_stroke), delta_start_(delta_start), delta_end_(delta_end) {
    if (!(t_stroke > 0.0)) throw ConfigError("schedule: stroke duration must be positive");
    if (kind_ == ScheduleKind::linear || delta_start == delta_end) return;

    const int n = kScheduleNodes;
    const double step = (delta_end - delta_start) / n;
    auto inv_speed = [&](double d) {
        const double g = normal_mode_gap(params, d);
        return 1.0 / (g * g);
    };
    node_delta_.resize(n + 1);
    node_time_.resize(n + 1);
    node_speed_.resize(n + 1);
    node_time_[0] = 0.0;
    for (int k = 0; k <= n; ++k) node_delta_[k] = delta_start + step * k;
    node_delta_[n] = delta_end;
    for (int k = 0; k < n; ++k) {
        const double a = node_delta_[k];
        const double b = node_delta_[k + 1];
        const double simpson = std::abs(b - a) / 6.0 *
                               (inv_speed(a) + 4.0 * inv_speed(0.5 * (a + b)) + inv_speed(b));
        node_time_[k + 1] = node_time_[k] + simpson;
    }
    const double scale = t_stroke / node_time_[n];
    for (int k = 0; k <= n; ++k) {
        node_time_[k] *= scale;
        // |dDelta/dt| = gap^2 / scale
        node_speed_[k] = 1.0 / (inv_speed(node_delta_[k]) * scale);
    }
    node_time_[n] = t_stroke;
}

double Schedule::delta(double t) const {
    if (!(t >= 0.0 && t <= t_stroke_)) {
        throw DomainError("schedule: t = " + std::to_string(t) + " outside [0, " +
                          std::to_string(t_stroke_) + "]");
    }
    if (t == 0.0) return delta_start_;
    if (t == t_stroke_) return delta_end_;
    if (node_time_.empty()) return delta_start_ + (delta_end_ - delta_start_) * (t / t_stroke_);

    const auto it = std::upper_bound(node_time_.begin(), node_time_.end(), t);
    const std::size_t k = std::min<std::size_t>(it - node_time_.begin(), node_time_.size() - 1) - 1;
    const double h = node_time_[k + 1] - node_time_[k];
    const double s = (t - node_time_[k]) / h;
    const double dir = delta_end_ > delta_start_ ? 1.0 : -1.0;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * node_delta_[k] + (s3 - 2 * s2 + s) * h * dir * node_speed_[k] +
           (-2 * s3 + 3 * s2) * node_delta_[k + 1] + (s3 - s2) * h * dir * node_speed_[k + 1];
}

double Schedule::rate(double t) const {
    if (!(t >= 0.0 && t <= t_stroke_)) {
        throw DomainError("schedule: t = " + std::to_string(t) + " outside [0, " +
                          std::to_string(t_stroke_) + "]");
    }
    if (node_time_.empty()) return (delta_end_ - delta_start_) / t_stroke_;

    const auto it = std::upper_bound(node_time_.begin(), node_time_.end(), t);
    const std::size_t k = std::min<std::size_t>(it - node_time_.begin(), node_time_.size() - 1) - 1;
    const double h = node_time_[k + 1] - node_time_[k];
    const double s = (t - node_time_[k]) / h;
    const double dir = delta_end_ > delta_start_ ? 1.0 : -1.0;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * node_delta_[k] + (3 * s2 - 4 * s + 1) * h * dir * node_speed_[k] +
            (-6 * s2 + 6 * s) * node_delta_[k + 1] + (3 * s2 - 2 * s) * h * dir * node_speed_[k + 1]) /
           h;
}

double schedule_delta(const Schedule& schedule, double t) { return schedule.delta(t); }

}  // namespace qotto
