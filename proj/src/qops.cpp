#include "qotto/qops.hpp"

#include <cmath>
#include <string>

#include "qotto/errors.hpp"

namespace qotto {

namespace {

void require_same_dims(const SpaceDims& a, const SpaceDims& b, const char* where) {
    if (!(a == b)) {
        throw ShapeError(std::string(where) + ": dimension mismatch (" +
                         std::to_string(a.n_photon) + "x" + std::to_string(a.n_phonon) + " vs " +
                         std::to_string(b.n_photon) + "x" + std::to_string(b.n_phonon) + ")");
    }
}

// Single-mode ladder matrix <n-1|a|n> = sqrt(n), embedded on the selected mode.
CMatrix ladder_matrix(const SpaceDims& dims, Mode which) {
    dims.validate();
    const int d = dims.size();
    CMatrix m = CMatrix::Zero(d, d);
    for (int na = 0; na < dims.n_photon; ++na) {
        for (int nb = 0; nb < dims.n_phonon; ++nb) {
            if (which == Mode::photon && na > 0) {
                m(dims.index(na - 1, nb), dims.index(na, nb)) = std::sqrt(double(na));
            } else if (which == Mode::phonon && nb > 0) {
                m(dims.index(na, nb - 1), dims.index(na, nb)) = std::sqrt(double(nb));
            }
        }
    }
    return m;
}

}  // namespace

void SpaceDims::validate() const {
    if (n_photon < 2 || n_phonon < 2) {
        throw ConfigError("space: cutoffs must be >= 2 (got n_photon=" + std::to_string(n_photon) +
                          ", n_phonon=" + std::to_string(n_phonon) + ")");
    }
}

QOperator::QOperator(SpaceDims dims, CMatrix matrix, bool hermitian)
    : dims_(dims), matrix_(std::move(matrix)), hermitian_(hermitian) {
    if (matrix_.rows() != dims_.size() || matrix_.cols() != dims_.size()) {
        throw ShapeError("QOperator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                         std::to_string(matrix_.cols()) + ", expected " +
                         std::to_string(dims_.size()) + " square");
    }
#ifndef NDEBUG
    if (hermitian_ && hermiticity_defect() > 1e-12 * std::max(1.0, matrix_.cwiseAbs().maxCoeff())) {
        throw ShapeError("QOperator: flagged Hermitian but M != M^dagger");
    }
#endif
    sparse_ = matrix_.sparseView(cplx(0.0), 0.0);
    sparse_.makeCompressed();
}

QOperator QOperator::adjoint() const { return QOperator(dims_, matrix_.adjoint(), hermitian_); }

QOperator QOperator::operator*(const QOperator& rhs) const {
    require_same_dims(dims_, rhs.dims_, "operator*");
    return QOperator(dims_, matrix_ * rhs.matrix_, false);
}

QOperator QOperator::operator+(const QOperator& rhs) const {
    require_same_dims(dims_, rhs.dims_, "operator+");
    return QOperator(dims_, matrix_ + rhs.matrix_, hermitian_ && rhs.hermitian_);
}

QOperator QOperator::operator-(const QOperator& rhs) const {
    require_same_dims(dims_, rhs.dims_, "operator-");
    return QOperator(dims_, matrix_ - rhs.matrix_, hermitian_ && rhs.hermitian_);
}

QOperator QOperator::scaled(cplx factor) const {
    return QOperator(dims_, matrix_ * factor, hermitian_ && factor.imag() == 0.0);
}

double QOperator::hermiticity_defect() const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

QState::QState(SpaceDims dims, CVector vector) : dims_(dims), vector_(std::move(vector)) {
    if (vector_.size() != dims_.size()) {
        throw ShapeError("QState: vector length " + std::to_string(vector_.size()) +
                         " does not match dimension " + std::to_string(dims_.size()));
    }
    const double norm = vector_.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw DomainError("QState: cannot normalize a zero or non-finite vector");
    }
    vector_ /= norm;
}

QState QState::fock(SpaceDims dims, int n_a, int n_b) {
    dims.validate();
    if (n_a < 0 || n_a >= dims.n_photon || n_b < 0 || n_b >= dims.n_phonon) {
        throw DomainError("QState::fock: level outside the truncated space");
    }
    CVector v = CVector::Zero(dims.size());
    v(dims.index(n_a, n_b)) = 1.0;
    return QState(dims, std::move(v));
}

QOperator identity(SpaceDims dims) {
    dims.validate();
    return QOperator(dims, CMatrix::Identity(dims.size(), dims.size()), true);
}

QOperator annihilation(SpaceDims dims, Mode which) {
    return QOperator(dims, ladder_matrix(dims, which), false);
}

QOperator creation(SpaceDims dims, Mode which) {
    return QOperator(dims, ladder_matrix(dims, which).adjoint(), false);
}

QOperator number_op(SpaceDims dims, Mode which) {
    dims.validate();
    const int d = dims.size();
    CMatrix m = CMatrix::Zero(d, d);
    for (int na = 0; na < dims.n_photon; ++na) {
        for (int nb = 0; nb < dims.n_phonon; ++nb) {
            const int i = dims.index(na, nb);
            m(i, i) = which == Mode::photon ? na : nb;
        }
    }
    return QOperator(dims, std::move(m), true);
}

cplx expectation(const QState& state, const QOperator& op) {
    require_same_dims(state.dims(), op.dims(), "expectation");
    const CVector applied = op.sparse() * state.vector();
    return state.vector().dot(applied);
}

CVector apply(const QOperator& op, const QState& state) {
    require_same_dims(state.dims(), op.dims(), "apply");
    return op.sparse() * state.vector();
}

double fidelity(const QState& a, const QState& b) {
    require_same_dims(a.dims(), b.dims(), "fidelity");
    return std::norm(a.vector().dot(b.vector()));
}

}  // namespace qotto
