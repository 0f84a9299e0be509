#pragma once

// Dense operator algebra on the truncated two-mode Fock space.
//
// Basis ordering is lexicographic |n_a, n_b> with the photon index outermost:
// index(n_a, n_b) = n_a * n_phonon + n_b. Every CSV dump of populations and
// every kernel in this library relies on that layout.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace qotto {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class Mode { photon, phonon };

struct SpaceDims {
    int n_photon = 20;
    int n_phonon = 20;

    /// Throws ConfigError unless both cutoffs are >= 2.
    void validate() const;
    int size() const noexcept { return n_photon * n_phonon; }
    int index(int n_a, int n_b) const noexcept { return n_a * n_phonon + n_b; }
    bool operator==(const SpaceDims&) const = default;
};

/// Immutable dense operator. A compressed copy of the nonzeros is kept
/// alongside the dense matrix so that apply() costs O(nnz).
class QOperator {
public:
    QOperator(SpaceDims dims, CMatrix matrix, bool hermitian = false);

    const SpaceDims& dims() const noexcept { return dims_; }
    const CMatrix& matrix() const noexcept { return matrix_; }
    const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& sparse() const noexcept { return sparse_; }
    bool hermitian() const noexcept { return hermitian_; }

    QOperator adjoint() const;
    QOperator operator*(const QOperator& rhs) const;
    QOperator operator+(const QOperator& rhs) const;
    QOperator operator-(const QOperator& rhs) const;
    QOperator scaled(cplx factor) const;

    /// max |M - M^dagger| over all elements.
    double hermiticity_defect() const;

private:
    SpaceDims dims_;
    CMatrix matrix_;
    Eigen::SparseMatrix<cplx, Eigen::RowMajor> sparse_;
    bool hermitian_;
};

/// Pure state with unit Euclidean norm.
class QState {
public:
    /// Normalizes the input; throws DomainError on a zero vector.
    QState(SpaceDims dims, CVector vector);

    static QState fock(SpaceDims dims, int n_a, int n_b);

    const SpaceDims& dims() const noexcept { return dims_; }
    const CVector& vector() const noexcept { return vector_; }

private:
    SpaceDims dims_;
    CVector vector_;
};

QOperator identity(SpaceDims dims);
QOperator annihilation(SpaceDims dims, Mode which);
QOperator creation(SpaceDims dims, Mode which);
QOperator number_op(SpaceDims dims, Mode which);

/// <psi|O|psi>.
cplx expectation(const QState& state, const QOperator& op);

/// O|psi> with no renormalization.
CVector apply(const QOperator& op, const QState& state);

/// |<a|b>|^2 for normalized states.
double fidelity(const QState& a, const QState& b);

}  // namespace qotto
