#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

// Shared aliases, the error taxonomy, and small dense-matrix helpers used by
// every module. All matrices are dense, double precision, column-major Eigen.

namespace graphgp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::MatrixXi;
using IntVector = Eigen::VectorXi;

// ----------------------------------------------------------------------------
// Errors. Every throw carries "module.op" provenance in the message so the CLI
// can report where a run failed. Validation errors map to exit 2, numerical
// errors to exit 3.
// ----------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    Error(const std::string& where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

/// Bad arguments or malformed configuration.
class InvalidParameterError : public Error {
    using Error::Error;
};

/// Input file could not be parsed.
class ParseError : public Error {
    using Error::Error;
};

/// A node with zero degree / zero variance where the math divides by it.
class DegenerateError : public Error {
    using Error::Error;
};

/// Kernel matrix violates its contract (negative diagonal etc.).
class InvalidKernelError : public Error {
    using Error::Error;
};

/// Solver or eigendecomposition failure at runtime.
class NumericalError : public Error {
    using Error::Error;
};

// ----------------------------------------------------------------------------
// Matrix helpers
// ----------------------------------------------------------------------------

/// Exact symmetrization: averages M with its transpose.
inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline bool is_symmetric(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

/// ||a - b||_F / ||b||_F, with the convention 0/0 = 0.
inline double relative_frobenius_error(const Matrix& a, const Matrix& b) {
    double denom = b.norm();
    double num = (a - b).norm();
    if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / denom;
}

inline double smallest_eigenvalue(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(sym), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("common.smallest_eigenvalue", "eigensolver failed to converge");
    return es.eigenvalues()(0);
}

/// Symmetric PSD square root via eigendecomposition; negative roundoff
/// eigenvalues are clamped to zero.
inline Matrix psd_sqrt(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(sym));
    if (es.info() != Eigen::Success)
        throw NumericalError("common.psd_sqrt", "eigensolver failed to converge");
    Vector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

/// Factor L with L L^T = sym (PSD up to roundoff), usable for Gaussian
/// sampling of rank-deficient covariances.
inline Matrix psd_factor(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(sym));
    if (es.info() != Eigen::Success)
        throw NumericalError("common.psd_factor", "eigensolver failed to converge");
    Vector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal();
}

} // namespace graphgp
