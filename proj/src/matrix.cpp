#include "l1pda/matrix.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "l1pda/format.hpp"

namespace l1pda {

namespace detail {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string fmt_exact(double x) {
  char buf[48];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace detail

SymMatrix::SymMatrix(int p) {
  if (p <= 0) {
    throw Error("matrix dimension must be positive, got " + std::to_string(p));
  }
  m_ = Matrix::Zero(p, p);
}

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error("expected a square matrix, got " + std::to_string(m.rows()) + "x" +
                std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw Error("matrix has non-finite entries");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(int p) { return SymMatrix(Matrix::Identity(p, p)); }

SymMatrix SymMatrix::diagonal(const Vector& d) {
  return SymMatrix(Matrix(d.asDiagonal()));
}

double SymMatrix::max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

double SymMatrix::frobenius() const { return m_.norm(); }

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.mat() + b.mat());
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.mat() - b.mat());
}

SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.mat()); }

EigDecomp sym_eig(const SymMatrix& m) {
  if (m.dim() == 0) {
    throw Error("eigendecomposition of an empty matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.mat());
  if (solver.info() != Eigen::Success) {
    throw Error("eigendecomposition failed to converge for a " + std::to_string(m.dim()) +
                "x" + std::to_string(m.dim()) + " matrix");
  }
  // Eigen sorts ascending; flip to descending.
  EigDecomp out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

SymMatrix soft_threshold(const SymMatrix& m, double t) {
  if (!(t >= 0.0)) {
    throw Error("soft-threshold amount must be nonnegative, got " + detail::fmt(t));
  }
  Matrix out = (m.mat().array().abs() - t).max(0.0) * m.mat().array().sign();
  return SymMatrix(out);
}

namespace {

// Shared definiteness gate for spd_inverse / log_det.
bool positive_definite(const EigDecomp& eig, double* smallest_out) {
  const double largest = eig.values(0);
  const double smallest = eig.values(eig.values.size() - 1);
  *smallest_out = smallest;
  return largest > 0.0 && smallest > kRankTolFactor * largest;
}

}  // namespace

SymMatrix spd_inverse(const SymMatrix& m) {
  EigDecomp eig = sym_eig(m);
  double smallest = 0.0;
  if (!positive_definite(eig, &smallest)) {
    throw SingularMatrixError(
        "matrix is numerically singular (smallest eigenvalue " + detail::fmt(smallest) + ")",
        smallest);
  }
  Matrix inv =
      eig.vectors * eig.values.cwiseInverse().asDiagonal() * eig.vectors.transpose();
  return SymMatrix(inv);
}

double log_det(const SymMatrix& m) {
  EigDecomp eig = sym_eig(m);
  double smallest = 0.0;
  if (!positive_definite(eig, &smallest)) {
    throw NotPositiveDefiniteError(
        "log-determinant requires a positive definite matrix (smallest eigenvalue " +
            detail::fmt(smallest) + ")",
        smallest);
  }
  return eig.values.array().log().sum();
}

}  // namespace l1pda
