#ifndef L1PDA_MATRIX_HPP
#define L1PDA_MATRIX_HPP

#include <Eigen/Dense>

#include "l1pda/errors.hpp"

namespace l1pda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Dense symmetric matrix, the common currency for covariances and
// precisions.  Construction symmetrizes the input as (M + M^T)/2 and
// rejects non-square or non-finite input, so downstream code can rely
// on exact symmetry without re-checking.
class SymMatrix {
 public:
  // Empty placeholder (dimension 0); only assignment is valid on it.
  SymMatrix() = default;
  // p x p zero matrix.
  explicit SymMatrix(int p);
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(int p);
  static SymMatrix diagonal(const Vector& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Matrix& mat() const { return m_; }

  double max_abs() const;  // largest absolute entry
  double frobenius() const;
  double trace() const { return m_.trace(); }

 private:
  Matrix m_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, const SymMatrix& a);

// Eigendecomposition of a symmetric matrix.  values are sorted in
// descending order with the matching eigenvector in each column, so
// m = vectors * values.asDiagonal() * vectors^T.
struct EigDecomp {
  Matrix vectors;
  Vector values;
};

// Throws Error if the eigensolver fails to converge.
EigDecomp sym_eig(const SymMatrix& m);

// Entrywise soft thresholding sign(z) * max(|z| - t, 0), applied to
// every entry including the diagonal.  t must be nonnegative.
SymMatrix soft_threshold(const SymMatrix& m, double t);

// Eigenvalues at or below kRankTolFactor times the largest eigenvalue
// are treated as numerically zero in the definiteness checks below.
inline constexpr double kRankTolFactor = 1e-10;

// Inverse via eigendecomposition; throws SingularMatrixError (carrying
// the offending eigenvalue) unless m is positive definite.
SymMatrix spd_inverse(const SymMatrix& m);

// Sum of log eigenvalues; throws NotPositiveDefiniteError unless m is
// positive definite.
double log_det(const SymMatrix& m);

}  // namespace l1pda

#endif  // L1PDA_MATRIX_HPP
