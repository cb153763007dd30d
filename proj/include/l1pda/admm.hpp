#ifndef L1PDA_ADMM_HPP
#define L1PDA_ADMM_HPP

#include <optional>

#include "l1pda/stats.hpp"

namespace l1pda {

// Iterate of the splitting algorithm: precision estimates A (class 1)
// and B (class 2), the auxiliary variable C standing in for A - B, and
// the scaled dual matrix Gamma for the constraint C = A - B.
struct AdmmState {
  SymMatrix A, B, C, Gamma;
  double rho = 1.0;
};

struct SolveConfig {
  double rho = 1.0;
  int max_iter = 10000;
  double abs_tol = 1e-7;
  double rel_tol = 1e-5;
};

struct SolveResult {
  SymMatrix A, B;
  bool converged = false;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  AdmmState state;  // final iterate, reusable as a warm start
};

// Penalized negative log-likelihood
//   -n1 logdet A + n1 tr(A S1) - n2 logdet B + n2 tr(B S2) + lambda ||A - B||_1
// where ||.||_1 sums the absolute values of all entries.  A and B must
// be positive definite.
double objective(const SymMatrix& A, const SymMatrix& B, const ClassStats& stats,
                 double lambda);

// One block update each.  update_A reads C, B, Gamma from the state;
// update_B expects state.A to hold the freshly updated A; update_C
// expects both A and B fresh; update_dual expects A, B, C fresh.
SymMatrix update_A(const AdmmState& state, const ClassStats& stats);
SymMatrix update_B(const AdmmState& state, const ClassStats& stats);
SymMatrix update_C(const AdmmState& state, double lambda);
SymMatrix update_dual(const AdmmState& state);

// Minimizes the objective at one lambda.  A cold start (no init)
// begins from A = B = S_pool^{-1}, C = 0, Gamma = 0, which is already
// the solution when lambda >= lambda_max.  Stops when both
//   ||C - A + B||_F        <= p * abs_tol + rel_tol * max(||C||_F, ||A - B||_F)
//   rho * ||C_k - C_k-1||_F <= p * abs_tol + rel_tol * ||Gamma||_F
// hold, or after max_iter iterations; running out of iterations is
// reported through SolveResult::converged, never thrown.  Throws
// IllPosedError if S_pool is rank-deficient (no lambda helps then), or
// if lambda == 0 and a class covariance is singular.
SolveResult solve(const ClassStats& stats, double lambda, const SolveConfig& cfg = {},
                  const std::optional<AdmmState>& init = std::nullopt);

struct KktOptions {
  // |delta_ij| above this counts as support.  The default is sized for
  // solutions solved at the default tolerances, which leave true zeros
  // of magnitude up to ~1e-4; entries below it merely skip the sign
  // check, so erring large is the safe direction.
  double zero_tol = 1e-3;
  double stationarity_tol = 1e-4; // slack on the lambda bound and the sign match
  double pooled_tol = 1e-5;       // pooled residual relative to ||S_pool||_max
};

// Optimality diagnostics for a candidate pair (A, B).  Writing
// Sighat_k for the estimated covariances A^{-1}, B^{-1}, the
// stationarity conditions of the objective are
//   n1 (S1 - Sighat_1) = -lambda G,   n2 (S2 - Sighat_2) = +lambda G
// with G a subgradient of ||A - B||_1, so the residual
//   R = (n1 (S1 - Sighat_1) - n2 (S2 - Sighat_2)) / 2
// satisfies ||R||_inf <= lambda with R_ij = -lambda sign(A - B)_ij on
// entries where A - B is nonzero, and the two conditions sum to the
// pooled identity S_pool = (n1 Sighat_1 + n2 Sighat_2) / (n1 + n2).
struct KktReport {
  SymMatrix delta;                       // (A - B) / 2
  SymMatrix theta;                       // (A + B) / 2
  int nnz_delta = 0;                     // entries of delta above zero_tol
  double lambda = 0.0;
  double stationarity_inf_norm = 0.0;    // ||R||_inf
  double stationarity_max_violation = 0.0;  // max(0, ||R||_inf - lambda)
  int sign_condition_violations = 0;
  double pooled_residual = 0.0;          // max-abs of the pooled identity gap
  bool stationarity_ok = false;
  bool sign_ok = false;
  bool pooled_ok = false;

  bool ok() const { return stationarity_ok && sign_ok && pooled_ok; }
};

// Throws SingularMatrixError if A or B cannot be inverted.
KktReport kkt_report(const SymMatrix& A, const SymMatrix& B, const ClassStats& stats,
                     double lambda, const KktOptions& opt = {});

}  // namespace l1pda

#endif  // L1PDA_ADMM_HPP
