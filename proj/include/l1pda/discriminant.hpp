#ifndef L1PDA_DISCRIMINANT_HPP
#define L1PDA_DISCRIMINANT_HPP

#include <array>
#include <optional>
#include <string>

#include "l1pda/admm.hpp"

namespace l1pda {

// A fitted two-class Gaussian classifier: priors, class means, and a
// positive definite precision matrix per class with cached
// log-determinants.  lambda records the penalty that produced the
// precisions: the solver's lambda for l1pda, 0 for qda, +infinity for
// lda; rda stores its mixing weight in alpha instead.
struct PdaModel {
  std::string method;  // "lda", "qda", "rda" or "l1pda"
  std::array<double, 2> priors{{0.5, 0.5}};
  Vector mu1, mu2;
  SymMatrix P1, P2;
  double logdet_P1 = 0.0;
  double logdet_P2 = 0.0;
  double lambda = 0.0;
  std::optional<double> alpha;
  std::array<std::string, 2> label_names{{"1", "2"}};

  int p() const { return static_cast<int>(mu1.size()); }
};

// Log posterior odds of class 2:
//   D(x) = log(pi2/pi1) + (q1 - q2)/2 + (logdet P2 - logdet P1)/2
// with q_k = (x - mu_k)^T P_k (x - mu_k).  Positive D favors class 2.
double discriminant_score(const PdaModel& m, const Vector& x);

// Class 2 iff D(x) > 0; ties (D == 0) go to class 1.
int predict(const PdaModel& m, const Vector& x);

// P(y = 1 | x) = 1 / (1 + exp(D(x))), evaluated overflow-safely.
double predict_proba(const PdaModel& m, const Vector& x);

// Coefficients of the equivalent logistic model
//   logit P(y=1|x) = beta0 + beta^T x + x^T interaction_matrix x / 4
// which reproduces -D(x) exactly.  interaction_matrix = 2 (P2 - P1),
// so zero entries of the precision difference map to zero interactions.
struct ForwardModel {
  double beta0 = 0.0;
  Vector beta;
  SymMatrix interaction_matrix;
};

ForwardModel forward_coefficients(const PdaModel& m);
double reconstruct_logit(const ForwardModel& f, const Vector& x);

// P1 = P2 = S_pool^{-1}.  Throws IllPosedError on singular S_pool.
PdaModel fit_lda(const ClassStats& stats);

// P_k = S_k^{-1}.  Throws IllPosedError if either S_k is singular.
PdaModel fit_qda(const ClassStats& stats);

// Covariance mixing Sighat_k = alpha S_k + (1 - alpha) S_pool,
// P_k = Sighat_k^{-1}; alpha = 0 reproduces LDA, alpha = 1 QDA.
// Throws SingularMatrixError if a combination is singular.
PdaModel fit_rda(const ClassStats& stats, double alpha);

// Wraps a finished solve into a model (used for path fits).
PdaModel model_from_solve(const ClassStats& stats, double lambda, const SolveResult& result);

// Runs admm::solve and wraps the estimate.  When diagnostics is given,
// the full SolveResult is copied there (convergence flag, residuals,
// final state for warm starts).
PdaModel fit_l1pda(const ClassStats& stats, double lambda, const SolveConfig& cfg = {},
                   const std::optional<AdmmState>& init = std::nullopt,
                   SolveResult* diagnostics = nullptr);

}  // namespace l1pda

#endif  // L1PDA_DISCRIMINANT_HPP
