#include "l1pda/discriminant.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace l1pda {

namespace {

void check_dims(const PdaModel& m, const Vector& x) {
  if (x.size() != m.p()) {
    throw Error("query vector has dimension " + std::to_string(x.size()) +
                ", model expects " + std::to_string(m.p()));
  }
}

PdaModel base_model(const ClassStats& stats) {
  PdaModel m;
  m.priors = stats.priors;
  m.mu1 = stats.mu1;
  m.mu2 = stats.mu2;
  m.label_names = stats.label_names;
  return m;
}

}  // namespace

double discriminant_score(const PdaModel& m, const Vector& x) {
  check_dims(m, x);
  const Vector d1 = x - m.mu1;
  const Vector d2 = x - m.mu2;
  const double q1 = d1.dot(m.P1.mat() * d1);
  const double q2 = d2.dot(m.P2.mat() * d2);
  return std::log(m.priors[1] / m.priors[0]) + 0.5 * (q1 - q2) +
         0.5 * (m.logdet_P2 - m.logdet_P1);
}

int predict(const PdaModel& m, const Vector& x) {
  return discriminant_score(m, x) > 0.0 ? 2 : 1;
}

double predict_proba(const PdaModel& m, const Vector& x) {
  const double d = discriminant_score(m, x);
  if (d >= 0.0) {
    const double e = std::exp(-d);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(d));
}

ForwardModel forward_coefficients(const PdaModel& m) {
  ForwardModel f;
  f.beta0 = std::log(m.priors[0] / m.priors[1]) + 0.5 * m.mu2.dot(m.P2.mat() * m.mu2) -
            0.5 * m.mu1.dot(m.P1.mat() * m.mu1) + 0.5 * (m.logdet_P1 - m.logdet_P2);
  f.beta = m.P1.mat() * m.mu1 - m.P2.mat() * m.mu2;
  f.interaction_matrix = 2.0 * (m.P2 - m.P1);
  return f;
}

double reconstruct_logit(const ForwardModel& f, const Vector& x) {
  if (x.size() != f.beta.size()) {
    throw Error("query vector has dimension " + std::to_string(x.size()) +
                ", forward model expects " + std::to_string(f.beta.size()));
  }
  return f.beta0 + f.beta.dot(x) + 0.25 * x.dot(f.interaction_matrix.mat() * x);
}

PdaModel fit_lda(const ClassStats& stats) {
  PdaModel m = base_model(stats);
  m.method = "lda";
  try {
    m.P1 = spd_inverse(stats.S_pool);
  } catch (const SingularMatrixError& e) {
    throw IllPosedError(std::string("pooled covariance is singular; LDA undefined: ") +
                        e.what());
  }
  m.P2 = m.P1;
  m.logdet_P1 = log_det(m.P1);
  m.logdet_P2 = m.logdet_P1;
  m.lambda = std::numeric_limits<double>::infinity();
  return m;
}

PdaModel fit_qda(const ClassStats& stats) {
  PdaModel m = base_model(stats);
  m.method = "qda";
  try {
    m.P1 = spd_inverse(stats.S1);
    m.P2 = spd_inverse(stats.S2);
  } catch (const SingularMatrixError& e) {
    throw IllPosedError(std::string("a class covariance is singular; QDA undefined: ") +
                        e.what());
  }
  m.logdet_P1 = log_det(m.P1);
  m.logdet_P2 = log_det(m.P2);
  m.lambda = 0.0;
  return m;
}

PdaModel fit_rda(const ClassStats& stats, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error("rda mixing weight must lie in [0, 1], got " + std::to_string(alpha));
  }
  PdaModel m = base_model(stats);
  m.method = "rda";
  SymMatrix mix1(alpha * stats.S1.mat() + (1.0 - alpha) * stats.S_pool.mat());
  SymMatrix mix2(alpha * stats.S2.mat() + (1.0 - alpha) * stats.S_pool.mat());
  m.P1 = spd_inverse(mix1);
  m.P2 = spd_inverse(mix2);
  m.logdet_P1 = log_det(m.P1);
  m.logdet_P2 = log_det(m.P2);
  m.alpha = alpha;
  return m;
}

PdaModel model_from_solve(const ClassStats& stats, double lambda, const SolveResult& result) {
  PdaModel m = base_model(stats);
  m.method = "l1pda";
  m.P1 = result.A;
  m.P2 = result.B;
  m.logdet_P1 = log_det(m.P1);
  m.logdet_P2 = log_det(m.P2);
  m.lambda = lambda;
  return m;
}

PdaModel fit_l1pda(const ClassStats& stats, double lambda, const SolveConfig& cfg,
                   const std::optional<AdmmState>& init, SolveResult* diagnostics) {
  SolveResult result = solve(stats, lambda, cfg, init);
  PdaModel m = model_from_solve(stats, lambda, result);
  if (diagnostics != nullptr) {
    *diagnostics = std::move(result);
  }
  return m;
}

}  // namespace l1pda
