#include "l1pda/admm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "l1pda/format.hpp"

namespace l1pda {

namespace {

void check_config(const SolveConfig& cfg) {
  if (!(cfg.rho > 0.0) || !(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0) || cfg.max_iter < 1) {
    throw Error("solver configuration values must all be positive");
  }
}

// Positive root of rho * x^2 - d * x - n = 0, the per-eigenvalue
// stationarity condition of the A and B updates.
double positive_root(double d, double n, double rho) {
  return (d + std::sqrt(d * d + 4.0 * rho * n)) / (2.0 * rho);
}

// Maps eigenvalues of `target` through positive_root; the result is
// positive definite for any input.
SymMatrix precision_update(const SymMatrix& target, double n, double rho) {
  EigDecomp eig = sym_eig(target);
  Vector mapped(eig.values.size());
  for (int i = 0; i < mapped.size(); ++i) {
    mapped(i) = positive_root(eig.values(i), n, rho);
  }
  return SymMatrix(eig.vectors * mapped.asDiagonal() * eig.vectors.transpose());
}

// PD test with the shared relative cutoff; returns the smallest
// eigenvalue through the out parameter.
bool is_pd(const SymMatrix& m, const EigDecomp& eig, double* smallest) {
  *smallest = eig.values(eig.values.size() - 1);
  return eig.values(0) > 0.0 && *smallest > kRankTolFactor * eig.values(0);
}

}  // namespace

double objective(const SymMatrix& A, const SymMatrix& B, const ClassStats& stats,
                 double lambda) {
  if (!(lambda >= 0.0)) {
    throw Error("lambda must be nonnegative, got " + detail::fmt(lambda));
  }
  const double n1 = stats.n1, n2 = stats.n2;
  // tr(A S) for symmetric A, S is the entrywise dot product.
  const double trace1 = (A.mat().cwiseProduct(stats.S1.mat())).sum();
  const double trace2 = (B.mat().cwiseProduct(stats.S2.mat())).sum();
  const double penalty = (A.mat() - B.mat()).cwiseAbs().sum();
  return -n1 * log_det(A) + n1 * trace1 - n2 * log_det(B) + n2 * trace2 + lambda * penalty;
}

SymMatrix update_A(const AdmmState& state, const ClassStats& stats) {
  SymMatrix target = state.rho * (state.C + state.B + state.Gamma) -
                     static_cast<double>(stats.n1) * stats.S1;
  return precision_update(target, stats.n1, state.rho);
}

SymMatrix update_B(const AdmmState& state, const ClassStats& stats) {
  SymMatrix target = state.rho * (state.A - state.C - state.Gamma) -
                     static_cast<double>(stats.n2) * stats.S2;
  return precision_update(target, stats.n2, state.rho);
}

SymMatrix update_C(const AdmmState& state, double lambda) {
  if (!(lambda >= 0.0)) {
    throw Error("lambda must be nonnegative, got " + detail::fmt(lambda));
  }
  return soft_threshold(state.A - state.B - state.Gamma, lambda / state.rho);
}

SymMatrix update_dual(const AdmmState& state) {
  return state.Gamma + state.rho * (state.C - state.A + state.B);
}

SolveResult solve(const ClassStats& stats, double lambda, const SolveConfig& cfg,
                  const std::optional<AdmmState>& init) {
  if (!(lambda >= 0.0)) {
    throw Error("lambda must be nonnegative, got " + detail::fmt(lambda));
  }
  check_config(cfg);
  const int p = stats.p();

  // Rank-deficient S_pool leaves the objective unbounded below at
  // every lambda, so reject up front.
  EigDecomp pool_eig = sym_eig(stats.S_pool);
  double smallest = 0.0;
  if (!is_pd(stats.S_pool, pool_eig, &smallest)) {
    throw IllPosedError("pooled covariance is rank-deficient (smallest eigenvalue " +
                        detail::fmt(smallest) +
                        "); the problem is ill-posed for every lambda");
  }
  if (lambda == 0.0) {
    for (const auto* S : {&stats.S1, &stats.S2}) {
      EigDecomp eig = sym_eig(*S);
      if (!is_pd(*S, eig, &smallest)) {
        throw IllPosedError(
            "lambda = 0 requires positive definite class covariances (smallest "
            "eigenvalue " +
            detail::fmt(smallest) + ")");
      }
    }
  }

  AdmmState st;
  if (init.has_value()) {
    if (init->A.dim() != p || init->B.dim() != p || init->C.dim() != p ||
        init->Gamma.dim() != p) {
      throw Error("warm-start state dimension does not match the data");
    }
    if (init->rho != cfg.rho) {
      throw Error("warm-start state was built for rho = " + detail::fmt(init->rho) +
                  ", not " + detail::fmt(cfg.rho));
    }
    st = *init;
  } else {
    SymMatrix pool_inv(pool_eig.vectors * pool_eig.values.cwiseInverse().asDiagonal() *
                       pool_eig.vectors.transpose());
    st = AdmmState{pool_inv, pool_inv, SymMatrix(p), SymMatrix(p), cfg.rho};
  }

  SolveResult out;
  bool converged = false;
  int iterations = 0;
  double primal = 0.0, dual = 0.0;
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    st.A = update_A(st, stats);
    st.B = update_B(st, stats);
    SymMatrix c_prev = st.C;
    st.C = update_C(st, lambda);
    st.Gamma = update_dual(st);

    SymMatrix diff = st.A - st.B;
    primal = (st.C - diff).frobenius();
    dual = cfg.rho * (st.C - c_prev).frobenius();
    const double eps_primal =
        p * cfg.abs_tol + cfg.rel_tol * std::max(st.C.frobenius(), diff.frobenius());
    const double eps_dual = p * cfg.abs_tol + cfg.rel_tol * st.Gamma.frobenius();
    iterations = iter;
    if (primal <= eps_primal && dual <= eps_dual) {
      converged = true;
      break;
    }
  }

  out.A = st.A;
  out.B = st.B;
  out.converged = converged;
  out.iterations = iterations;
  out.primal_residual = primal;
  out.dual_residual = dual;
  out.objective = objective(st.A, st.B, stats, lambda);
  out.state = std::move(st);
  return out;
}

KktReport kkt_report(const SymMatrix& A, const SymMatrix& B, const ClassStats& stats,
                     double lambda, const KktOptions& opt) {
  if (!(lambda >= 0.0)) {
    throw Error("lambda must be nonnegative, got " + detail::fmt(lambda));
  }
  const int p = stats.p();
  if (A.dim() != p || B.dim() != p) {
    throw Error("precision dimensions do not match the statistics");
  }
  SymMatrix sighat1 = spd_inverse(A);
  SymMatrix sighat2 = spd_inverse(B);
  const double n1 = stats.n1, n2 = stats.n2;

  KktReport rep;
  rep.lambda = lambda;
  rep.delta = SymMatrix(0.5 * (A.mat() - B.mat()));
  rep.theta = SymMatrix(0.5 * (A.mat() + B.mat()));

  SymMatrix R(0.5 * (n1 * (stats.S1.mat() - sighat1.mat()) -
                     n2 * (stats.S2.mat() - sighat2.mat())));
  SymMatrix pooled(stats.S_pool.mat() -
                   (n1 * sighat1.mat() + n2 * sighat2.mat()) / (n1 + n2));

  rep.stationarity_inf_norm = R.max_abs();
  rep.stationarity_max_violation = std::max(0.0, rep.stationarity_inf_norm - lambda);
  rep.pooled_residual = pooled.max_abs();

  // Absolute slack covering pure floating-point noise, e.g. the exact
  // QDA solution at lambda = 0 where R should be identically zero.
  const double abs_slack = 1e-8 * (n1 + n2) * stats.S_pool.max_abs();
  const double sign_slack = opt.stationarity_tol * lambda + abs_slack;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      const double d = rep.delta(i, j);
      if (std::abs(d) <= opt.zero_tol) continue;
      ++rep.nnz_delta;
      const double sign = d > 0.0 ? 1.0 : -1.0;
      if (std::abs(R(i, j) + lambda * sign) > sign_slack) {
        ++rep.sign_condition_violations;
      }
    }
  }
  rep.stationarity_ok =
      rep.stationarity_inf_norm <= lambda * (1.0 + opt.stationarity_tol) + abs_slack;
  rep.sign_ok = rep.sign_condition_violations == 0;
  rep.pooled_ok = rep.pooled_residual <= opt.pooled_tol * stats.S_pool.max_abs();
  return rep;
}

}  // namespace l1pda
