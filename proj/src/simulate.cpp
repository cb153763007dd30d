#include "l1pda/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "l1pda/format.hpp"

namespace l1pda {

namespace {

constexpr int kBlock = 5;       // size of the correlated block in Sigma2
constexpr int kMeanCoords = 10; // leading coordinates carrying the mean shift

void check_design(const SimDesign& d) {
  if (d.p < kMeanCoords) {
    throw Error("design needs p >= 10 (the mean shift occupies 10 coordinates), got " +
                std::to_string(d.p));
  }
  if (d.n_per_class < 1) {
    throw Error("design needs at least one row per class");
  }
  if (!(d.c > -0.25 && d.c < 1.0)) {
    throw Error("block constant c must lie in (-0.25, 1) to keep Sigma2 PD, got " +
                detail::fmt(d.c));
  }
}

std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One substream per (replication, dataset) pair, fixed before any
// replication runs so concurrent execution stays order-independent.
std::uint64_t substream_seed(std::uint64_t master, int rep, int which) {
  return splitmix64(master + 0x9e3779b97f4a7c15ULL *
                                 (3 * static_cast<std::uint64_t>(rep) + which + 1));
}

constexpr const char* kSeedRule =
    "seed(rep, k) = splitmix64(master + 0x9e3779b97f4a7c15 * (3*rep + k + 1)), "
    "k = 0 train, 1 tune, 2 test";

}  // namespace

SymMatrix population_sigma2(const SimDesign& design) {
  check_design(design);
  Matrix sigma = Matrix::Identity(design.p, design.p);
  sigma.topLeftCorner(kBlock, kBlock).setConstant(design.c);
  for (int i = 0; i < kBlock; ++i) sigma(i, i) = 1.0;
  return SymMatrix(sigma);
}

Matrix population_sigma2_factor(const SimDesign& design) {
  Eigen::LLT<Matrix> llt(population_sigma2(design).mat());
  if (llt.info() != Eigen::Success) {
    throw Error("covariance factorization failed for c = " + detail::fmt(design.c));
  }
  return llt.matrixL();
}

LabeledDataset generate(const SimDesign& design) {
  check_design(design);
  const int p = design.p;
  const int n_k = design.n_per_class;
  const Matrix chol = population_sigma2_factor(design);
  Vector mu2 = Vector::Zero(p);
  mu2.head(kMeanCoords).setOnes();

  std::mt19937_64 engine(design.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Vector& z) {
    for (int j = 0; j < p; ++j) z(j) = normal(engine);
  };

  LabeledDataset d;
  d.X.resize(2 * n_k, p);
  d.y.assign(2 * n_k, 1);
  Vector z(p);
  for (int i = 0; i < n_k; ++i) {
    draw(z);
    d.X.row(i) = z.transpose();
  }
  for (int i = 0; i < n_k; ++i) {
    draw(z);
    d.X.row(n_k + i) = (mu2 + chol * z).transpose();
    d.y[n_k + i] = 2;
  }
  d.feature_names.reserve(p);
  for (int j = 1; j <= p; ++j) d.feature_names.push_back("x" + std::to_string(j));
  return d;
}

namespace {

struct RepOutcome {
  // Method order: l1pda, lda, qda, rda.
  std::array<double, 4> accuracy{};
  std::array<double, 4> auc{};
  int l1pda_best = -1;
  int rda_best = -1;
};

// Index of the first maximum; grids are ordered most-regularized-first
// so ties resolve toward more regularization.
int argmax_first(const std::vector<double>& v) {
  int best = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] > v[best]) best = static_cast<int>(k);
  }
  return best;
}

RepOutcome run_rep(const SimDesign& design, int rep, const ExperimentConfig& cfg) {
  SimDesign d = design;
  d.seed = substream_seed(design.seed, rep, 0);
  LabeledDataset train = generate(d);
  d.seed = substream_seed(design.seed, rep, 1);
  LabeledDataset tune = generate(d);
  d.seed = substream_seed(design.seed, rep, 2);
  LabeledDataset test = generate(d);

  ClassStats stats = compute_stats(train);

  RepOutcome out;
  std::array<PdaModel, 4> models;

  // l1pda: path on train, lambda picked by tuning accuracy.
  const double lmax = lambda_max(stats);
  if (lmax > 0.0) {
    LambdaGrid grid = make_grid(lmax, cfg.n_lambda, cfg.epsilon);
    PathFit fit = solve_path(stats, grid, cfg.solve);
    std::vector<double> tune_acc;
    std::vector<PdaModel> path_models;
    path_models.reserve(fit.results.size());
    for (std::size_t k = 0; k < fit.results.size(); ++k) {
      path_models.push_back(model_from_solve(stats, grid.values[k], fit.results[k]));
      tune_acc.push_back(accuracy(path_models.back(), tune));
    }
    out.l1pda_best = argmax_first(tune_acc);
    models[0] = path_models[out.l1pda_best];
  } else {
    // Identical class covariances: no path; the LDA fit is the solution.
    models[0] = fit_lda(stats);
  }

  models[1] = fit_lda(stats);
  models[2] = fit_qda(stats);

  // rda: alphas ascending from 0 (pooled) to 1 (per-class).
  {
    std::vector<double> tune_acc;
    std::vector<PdaModel> rda_models;
    for (int j = 0; j < cfg.n_alpha; ++j) {
      const double alpha =
          cfg.n_alpha == 1 ? 0.0 : static_cast<double>(j) / (cfg.n_alpha - 1);
      rda_models.push_back(fit_rda(stats, alpha));
      tune_acc.push_back(accuracy(rda_models.back(), tune));
    }
    out.rda_best = argmax_first(tune_acc);
    models[3] = rda_models[out.rda_best];
  }

  for (int m = 0; m < 4; ++m) {
    out.accuracy[m] = accuracy(models[m], test);
    out.auc[m] = roc(score_dataset(models[m], test)).auc;
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const SimDesign& design, int reps,
                                const ExperimentConfig& cfg) {
  check_design(design);
  if (reps < 1) {
    throw Error("experiment needs at least one replication");
  }

  std::vector<RepOutcome> outcomes(reps);
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int n_threads = std::max(1, std::min({hw == 0 ? 1 : hw, reps, 16}));
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int t = 0; t < n_threads; ++t) {
    workers.emplace_back([&, t]() {
      try {
        for (int rep = t; rep < reps; rep += n_threads) {
          outcomes[rep] = run_rep(design, rep, cfg);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);

  ExperimentReport report;
  report.design = design;
  report.reps = reps;
  report.seed_rule = kSeedRule;
  const std::array<const char*, 4> names{"l1pda", "lda", "qda", "rda"};
  for (int m = 0; m < 4; ++m) {
    double mean_acc = 0.0, mean_auc = 0.0;
    for (const RepOutcome& o : outcomes) {
      mean_acc += o.accuracy[m];
      mean_auc += o.auc[m];
    }
    mean_acc /= reps;
    mean_auc /= reps;
    double var_acc = 0.0, var_auc = 0.0;
    for (const RepOutcome& o : outcomes) {
      var_acc += (o.accuracy[m] - mean_acc) * (o.accuracy[m] - mean_acc);
      var_auc += (o.auc[m] - mean_auc) * (o.auc[m] - mean_auc);
    }
    if (reps > 1) {
      var_acc /= (reps - 1);
      var_auc /= (reps - 1);
    }
    MethodSummary s;
    s.method = names[m];
    s.mean_accuracy = mean_acc;
    s.se_accuracy = std::sqrt(var_acc / reps);
    s.mean_auc = mean_auc;
    s.se_auc = std::sqrt(var_auc / reps);
    report.methods.push_back(s);
  }
  for (const RepOutcome& o : outcomes) {
    report.l1pda_best_index.push_back(o.l1pda_best);
    report.rda_best_index.push_back(o.rda_best);
  }
  return report;
}

}  // namespace l1pda
