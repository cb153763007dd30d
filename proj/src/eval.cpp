#include "l1pda/eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>

namespace l1pda {

double accuracy(const PdaModel& m, const LabeledDataset& test) {
  validate_dataset(test);
  if (test.p() != m.p()) {
    throw Error("test data has " + std::to_string(test.p()) + " features, model expects " +
                std::to_string(m.p()));
  }
  int correct = 0;
  for (int i = 0; i < test.n(); ++i) {
    correct += (predict(m, test.X.row(i).transpose()) == test.y[i]);
  }
  return static_cast<double>(correct) / test.n();
}

std::vector<std::pair<double, int>> score_dataset(const PdaModel& m,
                                                  const LabeledDataset& data) {
  std::vector<std::pair<double, int>> scored;
  scored.reserve(data.n());
  for (int i = 0; i < data.n(); ++i) {
    scored.emplace_back(discriminant_score(m, data.X.row(i).transpose()), data.y[i]);
  }
  return scored;
}

RocCurve roc(const std::vector<std::pair<double, int>>& scored) {
  int positives = 0, negatives = 0;  // class 2 is positive
  for (const auto& [score, label] : scored) {
    if (label == 2) {
      ++positives;
    } else if (label == 1) {
      ++negatives;
    } else {
      throw Error("labels must be 1 or 2, got " + std::to_string(label));
    }
  }
  if (positives == 0 || negatives == 0) {
    throw RocError("ROC undefined: scores contain only one class");
  }

  std::vector<std::pair<double, int>> sorted = scored;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  int tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    // Tied scores cross the threshold together.
    const double score = sorted[i].first;
    while (i < sorted.size() && sorted[i].first == score) {
      (sorted[i].second == 2 ? tp : fp)++;
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / negatives,
                            static_cast<double>(tp) / positives});
  }
  double auc = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    auc += (curve.points[k].fpr - curve.points[k - 1].fpr) *
           (curve.points[k].tpr + curve.points[k - 1].tpr) / 2.0;
  }
  curve.auc = auc;
  return curve;
}

std::vector<int> stratified_folds(const std::vector<int>& y, int folds, std::uint64_t seed) {
  const int n = static_cast<int>(y.size());
  if (folds < 2 || folds > n) {
    throw Error("fold count must lie in [2, n]; got " + std::to_string(folds) + " for n = " +
                std::to_string(n));
  }
  std::vector<int> class1, class2;
  for (int i = 0; i < n; ++i) (y[i] == 1 ? class1 : class2).push_back(i);

  std::mt19937_64 engine(seed);
  std::shuffle(class1.begin(), class1.end(), engine);
  std::shuffle(class2.begin(), class2.end(), engine);

  // Deal round-robin with one running counter across both classes so
  // every fold is nonempty whenever folds <= n.
  std::vector<int> fold_of(n, 0);
  int next = 0;
  for (int row : class1) fold_of[row] = next++ % folds;
  for (int row : class2) fold_of[row] = next++ % folds;
  return fold_of;
}

namespace {

// Shared CV loop: `evaluate` maps a training dataset to per-grid-point
// (accuracy on the held-out part, converged flag).
struct FoldOutcome {
  std::vector<double> accuracy;
  std::vector<bool> converged;
};

CvReport run_cv(const LabeledDataset& data, int folds, std::uint64_t seed,
                std::size_t n_points,
                const std::function<FoldOutcome(const LabeledDataset& train,
                                                const LabeledDataset& held_out)>& evaluate) {
  validate_dataset(data);
  std::vector<int> fold_of = stratified_folds(data.y, folds, seed);

  CvReport report;
  report.folds = folds;
  report.seed = seed;
  report.selection_rule = "max mean accuracy; ties -> more regularized";
  report.mean_accuracy.assign(n_points, 0.0);
  report.std_error.assign(n_points, 0.0);
  report.unconverged_folds.assign(n_points, 0);

  std::vector<std::vector<double>> acc(n_points);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_rows, test_rows;
    for (int i = 0; i < data.n(); ++i) {
      (fold_of[i] == f ? test_rows : train_rows).push_back(i);
    }
    LabeledDataset train = subset_rows(data, train_rows);
    bool has1 = false, has2 = false;
    for (int label : train.y) (label == 1 ? has1 : has2) = true;
    if (!has1 || !has2) {
      throw StratificationError("fold " + std::to_string(f) +
                                " leaves a single-class training set");
    }
    LabeledDataset held_out = subset_rows(data, test_rows);
    FoldOutcome outcome = evaluate(train, held_out);
    for (std::size_t k = 0; k < n_points; ++k) {
      acc[k].push_back(outcome.accuracy[k]);
      if (!outcome.converged[k]) ++report.unconverged_folds[k];
    }
  }

  for (std::size_t k = 0; k < n_points; ++k) {
    double mean = 0.0;
    for (double a : acc[k]) mean += a;
    mean /= folds;
    double var = 0.0;
    for (double a : acc[k]) var += (a - mean) * (a - mean);
    var /= (folds - 1);
    report.mean_accuracy[k] = mean;
    report.std_error[k] = std::sqrt(var / folds);
  }

  // First strict maximum; the grid is ordered most-regularized-first,
  // so ties resolve toward more regularization.
  int best = 0;
  for (std::size_t k = 1; k < n_points; ++k) {
    if (report.mean_accuracy[k] > report.mean_accuracy[best]) best = static_cast<int>(k);
  }
  report.best_index = best;
  return report;
}

}  // namespace

CvReport cross_validate(const LabeledDataset& data, const LambdaGrid& grid, int folds,
                        std::uint64_t seed, const SolveConfig& cfg) {
  if (grid.values.empty()) {
    throw Error("cannot cross-validate an empty lambda grid");
  }
  CvReport report = run_cv(
      data, folds, seed, grid.values.size(),
      [&](const LabeledDataset& train, const LabeledDataset& held_out) {
        ClassStats stats = compute_stats(train);
        PathFit fit = solve_path(stats, grid, cfg);
        FoldOutcome out;
        for (std::size_t k = 0; k < grid.values.size(); ++k) {
          PdaModel m = model_from_solve(stats, grid.values[k], fit.results[k]);
          out.accuracy.push_back(accuracy(m, held_out));
          out.converged.push_back(fit.results[k].converged);
        }
        return out;
      });
  report.method = "l1pda";
  report.grid = grid.values;
  return report;
}

CvReport cross_validate_rda(const LabeledDataset& data, const std::vector<double>& alphas,
                            int folds, std::uint64_t seed) {
  if (alphas.empty()) {
    throw Error("cannot cross-validate an empty alpha grid");
  }
  CvReport report = run_cv(
      data, folds, seed, alphas.size(),
      [&](const LabeledDataset& train, const LabeledDataset& held_out) {
        ClassStats stats = compute_stats(train);
        FoldOutcome out;
        for (double alpha : alphas) {
          out.accuracy.push_back(accuracy(fit_rda(stats, alpha), held_out));
          out.converged.push_back(true);
        }
        return out;
      });
  report.method = "rda";
  report.grid = alphas;
  return report;
}

CvReport cross_validate_fixed(const LabeledDataset& data, const std::string& method,
                              int folds, std::uint64_t seed) {
  if (method != "lda" && method != "qda") {
    throw Error("fixed-model cross-validation supports lda or qda, got '" + method + "'");
  }
  CvReport report = run_cv(
      data, folds, seed, 1,
      [&](const LabeledDataset& train, const LabeledDataset& held_out) {
        ClassStats stats = compute_stats(train);
        PdaModel m = (method == "lda") ? fit_lda(stats) : fit_qda(stats);
        return FoldOutcome{{accuracy(m, held_out)}, {true}};
      });
  report.method = method;
  report.grid = {method == "lda" ? std::numeric_limits<double>::infinity() : 0.0};
  return report;
}

}  // namespace l1pda
