#ifndef L1PDA_EVAL_HPP
#define L1PDA_EVAL_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "l1pda/discriminant.hpp"
#include "l1pda/path.hpp"

namespace l1pda {

// Fraction of rows where predict matches the true label.
double accuracy(const PdaModel& m, const LabeledDataset& test);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Points swept over descending unique score thresholds (class 2 is the
// positive class, D > t predicts 2; tied scores move together), with
// (0,0) and (1,1) as endpoints and auc the trapezoidal integral.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// scored pairs are (discriminant score, true label in {1,2}).  Throws
// RocError unless both classes are present.
RocCurve roc(const std::vector<std::pair<double, int>>& scored);

// Scores a whole dataset with a model, in row order.
std::vector<std::pair<double, int>> score_dataset(const PdaModel& m,
                                                  const LabeledDataset& data);

// Seeded stratified fold assignment (one fold id per row): each class's
// rows are shuffled, then all rows are dealt round-robin so every fold
// receives an even share of each class.  Requires 2 <= folds <= n.
std::vector<int> stratified_folds(const std::vector<int>& y, int folds, std::uint64_t seed);

struct CvReport {
  std::string method;       // "l1pda", "rda", "lda" or "qda"
  std::vector<double> grid; // lambda (descending) or alpha (ascending)
  std::vector<double> mean_accuracy;
  std::vector<double> std_error;
  // Per grid point: number of folds whose solve did not converge
  // (always 0 for the closed-form baselines).
  std::vector<int> unconverged_folds;
  int best_index = 0;
  std::string selection_rule;
  int folds = 0;
  std::uint64_t seed = 0;
};

// Stratified K-fold tuning of the l1pda path: each fold fits the full
// warm-started path on its training part (the grid is shared across
// folds) and scores the held-out part.  best_index maximizes the mean
// accuracy; ties go to the larger lambda (more regularized).  Throws
// StratificationError if any fold's training part loses a class.
CvReport cross_validate(const LabeledDataset& data, const LambdaGrid& grid, int folds,
                        std::uint64_t seed, const SolveConfig& cfg = {});

// Same protocol over an RDA alpha grid (given ascending); ties go to
// the smaller alpha (more pooled).
CvReport cross_validate_rda(const LabeledDataset& data, const std::vector<double>& alphas,
                            int folds, std::uint64_t seed);

// Degenerate single-point report for the untuned baselines
// (method "lda" or "qda").
CvReport cross_validate_fixed(const LabeledDataset& data, const std::string& method,
                              int folds, std::uint64_t seed);

}  // namespace l1pda

#endif  // L1PDA_EVAL_HPP
