#ifndef L1PDA_STATS_HPP
#define L1PDA_STATS_HPP

#include <array>
#include <string>
#include <vector>

#include "l1pda/matrix.hpp"

namespace l1pda {

// Feature rows X with class labels y[i] in {1, 2}.  label_names keeps
// the original label strings (label_names[0] is the string mapped to
// class 1).  feature_names may be empty for synthetic data; writers
// fall back to x1..xp.
struct LabeledDataset {
  Matrix X;
  std::vector<int> y;
  std::array<std::string, 2> label_names{{"1", "2"}};
  std::vector<std::string> feature_names;

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }
};

// Throws InvalidDatasetError unless d has n >= 2 finite rows, labels
// only in {1, 2}, and both classes present.
void validate_dataset(const LabeledDataset& d);

// New dataset keeping only the given row indices, in the given order.
LabeledDataset subset_rows(const LabeledDataset& d, const std::vector<int>& rows);

// Per-class sample moments.  Covariances use the maximum-likelihood
// denominator (divide by the class count, not count - 1) and S_pool is
// their count-weighted average:
//   (n1 + n2) * S_pool == n1 * S1 + n2 * S2.
struct ClassStats {
  int n1 = 0;
  int n2 = 0;
  Vector mu1, mu2;
  SymMatrix S1, S2, S_pool;
  std::array<double, 2> priors{{0.5, 0.5}};
  std::array<std::string, 2> label_names{{"1", "2"}};

  int p() const { return static_cast<int>(mu1.size()); }
  int n() const { return n1 + n2; }

  // Builds stats directly from moments, deriving S_pool and empirical
  // priors.  For callers (and tests) that do not start from row data.
  static ClassStats from_moments(int n1, int n2, const Vector& mu1, const Vector& mu2,
                                 const SymMatrix& S1, const SymMatrix& S2);
};

// Empirical priors n_k / n.
ClassStats compute_stats(const LabeledDataset& d);

// Caller-supplied priors; both must be positive and finite, and are
// renormalized to sum to one.
ClassStats compute_stats(const LabeledDataset& d, const std::array<double, 2>& priors);

}  // namespace l1pda

#endif  // L1PDA_STATS_HPP
