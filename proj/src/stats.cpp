#include "l1pda/stats.hpp"

#include <cmath>
#include <string>

#include "l1pda/format.hpp"

namespace l1pda {

void validate_dataset(const LabeledDataset& d) {
  const int n = d.n();
  if (static_cast<int>(d.y.size()) != n) {
    throw InvalidDatasetError("label count " + std::to_string(d.y.size()) +
                              " does not match row count " + std::to_string(n));
  }
  if (n < 2) {
    throw InvalidDatasetError("dataset needs at least 2 rows, got " + std::to_string(n));
  }
  if (d.p() < 1) {
    throw InvalidDatasetError("dataset has no feature columns");
  }
  if (!d.X.allFinite()) {
    throw InvalidDatasetError("dataset contains non-finite feature values");
  }
  int n1 = 0, n2 = 0;
  for (int label : d.y) {
    if (label == 1) {
      ++n1;
    } else if (label == 2) {
      ++n2;
    } else {
      throw InvalidDatasetError("labels must be 1 or 2, got " + std::to_string(label));
    }
  }
  if (n1 == 0 || n2 == 0) {
    throw InvalidDatasetError("both classes must be present (n1=" + std::to_string(n1) +
                              ", n2=" + std::to_string(n2) + ")");
  }
}

LabeledDataset subset_rows(const LabeledDataset& d, const std::vector<int>& rows) {
  LabeledDataset out;
  out.X.resize(static_cast<int>(rows.size()), d.p());
  out.y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<int>(i)) = d.X.row(rows[i]);
    out.y.push_back(d.y[rows[i]]);
  }
  out.label_names = d.label_names;
  out.feature_names = d.feature_names;
  return out;
}

namespace {

struct Moments {
  int n = 0;
  Vector mu;
  SymMatrix S;
};

Moments class_moments(const LabeledDataset& d, int cls) {
  const int p = d.p();
  Moments m;
  for (int label : d.y) m.n += (label == cls);
  Matrix rows(m.n, p);
  int r = 0;
  for (int i = 0; i < d.n(); ++i) {
    if (d.y[i] == cls) rows.row(r++) = d.X.row(i);
  }
  m.mu = rows.colwise().mean();
  Matrix centered = rows.rowwise() - m.mu.transpose();
  m.S = SymMatrix(Matrix(centered.transpose() * centered / static_cast<double>(m.n)));
  return m;
}

ClassStats stats_impl(const LabeledDataset& d) {
  validate_dataset(d);
  Moments m1 = class_moments(d, 1);
  Moments m2 = class_moments(d, 2);
  ClassStats s = ClassStats::from_moments(m1.n, m2.n, m1.mu, m2.mu, m1.S, m2.S);
  s.label_names = d.label_names;
  return s;
}

}  // namespace

ClassStats ClassStats::from_moments(int n1, int n2, const Vector& mu1, const Vector& mu2,
                                    const SymMatrix& S1, const SymMatrix& S2) {
  if (n1 < 1 || n2 < 1) {
    throw InvalidDatasetError("class counts must be positive (n1=" + std::to_string(n1) +
                              ", n2=" + std::to_string(n2) + ")");
  }
  const int p = static_cast<int>(mu1.size());
  if (mu2.size() != p || S1.dim() != p || S2.dim() != p) {
    throw InvalidDatasetError("moment dimensions disagree");
  }
  ClassStats s;
  s.n1 = n1;
  s.n2 = n2;
  s.mu1 = mu1;
  s.mu2 = mu2;
  s.S1 = S1;
  s.S2 = S2;
  const double n = n1 + n2;
  s.S_pool = SymMatrix((n1 * S1.mat() + n2 * S2.mat()) / n);
  s.priors = {n1 / n, n2 / n};
  return s;
}

ClassStats compute_stats(const LabeledDataset& d) { return stats_impl(d); }

ClassStats compute_stats(const LabeledDataset& d, const std::array<double, 2>& priors) {
  for (double prior : priors) {
    if (!(prior > 0.0) || !std::isfinite(prior)) {
      throw InvalidDatasetError("priors must be positive and finite, got (" +
                                detail::fmt(priors[0]) + ", " + detail::fmt(priors[1]) + ")");
    }
  }
  ClassStats s = stats_impl(d);
  const double total = priors[0] + priors[1];
  s.priors = {priors[0] / total, priors[1] / total};
  return s;
}

}  // namespace l1pda
