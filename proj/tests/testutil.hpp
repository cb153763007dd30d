#ifndef L1PDA_TESTS_TESTUTIL_HPP
#define L1PDA_TESTS_TESTUTIL_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "l1pda/discriminant.hpp"
#include "l1pda/stats.hpp"

namespace testutil {

inline double max_abs_diff(const l1pda::Matrix& a, const l1pda::Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const l1pda::SymMatrix& a, const l1pda::SymMatrix& b) {
  return max_abs_diff(a.mat(), b.mat());
}

inline l1pda::Vector random_vector(std::mt19937_64& rng, int p, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  l1pda::Vector v(p);
  for (int i = 0; i < p; ++i) v(i) = normal(rng);
  return v;
}

// Random symmetric positive definite matrix with eigenvalues log-uniform
// in [1/sqrt(cond), sqrt(cond)] and a Haar-ish random eigenbasis.
inline l1pda::SymMatrix random_spd(std::mt19937_64& rng, int p, double cond = 100.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  l1pda::Matrix g(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<l1pda::Matrix> qr(g);
  l1pda::Matrix q = qr.householderQ();

  std::uniform_real_distribution<double> unif(-0.5 * std::log(cond), 0.5 * std::log(cond));
  l1pda::Vector values(p);
  for (int i = 0; i < p; ++i) values(i) = std::exp(unif(rng));
  return l1pda::SymMatrix(q * values.asDiagonal() * q.transpose());
}

// Rows of N(mu, sigma) via the (lower) Cholesky factor of sigma.
inline l1pda::Matrix gaussian_rows(std::mt19937_64& rng, int n, const l1pda::Vector& mu,
                                   const l1pda::SymMatrix& sigma) {
  const int p = static_cast<int>(mu.size());
  Eigen::LLT<l1pda::Matrix> llt(sigma.mat());
  l1pda::Matrix chol = llt.matrixL();
  l1pda::Matrix rows(n, p);
  for (int i = 0; i < n; ++i) {
    rows.row(i) = (mu + chol * random_vector(rng, p)).transpose();
  }
  return rows;
}

// Two-class Gaussian sample with random means and random SPD covariances.
inline l1pda::LabeledDataset random_dataset(std::mt19937_64& rng, int p, int n1, int n2,
                                            double cond = 16.0) {
  l1pda::LabeledDataset d;
  d.X.resize(n1 + n2, p);
  d.X.topRows(n1) = gaussian_rows(rng, n1, random_vector(rng, p), random_spd(rng, p, cond));
  d.X.bottomRows(n2) =
      gaussian_rows(rng, n2, random_vector(rng, p), random_spd(rng, p, cond));
  d.y.assign(n1, 1);
  d.y.insert(d.y.end(), n2, 2);
  return d;
}

// Well-posed moment statistics (PD class covariances, hence PD pool).
inline l1pda::ClassStats random_stats(std::mt19937_64& rng, int p, int n1, int n2,
                                      double cond = 16.0) {
  return l1pda::ClassStats::from_moments(n1, n2, random_vector(rng, p),
                                         random_vector(rng, p), random_spd(rng, p, cond),
                                         random_spd(rng, p, cond));
}

// Random fitted classifier, valid for scoring and serialization.
inline l1pda::PdaModel random_model(std::mt19937_64& rng, int p) {
  l1pda::PdaModel m;
  m.method = "qda";
  std::uniform_real_distribution<double> unif(0.2, 0.8);
  const double pi1 = unif(rng);
  m.priors = {pi1, 1.0 - pi1};
  m.mu1 = random_vector(rng, p);
  m.mu2 = random_vector(rng, p);
  m.P1 = random_spd(rng, p);
  m.P2 = random_spd(rng, p);
  m.logdet_P1 = l1pda::log_det(m.P1);
  m.logdet_P2 = l1pda::log_det(m.P2);
  return m;
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(rd()) + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil

#endif  // L1PDA_TESTS_TESTUTIL_HPP
