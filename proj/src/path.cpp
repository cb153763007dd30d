#include "l1pda/path.hpp"

#include <cmath>
#include <string>

#include "l1pda/format.hpp"

namespace l1pda {

double lambda_max(const ClassStats& stats) {
  const double n1 = stats.n1, n2 = stats.n2;
  return n1 * n2 * (stats.S1 - stats.S2).max_abs() / (n1 + n2);
}

LambdaGrid make_grid(double lmax, int count, double epsilon) {
  if (!std::isfinite(lmax) || lmax < 0.0) {
    throw Error("lambda_max must be finite and nonnegative, got " + detail::fmt(lmax));
  }
  if (lmax == 0.0) {
    throw DegenerateGridError(
        "lambda_max is 0 (identical class covariances); no penalty path exists");
  }
  if (count < 2) {
    throw Error("grid needs at least 2 values, got " + std::to_string(count));
  }
  if (!(epsilon > 0.0) || epsilon >= 1.0) {
    throw DegenerateGridError("epsilon must lie strictly inside (0, 1); epsilon = " +
                              detail::fmt(epsilon) + " gives a non-decreasing grid");
  }

  LambdaGrid grid;
  grid.epsilon = epsilon;
  grid.count = count;
  grid.values.resize(count);
  for (int i = 0; i < count; ++i) {
    grid.values[i] = lmax * std::pow(epsilon, static_cast<double>(i) / (count - 1));
  }
  // Pin the endpoints exactly; pow can drift in the last ulp.
  grid.values.front() = lmax;
  grid.values.back() = lmax * epsilon;
  for (int i = 1; i < count; ++i) {
    if (!(grid.values[i] < grid.values[i - 1])) {
      throw DegenerateGridError("grid values are not strictly decreasing at index " +
                                std::to_string(i));
    }
  }
  return grid;
}

PathFit solve_path(const ClassStats& stats, const LambdaGrid& grid, const SolveConfig& cfg) {
  if (grid.values.empty()) {
    throw Error("cannot fit an empty lambda grid");
  }
  PathFit fit;
  fit.grid = grid;
  fit.stats = stats;
  fit.results.reserve(grid.values.size());
  std::optional<AdmmState> init;
  for (double lambda : grid.values) {
    SolveResult result = solve(stats, lambda, cfg, init);
    init = result.state;
    fit.results.push_back(std::move(result));
  }
  return fit;
}

}  // namespace l1pda
