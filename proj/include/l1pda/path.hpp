#ifndef L1PDA_PATH_HPP
#define L1PDA_PATH_HPP

#include <vector>

#include "l1pda/admm.hpp"

namespace l1pda {

// Descending, log-linearly spaced penalty grid from lambda_max down to
// epsilon * lambda_max.
struct LambdaGrid {
  std::vector<double> values;
  double epsilon = 0.0;
  int count = 0;
};

// Smallest penalty at which the solution collapses to LDA:
//   n1 n2 ||S1 - S2||_inf / (n1 + n2)
// with ||.||_inf the largest absolute entry.
double lambda_max(const ClassStats& stats);

// Throws DegenerateGridError when lmax is 0 (identical class
// covariances; callers fall back to a single LDA fit) or when epsilon
// would make the values non-decreasing; count must be >= 2 and
// epsilon must lie strictly inside (0, 1).
LambdaGrid make_grid(double lmax, int count = 30, double epsilon = 0.01);

struct PathFit {
  LambdaGrid grid;
  std::vector<SolveResult> results;  // one per grid value, same order
  ClassStats stats;
};

// Solves at grid.values[0] from the cold start (which is the exact
// solution at lambda_max up to the dual variable) and warm-starts each
// subsequent lambda from the previous final state.  Per-point
// non-convergence is recorded in the results, not raised.
PathFit solve_path(const ClassStats& stats, const LambdaGrid& grid,
                   const SolveConfig& cfg = {});

}  // namespace l1pda

#endif  // L1PDA_PATH_HPP
