#pragma once

// Dense phase-one simplex for the feasibility problem A x = b, x >= 0.

#include <Eigen/Dense>

#include <vector>

namespace magic {

struct FeasibilityResult {
  bool feasible = false;
  /// Optimal phase-one objective: sum of artificial variables.
  double infeasibility = 0.0;
  std::vector<double> x;
  /// Dual vector y with A^T y <= 0 and b^T y = infeasibility; meaningful when infeasible.
  std::vector<double> dual;
  int iterations = 0;
};

/// Dantzig pricing with a switch to Bland's rule after a run of degenerate pivots.
FeasibilityResult phase_one(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol = 1e-7,
                            int max_iterations = 200000);

}  // namespace magic
