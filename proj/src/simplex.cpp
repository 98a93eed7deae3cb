#include "magic/simplex.hpp"

#include "magic/core.hpp"

#include <cmath>
#include <limits>

namespace magic {

namespace {

constexpr double kPriceEps = 1e-10;
constexpr double kPivotEps = 1e-9;
// Deterministic right-hand-side perturbation that breaks degenerate ties.
constexpr double kPerturb = 1e-10;

}  // namespace

FeasibilityResult phase_one(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol,
                            int max_iterations) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m) throw ValidationError("phase_one: dimension mismatch");

  // rows flipped so the right-hand side is nonnegative; columns n..n+m-1 are artificials
  Eigen::VectorXd flip(m);
  for (Eigen::Index i = 0; i < m; ++i) flip(i) = b(i) < 0.0 ? -1.0 : 1.0;
  const Eigen::MatrixXd af = flip.asDiagonal() * a;
  const Eigen::VectorXd bf = flip.cwiseProduct(b);
  Eigen::VectorXd bp = bf;
  for (Eigen::Index i = 0; i < m; ++i) bp(i) += kPerturb * static_cast<double>(i + 1) / static_cast<double>(m);

  auto column = [&](Eigen::Index j) -> Eigen::VectorXd {
    if (j < n) return af.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e(j - n) = 1.0;
    return e;
  };
  auto cost = [&](Eigen::Index j) { return j < n ? 0.0 : 1.0; };

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  std::vector<char> in_basis(static_cast<std::size_t>(n + m), 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    basis[static_cast<std::size_t>(i)] = n + i;
    in_basis[static_cast<std::size_t>(n + i)] = 1;
  }

  FeasibilityResult res;
  Eigen::MatrixXd bmat(m, m);
  Eigen::VectorXd cb(m);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::VectorXd y;
  int degenerate_run = 0;
  bool bland = false;

  auto factor = [&] {
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index j = basis[static_cast<std::size_t>(i)];
      bmat.col(i) = column(j);
      cb(i) = cost(j);
    }
    lu.compute(bmat);
    y = lu.transpose().solve(cb);
  };

  for (;; ++res.iterations) {
    if (res.iterations >= max_iterations) throw InvariantError("phase_one: iteration limit reached");
    factor();
    const Eigen::VectorXd xb = lu.solve(bp);

    // pricing
    Eigen::Index enter = -1;
    double best = -kPriceEps;
    const Eigen::RowVectorXd rc_struct = -(y.transpose() * af);
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (in_basis[static_cast<std::size_t>(j)]) continue;
      const double rc = j < n ? rc_struct(j) : 1.0 - y(j - n);
      if (rc < best) {
        enter = j;
        if (bland) break;
        best = rc;
      }
    }
    if (enter < 0) break;

    const Eigen::VectorXd d = lu.solve(column(enter));
    Eigen::Index leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (d(i) <= kPivotEps) continue;
      const double r = std::max(0.0, xb(i)) / d(i);
      const bool tie = leave >= 0 && std::abs(r - ratio) <= 1e-15 * std::max(1.0, ratio);
      if (leave < 0 || (r < ratio && !tie)) {
        ratio = r;
        leave = i;
      } else if (tie && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]) {
        leave = i;
      }
    }
    if (leave < 0) throw InvariantError("phase_one: unbounded direction in a bounded problem");

    if (ratio <= 1e-13) {
      if (++degenerate_run > 30) bland = true;
    } else {
      degenerate_run = 0;
    }
    in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = 0;
    basis[static_cast<std::size_t>(leave)] = enter;
    in_basis[static_cast<std::size_t>(enter)] = 1;
  }

  // final primal from the unperturbed right-hand side
  const Eigen::VectorXd xb = lu.solve(bf);
  res.x.assign(static_cast<std::size_t>(n), 0.0);
  res.infeasibility = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index j = basis[static_cast<std::size_t>(i)];
    if (j < n) {
      res.x[static_cast<std::size_t>(j)] = std::max(0.0, xb(i));
    } else {
      res.infeasibility += std::abs(xb(i));
    }
  }
  res.feasible = res.infeasibility <= tol;
  res.dual.assign(static_cast<std::size_t>(m), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) res.dual[static_cast<std::size_t>(i)] = y(i) * flip(i);
  return res;
}

}  // namespace magic
