#pragma once

// Closed-form witnesses: stabilizer norm, the INS window q_min/q_max with the
// lambda* bound, and exact feasible amplitude-ratio sets.

#include "magic/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace magic {

inline constexpr int kMaxStNormQubits = 6;
inline constexpr int kMaxRatioComplexity = 64;

struct StNormReport {
  double value = 0.0;
  /// a_j with rho = sum_j a_j sigma_j, in PauliString::from_index order.
  std::vector<double> pauli_coefficients;
  bool witnessed = false;
};

/// sum_j |a_j|; witnessed when value > 1 + tol.
StNormReport st_norm(const DensityMatrix& rho, double tol = 1e-9);

double q_max(int n);
double q_min(int n);
/// Largest eigenvalue bound [q f_st^{n-1} + (1-q)/2^n] / [q f_st^{n-1} + (1-q)/2^{n-1}].
double lambda_star(double q, int n);

struct InsRegion {
  int n = 0;
  double q_min = 0.0;
  double q_max = 0.0;
  bool region_nonempty = false;
  /// n = 1, 2: both closed forms reduce to the same algebraic number.
  bool analytic_equality = false;
};

InsRegion ins_region(int n);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  /// Reduces to lowest terms; den must be positive.
  static Rational make(std::int64_t num, std::int64_t den);
  long double value() const { return static_cast<long double>(num) / static_cast<long double>(den); }
  std::string to_string() const;
  auto operator<=>(const Rational& o) const {
    const __int128 l = static_cast<__int128>(num) * o.den;
    const __int128 r = static_cast<__int128>(o.num) * den;
    return l <=> r;
  }
  bool operator==(const Rational& o) const = default;
};

/// Exact test p/q == 3 - 2 sqrt2, i.e. tan^2(pi/8).
bool equals_tan2_pi8(const Rational& r);
/// Exact test against either orientation, tan^2(pi/8) or cot^2(pi/8).
bool equals_tan2_pi8_either(const Rational& r);

struct RatioSet {
  int P = 0;
  /// Sorted, duplicate free.
  std::vector<Rational> ratios;
  bool contains(const Rational& r) const;
};

/// All (a0^2+b0^2)/(a1^2+b1^2) with |a_j|+|b_j| <= P and nonzero denominator.
RatioSet feasible_ratios(int P);

struct RatioGap {
  /// Closest value among R and 1/R (as a rational).
  Rational closest;
  long double gap = 0.0L;
  /// True when the closest value arose as 1/r for r in R rather than r itself.
  bool via_reciprocal = false;
  std::size_t count = 0;
};

/// min over r in R of min(|r - t|, |1/r - t|).
RatioGap closest_ratio(const RatioSet& set, long double target);

long double tan2_pi8();

/// |<0|psi>|^2 / |<1|psi>|^2; +infinity when the denominator is below 1e-14.
double amplitude_ratio(const Ket& psi);

}  // namespace magic
