#include "magic/witnesses.hpp"

#include "magic/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace magic {

StNormReport st_norm(const DensityMatrix& rho, double tol) {
  const int n = rho.num_qubits();
  if (n > kMaxStNormQubits) throw ValidationError("st_norm supports at most 6 qubits");
  StNormReport rep;
  const auto coeffs = pauli_decomposition(rho.matrix(), n);
  rep.pauli_coefficients.reserve(coeffs.size());
  for (const auto& c : coeffs) {
    rep.pauli_coefficients.push_back(c.real());
    rep.value += std::abs(c.real());
  }
  rep.witnessed = rep.value > 1.0 + tol;
  return rep;
}

double q_max(int n) {
  if (n < 1) throw ValidationError("q_max needs n >= 1");
  const double fst = constants().f_st;
  return 1.0 / (1.0 + std::pow(2.0 * fst, n - 1) * (std::sqrt(3.0) - 1.0));
}

double q_min(int n) {
  if (n < 1) throw ValidationError("q_min needs n >= 1");
  return (std::ldexp(1.0, n) - 1.0) / (std::pow(1.0 + std::sqrt(3.0), n) - 1.0);
}

double lambda_star(double q, int n) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("lambda_star needs q in [0,1]");
  if (n < 1) throw ValidationError("lambda_star needs n >= 1");
  const double a = q * std::pow(constants().f_st, n - 1);
  return (a + (1.0 - q) / std::ldexp(1.0, n)) / (a + (1.0 - q) / std::ldexp(1.0, n - 1));
}

InsRegion ins_region(int n) {
  InsRegion r;
  r.n = n;
  r.q_min = q_min(n);
  r.q_max = q_max(n);
  if (n == 1 || n == 2) {
    // 1/sqrt3 and sqrt3/(sqrt3+2): the two forms agree exactly
    r.analytic_equality = true;
    const double v = n == 1 ? 1.0 / std::sqrt(3.0) : std::sqrt(3.0) / (std::sqrt(3.0) + 2.0);
    r.q_min = r.q_max = v;
  }
  r.region_nonempty = r.q_min < r.q_max - 1e-12;
  return r;
}

// ---------------------------------------------------------------- ratios

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw ValidationError("rational denominator must be positive");
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  return {num / g, den / g};
}

std::string Rational::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

bool equals_tan2_pi8(const Rational& r) {
  // p/q = 3 - 2 sqrt2  <=>  3q - p > 0 and (3q - p)^2 = 8 q^2
  const __int128 p = r.num;
  const __int128 q = r.den;
  const __int128 d = 3 * q - p;
  return d > 0 && d * d == 8 * q * q;
}

bool equals_tan2_pi8_either(const Rational& r) {
  if (equals_tan2_pi8(r)) return true;
  if (r.num <= 0) return false;
  return equals_tan2_pi8(Rational::make(r.den, r.num));
}

bool RatioSet::contains(const Rational& r) const {
  return std::binary_search(ratios.begin(), ratios.end(), r);
}

RatioSet feasible_ratios(int P) {
  if (P < 1 || P > kMaxRatioComplexity) throw ValidationError("ratio complexity P must lie in 1..64");
  // distinct values of a^2 + b^2 over |a| + |b| <= P
  std::set<std::int64_t> sums;
  for (int a = -P; a <= P; ++a) {
    const int rest = P - std::abs(a);
    for (int b = -rest; b <= rest; ++b) sums.insert(static_cast<std::int64_t>(a) * a + static_cast<std::int64_t>(b) * b);
  }
  std::set<Rational> out;
  for (std::int64_t den : sums) {
    if (den == 0) continue;
    for (std::int64_t num : sums) out.insert(Rational::make(num, den));
  }
  RatioSet set;
  set.P = P;
  set.ratios.assign(out.begin(), out.end());
  return set;
}

long double tan2_pi8() { return 3.0L - 2.0L * std::sqrt(2.0L); }

RatioGap closest_ratio(const RatioSet& set, long double target) {
  if (set.ratios.empty()) throw ValidationError("empty ratio set");
  RatioGap best;
  best.count = set.ratios.size();
  best.gap = std::numeric_limits<long double>::infinity();
  for (const auto& r : set.ratios) {
    const long double direct = std::fabs(r.value() - target);
    if (direct < best.gap) {
      best = {r, direct, false, best.count};
    }
    if (r.num > 0) {
      const Rational inv = Rational::make(r.den, r.num);
      const long double recip = std::fabs(inv.value() - target);
      if (recip < best.gap) best = {inv, recip, true, best.count};
    }
  }
  // prefer reporting a value that is itself in R when it ties with a reciprocal
  if (best.via_reciprocal && set.contains(best.closest)) best.via_reciprocal = false;
  return best;
}

double amplitude_ratio(const Ket& psi) {
  if (psi.num_qubits() != 1) throw ValidationError("amplitude_ratio needs a single-qubit state");
  const double p0 = std::norm(psi[0]);
  const double p1 = std::norm(psi[1]);
  if (p1 < 1e-14) return std::numeric_limits<double>::infinity();
  return p0 / p1;
}

}  // namespace magic
