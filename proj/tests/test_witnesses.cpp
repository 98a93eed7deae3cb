#include "doctest.h"

#include "magic/random.hpp"
#include "magic/stabilizer.hpp"
#include "magic/states.hpp"
#include "magic/witnesses.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

using namespace magic;

namespace {

// ratios from a direct walk over integer quadruples, kept as reduced pairs
std::set<std::pair<long long, long long>> quadruple_oracle(int P) {
  std::set<std::pair<long long, long long>> out;
  for (int a0 = -P; a0 <= P; ++a0) {
    for (int b0 = -(P - std::abs(a0)); b0 <= P - std::abs(a0); ++b0) {
      for (int a1 = -P; a1 <= P; ++a1) {
        for (int b1 = -(P - std::abs(a1)); b1 <= P - std::abs(a1); ++b1) {
          const long long num = a0 * a0 + b0 * b0;
          const long long den = a1 * a1 + b1 * b1;
          if (den == 0) continue;
          const long long g = std::gcd(num, den);
          out.emplace(num / g, den / g);
        }
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("st_norm examples") {
  const double t0 = (1.0 + std::sqrt(3.0)) / 2.0;
  CHECK(std::abs(st_norm(tau(1.0)).value - t0) < 1e-10);
  CHECK(st_norm(tau(1.0)).witnessed);
  CHECK(std::abs(st_norm(tau(1.0).tensor(tau(1.0))).value - t0 * t0) < 1e-10);
  for (int n = 1; n <= 3; ++n) {
    for (const auto& s : enumerate_pure_stabilizers(n)) {
      const auto rep = st_norm(DensityMatrix::from_ket(s));
      CHECK(std::abs(rep.value - 1.0) < 1e-10);
      CHECK_FALSE(rep.witnessed);
      CHECK(std::abs(rep.pauli_coefficients[0] - std::ldexp(1.0, -n)) < 1e-10);
    }
  }
  // boundary state
  CHECK(std::abs(st_norm(tau(constants().f_st)).value - 1.0) < 1e-10);
  CHECK_THROWS_AS(st_norm(DensityMatrix::maximally_mixed(7)), ValidationError);
}

TEST_CASE("st_norm of sigma_ins follows the closed form") {
  const double t0 = (1.0 + std::sqrt(3.0)) / 2.0;
  for (int n = 1; n <= 3; ++n) {
    for (double q : {0.0, 0.2, 0.36, 0.8, 1.0}) {
      const double expected = q * std::pow(t0, n) + (1.0 - q) / std::ldexp(1.0, n);
      CHECK(std::abs(st_norm(sigma_ins(q, n)).value - expected) < 1e-9);
    }
  }
}

TEST_CASE("property: st_norm is multiplicative and convex") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const auto a = random_density_matrix(1 + trial % 2, rng);
    const auto b = random_density_matrix(1 + (trial / 2) % 2, rng);
    CHECK(std::abs(st_norm(a.tensor(b)).value - st_norm(a).value * st_norm(b).value) < 1e-9);
    const auto c = random_density_matrix(a.num_qubits(), rng);
    const double lam = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const DensityMatrix mixed(a.num_qubits(), lam * a.matrix() + (1 - lam) * c.matrix());
    CHECK(st_norm(mixed).value <= lam * st_norm(a).value + (1 - lam) * st_norm(c).value + 1e-9);
  }
}

TEST_CASE("single-qubit st_norm witness matches the hull oracle") {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto rho = random_density_matrix(1, rng);
    const auto w = st_norm(rho);
    if (std::abs(w.value - 1.0) < 1e-6) continue;
    ++checked;
    const auto h = hull_membership(rho);
    CHECK(w.witnessed == !h.member);
    if (!h.member) CHECK(h.verified);
  }
  CHECK(checked > 250);
}

TEST_CASE("ins_region values") {
  const auto r1 = ins_region(1);
  CHECK(std::abs(r1.q_min - 1.0 / std::sqrt(3.0)) < 1e-12);
  CHECK(r1.q_min == r1.q_max);
  CHECK_FALSE(r1.region_nonempty);
  const auto r2 = ins_region(2);
  CHECK(std::abs(r2.q_max - std::sqrt(3.0) / (std::sqrt(3.0) + 2.0)) < 1e-12);
  CHECK(r2.q_min == r2.q_max);
  const auto r3 = ins_region(3);
  CHECK(std::abs(r3.q_min - 0.36097) < 1e-5);
  CHECK(std::abs(r3.q_max - 0.35444) < 1e-5);
  CHECK_FALSE(r3.region_nonempty);
  for (int n = 3; n <= 10; ++n) {
    const auto r = ins_region(n);
    CHECK(r.q_min > r.q_max);
    CHECK(r.q_min > 0.0);
    CHECK(r.q_max <= 1.0);
  }
}

TEST_CASE("lambda_star") {
  CHECK(std::abs(lambda_star(0.0, 3) - 0.5) < 1e-15);
  CHECK(std::abs(lambda_star(1.0, 3) - 1.0) < 1e-15);
  for (int n = 1; n <= 8; ++n) CHECK(std::abs(lambda_star(q_max(n), n) - constants().f_st) < 1e-10);
  // lambda* bounds the top eigenvalue of every projected-and-decoded sigma_ins output at q_max
  const double q = q_max(2);
  const auto rho = sigma_ins(q, 2);
  double worst = 0.0;
  for (const auto& code : enumerate_code_projectors(2, 1)) {
    const auto red = codespace_reduce(rho, code);
    if (!red.output) continue;
    const auto ev = red.output->eigenvalues();
    worst = std::max(worst, *std::max_element(ev.begin(), ev.end()));
  }
  CHECK(worst <= lambda_star(q, 2) + 1e-10);
}

TEST_CASE("feasible ratios") {
  const auto r1 = feasible_ratios(1);
  REQUIRE(r1.ratios.size() == 2);
  CHECK(r1.ratios[0] == Rational{0, 1});
  CHECK(r1.ratios[1] == Rational{1, 1});
  for (int P = 1; P <= 6; ++P) {
    const auto set = feasible_ratios(P);
    const auto oracle = quadruple_oracle(P);
    REQUIRE(set.ratios.size() == oracle.size());
    for (const auto& r : set.ratios) CHECK(oracle.contains({r.num, r.den}));
    CHECK(set.contains(Rational{1, 1}));
  }
  const auto gap = closest_ratio(feasible_ratios(4), tan2_pi8());
  CHECK(gap.closest == Rational{1, 5});
  CHECK(std::abs(static_cast<double>(gap.gap) - 0.028427) < 1e-6);
  CHECK(gap.gap > 0.028L);
  CHECK_THROWS_AS(feasible_ratios(0), ValidationError);
  CHECK_THROWS_AS(feasible_ratios(65), ValidationError);
}

TEST_CASE("tan^2(pi/8) is never a feasible ratio") {
  for (int P = 1; P <= 16; ++P) {
    for (const auto& r : feasible_ratios(P).ratios) CHECK_FALSE(equals_tan2_pi8_either(r));
  }
  // the exact test itself accepts nothing rational, but agrees with floating distance
  CHECK_FALSE(equals_tan2_pi8(Rational{1, 5}));
  CHECK_FALSE(equals_tan2_pi8(Rational{99, 577}));
  CHECK(std::fabs(Rational{99, 577}.value() - tan2_pi8()) < 1e-5L);
}

TEST_CASE("ratio sets grow with P") {
  for (int P = 1; P < 10; ++P) {
    const auto small = feasible_ratios(P);
    const auto big = feasible_ratios(P + 1);
    for (const auto& r : small.ratios) CHECK(big.contains(r));
  }
}

TEST_CASE("amplitude_ratio") {
  CVector plus(2);
  plus << 1.0, 1.0;
  CHECK(std::abs(amplitude_ratio(Ket::normalized(1, plus)) - 1.0) < 1e-12);
  CHECK(std::isinf(amplitude_ratio(Ket::basis(1, 0))));
  const double r = amplitude_ratio(h_ket(0));
  CHECK(std::abs(r - (3.0 + 2.0 * std::sqrt(2.0))) < 1e-12);
  CHECK(std::abs(1.0 / r - (3.0 - 2.0 * std::sqrt(2.0))) < 1e-12);
  CHECK_THROWS_AS(amplitude_ratio(phi_plus()), ValidationError);
}
