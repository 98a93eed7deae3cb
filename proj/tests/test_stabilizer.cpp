#include "doctest.h"

#include "magic/random.hpp"
#include "magic/stabilizer.hpp"
#include "magic/states.hpp"

#include <cmath>
#include <numbers>

using namespace magic;

namespace {

// 2^n prod_{k=1..n} (2^k + 1)
std::size_t stabilizer_state_count(int n) {
  std::size_t c = std::size_t{1} << n;
  for (int k = 1; k <= n; ++k) c *= (std::size_t{1} << k) + 1;
  return c;
}

// Gaussian-binomial style count of k-dim isotropic subspaces of F_2^{2n}
std::size_t isotropic_oracle(int n, int k) {
  std::size_t num = 1, den = 1;
  for (int i = 0; i < k; ++i) {
    num *= (std::size_t{1} << (2 * (n - i))) - 1;
    den *= (std::size_t{1} << (i + 1)) - 1;
  }
  return num / den;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("pure stabilizer census") {
  CHECK(enumerate_pure_stabilizers(1).size() == 6);
  CHECK(enumerate_pure_stabilizers(2).size() == 60);
  CHECK(enumerate_pure_stabilizers(3).size() == 1080);
  for (int n = 1; n <= 3; ++n) CHECK(enumerate_pure_stabilizers(n).size() == stabilizer_state_count(n));
  CHECK_THROWS_AS(enumerate_pure_stabilizers(4), ValidationError);
}

TEST_CASE("isotropic subspace counts match the closed form") {
  for (int n = 1; n <= 3; ++n) {
    for (int k = 0; k <= n; ++k) CHECK(isotropic_subspace_count(n, k) == isotropic_oracle(n, k));
  }
}

TEST_CASE("code projector counts") {
  CHECK(enumerate_code_projectors(1, 1).size() == 1);
  CHECK(enumerate_code_projectors(1, 1).front().generators.empty());
  CHECK(enumerate_code_projectors(2, 1).size() == 30);
  CHECK(enumerate_code_projectors(3, 1).size() == isotropic_oracle(3, 2) * 4);
  CHECK(enumerate_code_projectors(3, 1).size() == 1260);
  CHECK(enumerate_code_projectors(3, 2).size() == 126);
  CHECK(enumerate_code_projectors(3, 0).size() == 1080);
  CHECK_THROWS_AS(enumerate_code_projectors(2, 3), ValidationError);
}

TEST_CASE("every code satisfies its invariants and stabilizes its states") {
  for (int n = 1; n <= 3; ++n) {
    for (int m = 0; m <= n; ++m) {
      for (const auto& code : enumerate_code_projectors(n, m)) code.check_invariants();
    }
    const auto& states = enumerate_pure_stabilizers(n);
    const auto& codes = enumerate_code_projectors(n, 0);
    for (std::size_t i = 0; i < states.size(); ++i) {
      for (const auto& g : codes[i].generators) {
        CHECK((g.matrix() * states[i].amplitudes() - states[i].amplitudes()).norm() < 1e-10);
      }
    }
  }
}

TEST_CASE("enumerated states are distinct and phase canonical") {
  for (int n = 1; n <= 3; ++n) {
    const auto& states = enumerate_pure_stabilizers(n);
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& a = states[i].amplitudes();
      Eigen::Index first = 0;
      while (std::abs(a(first)) < 1e-12) ++first;
      CHECK(std::abs(a(first).imag()) < 1e-12);
      CHECK(a(first).real() > 0.0);
      for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(states[j].inner(states[i])) < 1.0 - 1e-9);
    }
  }
}

TEST_CASE("hull membership examples") {
  const double fst = constants().f_st;
  const auto below = hull_membership(tau(fst - 0.01));
  CHECK(below.member);
  double sum = 0.0;
  for (double w : below.weights) {
    CHECK(w >= -1e-9);
    sum += w;
  }
  CHECK(std::abs(sum - 1.0) < 1e-7);

  const auto above = hull_membership(tau(fst + 0.01));
  CHECK_FALSE(above.member);
  CHECK(above.verified);
  CHECK(above.slack > 1e-7);

  for (int n = 1; n <= 3; ++n) {
    const auto mixed = hull_membership(DensityMatrix::maximally_mixed(n));
    CHECK(mixed.member);
  }
  CHECK_FALSE(hull_membership(DensityMatrix::from_ket(t_ket(std::array<int, 2>{0, 0}))).member);
  CHECK_FALSE(hull_membership(DensityMatrix::from_ket(phi_catalyst())).member);
}

TEST_CASE("hull weights reconstruct the state") {
  std::mt19937_64 rng(2);
  const auto& states = enumerate_pure_stabilizers(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(states.size());
  for (double& x : w) x = u(rng);
  double total = 0.0;
  for (double x : w) total += x;
  CMatrix m = CMatrix::Zero(4, 4);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const CVector& a = states[i].amplitudes();
    m += (w[i] / total) * (a * a.adjoint());
  }
  const DensityMatrix rho(2, m);
  const auto res = hull_membership(rho);
  REQUIRE(res.member);
  CMatrix recon = CMatrix::Zero(4, 4);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const CVector& a = states[i].amplitudes();
    recon += res.weights[i] * (a * a.adjoint());
  }
  CHECK(max_abs(recon - rho.matrix()) < 1e-7);
}

TEST_CASE("codespace_reduce examples") {
  StabilizerCode zz;
  zz.n = 2;
  zz.m = 1;
  zz.generators = {PauliString::parse("ZZ")};
  zz.logical_z = PauliString::parse("ZI");
  zz.logical_x = PauliString::parse("XX");
  zz.check_invariants();
  const auto r = codespace_reduce(DensityMatrix::from_ket(Ket::basis(2, 0)), zz);
  REQUIRE(r.output);
  CHECK(std::abs(r.probability - 1.0) < 1e-12);
  CHECK(max_abs(r.output->matrix() - DensityMatrix::from_ket(Ket::basis(1, 0)).matrix()) < 1e-12);

  // even-parity projection of |T_01>
  const double beta = constants().beta;
  const Ket t01 = t_ket(std::array<int, 2>{0, 1});
  const auto even = project_pauli(DensityMatrix::from_ket(t01), PauliString::parse("ZZ"), 1);
  const double pe = even.trace();
  CHECK(std::abs(pe - 2 * std::pow(std::cos(beta) * std::sin(beta), 2)) < 1e-12);
  CVector s(4);
  s << 1.0, 0.0, 0.0, cplx(0, -1);
  const Ket stab = Ket::normalized(2, s);
  CHECK(std::abs(even.normalize().fidelity(stab) - 1.0) < 1e-12);
  CHECK(hull_membership(even.normalize()).member);

  StabilizerCode bad = zz;
  bad.logical_z.reset();
  CHECK_THROWS_AS(codespace_reduce(DensityMatrix::maximally_mixed(2), bad), ValidationError);
}

TEST_CASE("odd-parity decoding of |T_01> lands on the equator") {
  // decoding |01> -> |->, |10> -> -i|+>, i.e. Z_L = -XY and X_L = -ZI on the -ZZ code space
  StabilizerCode odd;
  odd.n = 2;
  odd.m = 1;
  odd.generators = {PauliString::parse("-ZZ")};
  odd.logical_z = PauliString::parse("-XY");
  odd.logical_x = PauliString::parse("-ZI");
  odd.check_invariants();
  const Ket t01 = t_ket(std::array<int, 2>{0, 1});
  const auto red = codespace_reduce(DensityMatrix::from_ket(t01), odd);
  REQUIRE(red.output);
  const auto b = bloch(*red.output);
  CHECK(std::abs(b[2]) < 1e-12);
  CHECK(std::abs(b[0] * b[0] + b[1] * b[1] - 1.0) < 1e-12);
  // this decoding puts the state at azimuth 5pi/6; a further Clifford frame reaches pi/6
  const double angle = std::atan2(b[1], b[0]);
  CHECK(std::abs(angle - 5.0 * std::numbers::pi / 6.0) < 1e-12);
}

TEST_CASE("codespace_reduce conserves probability over sign choices") {
  std::mt19937_64 rng(4);
  for (int n = 2; n <= 3; ++n) {
    const auto rho = random_density_matrix(n, rng);
    const auto& codes = enumerate_code_projectors(n, 1);
    // codes come in runs of 2^{n-1} sign choices per generator set
    const std::size_t block = std::size_t{1} << (n - 1);
    for (std::size_t start = 0; start < codes.size(); start += block * 17) {
      double total = 0.0;
      for (std::size_t i = start; i < start + block; ++i) total += codespace_reduce(rho, codes[i]).probability;
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("max code overlap equals f_st^(n-m)") {
  const double fst = constants().f_st;
  for (int n = 1; n <= 3; ++n) {
    for (int m = 0; m <= n; ++m) {
      const auto rep = max_code_overlap(n, m);
      CHECK(std::abs(rep.max_value - std::pow(fst, n - m)) < 1e-10);
      CHECK(std::abs(rep.computational_value - rep.max_value) < 1e-10);
      CHECK(rep.codes_searched == enumerate_code_projectors(n, m).size());
    }
  }
}
