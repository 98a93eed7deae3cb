#include "doctest.h"

#include "magic/states.hpp"

#include <cmath>
#include <numbers>

using namespace magic;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// |<a|b>| == 1
bool same_ray(const Ket& a, const Ket& b, double tol) {
  return std::abs(std::abs(a.inner(b)) - 1.0) < tol;
}

}  // namespace

TEST_CASE("constants") {
  const auto c = constants();
  CHECK(std::abs(c.f_st - 0.788675134594813) < 1e-12);
  CHECK(std::abs(c.f_bk - 0.827326835353989) < 1e-12);
  CHECK(std::abs(std::cos(2.0 * c.beta) - 1.0 / std::sqrt(3.0)) < 1e-12);
  CHECK(std::abs(c.gamma - std::numbers::pi / 6.0) < 1e-15);
}

TEST_CASE("H and T eigenstates") {
  CHECK(std::abs(h_ket(0).inner(h_ket(1))) < 1e-12);
  CHECK(std::abs(t_ket(0).inner(t_ket(1))) < 1e-12);
  const CMatrix h = gate_matrix(Gate::H);
  CHECK((h * h_ket(0).amplitudes() - h_ket(0).amplitudes()).norm() < 1e-12);
  CHECK((h * h_ket(1).amplitudes() + h_ket(1).amplitudes()).norm() < 1e-12);
  const auto b0 = bloch(DensityMatrix::from_ket(t_ket(0)));
  for (double v : b0) CHECK(std::abs(v - 1.0 / std::sqrt(3.0)) < 1e-12);
  const auto b1 = bloch(DensityMatrix::from_ket(t_ket(1)));
  for (double v : b1) CHECK(std::abs(v + 1.0 / std::sqrt(3.0)) < 1e-12);
  const auto bh = bloch(DensityMatrix::from_ket(h_ket(0)));
  CHECK(std::abs(bh[0] - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(bh[1]) < 1e-12);
  CHECK(std::abs(bh[2] - 1.0 / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("tau(f) bloch vector") {
  for (double f : {0.0, 0.3, 0.85, 1.0}) {
    const auto b = bloch(tau(f));
    for (double v : b) CHECK(std::abs(v - (2 * f - 1) / std::sqrt(3.0)) < 1e-12);
  }
  const auto pure = tau(1.0);
  CHECK(max_abs(pure.matrix() - DensityMatrix::from_ket(t_ket(0)).matrix()) < 1e-12);
  CHECK_THROWS_AS(tau(1.5), ValidationError);
}

TEST_CASE("bloch of simple states") {
  const auto z = bloch(DensityMatrix::from_ket(Ket::basis(1, 0)));
  CHECK(z[0] == doctest::Approx(0.0));
  CHECK(z[2] == doctest::Approx(1.0));
  const auto m = bloch(DensityMatrix::maximally_mixed(1));
  for (double v : m) CHECK(std::abs(v) < 1e-15);
  CHECK_THROWS_AS(bloch(DensityMatrix::maximally_mixed(2)), ValidationError);
}

TEST_CASE("phi_prime equals SQRT_X^3 phi up to phase") {
  Ket rotated = phi_catalyst();
  const CMatrix sx = gate_matrix(Gate::SQRT_X);
  for (int q = 0; q < 3; ++q) {
    const std::array<int, 1> t{q};
    rotated = apply_local(rotated, sx, t);
  }
  CHECK(same_ray(rotated, phi_prime(), 1e-12));
  const Ket pp = phi_prime();
  const CVector& a = pp.amplitudes();
  CHECK(std::abs(a(0) - 0.5) < 1e-15);
  CHECK(std::abs(a(3) - cplx(0, 0.5)) < 1e-15);
}

TEST_CASE("sigma_phi commutes with H^3") {
  const auto s = sigma_phi();
  auto h3 = Unitary::identity(3);
  for (int q = 0; q < 3; ++q) {
    const std::array<int, 1> t{q};
    h3 = build_gate(Gate::H, t, 3) * h3;
  }
  CHECK(max_abs(h3.matrix() * s.matrix() - s.matrix() * h3.matrix()) < 1e-12);
}

TEST_CASE("singlet expressed in H and T bases") {
  const std::array<int, 2> b10{1, 0}, b01{0, 1};
  const Ket tdiff = Ket::normalized(2, t_ket(b10).amplitudes() - t_ket(b01).amplitudes());
  CHECK(same_ray(tdiff, singlet(), 1e-12));
  const Ket hdiff = Ket::normalized(2, h_ket(b01).amplitudes() - h_ket(b10).amplitudes());
  CHECK(same_ray(hdiff, singlet(), 1e-12));
}

TEST_CASE("graph states are stabilized by their generators") {
  const std::vector<std::string> specs{"graph:n=1,edges=", "graph:n=2,edges=0-1",
                                       "graph:n=3,edges=0-1/1-2", "graph:n=4,edges=0-1/1-2/2-3/3-0",
                                       "graph:n=4,edges=0-1/0-2/0-3"};
  for (const auto& text : specs) {
    const auto spec = StateSpec::parse(text);
    const Ket g = std::get<Ket>(make_state(spec));
    for (const auto& k : graph_generators(spec.adjacency)) {
      CHECK((k.matrix() * g.amplitudes() - g.amplitudes()).norm() < 1e-10);
    }
  }
}

TEST_CASE("sigma_corr product point has zero mutual information") {
  for (double q : {0.2, 0.5, 0.6, 0.9}) {
    const double r = std::sqrt(q) * (1 - std::sqrt(q));
    CHECK(mutual_information(sigma_corr(q, r), 1) < 1e-10);
  }
  CHECK(mutual_information(sigma_corr(0.6, 0.05), 1) > 1e-3);
  CHECK_THROWS_AS(sigma_corr(0.6, 0.3), ValidationError);
  CHECK_THROWS_AS(sigma_corr(0.6, -0.1), ValidationError);
}

TEST_CASE("sigma_ins and sigma_act are valid states") {
  for (int n = 1; n <= 4; ++n) sigma_ins(0.4, n).check_invariants();
  sigma_act(0.7).check_invariants();
  sigma_phi().check_invariants();
  // sigma_act diagonal in the T basis with weight q on |T_01>
  const CMatrix tb = t_basis_two_qubit();
  const CMatrix d = tb.adjoint() * sigma_act(0.7).matrix() * tb;
  CHECK(std::abs(d(1, 1) - 0.7) < 1e-12);
  CHECK(std::abs(d(2, 2) - 0.3) < 1e-12);
}

TEST_CASE("StateSpec text round trip and validation") {
  for (const char* text : {"tau:f=0.85", "sigma_corr:q=0.6,r=0.05", "h:v=010", "t:v=01", "sigma_act:q=0.7",
                           "sigma_ins:q=0.3,n=3", "phi", "phi_prime", "sigma_phi", "singlet", "phi_plus",
                           "graph:n=3,edges=0-1/1-2"}) {
    const auto spec = StateSpec::parse(text);
    CHECK(spec.to_string() == text);
    const auto state = make_state(spec);
    CHECK(std::holds_alternative<Ket>(state) == spec.is_pure());
  }
  CHECK_THROWS_AS(StateSpec::parse("tau:f=1.2"), ValidationError);
  CHECK_THROWS_AS(StateSpec::parse("tau"), ValidationError);
  CHECK_THROWS_AS(StateSpec::parse("tau:f=0.5,q=1"), ValidationError);
  CHECK_THROWS_AS(StateSpec::parse("bogus"), ValidationError);
  CHECK_THROWS_AS(StateSpec::parse("h:v=012"), ValidationError);
  CHECK_THROWS_AS(StateSpec::parse("graph:n=2,edges=0-0"), ValidationError);
  CHECK_THROWS_AS(StateSpec::parse("sigma_corr:q=0.9,r=0.1"), ValidationError);
}
