#include "doctest.h"

#include "magic/protocols.hpp"
#include "magic/random.hpp"
#include "magic/states.hpp"

#include <cmath>
#include <numbers>

using namespace magic;

namespace {

const double kFst = (1.0 + 1.0 / std::sqrt(3.0)) / 2.0;

void check_tree(const ProtocolReport& rep) {
  double total = 0.0;
  for (const auto& leaf : rep.leaves) {
    total += leaf.probability;
    CHECK(std::abs(rep.path_probability(leaf.path) - leaf.probability) < 1e-12);
    CHECK(leaf.fidelity >= -1e-12);
    CHECK(leaf.fidelity <= 1.0 + 1e-12);
  }
  CHECK(std::abs(total - 1.0) < 1e-10);
  // siblings sum to one
  std::map<std::string, double> by_parent;
  for (const auto& rec : rep.branch_log) {
    const auto cut = rec.path.rfind(',');
    by_parent[cut == std::string::npos ? "" : rec.path.substr(0, cut)] += rec.probability;
  }
  for (const auto& [parent, sum] : by_parent) CHECK(std::abs(sum - 1.0) < 1e-10);
}

// <Psi-|_{BC} (sigma_act(q) (x) tau(f)) |Psi->_{BC}, written out over T-basis populations
double activation_oracle(double q, double f) {
  // only tau_{0,1,0} and tau_{1,0,1} survive the singlet projection, each with weight 1/2
  const double keep0 = q * f;
  const double keep1 = (1.0 - q) * (1.0 - f);
  return keep0 / (keep0 + keep1);
}

// f_inf by power iteration on M, independent of the trigonometric closed form
double power_limit(double q, double r) {
  double a = 0.5, b = 0.5;
  for (int i = 0; i < 5000; ++i) {
    const double na = q * a + r * b;
    const double nb = r * a + (1.0 - q - 2.0 * r) * b;
    a = na / (na + nb);
    b = nb / (na + nb);
  }
  return a;
}

}  // namespace

TEST_CASE("catalysis returns the catalyst and a perfect H state on every branch") {
  for (auto variant : {CatalysisVariant::PURE, CatalysisVariant::MIXED}) {
    const auto rep = run_catalysis(variant);
    REQUIRE(rep.leaves.size() == 4);
    for (const auto& leaf : rep.leaves) {
      CHECK(std::abs(leaf.probability - 0.25) < 1e-12);
      CHECK(std::abs(leaf.fidelity - 1.0) < 1e-10);
    }
    CHECK(std::abs(rep.simulated_fidelity - 1.0) < 1e-10);
    CHECK(std::abs(rep.success_probability - 1.0) < 1e-12);
    check_tree(rep);
  }
}

TEST_CASE("sigma_phi interconversion") {
  const auto mixed = sigma_phi_interconvert(InterconvertDirection::TO_MIXED);
  CHECK(mixed.metrics.at("max_abs_deviation") < 1e-12);
  check_tree(mixed);
  const auto pure = sigma_phi_interconvert(InterconvertDirection::TO_PURE);
  CHECK(std::abs(pure.simulated_fidelity - 1.0) < 1e-10);
  CHECK(std::abs(pure.metrics.at("phi_branch_probability") - 0.5) < 1e-12);
  CHECK(std::abs(pure.metrics.at("phi_yyy_expectation") - pure.metrics.at("phi_outcome")) < 1e-10);
  for (const auto& leaf : pure.leaves) CHECK(std::abs(leaf.fidelity - 1.0) < 1e-7);
  check_tree(pure);
}

TEST_CASE("activation example and closed form") {
  const auto rep = run_activation(0.75, 0.85);
  CHECK(std::abs(rep.simulated_fidelity - 17.0 / 18.0) < 1e-12);
  CHECK(std::abs(rep.success_probability - rep.metrics.at("closed_form_success")) < 1e-12);
  check_tree(rep);
  // q = 1/2 leaves f unchanged
  for (double f : {0.8, 0.9, 1.0}) CHECK(std::abs(run_activation(0.5, f).simulated_fidelity - f) < 1e-12);
  CHECK_THROWS_AS(run_activation(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(run_activation(1.2, 0.9), ValidationError);
}

TEST_CASE("property: activation matches its oracle over a 20x20 interior grid") {
  for (int i = 1; i <= 20; ++i) {
    const double q = 0.5 + 0.5 * i / 21.0;
    for (int j = 1; j <= 20; ++j) {
      const double f = kFst + (1.0 - kFst) * j / 21.0;
      const auto rep = run_activation(q, f);
      CHECK(std::abs(rep.simulated_fidelity - activation_oracle(q, f)) < 1e-10);
      CHECK(rep.simulated_fidelity > f);
      CHECK(rep.notes.empty());
    }
  }
}

TEST_CASE("single-qubit Cliffords") {
  const auto& group = single_qubit_cliffords();
  REQUIRE(group.size() == 24);
  for (const auto& c : group) CHECK(is_clifford(Unitary(1, c)));
}

TEST_CASE("reduction survey of the activator") {
  for (double q : {0.55, 0.7, 0.9}) {
    std::vector<ReductionEntry> table;
    const auto rep = reduction_survey_activator(q, &table);
    CHECK(table.size() == 30);
    const double f2 = q * kFst / (q * kFst + (1.0 - q) * (1.0 - kFst));
    CHECK(std::abs(rep.simulated_fidelity - f2) < 1e-10);
    CHECK(rep.metrics.at("best_code_weight") == 1.0);
    // odd-parity branch: best over frames is (3+sqrt3)/12 + q/2, below the equator mixture and f''
    const double odd = (3.0 + std::sqrt(3.0)) / 12.0 + q / 2.0;
    CHECK(std::abs(rep.metrics.at("odd_parity_best_fidelity") - odd) < 1e-10);
    CHECK(rep.metrics.at("equator_mixture_fidelity") < f2);
    CHECK(odd < rep.metrics.at("equator_mixture_fidelity"));
    double total = 0.0;
    for (const auto& e : table) total += e.probability;
    CHECK(total > 0.0);
  }
  const auto rep = reduction_survey_activator(0.7);
  CHECK(std::abs(rep.metrics.at("gamma_plus_overlap") - (9.0 + std::sqrt(3.0)) / 12.0) < 1e-12);
  CHECK(std::abs(rep.metrics.at("gamma_minus_overlap") - (9.0 - std::sqrt(3.0)) / 12.0) < 1e-12);
  // pure |T_01>: the odd branch reaches (9+sqrt3)/12
  const auto pure = reduction_survey(tau_vec(std::array<int, 2>{0, 1}));
  CHECK(std::abs(pure.metrics.at("odd_parity_best_fidelity") - (9.0 + std::sqrt(3.0)) / 12.0) < 1e-10);
}

TEST_CASE("asymptotic activation follows the recurrence") {
  for (double f : {0.85, 0.9, 0.95, 1.0}) {
    double prev = 0.0;
    for (int n = 2; n <= 5; ++n) {
      const auto rep = run_asymptotic(f, n);
      CHECK(std::abs(rep.metrics.at("a_overlap") - f / 2.0) < 1e-12);
      CHECK(std::abs(rep.metrics.at("b_overlap") - 0.25) < 1e-12);
      CHECK(std::abs(rep.simulated_fidelity - asymptotic_fidelity_recurrence(f, n)) < 1e-10);
      CHECK(std::abs(rep.success_probability - rep.metrics.at("closed_form_success")) < 1e-12);
      CHECK(rep.simulated_fidelity > prev);
      prev = rep.simulated_fidelity;
      if (n <= 3) check_tree(rep);
    }
  }
  // at f = f_st the recurrence is flat
  for (int n = 2; n <= 5; ++n) {
    CHECK(std::abs(asymptotic_fidelity_recurrence(kFst, n) - asymptotic_fidelity_recurrence(kFst, 2)) < 1e-12);
  }
  CHECK(asymptotic_fidelity_recurrence(0.9, 80) > 0.999);
  CHECK_THROWS_AS(run_asymptotic(0.9, 6), ValidationError);
  CHECK_THROWS_AS(run_asymptotic(0.9, 1), ValidationError);
}

TEST_CASE("daisy chain limit and example") {
  const auto lim = daisy_limit(0.6, 0.05);
  CHECK(std::abs(lim.value - 0.86038) < 1e-5);
  CHECK_FALSE(lim.branch_marker);
  const auto t = transfer_step(0.6, 0.05);
  CHECK(std::abs(t.dominant_eigenvector[0] - lim.value) < 1e-12);
  // 2(r+q) = 1
  const auto mid = daisy_limit(0.3, 0.2);
  CHECK(mid.branch_marker);
  CHECK(std::abs(mid.value - 0.5) < 1e-12);
  CHECK(std::isnan(mid.printed_value));
  CHECK_THROWS_AS(run_daisy_chain(0.0, 0.0, 4), ValidationError);
  CHECK_THROWS_AS(run_daisy_chain(0.8, 0.2, 4), ValidationError);
}

TEST_CASE("property: daisy dense window matches the recurrence on a 10x10 grid") {
  for (int i = 0; i < 10; ++i) {
    const double q = 0.05 + 0.9 * i / 9.0;
    for (int j = 0; j < 10; ++j) {
      const double r = (1.0 - q) / 2.0 * (0.05 + 0.9 * j / 9.0);
      const auto rep = run_daisy_chain(q, r, 4);
      CHECK(rep.metrics.at("dense_recurrence_max_deviation") < 1e-10);
      CHECK(std::abs(rep.metrics.at("f_limit") - power_limit(q, r)) < 1e-9);
      check_tree(rep);
    }
  }
}

TEST_CASE("daisy convergence rate is mu2/mu1") {
  for (auto [q, r] : std::vector<std::pair<double, double>>{{0.6, 0.05}, {0.7, 0.1}, {0.8, 0.05}}) {
    const auto rep = run_daisy_chain(q, r, 40);
    REQUIRE(rep.metrics.at("convergence_points") >= 3);
    CHECK(rep.metrics.at("convergence_residual") < 1e-6);
    CHECK(std::abs(rep.metrics.at("f_final") - rep.metrics.at("f_limit")) < 1e-9);
  }
}

TEST_CASE("product point: transfer matrix has rank one and limit sqrt(q)") {
  for (double q : {0.3, 0.6, 0.8}) {
    const double r = std::sqrt(q) * (1.0 - std::sqrt(q));
    const auto t = transfer_step(q, r);
    CHECK(std::abs(t.mu2) < 1e-12);
    CHECK(std::abs(daisy_limit(q, r).value - std::sqrt(q)) < 1e-12);
  }
}

TEST_CASE("twirl") {
  const auto id = twirl(DensityMatrix::maximally_mixed(2));
  CHECK(std::abs(id.q - 0.25) < 1e-12);
  CHECK(std::abs(id.r - 0.25) < 1e-12);
  const auto fixed = twirl(sigma_corr(0.6, 0.05));
  CHECK((fixed.state.matrix() - sigma_corr(0.6, 0.05).matrix()).cwiseAbs().maxCoeff() < 1e-12);
  std::mt19937_64 rng(5);
  const CMatrix tb = t_basis_two_qubit();
  for (int trial = 0; trial < 100; ++trial) {
    const auto rho = random_density_matrix(2, rng);
    const auto out = twirl(rho);
    CHECK(std::abs(out.state.trace() - 1.0) < 1e-12);
    CHECK(out.state.min_eigenvalue() > -1e-12);
    const CMatrix d = tb.adjoint() * out.state.matrix() * tb;
    CHECK((d - CMatrix(d.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(d(0, 0) - d(3, 3)) < 1e-12);
    CHECK((out.state.matrix() - sigma_corr(out.q, out.r).matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((twirl(out.state).state.matrix() - out.state.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("phase classes") {
  CHECK(classify_phase(0.25, 0.25).label == PhaseLabel::STABILIZER);
  CHECK(classify_phase(0.6, 0.05).label == PhaseLabel::UNIVERSAL);
  CHECK(classify_phase(0.2, 0.1).label == PhaseLabel::OPEN);
  CHECK(phase_label_name(PhaseLabel::OPEN) == "OPEN");
  // stabilizer points never claim a limit beyond f_bk
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; 0.1 * i + 0.1 * j <= 1.0 + 1e-12; ++j) {
      const auto pc = classify_phase(0.1 * i, 0.05 * j);
      if (pc.label == PhaseLabel::STABILIZER) CHECK(pc.hull_member);
      if (pc.label == PhaseLabel::UNIVERSAL) CHECK(pc.f_limit > constants().f_bk);
    }
  }
}

TEST_CASE("uhlmann fidelity") {
  CHECK(std::abs(uhlmann_fidelity(tau(1.0), tau(1.0)) - 1.0) < 1e-10);
  CHECK(std::abs(uhlmann_fidelity(tau(1.0), tau(0.0))) < 1e-10);
  CHECK(std::abs(uhlmann_fidelity(tau(0.8), DensityMatrix::from_ket(t_ket(0))) - 0.8) < 1e-10);
}
