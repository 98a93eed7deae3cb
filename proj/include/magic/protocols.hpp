#pragma once

// End-to-end protocol simulations with exhaustive branch exploration, each
// paired with its closed-form prediction.

#include "magic/core.hpp"
#include "magic/stabilizer.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace magic {

struct BranchRecord {
  /// Outcomes so far, e.g. "YY=+1,ZZ=-1"; the record describes the last one.
  std::string path;
  std::string observable;
  int outcome = 0;
  /// Conditional probability of this outcome given the parent path.
  double probability = 0.0;
  std::string correction;
};

struct Leaf {
  std::string path;
  double probability = 0.0;
  double fidelity = 0.0;
  bool postselected = false;
};

struct ProtocolReport {
  std::string protocol;
  std::vector<BranchRecord> branch_log;
  std::vector<Leaf> leaves;
  double success_probability = 0.0;
  DensityMatrix output = DensityMatrix::maximally_mixed(1);
  double simulated_fidelity = 0.0;
  std::optional<double> closed_form_fidelity;
  std::optional<double> agreement;
  std::map<std::string, double> metrics;
  std::map<std::string, std::vector<double>> series;
  std::vector<std::string> notes;

  /// Product of conditional probabilities along `leaf_path`.
  double path_probability(const std::string& leaf_path) const;
};

enum class CatalysisVariant { PURE, MIXED };
enum class InterconvertDirection { TO_MIXED, TO_PURE };

ProtocolReport run_catalysis(CatalysisVariant variant);
ProtocolReport sigma_phi_interconvert(InterconvertDirection direction);

/// q f / (q f + (1-q)(1-f))
double activation_fidelity(double q, double f);
/// q f_st / (q f_st + (1-q)(1-f_st))
double single_qubit_reduction_fidelity(double q);
/// q (9+sqrt3)/12 + (1-q)(9-sqrt3)/12
double equator_mixture_fidelity(double q);

ProtocolReport run_activation(double q, double f);

/// The 24 single-qubit Clifford rotations modulo phase, identity first.
const std::vector<CMatrix>& single_qubit_cliffords();

struct ReductionEntry {
  std::size_t code_index = 0;
  std::string code;
  double probability = 0.0;
  double best_fidelity = 0.0;
  int best_frame = -1;
};

/// Every (2,1) code and every Clifford decoding frame; the report's fidelity is the best over all.
ProtocolReport reduction_survey(const DensityMatrix& rho, std::vector<ReductionEntry>* table = nullptr);
/// reduction_survey of sigma(q) with the single-qubit closed form attached.
ProtocolReport reduction_survey_activator(double q, std::vector<ReductionEntry>* table = nullptr);

/// [1 + (f_st/f)^{n-1}(sqrt3 - 1)]^{-1}
double asymptotic_fidelity_printed(double f, int n);
/// Same recurrence with the identity component left maximally mixed: (1 + X/2)/(1 + X).
double asymptotic_fidelity_recurrence(double f, int n);

ProtocolReport run_asymptotic(double f, int n);

struct TransferStep {
  std::array<std::array<double, 2>, 2> matrix{};
  double mu1 = 0.0;
  double mu2 = 0.0;
  std::array<double, 2> dominant_eigenvector{};
};

TransferStep transfer_step(double q, double r);
/// Fidelity of qubit B after measuring A of sigma(q,r) with +1.
double daisy_f0(double q, double r);
/// f_1 .. f_k by the transfer recurrence.
std::vector<double> daisy_recurrence(double q, double r, int links);

struct DaisyLimit {
  /// 1/(1 + tan(atan2(2r, 2(r+q)-1)/2)): the dominant-eigenvector fidelity.
  double value = 0.0;
  /// The arctan form with a plain quotient; NaN when 2(r+q) = 1.
  double printed_value = 0.0;
  /// Set when 2(r+q) - 1 vanishes and the plain quotient is undefined.
  bool branch_marker = false;
};

DaisyLimit daisy_limit(double q, double r);

/// Links 1..n-1 by recurrence; the first two also by dense sliding-window simulation.
ProtocolReport run_daisy_chain(double q, double r, int n);

enum class PhaseLabel { STABILIZER, UNIVERSAL, OPEN };

struct PhaseClass {
  PhaseLabel label = PhaseLabel::OPEN;
  /// max(f_inf, 1 - f_inf): a local Clifford exchanges tau_0 and tau_1.
  double f_limit = 0.0;
  bool hull_member = false;
  double hull_slack = 0.0;
};

std::string phase_label_name(PhaseLabel l);
PhaseClass classify_phase(double q, double r);

struct TwirlResult {
  DensityMatrix state;
  double q = 0.0;
  double r = 0.0;
};

/// Exact average over T^a (x) T^b then over {1, (HY)^dag_A SWAP (HY)_A}.
TwirlResult twirl(const DensityMatrix& rho);

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2.
double uhlmann_fidelity(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace magic
