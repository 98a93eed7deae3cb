#pragma once

// Named states and constants: H/T eigenstates, noisy T states, the activator and
// correlated two-qubit families, the catalysis resource and graph states.

#include "magic/core.hpp"

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace magic {

struct PhysConstants {
  double f_st;   // (1 + 1/sqrt3)/2, stabilizer threshold for tau(f)
  double f_bk;   // (1 + sqrt(3/7))/2, five-qubit distillation threshold
  double beta;   // cos(2 beta) = 1/sqrt3
  double gamma;  // pi/6
};

PhysConstants constants();

/// H|H_0> = |H_0>, H|H_1> = -|H_1>.
Ket h_ket(int bit);
Ket h_ket(std::span<const int> bits);
/// T-facet eigenstates with Bloch vectors +-(1,1,1)/sqrt3.
Ket t_ket(int bit);
Ket t_ket(std::span<const int> bits);

/// f tau_0 + (1-f) tau_1.
DensityMatrix tau(double f);
/// |T_v><T_v|.
DensityMatrix tau_vec(std::span<const int> bits);
/// Activator q tau_{0,1} + (1-q) tau_{1,0}.
DensityMatrix sigma_act(double q);
/// q tau_0^{(x)n} + (1-q) 1/2^n.
DensityMatrix sigma_ins(double q, int n);
/// q tau_{1,0} + (1-q-2r) tau_{0,1} + r (tau_{0,0} + tau_{1,1}).
DensityMatrix sigma_corr(double q, double r);

/// (|H_000> + |H_111>)/norm, the catalysis resource.
Ket phi_catalyst();
/// (|000> + i|011> + i|101> + i|110>)/2.
Ket phi_prime();
/// (|phi><phi| + H^{(x)3}|phi><phi|H^{(x)3})/2.
DensityMatrix sigma_phi();
/// (|1,0> - |0,1>)/sqrt2.
Ket singlet();
/// (|0,0> + |1,1>)/sqrt2.
Ket phi_plus();

using Adjacency = std::vector<std::vector<int>>;
/// Generators k_j = X_j prod_{k in N(j)} Z_k.
std::vector<PauliString> graph_generators(const Adjacency& adj);
Ket graph_state(const Adjacency& adj);

enum class StateKind {
  H_VEC,
  T_VEC,
  TAU_F,
  SIGMA_ACT,
  SIGMA_INS,
  SIGMA_CORR,
  PHI_CATALYST,
  PHI_PRIME,
  SIGMA_PHI,
  SINGLET,
  PHI_PLUS,
  GRAPH_STATE,
};

/// Parameterised description of a named state with a canonical text form, e.g.
/// "tau:f=0.85", "sigma_corr:q=0.6,r=0.05", "h:v=010", "graph:n=3,edges=0-1/1-2".
struct StateSpec {
  StateKind kind = StateKind::TAU_F;
  std::vector<int> bits;
  double f = 1.0;
  double q = 0.0;
  double r = 0.0;
  int n = 1;
  Adjacency adjacency;

  static StateSpec parse(std::string_view text);
  std::string to_string() const;
  /// Throws ValidationError on out-of-range parameters.
  void validate() const;
  bool is_pure() const;
};

using State = std::variant<Ket, DensityMatrix>;

State make_state(const StateSpec& spec);
DensityMatrix as_density(const State& state);
int qubit_count(const State& state);

/// (tr rho X, tr rho Y, tr rho Z) of a single-qubit state.
std::array<double, 3> bloch(const DensityMatrix& rho);

double von_neumann_entropy(const DensityMatrix& rho);
/// S(A) + S(B) - S(AB) for the split {0..split-1} | {split..n-1}.
double mutual_information(const DensityMatrix& rho, int split);

/// Columns are |T_{a,b}> for (a,b) = 00, 01, 10, 11.
CMatrix t_basis_two_qubit();

}  // namespace magic
