#pragma once

// Exhaustive stabilizer machinery for n <= 3: pure stabilizer states, code
// projectors, mixed-stabilizer hull membership and codespace reduction.

#include "magic/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace magic {

inline constexpr int kMaxEnumQubits = 3;
inline constexpr double kHullTol = 1e-7;

struct StabilizerCode {
  int n = 0;
  int m = 0;
  /// n - m independent commuting Hermitian generators.
  std::vector<PauliString> generators;
  /// Canonical logical pair, attached when m = 1.
  std::optional<PauliString> logical_z;
  std::optional<PauliString> logical_x;

  /// 2^{m-n} sum over the stabilizer group, computed as prod_j (1 + g_j)/2.
  CMatrix projector() const;
  /// Throws InvariantError on a malformed code.
  void check_invariants() const;
  std::string to_string() const;
};

/// Code with generators +Z on qubits 0..n-m-1 and (when m = 1) logical Z/X on qubit n-1.
StabilizerCode computational_code(int n, int m);
/// Attaches the first (lowest Pauli-index) valid logical pair to a one-logical-qubit code.
StabilizerCode with_canonical_logicals(StabilizerCode code);

/// Complete duplicate-free list, phase canonicalized; cached after the first call.
const std::vector<Ket>& enumerate_pure_stabilizers(int n);
/// All distinct rank-2^m stabilizer projectors; cached after the first call.
const std::vector<StabilizerCode>& enumerate_code_projectors(int n, int m);

/// Number of k-dimensional isotropic subspaces of F_2^{2n} seen by the enumerator.
std::size_t isotropic_subspace_count(int n, int k);

struct HullResult {
  bool member = false;
  /// Convex weights over enumerate_pure_stabilizers(n) when member.
  std::vector<double> weights;
  /// Coefficients y_j of the functional sum_j y_j tr(sigma_j .) when not member.
  std::vector<double> certificate;
  /// Not member: y.b - max_i y.A_i re-evaluated over every enumerated state.
  /// Member: largest absolute residual of the Pauli expectations.
  double slack = 0.0;
  /// Certificate re-verification succeeded with slack > kHullTol.
  bool verified = false;
};

HullResult hull_membership(const DensityMatrix& rho);

struct Reduction {
  /// Normalized single-qubit output; empty marks a zero-probability projection.
  std::optional<DensityMatrix> output;
  double probability = 0.0;
};

/// Projects onto the code space and decodes through (logical_z, logical_x).
Reduction codespace_reduce(const DensityMatrix& state, const StabilizerCode& code);

struct OverlapReport {
  int n = 0;
  int m = 0;
  double max_value = 0.0;
  StabilizerCode argmax_code;
  std::size_t codes_searched = 0;
  /// tr(Pi tau_0^{(x)n}) of computational_code(n, m).
  double computational_value = 0.0;
};

/// max over rank-2^m stabilizer projectors Pi of tr(Pi tau_0^{(x)n}).
OverlapReport max_code_overlap(int n, int m);

}  // namespace magic
