#pragma once

// Dense state-vector / density-matrix substrate: kets, density matrices,
// unitaries, signed Pauli words and projective Pauli measurement.
//
// Qubit q of an n-qubit register corresponds to bit (n - 1 - q) of a basis
// index, i.e. qubit 0 is the leftmost tensor factor.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace magic {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxQubits = 12;
inline constexpr double kMatrixTol = 1e-10;
inline constexpr double kScalarTol = 1e-12;
inline constexpr double kZeroProbability = 1e-14;

/// A caller supplied arguments outside an operation's contract.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An internal invariant did not hold; indicates a bug or numerical breakdown.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

std::size_t dim_for(int num_qubits);

class Ket {
 public:
  /// Requires unit norm within kScalarTol.
  Ket(int num_qubits, CVector amplitudes);

  /// Rescales to unit norm; throws on a zero vector.
  static Ket normalized(int num_qubits, CVector amplitudes);
  static Ket basis(int num_qubits, std::size_t index);

  int num_qubits() const { return n_; }
  std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }
  const CVector& amplitudes() const { return amp_; }
  cplx operator[](std::size_t i) const { return amp_(static_cast<Eigen::Index>(i)); }

  Ket tensor(const Ket& other) const;
  cplx inner(const Ket& other) const;  // <this|other>

  /// Same ket with the first nonzero amplitude made real positive.
  Ket canonical_phase() const;

 private:
  int n_;
  CVector amp_;
};

class DensityMatrix {
 public:
  /// Normalized state: Hermitian within kMatrixTol and unit trace within kScalarTol.
  DensityMatrix(int num_qubits, CMatrix entries);

  /// Hermitian but trace unconstrained; flagged as unnormalized.
  static DensityMatrix unnormalized(int num_qubits, CMatrix entries);
  static DensityMatrix from_ket(const Ket& ket);
  static DensityMatrix maximally_mixed(int num_qubits);

  int num_qubits() const { return n_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  cplx operator()(std::size_t r, std::size_t c) const {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  bool is_normalized() const { return normalized_; }

  double trace() const;
  DensityMatrix normalize() const;
  DensityMatrix tensor(const DensityMatrix& other) const;

  /// <psi|rho|psi>
  double fidelity(const Ket& psi) const;
  std::vector<double> eigenvalues() const;
  double min_eigenvalue() const;

  /// Full invariant check, including the eigenvalue bound; throws InvariantError.
  void check_invariants(double tol = kMatrixTol) const;

  DensityMatrix operator+(const DensityMatrix& other) const;
  DensityMatrix scaled(double factor) const;

 private:
  DensityMatrix(int num_qubits, CMatrix entries, bool normalized);

  int n_;
  CMatrix m_;
  bool normalized_;
};

/// Convex combination sum_i w_i rho_i; weights need not sum to one.
DensityMatrix mix(std::span<const double> weights, std::span<const DensityMatrix> states);

class Unitary {
 public:
  /// Requires U U^dagger = I within kMatrixTol.
  Unitary(int num_qubits, CMatrix entries);
  static Unitary identity(int num_qubits);

  int num_qubits() const { return n_; }
  const CMatrix& matrix() const { return m_; }
  Unitary adjoint() const;
  Unitary operator*(const Unitary& other) const;
  Ket apply(const Ket& ket) const;

 private:
  int n_;
  CMatrix m_;
};

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Signed Pauli word i^k P_0 (x) ... (x) P_{n-1}.
class PauliString {
 public:
  PauliString(int phase_exponent, std::vector<Pauli> letters);

  /// Accepts an optional sign prefix (+, -, i, +i, -i) followed by letters I/X/Y/Z.
  static PauliString parse(std::string_view text);
  static PauliString identity(int num_qubits);
  static PauliString single(int num_qubits, int qubit, Pauli p);
  /// Letters from a base-4 index, qubit 0 most significant digit (0=I,1=X,2=Y,3=Z).
  static PauliString from_index(int num_qubits, std::size_t index);
  std::size_t index() const;

  int num_qubits() const { return static_cast<int>(letters_.size()); }
  int phase_exponent() const { return phase_; }
  cplx phase() const;
  std::span<const Pauli> letters() const { return letters_; }
  Pauli operator[](int q) const { return letters_[static_cast<std::size_t>(q)]; }

  int weight() const;
  bool is_hermitian() const { return phase_ % 2 == 0; }
  bool is_identity_up_to_phase() const { return weight() == 0; }
  bool commutes_with(const PauliString& other) const;
  bool equal_up_to_phase(const PauliString& other) const;

  PauliString operator*(const PauliString& other) const;
  PauliString operator-() const;
  PauliString with_phase(int phase_exponent) const;
  /// Embeds this word on `targets` of an n-qubit register.
  PauliString embed(int num_qubits, std::span<const int> targets) const;

  std::uint32_t x_mask() const;
  std::uint32_t z_mask() const;

  CMatrix matrix() const;
  std::string to_string() const;

  bool operator==(const PauliString& other) const = default;

 private:
  int phase_;  // exponent of i, in [0, 4)
  std::vector<Pauli> letters_;
};

/// P * M for a dense matrix whose row count is 2^P.num_qubits().
CMatrix pauli_left(const PauliString& p, const CMatrix& m);
/// M * P.
CMatrix pauli_right(const CMatrix& m, const PauliString& p);
/// tr(P M).
cplx pauli_trace(const PauliString& p, const CMatrix& m);
/// Real expectation tr(P rho) for Hermitian P.
double expectation(const DensityMatrix& rho, const PauliString& p);

enum class Gate { H, S, X, Y, Z, SQRT_X, T_FACET, CNOT, SWAP };

Gate parse_gate(std::string_view name);
std::string gate_name(Gate g);
int gate_arity(Gate g);
/// The 2x2 or 4x4 matrix of a gate on its own targets.
CMatrix gate_matrix(Gate g);

Unitary build_gate(Gate g, std::span<const int> targets, int num_qubits);
Unitary build_gate(std::string_view name, std::span<const int> targets, int num_qubits);
/// Embeds an arbitrary 2^k x 2^k operator on k target qubits.
Unitary embed_unitary(const CMatrix& local, std::span<const int> targets, int num_qubits);

/// U rho U^dagger with a full-register unitary.
DensityMatrix evolve(const DensityMatrix& rho, const Unitary& u);
/// U rho U^dagger applying a local operator directly on `targets`.
DensityMatrix apply_local(const DensityMatrix& rho, const CMatrix& local, std::span<const int> targets);
Ket apply_local(const Ket& ket, const CMatrix& local, std::span<const int> targets);
DensityMatrix apply_gate(const DensityMatrix& rho, Gate g, std::span<const int> targets);
DensityMatrix apply_pauli(const DensityMatrix& rho, const PauliString& p);

struct MeasurementBranch {
  int outcome;         // +1 or -1
  double probability;  // tr of the projected state
  /// Normalized post-measurement state; empty marks a zero-probability branch.
  std::optional<DensityMatrix> post_state;
};

/// Projective measurement of a Hermitian Pauli observable; index 0 is the +1 branch.
std::array<MeasurementBranch, 2> measure_pauli(const DensityMatrix& rho, const PauliString& p);

/// Unnormalized (1 + s P)/2 rho (1 + s P)/2.
DensityMatrix project_pauli(const DensityMatrix& rho, const PauliString& p, int outcome);

/// Reduced state on `keep` (kept qubits retain their relative order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

/// True iff U maps each single-qubit X and Z generator to a phase times a Pauli word.
bool is_clifford(const Unitary& u, double tol = 1e-9);

/// Coefficients c_j = tr(sigma_j M) / 2^n over all 4^n unsigned Pauli words
/// in PauliString::from_index order.
std::vector<cplx> pauli_decomposition(const CMatrix& m, int num_qubits);

}  // namespace magic
