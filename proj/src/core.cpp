#include "magic/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace magic {

namespace {

void check_qubits(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw ValidationError("qubit count " + std::to_string(n) + " outside 1.." +
                          std::to_string(kMaxQubits));
  }
}

std::uint32_t qubit_bit(int n, int q) { return 1u << static_cast<unsigned>(n - 1 - q); }

void check_targets(std::span<const int> targets, int n) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= n) {
      throw ValidationError("target qubit " + std::to_string(targets[i]) + " out of range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) {
        throw ValidationError("target collision on qubit " + std::to_string(targets[i]));
      }
    }
  }
}

// Offsets of the 2^k sub-basis states spanned by `targets`, first target most significant.
std::vector<std::size_t> sub_offsets(std::span<const int> targets, int n) {
  const std::size_t k = targets.size();
  std::vector<std::size_t> off(std::size_t{1} << k, 0);
  for (std::size_t j = 0; j < off.size(); ++j) {
    for (std::size_t t = 0; t < k; ++t) {
      if ((j >> (k - 1 - t)) & 1u) off[j] |= qubit_bit(n, targets[t]);
    }
  }
  return off;
}

std::uint32_t mask_of(std::span<const int> targets, int n) {
  std::uint32_t m = 0;
  for (int t : targets) m |= qubit_bit(n, t);
  return m;
}

// In-place M <- L M where L acts on `targets`.
void left_apply(CMatrix& m, const CMatrix& local, std::span<const int> targets, int n) {
  const auto off = sub_offsets(targets, n);
  const std::uint32_t tmask = mask_of(targets, n);
  const std::size_t d = dim_for(n);
  const std::size_t sub = off.size();
  CMatrix block(static_cast<Eigen::Index>(sub), m.cols());
  for (std::size_t base = 0; base < d; ++base) {
    if (base & tmask) continue;
    for (std::size_t j = 0; j < sub; ++j) {
      block.row(static_cast<Eigen::Index>(j)) = m.row(static_cast<Eigen::Index>(base + off[j]));
    }
    const CMatrix out = local * block;
    for (std::size_t j = 0; j < sub; ++j) {
      m.row(static_cast<Eigen::Index>(base + off[j])) = out.row(static_cast<Eigen::Index>(j));
    }
  }
}

bool is_hermitian(const CMatrix& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

const cplx kI{0.0, 1.0};

cplx i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

std::size_t dim_for(int num_qubits) {
  check_qubits(num_qubits);
  return std::size_t{1} << static_cast<unsigned>(num_qubits);
}

// ---------------------------------------------------------------- Ket

Ket::Ket(int num_qubits, CVector amplitudes) : n_(num_qubits), amp_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amp_.size()) != dim_for(n_)) {
    throw ValidationError("ket length does not match qubit count");
  }
  if (std::abs(amp_.squaredNorm() - 1.0) > kScalarTol) {
    throw ValidationError("ket is not normalized");
  }
}

Ket Ket::normalized(int num_qubits, CVector amplitudes) {
  const double norm = amplitudes.norm();
  if (norm < kZeroProbability) throw ValidationError("cannot normalize a zero vector");
  return Ket(num_qubits, amplitudes / norm);
}

Ket Ket::basis(int num_qubits, std::size_t index) {
  const std::size_t d = dim_for(num_qubits);
  if (index >= d) throw ValidationError("basis index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(d));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return Ket(num_qubits, std::move(v));
}

Ket Ket::tensor(const Ket& other) const {
  check_qubits(n_ + other.n_);
  CVector out(amp_.size() * other.amp_.size());
  for (Eigen::Index i = 0; i < amp_.size(); ++i) {
    out.segment(i * other.amp_.size(), other.amp_.size()) = amp_(i) * other.amp_;
  }
  return Ket::normalized(n_ + other.n_, std::move(out));
}

cplx Ket::inner(const Ket& other) const {
  if (other.n_ != n_) throw ValidationError("inner product of kets with different sizes");
  return amp_.dot(other.amp_);  // Eigen's dot conjugates the left operand
}

Ket Ket::canonical_phase() const {
  for (Eigen::Index i = 0; i < amp_.size(); ++i) {
    const double mag = std::abs(amp_(i));
    if (mag > 1e-10) {
      const cplx rot = std::conj(amp_(i)) / mag;
      CVector v = amp_ * rot;
      v(i) = cplx(mag, 0.0);
      return Ket::normalized(n_, std::move(v));
    }
  }
  throw InvariantError("ket has no nonzero amplitude");
}

// ---------------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(int num_qubits, CMatrix entries, bool normalized)
    : n_(num_qubits), m_(std::move(entries)), normalized_(normalized) {
  const std::size_t d = dim_for(n_);
  if (static_cast<std::size_t>(m_.rows()) != d || static_cast<std::size_t>(m_.cols()) != d) {
    throw ValidationError("density matrix shape does not match qubit count");
  }
  if (!is_hermitian(m_, kMatrixTol)) throw ValidationError("density matrix is not Hermitian");
  if (normalized_ && std::abs(trace() - 1.0) > kScalarTol) {
    throw ValidationError("density matrix trace differs from 1");
  }
}

DensityMatrix::DensityMatrix(int num_qubits, CMatrix entries)
    : DensityMatrix(num_qubits, std::move(entries), true) {}

DensityMatrix DensityMatrix::unnormalized(int num_qubits, CMatrix entries) {
  return DensityMatrix(num_qubits, std::move(entries), false);
}

DensityMatrix DensityMatrix::from_ket(const Ket& ket) {
  return DensityMatrix(ket.num_qubits(), ket.amplitudes() * ket.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  const auto d = static_cast<Eigen::Index>(dim_for(num_qubits));
  return DensityMatrix(num_qubits, CMatrix::Identity(d, d) / static_cast<double>(d));
}

double DensityMatrix::trace() const { return m_.trace().real(); }

DensityMatrix DensityMatrix::normalize() const {
  const double t = trace();
  if (t < kZeroProbability) throw ValidationError("cannot normalize a zero-trace state");
  return DensityMatrix(n_, m_ / t);
}

DensityMatrix DensityMatrix::tensor(const DensityMatrix& other) const {
  check_qubits(n_ + other.n_);
  const Eigen::Index da = m_.rows();
  const Eigen::Index db = other.m_.rows();
  CMatrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = m_(i, j) * other.m_;
    }
  }
  return DensityMatrix(n_ + other.n_, std::move(out), normalized_ && other.normalized_);
}

double DensityMatrix::fidelity(const Ket& psi) const {
  if (psi.num_qubits() != n_) throw ValidationError("fidelity target has wrong size");
  return psi.amplitudes().dot(m_ * psi.amplitudes()).real();
}

std::vector<double> DensityMatrix::eigenvalues() const {
  const CMatrix herm = (m_ + m_.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double DensityMatrix::min_eigenvalue() const {
  const auto ev = eigenvalues();
  return *std::min_element(ev.begin(), ev.end());
}

void DensityMatrix::check_invariants(double tol) const {
  if (!is_hermitian(m_, tol)) throw InvariantError("density matrix lost Hermiticity");
  if (normalized_ && std::abs(trace() - 1.0) > std::max(tol, kScalarTol)) {
    throw InvariantError("density matrix trace drifted from 1");
  }
  if (min_eigenvalue() < -tol) throw InvariantError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::operator+(const DensityMatrix& other) const {
  if (other.n_ != n_) throw ValidationError("adding states of different sizes");
  return DensityMatrix(n_, m_ + other.m_, false);
}

DensityMatrix DensityMatrix::scaled(double factor) const {
  return DensityMatrix(n_, m_ * factor, false);
}

DensityMatrix mix(std::span<const double> weights, std::span<const DensityMatrix> states) {
  if (weights.size() != states.size() || states.empty()) {
    throw ValidationError("mix needs matching nonempty weight and state lists");
  }
  const int n = states.front().num_qubits();
  CMatrix acc = CMatrix::Zero(states.front().matrix().rows(), states.front().matrix().cols());
  double total = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].num_qubits() != n) throw ValidationError("mixing states of different sizes");
    acc += weights[i] * states[i].matrix();
    total += weights[i];
  }
  if (std::abs(total - 1.0) <= kScalarTol) return DensityMatrix(n, std::move(acc));
  return DensityMatrix::unnormalized(n, std::move(acc));
}

// ---------------------------------------------------------------- Unitary

Unitary::Unitary(int num_qubits, CMatrix entries) : n_(num_qubits), m_(std::move(entries)) {
  const auto d = static_cast<Eigen::Index>(dim_for(n_));
  if (m_.rows() != d || m_.cols() != d) throw ValidationError("unitary shape mismatch");
  if ((m_ * m_.adjoint() - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kMatrixTol) {
    throw ValidationError("matrix is not unitary");
  }
}

Unitary Unitary::identity(int num_qubits) {
  const auto d = static_cast<Eigen::Index>(dim_for(num_qubits));
  return Unitary(num_qubits, CMatrix::Identity(d, d));
}

Unitary Unitary::adjoint() const { return Unitary(n_, m_.adjoint()); }

Unitary Unitary::operator*(const Unitary& other) const {
  if (other.n_ != n_) throw ValidationError("composing unitaries of different sizes");
  return Unitary(n_, m_ * other.m_);
}

Ket Unitary::apply(const Ket& ket) const {
  if (ket.num_qubits() != n_) throw ValidationError("unitary/ket dimension mismatch");
  return Ket::normalized(n_, m_ * ket.amplitudes());
}

// ---------------------------------------------------------------- PauliString

PauliString::PauliString(int phase_exponent, std::vector<Pauli> letters)
    : phase_(((phase_exponent % 4) + 4) % 4), letters_(std::move(letters)) {
  if (letters_.empty()) throw ValidationError("Pauli string needs at least one letter");
  check_qubits(static_cast<int>(letters_.size()));
}

PauliString PauliString::parse(std::string_view text) {
  int phase = 0;
  std::size_t pos = 0;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    if (text[pos] == '-') phase = 2;
    ++pos;
  }
  if (pos < text.size() && text[pos] == 'i') {
    phase += 1;
    ++pos;
  }
  std::vector<Pauli> letters;
  for (; pos < text.size(); ++pos) {
    switch (text[pos]) {
      case 'I': case '_': letters.push_back(Pauli::I); break;
      case 'X': letters.push_back(Pauli::X); break;
      case 'Y': letters.push_back(Pauli::Y); break;
      case 'Z': letters.push_back(Pauli::Z); break;
      default:
        throw ValidationError("invalid Pauli letter '" + std::string(1, text[pos]) + "'");
    }
  }
  return PauliString(phase, std::move(letters));
}

PauliString PauliString::identity(int num_qubits) {
  check_qubits(num_qubits);
  return PauliString(0, std::vector<Pauli>(static_cast<std::size_t>(num_qubits), Pauli::I));
}

PauliString PauliString::single(int num_qubits, int qubit, Pauli p) {
  auto s = identity(num_qubits);
  if (qubit < 0 || qubit >= num_qubits) throw ValidationError("qubit out of range");
  s.letters_[static_cast<std::size_t>(qubit)] = p;
  return s;
}

PauliString PauliString::from_index(int num_qubits, std::size_t index) {
  check_qubits(num_qubits);
  std::vector<Pauli> letters(static_cast<std::size_t>(num_qubits));
  for (int q = num_qubits - 1; q >= 0; --q) {
    letters[static_cast<std::size_t>(q)] = static_cast<Pauli>(index & 3u);
    index >>= 2;
  }
  if (index != 0) throw ValidationError("Pauli index out of range");
  return PauliString(0, std::move(letters));
}

std::size_t PauliString::index() const {
  std::size_t idx = 0;
  for (Pauli p : letters_) idx = (idx << 2) | static_cast<std::size_t>(p);
  return idx;
}

cplx PauliString::phase() const { return i_power(phase_); }

int PauliString::weight() const {
  return static_cast<int>(std::count_if(letters_.begin(), letters_.end(),
                                        [](Pauli p) { return p != Pauli::I; }));
}

bool PauliString::commutes_with(const PauliString& other) const {
  if (other.num_qubits() != num_qubits()) throw ValidationError("Pauli size mismatch");
  int anti = 0;
  for (std::size_t q = 0; q < letters_.size(); ++q) {
    const Pauli a = letters_[q];
    const Pauli b = other.letters_[q];
    if (a != Pauli::I && b != Pauli::I && a != b) ++anti;
  }
  return anti % 2 == 0;
}

bool PauliString::equal_up_to_phase(const PauliString& other) const {
  return letters_ == other.letters_;
}

PauliString PauliString::operator*(const PauliString& other) const {
  if (other.num_qubits() != num_qubits()) throw ValidationError("Pauli size mismatch");
  int phase = phase_ + other.phase_;
  std::vector<Pauli> out(letters_.size());
  for (std::size_t q = 0; q < letters_.size(); ++q) {
    const int a = static_cast<int>(letters_[q]);
    const int b = static_cast<int>(other.letters_[q]);
    if (a == 0) {
      out[q] = other.letters_[q];
    } else if (b == 0) {
      out[q] = letters_[q];
    } else if (a == b) {
      out[q] = Pauli::I;
    } else {
      out[q] = static_cast<Pauli>(6 - a - b);
      phase += (((b - a) % 3 + 3) % 3 == 1) ? 1 : 3;  // XY = iZ cyclically
    }
  }
  return PauliString(phase, std::move(out));
}

PauliString PauliString::operator-() const { return PauliString(phase_ + 2, letters_); }

PauliString PauliString::with_phase(int phase_exponent) const {
  return PauliString(phase_exponent, letters_);
}

PauliString PauliString::embed(int num_qubits, std::span<const int> targets) const {
  if (targets.size() != letters_.size()) throw ValidationError("embed arity mismatch");
  check_targets(targets, num_qubits);
  auto out = identity(num_qubits).with_phase(phase_);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    out.letters_[static_cast<std::size_t>(targets[i])] = letters_[i];
  }
  return out;
}

std::uint32_t PauliString::x_mask() const {
  const int n = num_qubits();
  std::uint32_t m = 0;
  for (int q = 0; q < n; ++q) {
    const Pauli p = letters_[static_cast<std::size_t>(q)];
    if (p == Pauli::X || p == Pauli::Y) m |= qubit_bit(n, q);
  }
  return m;
}

std::uint32_t PauliString::z_mask() const {
  const int n = num_qubits();
  std::uint32_t m = 0;
  for (int q = 0; q < n; ++q) {
    const Pauli p = letters_[static_cast<std::size_t>(q)];
    if (p == Pauli::Z || p == Pauli::Y) m |= qubit_bit(n, q);
  }
  return m;
}

namespace {

// P|b> = action_phase(b) |b ^ x_mask>
struct PauliAction {
  std::uint32_t x;
  std::uint32_t z;
  cplx base;

  explicit PauliAction(const PauliString& p)
      : x(p.x_mask()), z(p.z_mask()), base(p.phase() * i_power(static_cast<int>(std::count(
                                                     p.letters().begin(), p.letters().end(),
                                                     Pauli::Y)))) {}

  cplx phase(std::size_t b) const {
    return (std::popcount(static_cast<std::uint32_t>(b) & z) & 1) ? -base : base;
  }
};

}  // namespace

CMatrix PauliString::matrix() const {
  const auto d = dim_for(num_qubits());
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const PauliAction act(*this);
  for (std::size_t b = 0; b < d; ++b) {
    m(static_cast<Eigen::Index>(b ^ act.x), static_cast<Eigen::Index>(b)) = act.phase(b);
  }
  return m;
}

std::string PauliString::to_string() const {
  static constexpr std::array<const char*, 4> prefix{"+", "+i", "-", "-i"};
  std::string s = prefix[static_cast<std::size_t>(phase_)];
  for (Pauli p : letters_) s += "IXYZ"[static_cast<int>(p)];
  return s;
}

CMatrix pauli_left(const PauliString& p, const CMatrix& m) {
  const auto d = dim_for(p.num_qubits());
  if (static_cast<std::size_t>(m.rows()) != d) throw ValidationError("Pauli/matrix size mismatch");
  const PauliAction act(p);
  CMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < d; ++r) {
    const std::size_t src = r ^ act.x;
    out.row(static_cast<Eigen::Index>(r)) = act.phase(src) * m.row(static_cast<Eigen::Index>(src));
  }
  return out;
}

CMatrix pauli_right(const CMatrix& m, const PauliString& p) {
  const auto d = dim_for(p.num_qubits());
  if (static_cast<std::size_t>(m.cols()) != d) throw ValidationError("Pauli/matrix size mismatch");
  const PauliAction act(p);
  CMatrix out(m.rows(), m.cols());
  for (std::size_t c = 0; c < d; ++c) {
    out.col(static_cast<Eigen::Index>(c)) = act.phase(c) * m.col(static_cast<Eigen::Index>(c ^ act.x));
  }
  return out;
}

cplx pauli_trace(const PauliString& p, const CMatrix& m) {
  const auto d = dim_for(p.num_qubits());
  if (static_cast<std::size_t>(m.rows()) != d) throw ValidationError("Pauli/matrix size mismatch");
  const PauliAction act(p);
  cplx acc = 0.0;
  for (std::size_t r = 0; r < d; ++r) {
    const std::size_t src = r ^ act.x;
    acc += act.phase(src) * m(static_cast<Eigen::Index>(src), static_cast<Eigen::Index>(r));
  }
  return acc;
}

double expectation(const DensityMatrix& rho, const PauliString& p) {
  if (!p.is_hermitian()) throw ValidationError("expectation needs a Hermitian Pauli");
  return pauli_trace(p, rho.matrix()).real();
}

std::vector<cplx> pauli_decomposition(const CMatrix& m, int num_qubits) {
  const std::size_t d = dim_for(num_qubits);
  const std::size_t count = d * d;
  std::vector<cplx> out(count);
  for (std::size_t j = 0; j < count; ++j) {
    out[j] = pauli_trace(PauliString::from_index(num_qubits, j), m) / static_cast<double>(d);
  }
  return out;
}

// ---------------------------------------------------------------- gates

Gate parse_gate(std::string_view name) {
  if (name == "H") return Gate::H;
  if (name == "S") return Gate::S;
  if (name == "X") return Gate::X;
  if (name == "Y") return Gate::Y;
  if (name == "Z") return Gate::Z;
  if (name == "SQRT_X") return Gate::SQRT_X;
  if (name == "T_FACET") return Gate::T_FACET;
  if (name == "CNOT") return Gate::CNOT;
  if (name == "SWAP") return Gate::SWAP;
  throw ValidationError("unknown gate '" + std::string(name) + "'");
}

std::string gate_name(Gate g) {
  switch (g) {
    case Gate::H: return "H";
    case Gate::S: return "S";
    case Gate::X: return "X";
    case Gate::Y: return "Y";
    case Gate::Z: return "Z";
    case Gate::SQRT_X: return "SQRT_X";
    case Gate::T_FACET: return "T_FACET";
    case Gate::CNOT: return "CNOT";
    case Gate::SWAP: return "SWAP";
  }
  throw InvariantError("unhandled gate");
}

int gate_arity(Gate g) { return (g == Gate::CNOT || g == Gate::SWAP) ? 2 : 1; }

CMatrix gate_matrix(Gate g) {
  using std::numbers::sqrt2;
  CMatrix m(2, 2);
  switch (g) {
    case Gate::H:
      m << 1.0 / sqrt2, 1.0 / sqrt2, 1.0 / sqrt2, -1.0 / sqrt2;
      return m;
    case Gate::S:
      m << 1.0, 0.0, 0.0, kI;
      return m;
    case Gate::X:
      m << 0.0, 1.0, 1.0, 0.0;
      return m;
    case Gate::Y:
      m << 0.0, -kI, kI, 0.0;
      return m;
    case Gate::Z:
      m << 1.0, 0.0, 0.0, -1.0;
      return m;
    case Gate::SQRT_X:
      // The square root of X that sends |H_0> to (|0> + e^{i pi/4}|1>)/sqrt2.
      m << cplx(0.5, -0.5), cplx(0.5, 0.5), cplx(0.5, 0.5), cplx(0.5, -0.5);
      return m;
    case Gate::T_FACET: {
      // 2pi/3 rotation about (1,1,1)/sqrt3, phased so that T|T_0> = e^{i pi/3}|T_0>.
      const double third = std::numbers::pi / 3.0;
      const cplx c = std::cos(third);
      const cplx s = -kI * std::sin(third) / std::numbers::sqrt3;
      CMatrix rot(2, 2);
      rot << c + s, s * cplx(1.0, -1.0), s * cplx(1.0, 1.0), c - s;
      return std::polar(1.0, 2.0 * third) * rot;
    }
    case Gate::CNOT: {
      CMatrix c = CMatrix::Zero(4, 4);
      c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
      return c;
    }
    case Gate::SWAP: {
      CMatrix s = CMatrix::Zero(4, 4);
      s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1.0;
      return s;
    }
  }
  throw InvariantError("unhandled gate");
}

Unitary embed_unitary(const CMatrix& local, std::span<const int> targets, int num_qubits) {
  const auto d = static_cast<Eigen::Index>(dim_for(num_qubits));
  check_targets(targets, num_qubits);
  if (local.rows() != (Eigen::Index{1} << targets.size()) || local.cols() != local.rows()) {
    throw ValidationError("local operator size does not match target count");
  }
  CMatrix full = CMatrix::Identity(d, d);
  left_apply(full, local, targets, num_qubits);
  return Unitary(num_qubits, std::move(full));
}

Unitary build_gate(Gate g, std::span<const int> targets, int num_qubits) {
  check_qubits(num_qubits);
  if (static_cast<int>(targets.size()) != gate_arity(g)) {
    throw ValidationError("gate " + gate_name(g) + " needs " + std::to_string(gate_arity(g)) +
                          " target(s)");
  }
  return embed_unitary(gate_matrix(g), targets, num_qubits);
}

Unitary build_gate(std::string_view name, std::span<const int> targets, int num_qubits) {
  return build_gate(parse_gate(name), targets, num_qubits);
}

DensityMatrix evolve(const DensityMatrix& rho, const Unitary& u) {
  if (u.num_qubits() != rho.num_qubits()) throw ValidationError("evolve dimension mismatch");
  CMatrix out = u.matrix() * rho.matrix() * u.matrix().adjoint();
  if (rho.is_normalized()) return DensityMatrix(rho.num_qubits(), std::move(out));
  return DensityMatrix::unnormalized(rho.num_qubits(), std::move(out));
}

DensityMatrix apply_local(const DensityMatrix& rho, const CMatrix& local,
                          std::span<const int> targets) {
  const int n = rho.num_qubits();
  check_targets(targets, n);
  if (local.rows() != (Eigen::Index{1} << targets.size())) {
    throw ValidationError("local operator size does not match target count");
  }
  CMatrix m = rho.matrix();
  left_apply(m, local, targets, n);
  CMatrix adj = m.adjoint();
  left_apply(adj, local, targets, n);
  CMatrix out = adj.adjoint();
  if (rho.is_normalized()) return DensityMatrix(n, std::move(out));
  return DensityMatrix::unnormalized(n, std::move(out));
}

Ket apply_local(const Ket& ket, const CMatrix& local, std::span<const int> targets) {
  const int n = ket.num_qubits();
  check_targets(targets, n);
  CMatrix v = ket.amplitudes();
  left_apply(v, local, targets, n);
  return Ket::normalized(n, v.col(0));
}

DensityMatrix apply_gate(const DensityMatrix& rho, Gate g, std::span<const int> targets) {
  if (static_cast<int>(targets.size()) != gate_arity(g)) {
    throw ValidationError("gate " + gate_name(g) + " arity mismatch");
  }
  return apply_local(rho, gate_matrix(g), targets);
}

DensityMatrix apply_pauli(const DensityMatrix& rho, const PauliString& p) {
  if (p.num_qubits() != rho.num_qubits()) throw ValidationError("Pauli/state size mismatch");
  CMatrix out = pauli_right(pauli_left(p, rho.matrix()), p.with_phase(-p.phase_exponent()));
  if (rho.is_normalized()) return DensityMatrix(rho.num_qubits(), std::move(out));
  return DensityMatrix::unnormalized(rho.num_qubits(), std::move(out));
}

// ---------------------------------------------------------------- measurement

DensityMatrix project_pauli(const DensityMatrix& rho, const PauliString& p, int outcome) {
  if (!p.is_hermitian()) throw ValidationError("measured Pauli must have phase +1 or -1");
  if (p.num_qubits() != rho.num_qubits()) throw ValidationError("Pauli/state size mismatch");
  if (outcome != 1 && outcome != -1) throw ValidationError("outcome must be +1 or -1");
  const CMatrix& m = rho.matrix();
  const CMatrix pm = pauli_left(p, m);
  const CMatrix mp = pauli_right(m, p);
  const CMatrix pmp = pauli_right(pm, p);
  const double s = outcome;
  CMatrix out = (m + s * pm + s * mp + pmp) / 4.0;
  out = (out + out.adjoint()).eval() / 2.0;
  return DensityMatrix::unnormalized(rho.num_qubits(), std::move(out));
}

std::array<MeasurementBranch, 2> measure_pauli(const DensityMatrix& rho, const PauliString& p) {
  std::array<MeasurementBranch, 2> branches{};
  const double total = rho.trace();
  for (int k = 0; k < 2; ++k) {
    const int outcome = k == 0 ? 1 : -1;
    DensityMatrix proj = project_pauli(rho, p, outcome);
    const double prob = proj.trace() / total;
    branches[static_cast<std::size_t>(k)].outcome = outcome;
    branches[static_cast<std::size_t>(k)].probability = std::clamp(prob, 0.0, 1.0);
    if (prob > kZeroProbability) {
      branches[static_cast<std::size_t>(k)].post_state = proj.normalize();
    }
  }
  return branches;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const int n = rho.num_qubits();
  if (keep.empty()) throw ValidationError("partial_trace needs a nonempty keep set");
  check_targets(keep, n);
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  std::vector<int> env;
  for (int q = 0; q < n; ++q) {
    if (!std::binary_search(kept.begin(), kept.end(), q)) env.push_back(q);
  }
  const int k = static_cast<int>(kept.size());
  const auto keep_off = sub_offsets(kept, n);
  const auto env_off = env.empty() ? std::vector<std::size_t>{0} : sub_offsets(env, n);
  const auto dk = static_cast<Eigen::Index>(keep_off.size());
  CMatrix out = CMatrix::Zero(dk, dk);
  const CMatrix& m = rho.matrix();
  for (Eigen::Index a = 0; a < dk; ++a) {
    for (Eigen::Index b = 0; b < dk; ++b) {
      cplx acc = 0.0;
      for (std::size_t e : env_off) {
        acc += m(static_cast<Eigen::Index>(keep_off[static_cast<std::size_t>(a)] + e),
                 static_cast<Eigen::Index>(keep_off[static_cast<std::size_t>(b)] + e));
      }
      out(a, b) = acc;
    }
  }
  if (rho.is_normalized()) return DensityMatrix(k, std::move(out));
  return DensityMatrix::unnormalized(k, std::move(out));
}

bool is_clifford(const Unitary& u, double tol) {
  const int n = u.num_qubits();
  const CMatrix& m = u.matrix();
  for (int q = 0; q < n; ++q) {
    for (Pauli g : {Pauli::X, Pauli::Z}) {
      const CMatrix image = m * PauliString::single(n, q, g).matrix() * m.adjoint();
      const auto coeffs = pauli_decomposition(image, n);
      int large = 0;
      for (const cplx& c : coeffs) {
        const double mag = std::abs(c);
        if (mag > tol && std::abs(mag - 1.0) > tol) return false;
        if (mag > tol) ++large;
      }
      if (large != 1) return false;
    }
  }
  return true;
}

}  // namespace magic
