#include "magic/stabilizer.hpp"

#include "magic/simplex.hpp"
#include "magic/states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

namespace magic {

namespace {

// Unsigned Pauli word packed as (x bits << n) | z bits, qubit q at bit n-1-q.
using Sym = std::uint32_t;

bool sym_commute(Sym a, Sym b, int n) {
  const Sym mask = (Sym{1} << n) - 1;
  const Sym ax = a >> n, az = a & mask, bx = b >> n, bz = b & mask;
  return (std::popcount((ax & bz) ^ (az & bx)) & 1) == 0;
}

PauliString sym_to_pauli(Sym v, int n, bool negative) {
  std::vector<Pauli> letters(static_cast<std::size_t>(n), Pauli::I);
  for (int q = 0; q < n; ++q) {
    const bool x = (v >> (n + n - 1 - q)) & 1u;
    const bool z = (v >> (n - 1 - q)) & 1u;
    letters[static_cast<std::size_t>(q)] = x ? (z ? Pauli::Y : Pauli::X) : (z ? Pauli::Z : Pauli::I);
  }
  return PauliString(negative ? 2 : 0, std::move(letters));
}

Sym pauli_to_sym(const PauliString& p) {
  const int n = p.num_qubits();
  Sym v = 0;
  for (int q = 0; q < n; ++q) {
    const Pauli l = p[q];
    if (l == Pauli::X || l == Pauli::Y) v |= Sym{1} << (n + n - 1 - q);
    if (l == Pauli::Z || l == Pauli::Y) v |= Sym{1} << (n - 1 - q);
  }
  return v;
}

// Reduced row echelon basis over GF(2), pivots on the highest set bit, sorted descending.
std::vector<Sym> rref(std::vector<Sym> rows) {
  std::vector<Sym> basis;
  for (Sym r : rows) {
    for (Sym b : basis) {
      if (r & std::bit_floor(b)) r ^= b;
    }
    if (r == 0) continue;
    const Sym lead = std::bit_floor(r);
    for (Sym& b : basis) {
      if (b & lead) b ^= r;
    }
    basis.push_back(r);
    std::sort(basis.begin(), basis.end(), std::greater<>());
  }
  return basis;
}

bool in_span(const std::vector<Sym>& basis_rref, Sym v) {
  for (Sym b : basis_rref) {
    if (v & std::bit_floor(b)) v ^= b;
  }
  return v == 0;
}

void check_range(int n, int m) {
  if (n < 1 || n > kMaxEnumQubits) throw ValidationError("stabilizer enumeration supports 1 <= n <= 3");
  if (m < 0 || m > n) throw ValidationError("logical qubit count must satisfy 0 <= m <= n");
}

// All k-dimensional isotropic subspaces as canonical RREF bases, in sorted order.
std::set<std::vector<Sym>> isotropic_subspaces(int n, int k) {
  std::set<std::vector<Sym>> out;
  const Sym limit = Sym{1} << (2 * n);
  std::vector<Sym> chosen;
  auto dfs = [&](auto&& self, Sym start) -> void {
    if (static_cast<int>(chosen.size()) == k) {
      out.insert(rref(chosen));
      return;
    }
    const auto span = rref(chosen);
    for (Sym v = start; v < limit; ++v) {
      if (in_span(span, v)) continue;
      bool ok = true;
      for (Sym c : chosen) ok = ok && sym_commute(c, v, n);
      if (!ok) continue;
      chosen.push_back(v);
      self(self, v + 1);
      chosen.pop_back();
    }
  };
  dfs(dfs, 1);
  return out;
}

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

CMatrix tau0_power(int n) {
  DensityMatrix t = tau(1.0);
  DensityMatrix out = t;
  for (int i = 1; i < n; ++i) out = out.tensor(t);
  return out.matrix();
}

}  // namespace

CMatrix StabilizerCode::projector() const {
  const auto d = static_cast<Eigen::Index>(dim_for(n));
  CMatrix p = CMatrix::Identity(d, d);
  for (const auto& g : generators) p = (p + pauli_left(g, p)) / 2.0;
  return p;
}

void StabilizerCode::check_invariants() const {
  if (static_cast<int>(generators.size()) != n - m) {
    throw InvariantError("stabilizer code has the wrong number of generators");
  }
  std::vector<Sym> syms;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const auto& g = generators[i];
    if (g.num_qubits() != n || !g.is_hermitian()) throw InvariantError("malformed stabilizer generator");
    for (std::size_t j = 0; j < i; ++j) {
      if (!g.commutes_with(generators[j])) throw InvariantError("stabilizer generators do not commute");
    }
    syms.push_back(pauli_to_sym(g));
  }
  if (static_cast<int>(rref(syms).size()) != n - m) {
    throw InvariantError("stabilizer generators are not independent");
  }
  const double tr = projector().trace().real();
  if (std::abs(tr - std::ldexp(1.0, m)) > 1e-9) throw InvariantError("code projector has the wrong rank");
  if (logical_z && logical_x) {
    for (const auto& g : generators) {
      if (!g.commutes_with(*logical_z) || !g.commutes_with(*logical_x)) {
        throw InvariantError("logical operator does not commute with the stabilizer");
      }
    }
    if (logical_z->commutes_with(*logical_x)) throw InvariantError("logical pair must anticommute");
  }
}

std::string StabilizerCode::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < generators.size(); ++i) os << (i ? "," : "") << generators[i].to_string();
  os << "]";
  if (logical_z && logical_x) os << " Z_L=" << logical_z->to_string() << " X_L=" << logical_x->to_string();
  return os.str();
}

StabilizerCode computational_code(int n, int m) {
  check_range(n, m);
  StabilizerCode code;
  code.n = n;
  code.m = m;
  for (int q = 0; q < n - m; ++q) code.generators.push_back(PauliString::single(n, q, Pauli::Z));
  if (m == 1) {
    code.logical_z = PauliString::single(n, n - 1, Pauli::Z);
    code.logical_x = PauliString::single(n, n - 1, Pauli::X);
  }
  return code;
}

StabilizerCode with_canonical_logicals(StabilizerCode code) {
  if (code.m != 1) throw ValidationError("canonical logical pair needs exactly one logical qubit");
  std::vector<Sym> gens;
  for (const auto& g : code.generators) gens.push_back(pauli_to_sym(g));
  const auto span = rref(gens);
  const int n = code.n;
  std::vector<Sym> candidates;
  for (std::size_t idx = 1; idx < dim_for(n) * dim_for(n); ++idx) {
    const Sym v = pauli_to_sym(PauliString::from_index(n, idx));
    bool ok = !in_span(span, v);
    for (Sym g : gens) ok = ok && sym_commute(g, v, n);
    if (ok) candidates.push_back(v);
  }
  if (candidates.empty()) throw InvariantError("no logical operators found");
  const Sym z = candidates.front();
  const auto x = std::find_if(candidates.begin(), candidates.end(),
                              [&](Sym c) { return !sym_commute(c, z, n); });
  if (x == candidates.end()) throw InvariantError("no anticommuting logical partner found");
  code.logical_z = sym_to_pauli(z, n, false);
  code.logical_x = sym_to_pauli(*x, n, false);
  return code;
}

std::size_t isotropic_subspace_count(int n, int k) {
  check_range(n, n - k);
  return isotropic_subspaces(n, k).size();
}

const std::vector<StabilizerCode>& enumerate_code_projectors(int n, int m) {
  check_range(n, m);
  static std::map<std::pair<int, int>, std::vector<StabilizerCode>> cache;
  std::lock_guard lock(cache_mutex());
  const auto key = std::make_pair(n, m);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  std::vector<StabilizerCode> codes;
  const int k = n - m;
  for (const auto& basis : isotropic_subspaces(n, k)) {
    for (unsigned signs = 0; signs < (1u << k); ++signs) {
      StabilizerCode code;
      code.n = n;
      code.m = m;
      for (int j = 0; j < k; ++j) {
        code.generators.push_back(sym_to_pauli(basis[static_cast<std::size_t>(j)], n, (signs >> j) & 1u));
      }
      if (m == 1) code = with_canonical_logicals(std::move(code));
      codes.push_back(std::move(code));
    }
  }
  return cache.emplace(key, std::move(codes)).first->second;
}

const std::vector<Ket>& enumerate_pure_stabilizers(int n) {
  check_range(n, 0);
  const auto& codes = enumerate_code_projectors(n, 0);
  static std::map<int, std::vector<Ket>> cache;
  std::lock_guard lock(cache_mutex());
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  std::vector<Ket> states;
  states.reserve(codes.size());
  for (const auto& code : codes) {
    const CMatrix p = code.projector();
    Eigen::Index best = 0;
    p.colwise().norm().maxCoeff(&best);
    states.push_back(Ket::normalized(n, p.col(best)).canonical_phase());
  }
  return cache.emplace(n, std::move(states)).first->second;
}

namespace {

// Rows: 4^n Pauli words; columns: enumerated pure stabilizer states.
const Eigen::MatrixXd& hull_matrix(int n) {
  const auto& states = enumerate_pure_stabilizers(n);
  static std::map<int, Eigen::MatrixXd> cache;
  std::lock_guard lock(cache_mutex());
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  const std::size_t rows = dim_for(n) * dim_for(n);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto rho = DensityMatrix::from_ket(states[i]);
    for (std::size_t j = 0; j < rows; ++j) {
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          expectation(rho, PauliString::from_index(n, j));
    }
  }
  return cache.emplace(n, std::move(a)).first->second;
}

}  // namespace

HullResult hull_membership(const DensityMatrix& rho) {
  const int n = rho.num_qubits();
  check_range(n, 0);
  if (!rho.is_normalized()) throw ValidationError("hull membership needs a normalized state");
  const Eigen::MatrixXd& a = hull_matrix(n);
  Eigen::VectorXd b(a.rows());
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    b(j) = expectation(rho, PauliString::from_index(n, static_cast<std::size_t>(j)));
  }

  const auto lp = phase_one(a, b, kHullTol);
  HullResult res;
  if (lp.feasible) {
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(lp.x.data(), static_cast<Eigen::Index>(lp.x.size()));
    res.slack = (a * w - b).cwiseAbs().maxCoeff();
    res.member = res.slack <= kHullTol && w.minCoeff() >= -1e-9 && std::abs(w.sum() - 1.0) <= kHullTol;
    res.weights = lp.x;
    res.verified = res.member;
    if (res.member) return res;
  }
  const Eigen::VectorXd y =
      Eigen::Map<const Eigen::VectorXd>(lp.dual.data(), static_cast<Eigen::Index>(lp.dual.size()));
  res.member = false;
  res.weights.clear();
  res.certificate = lp.dual;
  res.slack = y.dot(b) - (y.transpose() * a).maxCoeff();
  res.verified = res.slack > kHullTol;
  return res;
}

Reduction codespace_reduce(const DensityMatrix& state, const StabilizerCode& code) {
  if (code.m != 1 || !code.logical_z || !code.logical_x) {
    throw ValidationError("codespace reduction needs a one-logical-qubit code with a logical pair");
  }
  if (code.n != state.num_qubits()) throw ValidationError("code and state sizes differ");
  const CMatrix p = code.projector();
  const CMatrix projected = p * state.matrix() * p;
  Reduction out;
  out.probability = projected.trace().real();
  if (out.probability < kZeroProbability) {
    out.probability = std::max(0.0, out.probability);
    return out;
  }
  const PauliString& lz = *code.logical_z;
  const PauliString& lx = *code.logical_x;
  const PauliString ly = (lx * lz).with_phase(((lx * lz).phase_exponent() + 1) % 4);
  const double x = pauli_trace(lx, projected).real() / out.probability;
  const double y = pauli_trace(ly, projected).real() / out.probability;
  const double z = pauli_trace(lz, projected).real() / out.probability;
  CMatrix m(2, 2);
  m << (1.0 + z) / 2.0, cplx(x, -y) / 2.0, cplx(x, y) / 2.0, (1.0 - z) / 2.0;
  out.output = DensityMatrix(1, std::move(m));
  return out;
}

OverlapReport max_code_overlap(int n, int m) {
  check_range(n, m);
  const CMatrix target = tau0_power(n);
  const auto& codes = enumerate_code_projectors(n, m);
  OverlapReport rep;
  rep.n = n;
  rep.m = m;
  rep.codes_searched = codes.size();
  rep.max_value = -1.0;
  for (const auto& code : codes) {
    const double v = (code.projector() * target).trace().real();
    if (v > rep.max_value) {
      rep.max_value = v;
      rep.argmax_code = code;
    }
  }
  rep.computational_value = (computational_code(n, m).projector() * target).trace().real();
  return rep;
}

}  // namespace magic
