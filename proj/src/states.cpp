#include "magic/states.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace magic {

namespace {

const cplx kI{0.0, 1.0};

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(name) + " must lie in [0,1]");
  }
}

void check_bits(std::span<const int> bits) {
  if (bits.empty()) throw ValidationError("bit vector must be nonempty");
  for (int b : bits) {
    if (b != 0 && b != 1) throw ValidationError("bit vector entries must be 0 or 1");
  }
}

Ket product_of(std::span<const int> bits, Ket (*single)(int)) {
  check_bits(bits);
  Ket out = single(bits[0]);
  for (std::size_t i = 1; i < bits.size(); ++i) out = out.tensor(single(bits[i]));
  return out;
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("state parameter '" + std::string(key) + "' is not a number");
  }
  return v;
}

std::vector<int> parse_bits(std::string_view text) {
  std::vector<int> bits;
  for (char c : text) {
    if (c != '0' && c != '1') throw ValidationError("bit vector must contain only 0/1");
    bits.push_back(c - '0');
  }
  return bits;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

}  // namespace

PhysConstants constants() {
  const double inv_sqrt3 = 1.0 / std::numbers::sqrt3;
  return {
      (1.0 + inv_sqrt3) / 2.0,
      (1.0 + std::sqrt(3.0 / 7.0)) / 2.0,
      std::acos(inv_sqrt3) / 2.0,
      std::numbers::pi / 6.0,
  };
}

Ket h_ket(int bit) {
  const double c = std::cos(std::numbers::pi / 8.0);
  const double s = std::sin(std::numbers::pi / 8.0);
  CVector v(2);
  if (bit == 0) {
    v << c, s;
  } else if (bit == 1) {
    // Phase chosen so that SQRT_X|H_j> = (|0> + (-1)^j e^{i pi/4}|1>)/sqrt2 up to a common factor.
    v << kI * s, -kI * c;
  } else {
    throw ValidationError("H eigenstate label must be 0 or 1");
  }
  return Ket(1, std::move(v));
}

Ket h_ket(std::span<const int> bits) { return product_of(bits, static_cast<Ket (*)(int)>(h_ket)); }

Ket t_ket(int bit) {
  const double beta = constants().beta;
  const cplx w = std::polar(1.0, std::numbers::pi / 4.0);
  CVector v(2);
  if (bit == 0) {
    v << std::cos(beta), w * std::sin(beta);
  } else if (bit == 1) {
    v << std::sin(beta), -w * std::cos(beta);
  } else {
    throw ValidationError("T eigenstate label must be 0 or 1");
  }
  return Ket::normalized(1, std::move(v));
}

Ket t_ket(std::span<const int> bits) { return product_of(bits, static_cast<Ket (*)(int)>(t_ket)); }

DensityMatrix tau(double f) {
  check_unit(f, "fidelity f");
  const std::array<DensityMatrix, 2> parts{DensityMatrix::from_ket(t_ket(0)),
                                           DensityMatrix::from_ket(t_ket(1))};
  const std::array<double, 2> w{f, 1.0 - f};
  return mix(w, parts).normalize();
}

DensityMatrix tau_vec(std::span<const int> bits) { return DensityMatrix::from_ket(t_ket(bits)); }

DensityMatrix sigma_act(double q) {
  check_unit(q, "weight q");
  const std::array<int, 2> b01{0, 1};
  const std::array<int, 2> b10{1, 0};
  const std::array<DensityMatrix, 2> parts{tau_vec(b01), tau_vec(b10)};
  const std::array<double, 2> w{q, 1.0 - q};
  return mix(w, parts).normalize();
}

DensityMatrix sigma_ins(double q, int n) {
  check_unit(q, "weight q");
  if (n < 1 || n > kMaxQubits) throw ValidationError("sigma_ins qubit count out of range");
  DensityMatrix pure = DensityMatrix::from_ket(t_ket(0));
  for (int i = 1; i < n; ++i) pure = pure.tensor(DensityMatrix::from_ket(t_ket(0)));
  const std::array<DensityMatrix, 2> parts{pure, DensityMatrix::maximally_mixed(n)};
  const std::array<double, 2> w{q, 1.0 - q};
  return mix(w, parts).normalize();
}

DensityMatrix sigma_corr(double q, double r) {
  check_unit(q, "weight q");
  if (r < 0.0) throw ValidationError("weight r must be nonnegative");
  if (q + 2.0 * r > 1.0 + kScalarTol) throw ValidationError("weights require q + 2r <= 1");
  const double w01 = std::max(0.0, 1.0 - q - 2.0 * r);
  const std::array<int, 2> b00{0, 0}, b01{0, 1}, b10{1, 0}, b11{1, 1};
  const std::array<DensityMatrix, 4> parts{tau_vec(b10), tau_vec(b01), tau_vec(b00), tau_vec(b11)};
  const std::array<double, 4> w{q, w01, r, r};
  return mix(w, parts).normalize();
}

Ket phi_catalyst() {
  const std::array<int, 3> zeros{0, 0, 0};
  const std::array<int, 3> ones{1, 1, 1};
  return Ket::normalized(3, h_ket(zeros).amplitudes() + h_ket(ones).amplitudes());
}

Ket phi_prime() {
  CVector v = CVector::Zero(8);
  v(0) = 0.5;
  v(3) = v(5) = v(6) = 0.5 * kI;
  return Ket(3, std::move(v));
}

DensityMatrix sigma_phi() {
  const DensityMatrix p = DensityMatrix::from_ket(phi_catalyst());
  DensityMatrix flipped = p;
  for (int q = 0; q < 3; ++q) {
    const std::array<int, 1> t{q};
    flipped = apply_gate(flipped, Gate::H, t);
  }
  return DensityMatrix(3, (p.matrix() + flipped.matrix()) / 2.0);
}

Ket singlet() {
  CVector v = CVector::Zero(4);
  v(2) = 1.0 / std::numbers::sqrt2;
  v(1) = -1.0 / std::numbers::sqrt2;
  return Ket(2, std::move(v));
}

Ket phi_plus() {
  CVector v = CVector::Zero(4);
  v(0) = v(3) = 1.0 / std::numbers::sqrt2;
  return Ket(2, std::move(v));
}

namespace {

void check_adjacency(const Adjacency& adj) {
  const std::size_t n = adj.size();
  if (n < 1 || n > static_cast<std::size_t>(kMaxQubits)) {
    throw ValidationError("graph size out of range");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (adj[i].size() != n) throw ValidationError("adjacency matrix must be square");
    if (adj[i][i] != 0) throw ValidationError("adjacency matrix must have zero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      if (adj[i][j] != 0 && adj[i][j] != 1) throw ValidationError("adjacency entries must be 0/1");
      if (adj[i][j] != adj[j][i]) throw ValidationError("adjacency matrix must be symmetric");
    }
  }
}

}  // namespace

std::vector<PauliString> graph_generators(const Adjacency& adj) {
  check_adjacency(adj);
  const int n = static_cast<int>(adj.size());
  std::vector<PauliString> gens;
  for (int j = 0; j < n; ++j) {
    auto k = PauliString::single(n, j, Pauli::X);
    for (int m = 0; m < n; ++m) {
      if (adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)]) {
        k = k * PauliString::single(n, m, Pauli::Z);
      }
    }
    gens.push_back(k);
  }
  return gens;
}

Ket graph_state(const Adjacency& adj) {
  check_adjacency(adj);
  const int n = static_cast<int>(adj.size());
  const std::size_t d = dim_for(n);
  CVector v(static_cast<Eigen::Index>(d));
  for (std::size_t x = 0; x < d; ++x) {
    int parity = 0;
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const bool xj = (x >> (n - 1 - j)) & 1u;
        const bool xk = (x >> (n - 1 - k)) & 1u;
        if (adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] && xj && xk) parity ^= 1;
      }
    }
    v(static_cast<Eigen::Index>(x)) = parity ? -1.0 : 1.0;
  }
  return Ket::normalized(n, std::move(v));
}

// ---------------------------------------------------------------- StateSpec

namespace {

const std::map<std::string, StateKind, std::less<>>& kind_names() {
  static const std::map<std::string, StateKind, std::less<>> names{
      {"h", StateKind::H_VEC},
      {"t", StateKind::T_VEC},
      {"tau", StateKind::TAU_F},
      {"sigma_act", StateKind::SIGMA_ACT},
      {"sigma_ins", StateKind::SIGMA_INS},
      {"sigma_corr", StateKind::SIGMA_CORR},
      {"phi", StateKind::PHI_CATALYST},
      {"phi_prime", StateKind::PHI_PRIME},
      {"sigma_phi", StateKind::SIGMA_PHI},
      {"singlet", StateKind::SINGLET},
      {"phi_plus", StateKind::PHI_PLUS},
      {"graph", StateKind::GRAPH_STATE},
  };
  return names;
}

std::vector<std::string> required_keys(StateKind k) {
  switch (k) {
    case StateKind::H_VEC:
    case StateKind::T_VEC: return {"v"};
    case StateKind::TAU_F: return {"f"};
    case StateKind::SIGMA_ACT: return {"q"};
    case StateKind::SIGMA_INS: return {"n", "q"};
    case StateKind::SIGMA_CORR: return {"q", "r"};
    case StateKind::GRAPH_STATE: return {"edges", "n"};
    default: return {};
  }
}

}  // namespace

StateSpec StateSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const auto it = kind_names().find(name);
  if (it == kind_names().end()) {
    throw ValidationError("unknown state kind '" + std::string(name) + "'");
  }
  StateSpec spec;
  spec.kind = it->second;
  std::map<std::string, std::string, std::less<>> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw ValidationError("state parameter '" + std::string(item) + "' lacks '='");
      }
      const std::string key(item.substr(0, eq));
      if (!params.emplace(key, std::string(item.substr(eq + 1))).second) {
        throw ValidationError("duplicate state parameter '" + key + "'");
      }
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  const auto req = required_keys(spec.kind);
  for (const auto& [key, value] : params) {
    if (std::find(req.begin(), req.end(), key) == req.end()) {
      throw ValidationError("unexpected state parameter '" + key + "' for " + std::string(name));
    }
  }
  for (const auto& key : req) {
    if (!params.contains(key)) {
      throw ValidationError("missing state parameter '" + key + "' for " + std::string(name));
    }
  }
  for (const auto& [key, value] : params) {
    if (key == "v") {
      spec.bits = parse_bits(value);
    } else if (key == "f") {
      spec.f = parse_double(key, value);
    } else if (key == "q") {
      spec.q = parse_double(key, value);
    } else if (key == "r") {
      spec.r = parse_double(key, value);
    } else if (key == "n") {
      const double n = parse_double(key, value);
      if (n != std::floor(n)) throw ValidationError("state parameter 'n' must be an integer");
      spec.n = static_cast<int>(n);
    }
  }
  if (spec.kind == StateKind::GRAPH_STATE) {
    if (spec.n < 1 || spec.n > kMaxQubits) throw ValidationError("graph size out of range");
    const auto n = static_cast<std::size_t>(spec.n);
    spec.adjacency.assign(n, std::vector<int>(n, 0));
    std::string_view edges = params.find("edges")->second;
    while (!edges.empty()) {
      const auto slash = edges.find('/');
      const std::string_view e = edges.substr(0, slash);
      const auto dash = e.find('-');
      if (dash == std::string_view::npos) throw ValidationError("graph edge must look like a-b");
      const double a = parse_double("edges", e.substr(0, dash));
      const double b = parse_double("edges", e.substr(dash + 1));
      if (a < 0 || b < 0 || a >= spec.n || b >= spec.n || a == b) {
        throw ValidationError("graph edge endpoints out of range");
      }
      spec.adjacency[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
      spec.adjacency[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = 1;
      if (slash == std::string_view::npos) break;
      edges = edges.substr(slash + 1);
    }
  }
  spec.validate();
  return spec;
}

std::string StateSpec::to_string() const {
  std::string name;
  for (const auto& [key, k] : kind_names()) {
    if (k == kind) name = key;
  }
  auto bits_str = [this] {
    std::string s;
    for (int b : bits) s += static_cast<char>('0' + b);
    return s;
  };
  switch (kind) {
    case StateKind::H_VEC:
    case StateKind::T_VEC: return name + ":v=" + bits_str();
    case StateKind::TAU_F: return name + ":f=" + fmt_double(f);
    case StateKind::SIGMA_ACT: return name + ":q=" + fmt_double(q);
    case StateKind::SIGMA_INS: return name + ":q=" + fmt_double(q) + ",n=" + std::to_string(n);
    case StateKind::SIGMA_CORR: return name + ":q=" + fmt_double(q) + ",r=" + fmt_double(r);
    case StateKind::GRAPH_STATE: {
      std::string edges;
      for (std::size_t i = 0; i < adjacency.size(); ++i) {
        for (std::size_t j = i + 1; j < adjacency.size(); ++j) {
          if (adjacency[i][j]) {
            if (!edges.empty()) edges += '/';
            edges += std::to_string(i) + "-" + std::to_string(j);
          }
        }
      }
      return name + ":n=" + std::to_string(adjacency.size()) + ",edges=" + edges;
    }
    default: return name;
  }
}

void StateSpec::validate() const {
  switch (kind) {
    case StateKind::H_VEC:
    case StateKind::T_VEC:
      check_bits(bits);
      if (bits.size() > static_cast<std::size_t>(kMaxQubits)) {
        throw ValidationError("bit vector too long");
      }
      break;
    case StateKind::TAU_F: check_unit(f, "fidelity f"); break;
    case StateKind::SIGMA_ACT: check_unit(q, "weight q"); break;
    case StateKind::SIGMA_INS:
      check_unit(q, "weight q");
      if (n < 1 || n > kMaxQubits) throw ValidationError("sigma_ins qubit count out of range");
      break;
    case StateKind::SIGMA_CORR:
      check_unit(q, "weight q");
      if (r < 0.0) throw ValidationError("weight r must be nonnegative");
      if (q + 2.0 * r > 1.0 + kScalarTol) throw ValidationError("weights require q + 2r <= 1");
      break;
    case StateKind::GRAPH_STATE: check_adjacency(adjacency); break;
    default: break;
  }
}

bool StateSpec::is_pure() const {
  switch (kind) {
    case StateKind::TAU_F:
    case StateKind::SIGMA_ACT:
    case StateKind::SIGMA_INS:
    case StateKind::SIGMA_CORR:
    case StateKind::SIGMA_PHI: return false;
    default: return true;
  }
}

State make_state(const StateSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case StateKind::H_VEC: return h_ket(spec.bits);
    case StateKind::T_VEC: return t_ket(spec.bits);
    case StateKind::TAU_F: return tau(spec.f);
    case StateKind::SIGMA_ACT: return sigma_act(spec.q);
    case StateKind::SIGMA_INS: return sigma_ins(spec.q, spec.n);
    case StateKind::SIGMA_CORR: return sigma_corr(spec.q, spec.r);
    case StateKind::PHI_CATALYST: return phi_catalyst();
    case StateKind::PHI_PRIME: return phi_prime();
    case StateKind::SIGMA_PHI: return sigma_phi();
    case StateKind::SINGLET: return singlet();
    case StateKind::PHI_PLUS: return phi_plus();
    case StateKind::GRAPH_STATE: return graph_state(spec.adjacency);
  }
  throw InvariantError("unhandled state kind");
}

DensityMatrix as_density(const State& state) {
  if (const auto* k = std::get_if<Ket>(&state)) return DensityMatrix::from_ket(*k);
  return std::get<DensityMatrix>(state);
}

int qubit_count(const State& state) {
  return std::visit([](const auto& s) { return s.num_qubits(); }, state);
}

std::array<double, 3> bloch(const DensityMatrix& rho) {
  if (rho.num_qubits() != 1) throw ValidationError("bloch needs a single-qubit state");
  return {expectation(rho, PauliString::parse("X")), expectation(rho, PauliString::parse("Y")),
          expectation(rho, PauliString::parse("Z"))};
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double l : rho.eigenvalues()) {
    if (l > 1e-15) s -= l * std::log2(l);
  }
  return s;
}

double mutual_information(const DensityMatrix& rho, int split) {
  const int n = rho.num_qubits();
  if (split < 1 || split >= n) throw ValidationError("mutual information split out of range");
  std::vector<int> a, b;
  for (int q = 0; q < n; ++q) (q < split ? a : b).push_back(q);
  return von_neumann_entropy(partial_trace(rho, a)) + von_neumann_entropy(partial_trace(rho, b)) -
         von_neumann_entropy(rho);
}

CMatrix t_basis_two_qubit() {
  CMatrix basis(4, 4);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const std::array<int, 2> bits{a, b};
      basis.col(2 * a + b) = t_ket(bits).amplitudes();
    }
  }
  return basis;
}

}  // namespace magic
