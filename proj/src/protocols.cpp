#include "magic/protocols.hpp"

#include "magic/states.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace magic {

namespace {

const double kSqrt3 = std::numbers::sqrt3;

struct Node {
  DensityMatrix state;
  std::string path;
  double probability;
};

using Correction = std::function<std::string(DensityMatrix&, int)>;

std::string join_path(const std::string& parent, const std::string& label, int outcome) {
  std::string step = label + (outcome > 0 ? "=+1" : "=-1");
  return parent.empty() ? step : parent + "," + step;
}

// Measures `p` on every live node; zero-probability branches are logged but not expanded.
std::vector<Node> measure_all(const std::vector<Node>& nodes, const PauliString& p, const std::string& label,
                              ProtocolReport& rep, const Correction& correct = {}) {
  std::vector<Node> out;
  for (const auto& node : nodes) {
    const auto branches = measure_pauli(node.state, p);
    for (const auto& b : branches) {
      BranchRecord rec;
      rec.path = join_path(node.path, label, b.outcome);
      rec.observable = label;
      rec.outcome = b.outcome;
      rec.probability = b.probability;
      if (b.post_state) {
        DensityMatrix s = *b.post_state;
        if (correct) rec.correction = correct(s, b.outcome);
        out.push_back({std::move(s), rec.path, node.probability * b.probability});
      }
      rep.branch_log.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<Node> trace_all(const std::vector<Node>& nodes, std::span<const int> keep) {
  std::vector<Node> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back({partial_trace(n.state, keep), n.path, n.probability});
  return out;
}

std::vector<int> range_except(int n, std::initializer_list<int> drop) {
  std::vector<int> keep;
  for (int q = 0; q < n; ++q) {
    if (std::find(drop.begin(), drop.end(), q) == drop.end()) keep.push_back(q);
  }
  return keep;
}

double t0_fidelity(const DensityMatrix& rho) { return rho.fidelity(t_ket(0)); }

bool all_minus(const std::string& path) { return path.find("=+1") == std::string::npos; }

void finish_agreement(ProtocolReport& rep) {
  if (rep.closed_form_fidelity) rep.agreement = std::abs(rep.simulated_fidelity - *rep.closed_form_fidelity);
}

CMatrix pauli_matrix(char c) { return PauliString::parse(std::string(1, c)).matrix(); }

}  // namespace

double ProtocolReport::path_probability(const std::string& leaf_path) const {
  double p = 1.0;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = leaf_path.find(',', pos);
    const std::string prefix = leaf_path.substr(0, comma);
    const auto it = std::find_if(branch_log.begin(), branch_log.end(),
                                 [&](const BranchRecord& r) { return r.path == prefix; });
    if (it == branch_log.end()) throw ValidationError("no branch record for path prefix '" + prefix + "'");
    p *= it->probability;
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return p;
}

// ---------------------------------------------------------------- catalysis

ProtocolReport run_catalysis(CatalysisVariant variant) {
  ProtocolReport rep;
  rep.protocol = variant == CatalysisVariant::PURE ? "catalysis-pure" : "catalysis-mixed";
  const DensityMatrix catalyst_in =
      variant == CatalysisVariant::PURE ? DensityMatrix::from_ket(phi_catalyst()) : sigma_phi();
  const DensityMatrix start = catalyst_in.tensor(DensityMatrix::from_ket(h_ket(0)));

  // qubits A, B, C = 0, 1, 2 hold the resource; D = 3 holds |H_0>
  std::vector<Node> nodes{{start, "", 1.0}};
  nodes = measure_all(nodes, PauliString::parse("__YY"), "Y_CY_D", rep, [](DensityMatrix& s, int outcome) {
    if (outcome > 0) {
      const std::array<int, 1> d{3};
      s = apply_gate(s, Gate::H, d);
      return std::string("H_D");
    }
    return std::string();
  });
  nodes = measure_all(nodes, PauliString::parse("__ZZ"), "Z_CZ_D", rep, [](DensityMatrix& s, int outcome) {
    if (outcome < 0) {
      s = apply_pauli(s, PauliString::parse("YY__"));
      return std::string("Y_AY_B");
    }
    return std::string();
  });
  const std::array<int, 2> keep{0, 1};
  nodes = trace_all(nodes, keep);

  const std::array<int, 2> zeros{0, 0};
  const Ket target = h_ket(zeros);
  CMatrix mixed = CMatrix::Zero(4, 4);
  double min_fid = 1.0;
  for (const auto& n : nodes) {
    const double fid = n.state.fidelity(target);
    rep.leaves.push_back({n.path, n.probability, fid, true});
    rep.success_probability += n.probability;
    mixed += n.probability * n.state.matrix();
    min_fid = std::min(min_fid, fid);
  }
  rep.output = DensityMatrix::unnormalized(2, mixed).normalize();
  rep.simulated_fidelity = rep.output.fidelity(target);
  rep.closed_form_fidelity = 1.0;
  rep.metrics["min_branch_fidelity"] = min_fid;
  rep.metrics["branch_count"] = static_cast<double>(nodes.size());
  finish_agreement(rep);
  return rep;
}

ProtocolReport sigma_phi_interconvert(InterconvertDirection direction) {
  ProtocolReport rep;
  const DensityMatrix phi = DensityMatrix::from_ket(phi_catalyst());
  DensityMatrix flipped = phi;
  for (int q = 0; q < 3; ++q) {
    const std::array<int, 1> t{q};
    flipped = apply_gate(flipped, Gate::H, t);
  }
  if (direction == InterconvertDirection::TO_MIXED) {
    rep.protocol = "sigma-phi-to-mixed";
    // classical coin: identity or H on all three qubits
    rep.branch_log.push_back({"coin=+1", "coin", 1, 0.5, ""});
    rep.branch_log.push_back({"coin=-1", "coin", -1, 0.5, "H_AH_BH_C"});
    rep.leaves.push_back({"coin=+1", 0.5, 1.0, true});
    rep.leaves.push_back({"coin=-1", 0.5, 1.0, true});
    rep.output = DensityMatrix(3, (phi.matrix() + flipped.matrix()) / 2.0);
    rep.success_probability = 1.0;
    rep.simulated_fidelity = uhlmann_fidelity(rep.output, sigma_phi());
    rep.closed_form_fidelity = 1.0;
    rep.metrics["max_abs_deviation"] = (rep.output.matrix() - sigma_phi().matrix()).cwiseAbs().maxCoeff();
    finish_agreement(rep);
    return rep;
  }

  rep.protocol = "sigma-phi-to-pure";
  const Ket phi_ket = phi_catalyst();
  std::vector<Node> nodes{{sigma_phi(), "", 1.0}};
  nodes = measure_all(nodes, PauliString::parse("YYY"), "Y_AY_BY_C", rep);
  double phi_branch_probability = 0.0;
  for (const auto& n : nodes) {
    const double fid_phi = n.state.fidelity(phi_ket);
    const double fid_flipped = flipped.matrix().isZero() ? 0.0 : uhlmann_fidelity(n.state, flipped);
    const bool is_phi = fid_phi > 0.5;
    // the branch holding H^3|phi> is left in that Clifford frame
    for (auto& rec : rep.branch_log) {
      if (rec.path == n.path && !is_phi) rec.correction = "frame:H_AH_BH_C";
    }
    rep.leaves.push_back({n.path, n.probability, is_phi ? fid_phi : fid_flipped, true});
    if (is_phi) {
      rep.output = n.state;
      rep.simulated_fidelity = fid_phi;
      phi_branch_probability = n.probability;
      rep.metrics[std::string("phi_outcome")] = n.path.ends_with("=+1") ? 1.0 : -1.0;
    }
  }
  rep.success_probability = 1.0;
  rep.closed_form_fidelity = 1.0;
  rep.metrics["phi_branch_probability"] = phi_branch_probability;
  rep.metrics["phi_yyy_expectation"] = expectation(phi, PauliString::parse("YYY"));
  finish_agreement(rep);
  return rep;
}

// ---------------------------------------------------------------- activation

double activation_fidelity(double q, double f) { return q * f / (q * f + (1.0 - q) * (1.0 - f)); }

double single_qubit_reduction_fidelity(double q) {
  const double fst = constants().f_st;
  return q * fst / (q * fst + (1.0 - q) * (1.0 - fst));
}

double equator_mixture_fidelity(double q) {
  return q * (9.0 + kSqrt3) / 12.0 + (1.0 - q) * (9.0 - kSqrt3) / 12.0;
}

ProtocolReport run_activation(double q, double f) {
  if (!(q >= 0.0 && q <= 1.0) || !(f >= 0.0 && f <= 1.0)) {
    throw ValidationError("activation needs q and f in [0,1]");
  }
  ProtocolReport rep;
  rep.protocol = "activation";
  const double fst = constants().f_st;
  if (!(q > 0.5 && q < 1.0)) rep.notes.push_back("q outside (1/2, 1)");
  if (!(f > fst && f <= 1.0)) rep.notes.push_back("f outside (f_st, 1]");

  // A, B = activator; C = noisy T state
  std::vector<Node> nodes{{sigma_act(q).tensor(tau(f)), "", 1.0}};
  nodes = measure_all(nodes, PauliString::parse("_YY"), "Y_BY_C", rep);
  nodes = measure_all(nodes, PauliString::parse("_ZZ"), "Z_BZ_C", rep);
  const std::array<int, 1> keep{0};
  nodes = trace_all(nodes, keep);

  bool found = false;
  for (const auto& n : nodes) {
    const bool post = all_minus(n.path);
    rep.leaves.push_back({n.path, n.probability, t0_fidelity(n.state), post});
    if (post) {
      found = true;
      rep.output = n.state;
      rep.success_probability = n.probability;
      rep.simulated_fidelity = t0_fidelity(n.state);
    }
  }
  if (!found || rep.success_probability < kZeroProbability) {
    throw ValidationError("activation postselection has zero probability for these parameters");
  }
  rep.closed_form_fidelity = activation_fidelity(q, f);
  rep.metrics["q"] = q;
  rep.metrics["f"] = f;
  rep.metrics["baseline_fidelity"] = single_qubit_reduction_fidelity(q);
  rep.metrics["closed_form_success"] = 0.5 * (q * f + (1.0 - q) * (1.0 - f));
  finish_agreement(rep);
  return rep;
}

// ---------------------------------------------------------------- reductions

const std::vector<CMatrix>& single_qubit_cliffords() {
  static const std::vector<CMatrix> group = [] {
    auto canon = [](CMatrix m) {
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        const cplx v = m.data()[i];
        if (std::abs(v) > 1e-9) {
          m /= v / std::abs(v);
          break;
        }
      }
      return m;
    };
    std::vector<CMatrix> elems{CMatrix::Identity(2, 2)};
    const std::array<CMatrix, 2> gens{gate_matrix(Gate::H), gate_matrix(Gate::S)};
    for (std::size_t i = 0; i < elems.size(); ++i) {
      for (const auto& g : gens) {
        const CMatrix c = canon(g * elems[i]);
        const bool seen = std::any_of(elems.begin(), elems.end(),
                                      [&](const CMatrix& e) { return (e - c).cwiseAbs().maxCoeff() < 1e-9; });
        if (!seen) elems.push_back(c);
      }
    }
    if (elems.size() != 24) throw InvariantError("single-qubit Clifford group closure did not give 24 elements");
    return elems;
  }();
  return group;
}

ProtocolReport reduction_survey(const DensityMatrix& rho, std::vector<ReductionEntry>* table) {
  if (rho.num_qubits() != 2) throw ValidationError("reduction survey needs a two-qubit state");
  ProtocolReport rep;
  rep.protocol = "reduction-survey";
  const CVector t0 = t_ket(0).amplitudes();
  const auto& frames = single_qubit_cliffords();
  const auto& codes = enumerate_code_projectors(2, 1);
  double best = -1.0;
  double odd_best = -1.0;
  double odd_probability = 0.0;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const auto red = codespace_reduce(rho, codes[i]);
    ReductionEntry entry;
    entry.code_index = i;
    entry.code = codes[i].to_string();
    entry.probability = red.probability;
    if (red.output) {
      for (std::size_t c = 0; c < frames.size(); ++c) {
        const CVector v = frames[c].adjoint() * t0;
        const double fid = (v.adjoint() * red.output->matrix() * v)(0, 0).real();
        if (fid > entry.best_fidelity + 1e-15) {
          entry.best_fidelity = fid;
          entry.best_frame = static_cast<int>(c);
        }
      }
      if (entry.best_fidelity > best) {
        best = entry.best_fidelity;
        rep.output = *red.output;
        rep.metrics["best_code_index"] = static_cast<double>(i);
        rep.metrics["best_code_weight"] = codes[i].generators.front().weight();
        rep.success_probability = red.probability;
      }
      if (codes[i].generators.front() == PauliString::parse("-ZZ")) {
        odd_best = entry.best_fidelity;
        odd_probability = red.probability;
      }
    }
    rep.leaves.push_back({entry.code, entry.probability, entry.best_fidelity, false});
    if (table) table->push_back(std::move(entry));
  }
  rep.simulated_fidelity = best;
  rep.metrics["codes_searched"] = static_cast<double>(codes.size());
  rep.metrics["frames_searched"] = static_cast<double>(frames.size());
  rep.metrics["odd_parity_best_fidelity"] = odd_best;
  rep.metrics["odd_parity_probability"] = odd_probability;
  const double gamma = constants().gamma;
  for (int sign : {1, -1}) {
    CVector g(2);
    g << 1.0, std::polar(1.0, sign * gamma);
    const Ket gk = Ket::normalized(1, g);
    rep.metrics[sign > 0 ? "gamma_plus_overlap" : "gamma_minus_overlap"] = std::norm(gk.inner(t_ket(0)));
  }
  rep.notes.push_back("leaves list one entry per code: projection probability and best frame fidelity");
  return rep;
}

ProtocolReport reduction_survey_activator(double q, std::vector<ReductionEntry>* table) {
  ProtocolReport rep = reduction_survey(sigma_act(q), table);
  rep.protocol = "reduction-survey-activator";
  rep.closed_form_fidelity = single_qubit_reduction_fidelity(q);
  rep.metrics["q"] = q;
  rep.metrics["equator_mixture_fidelity"] = equator_mixture_fidelity(q);
  finish_agreement(rep);
  return rep;
}

// ---------------------------------------------------------------- asymptotic

double asymptotic_fidelity_printed(double f, int n) {
  const double x = std::pow(constants().f_st / f, n - 1) * (kSqrt3 - 1.0);
  return 1.0 / (1.0 + x);
}

double asymptotic_fidelity_recurrence(double f, int n) {
  const double x = std::pow(constants().f_st / f, n - 1) * (kSqrt3 - 1.0);
  return (1.0 + x / 2.0) / (1.0 + x);
}

ProtocolReport run_asymptotic(double f, int n) {
  if (n < 2 || n > 5) throw ValidationError("asymptotic activation supports 2 <= n <= 5");
  if (!(f >= 0.0 && f <= 1.0)) throw ValidationError("asymptotic activation needs f in [0,1]");
  ProtocolReport rep;
  rep.protocol = "asymptotic";
  const double fst = constants().f_st;
  if (!(f > fst)) rep.notes.push_back("f at or below f_st");
  const double q = [n] {
    // closed form of q_max, kept local to avoid a dependency on the witness module
    return 1.0 / (1.0 + std::pow(2.0 * constants().f_st, n - 1) * (std::sqrt(3.0) - 1.0));
  }();

  // activator on 0..n-1, flipped noisy T states on n..2n-2
  DensityMatrix rho = sigma_ins(q, n);
  const CMatrix hy = gate_matrix(Gate::H) * pauli_matrix('Y');
  DensityMatrix flipped = apply_local(tau(f), hy, std::array<int, 1>{0});
  for (int j = 0; j < n - 1; ++j) rho = rho.tensor(flipped);

  std::vector<Node> nodes{{rho, "", 1.0}};
  int width = 2 * n - 1;
  for (int j = 0; j < n - 1; ++j) {
    // after tracing earlier pairs, activator qubit j sits at 0 and its partner at n-j
    const int a = 0;
    const int b = n - j;
    std::string xx(static_cast<std::size_t>(width), '_');
    std::string zz = xx;
    xx[static_cast<std::size_t>(a)] = xx[static_cast<std::size_t>(b)] = 'X';
    zz[static_cast<std::size_t>(a)] = zz[static_cast<std::size_t>(b)] = 'Z';
    const std::string tag = std::to_string(j);
    nodes = measure_all(nodes, PauliString::parse(xx), "X" + tag + "X" + tag + "'", rep);
    nodes = measure_all(nodes, PauliString::parse(zz), "Z" + tag + "Z" + tag + "'", rep);
    nodes = trace_all(nodes, range_except(width, {a, b}));
    width -= 2;
  }

  bool found = false;
  for (const auto& node : nodes) {
    const bool post = all_minus(node.path);
    rep.leaves.push_back({node.path, node.probability, t0_fidelity(node.state), post});
    if (post) {
      found = true;
      rep.output = node.state;
      rep.success_probability = node.probability;
      rep.simulated_fidelity = t0_fidelity(node.state);
    }
  }
  if (!found || rep.success_probability < kZeroProbability) {
    throw ValidationError("asymptotic activation postselection has zero probability");
  }

  // pairwise overlaps with the singlet
  const DensityMatrix psi = DensityMatrix::from_ket(singlet());
  const DensityMatrix tau_flip = tau(1.0 - f);
  const double a_overlap = (psi.matrix() * tau(1.0).tensor(tau_flip).matrix()).trace().real();
  const double b_overlap = (psi.matrix() * DensityMatrix::maximally_mixed(1).tensor(tau_flip).matrix()).trace().real();

  const double printed = asymptotic_fidelity_printed(f, n);
  const double recurrence = asymptotic_fidelity_recurrence(f, n);
  rep.closed_form_fidelity = recurrence;
  rep.metrics["f"] = f;
  rep.metrics["n"] = n;
  rep.metrics["q_max"] = q;
  rep.metrics["a_overlap"] = a_overlap;
  rep.metrics["b_overlap"] = b_overlap;
  rep.metrics["printed_fidelity"] = printed;
  rep.metrics["recurrence_fidelity"] = recurrence;
  rep.metrics["printed_deviation"] = std::abs(rep.simulated_fidelity - printed);
  rep.metrics["closed_form_success"] = q * std::pow(f / 2.0, n - 1) + (1.0 - q) * std::pow(0.25, n - 1);
  finish_agreement(rep);
  return rep;
}

// ---------------------------------------------------------------- daisy chain

TransferStep transfer_step(double q, double r) {
  TransferStep t;
  const double s = 1.0 - q - 2.0 * r;
  t.matrix = {{{q, r}, {r, s}}};
  const double mean = (q + s) / 2.0;
  const double rad = std::hypot((q - s) / 2.0, r);
  t.mu1 = mean + rad;
  t.mu2 = mean - rad;
  // dominant eigenvector at angle theta with tan(2 theta) = 2r/(q - s)
  const double theta = 0.5 * std::atan2(2.0 * r, q - s);
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  t.dominant_eigenvector = {c / (c + sn), sn / (c + sn)};
  return t;
}

double daisy_f0(double q, double r) {
  const double fst = constants().f_st;
  return (q * (1.0 - fst) + r * fst) / (r + q * (1.0 - fst) + (1.0 - q - 2.0 * r) * fst);
}

std::vector<double> daisy_recurrence(double q, double r, int links) {
  const double s = 1.0 - q - 2.0 * r;
  std::vector<double> out;
  double f = daisy_f0(q, r);
  for (int k = 0; k < links; ++k) {
    const double v0 = q * f + r * (1.0 - f);
    const double v1 = r * f + s * (1.0 - f);
    f = v0 / (v0 + v1);
    out.push_back(f);
  }
  return out;
}

DaisyLimit daisy_limit(double q, double r) {
  DaisyLimit lim;
  const double den = 2.0 * (r + q) - 1.0;
  lim.value = 1.0 / (1.0 + std::tan(0.5 * std::atan2(2.0 * r, den)));
  if (std::abs(den) < 1e-15) {
    lim.branch_marker = true;
    lim.printed_value = std::numeric_limits<double>::quiet_NaN();
  } else {
    lim.printed_value = 1.0 / (1.0 + std::tan(0.5 * std::atan(2.0 * r / den)));
  }
  return lim;
}

namespace {

struct Convergence {
  double slope = 0.0;
  double predicted = 0.0;
  double residual = 0.0;
  int points = 0;
};

// Least-squares slope of log|f_{k+1} - f_k| over the window where the step sits in [1e-12, 1e-9].
// Steps decay at the same rate as f_k - f_inf and need no closed-form limit.
Convergence daisy_convergence(double q, double r) {
  Convergence c;
  const long double s = 1.0L - q - 2.0L * r;
  const auto t = transfer_step(q, r);
  if (std::abs(t.mu2) < 1e-15 || t.mu1 <= 0.0) return c;
  c.predicted = std::log(std::abs(t.mu2 / t.mu1));
  const long double fst = (1.0L + 1.0L / std::sqrt(3.0L)) / 2.0L;
  long double f = (q * (1.0L - fst) + r * fst) / (r + q * (1.0L - fst) + s * fst);
  std::vector<std::pair<double, double>> pts;
  for (int k = 1; k <= 400; ++k) {
    const long double v0 = q * f + r * (1.0L - f);
    const long double v1 = r * f + s * (1.0L - f);
    const long double next = v0 / (v0 + v1);
    const long double step = std::fabs(next - f);
    f = next;
    if (step <= 1e-9L && step >= 1e-12L) pts.emplace_back(k, std::log(static_cast<double>(step)));
    if (step < 1e-12L) break;
  }
  c.points = static_cast<int>(pts.size());
  if (c.points < 3) return c;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nn = static_cast<double>(pts.size());
  c.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  c.residual = std::abs(c.slope - c.predicted);
  return c;
}

}  // namespace

ProtocolReport run_daisy_chain(double q, double r, int n) {
  if (!(q >= 0.0 && q <= 1.0) || r < 0.0 || q + 2.0 * r > 1.0 + kScalarTol) {
    throw ValidationError("daisy chain needs q in [0,1], r >= 0 and q + 2r <= 1");
  }
  if (q == 0.0 && r == 0.0) throw ValidationError("daisy chain transfer matrix is degenerate at q = r = 0");
  if (n < 2 || n > 100000) throw ValidationError("daisy chain needs 2 <= n <= 100000 copies");
  ProtocolReport rep;
  rep.protocol = "daisy-chain";
  const DensityMatrix pair = sigma_corr(q, r);

  // dense sliding window: measure A, then per link adjoin a pair, project, trace
  std::vector<Node> nodes{{pair, "", 1.0}};
  nodes = measure_all(nodes, PauliString::parse("Z_"), "Z_A", rep);
  nodes = trace_all(nodes, std::array<int, 1>{1});
  std::vector<double> dense{0.0};
  for (const auto& node : nodes) {
    if (all_minus(node.path) == false && node.path == "Z_A=+1") dense[0] = t0_fidelity(node.state);
  }
  const int dense_links = std::min(2, n - 1);
  for (int link = 1; link <= dense_links; ++link) {
    std::vector<Node> grown;
    for (const auto& node : nodes) grown.push_back({node.state.tensor(pair), node.path, node.probability});
    const std::string tag = std::to_string(link);
    nodes = measure_all(grown, PauliString::parse("XX_"), "XX" + tag, rep);
    nodes = measure_all(nodes, PauliString::parse("ZZ_"), "ZZ" + tag, rep);
    nodes = trace_all(nodes, std::array<int, 1>{2});
    for (const auto& node : nodes) {
      // postselected path: Z_A = +1 and every singlet outcome -1
      const bool post = node.path.starts_with("Z_A=+1") &&
                        node.path.substr(6).find("=+1") == std::string::npos;
      if (post) {
        dense.push_back(t0_fidelity(node.state));
        if (link == dense_links) {
          rep.output = node.state;
          rep.success_probability = node.probability;
        }
      }
    }
  }
  for (const auto& node : nodes) {
    const bool post = node.path.starts_with("Z_A=+1") && node.path.substr(6).find("=+1") == std::string::npos;
    rep.leaves.push_back({node.path, node.probability, t0_fidelity(node.state), post});
  }

  const auto rec = daisy_recurrence(q, r, n - 1);
  const auto t = transfer_step(q, r);
  const auto lim = daisy_limit(q, r);
  const auto conv = daisy_convergence(q, r);

  // cumulative success by recurrence: p(A=+1) times 1/2 1^T M v per link
  double success = r + q * (1.0 - constants().f_st) + (1.0 - q - 2.0 * r) * constants().f_st;
  double f = daisy_f0(q, r);
  for (int k = 0; k < n - 1; ++k) {
    const double v0 = q * f + r * (1.0 - f);
    const double v1 = r * f + (1.0 - q - 2.0 * r) * (1.0 - f);
    success *= 0.5 * (v0 + v1);
    f = v0 / (v0 + v1);
  }

  std::vector<double> rec_series{daisy_f0(q, r)};
  rec_series.insert(rec_series.end(), rec.begin(), rec.end());
  rep.series["recurrence"] = rec_series;
  rep.series["dense"] = dense;
  rep.simulated_fidelity = dense.back();
  rep.closed_form_fidelity = rec_series[static_cast<std::size_t>(dense_links)];
  double worst = 0.0;
  for (std::size_t k = 0; k < dense.size(); ++k) worst = std::max(worst, std::abs(dense[k] - rec_series[k]));
  rep.metrics["dense_recurrence_max_deviation"] = worst;
  rep.metrics["q"] = q;
  rep.metrics["r"] = r;
  rep.metrics["n"] = n;
  rep.metrics["f0"] = daisy_f0(q, r);
  rep.metrics["f_final"] = rec_series.back();
  rep.metrics["mu1"] = t.mu1;
  rep.metrics["mu2"] = t.mu2;
  rep.metrics["v0"] = t.dominant_eigenvector[0];
  rep.metrics["v1"] = t.dominant_eigenvector[1];
  rep.metrics["f_limit"] = lim.value;
  if (!lim.branch_marker) rep.metrics["f_limit_printed"] = lim.printed_value;
  rep.metrics["limit_branch_marker"] = lim.branch_marker ? 1.0 : 0.0;
  rep.metrics["success_probability_recurrence"] = success;
  rep.metrics["convergence_slope"] = conv.slope;
  rep.metrics["convergence_predicted"] = conv.predicted;
  rep.metrics["convergence_residual"] = conv.residual;
  rep.metrics["convergence_points"] = conv.points;
  if (lim.branch_marker) rep.notes.push_back("2(r+q) = 1: arctan quotient undefined, limit taken as 1/2");
  if (std::abs(t.mu2) < 1e-12) rep.notes.push_back("transfer matrix has rank one: product-state input");
  finish_agreement(rep);
  return rep;
}

// ---------------------------------------------------------------- phases

std::string phase_label_name(PhaseLabel l) {
  switch (l) {
    case PhaseLabel::STABILIZER: return "STABILIZER";
    case PhaseLabel::UNIVERSAL: return "UNIVERSAL";
    case PhaseLabel::OPEN: return "OPEN";
  }
  return "OPEN";
}

PhaseClass classify_phase(double q, double r) {
  const DensityMatrix rho = sigma_corr(q, r);
  PhaseClass pc;
  const auto hull = hull_membership(rho);
  pc.hull_member = hull.member;
  pc.hull_slack = hull.slack;
  const double finf = daisy_limit(q, r).value;
  pc.f_limit = std::max(finf, 1.0 - finf);
  if (hull.member) {
    pc.label = PhaseLabel::STABILIZER;
  } else if (pc.f_limit > constants().f_bk + 1e-9) {
    pc.label = PhaseLabel::UNIVERSAL;
  } else {
    pc.label = PhaseLabel::OPEN;
  }
  return pc;
}

// ---------------------------------------------------------------- twirl

TwirlResult twirl(const DensityMatrix& rho) {
  if (rho.num_qubits() != 2) throw ValidationError("twirl needs a two-qubit state");
  const CMatrix t1 = gate_matrix(Gate::T_FACET);
  const std::array<CMatrix, 3> powers{CMatrix::Identity(2, 2), t1, t1 * t1};
  CMatrix acc = CMatrix::Zero(4, 4);
  for (const auto& ua : powers) {
    for (const auto& ub : powers) {
      CMatrix u(4, 4);
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) u(r, c) = ua(r / 2, c / 2) * ub(r % 2, c % 2);
      }
      acc += u * rho.matrix() * u.adjoint();
    }
  }
  acc /= 9.0;
  const CMatrix hy = gate_matrix(Gate::H) * pauli_matrix('Y');
  const Unitary w = embed_unitary(hy, std::array<int, 1>{0}, 2);
  const CMatrix v = w.matrix().adjoint() * gate_matrix(Gate::SWAP) * w.matrix();
  CMatrix out = (acc + v * acc * v.adjoint()) / 2.0;
  out = (out + out.adjoint()).eval() / 2.0;
  TwirlResult res{DensityMatrix(2, out), 0.0, 0.0};
  const CMatrix tb = t_basis_two_qubit();
  const CMatrix d = tb.adjoint() * out * tb;
  res.q = d(2, 2).real();
  res.r = d(0, 0).real();
  return res;
}

double uhlmann_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.num_qubits() != b.num_qubits()) throw ValidationError("fidelity needs equal sizes");
  Eigen::SelfAdjointEigenSolver<CMatrix> ea(a.matrix());
  const Eigen::VectorXd la = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMatrix sa = ea.eigenvectors() * la.cast<cplx>().asDiagonal() * ea.eigenvectors().adjoint();
  const CMatrix inner = sa * b.matrix() * sa;
  Eigen::SelfAdjointEigenSolver<CMatrix> ei((inner + inner.adjoint()) / 2.0);
  const double tr = ei.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::min(1.0, tr * tr);
}

}  // namespace magic
