#include "magic/verify.hpp"

#include "magic/random.hpp"
#include "magic/states.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>

namespace magic {

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Ctx {
  CriterionResult& res;
  const VerifyOptions& opts;
  bool ok = true;

  double tol(double pinned) const { return opts.tol ? *opts.tol : pinned; }
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      res.diagnostics.push_back("FAIL: " + what);
    }
  }
  void note(const std::string& what) { res.diagnostics.push_back(what); }
  void flag(const std::string& what) { res.flagged.push_back(what); }
};

const double kFst = (1.0 + 1.0 / std::sqrt(3.0)) / 2.0;

// -------------------------------------------------------------- 1
void catalysis(Ctx& c) {
  const double ftol = c.tol(1e-10);
  const double ptol = c.tol(1e-12);
  for (auto variant : {CatalysisVariant::PURE, CatalysisVariant::MIXED}) {
    const auto rep = run_catalysis(variant);
    double worst = 1.0;
    double total = 0.0;
    for (const auto& leaf : rep.leaves) {
      worst = std::min(worst, leaf.fidelity);
      total += leaf.probability;
    }
    c.require(rep.leaves.size() == 4, rep.protocol + ": expected 4 branches");
    c.require(worst >= 1.0 - ftol, fmt("%s: worst branch fidelity %.17g", rep.protocol.c_str(), worst));
    c.require(std::abs(total - 1.0) <= ptol, fmt("%s: total probability %.17g", rep.protocol.c_str(), total));
    c.note(fmt("%s: worst fidelity deficit %.3g, |total-1| %.3g", rep.protocol.c_str(), 1.0 - worst,
               std::abs(total - 1.0)));
  }
}

// -------------------------------------------------------------- 2
void catalysis_no_go(Ctx& c) {
  const auto set = feasible_ratios(4);
  const auto gap = closest_ratio(set, tan2_pi8());
  c.require(gap.gap >= 0.028L, fmt("closest element lies within 0.028: gap %.10Lg", gap.gap));
  c.require(gap.closest == Rational{1, 5}, "closest element is " + gap.closest.to_string() + ", expected 1/5");
  for (const auto& r : set.ratios) c.require(!equals_tan2_pi8_either(r), "exact hit at " + r.to_string());
  c.note(fmt("|R_4| = %zu, closest %s, gap %.12Lg", set.ratios.size(), gap.closest.to_string().c_str(), gap.gap));
}

// -------------------------------------------------------------- 3
// regression constant: |29/169 - tan^2(pi/8)|
const long double kGapP16 = 2.47578822847720902848e-05L;

void many_copy_no_go(Ctx& c) {
  const auto set = feasible_ratios(16);
  std::size_t hits = 0;
  for (const auto& r : set.ratios) hits += equals_tan2_pi8_either(r) ? 1 : 0;
  c.require(hits == 0, fmt("%zu exact hits", hits));
  const auto gap = closest_ratio(set, tan2_pi8());
  c.require(std::fabs(gap.gap - kGapP16) <= 1e-15L,
            fmt("minimum gap %.18Lg differs from the recorded %.18Lg", gap.gap, kGapP16));
  c.note(fmt("|R_16| = %zu, closest %s, gap %.12Lg", set.ratios.size(), gap.closest.to_string().c_str(), gap.gap));
}

// -------------------------------------------------------------- 4
void activation(Ctx& c) {
  const double tol = c.tol(1e-10);
  double worst = 0.0;
  int dominance_failures = 0;
  for (int i = 1; i <= 20; ++i) {
    const double q = 0.5 + 0.5 * i / 21.0;
    const double f2 = single_qubit_reduction_fidelity(q);
    for (int j = 1; j <= 20; ++j) {
      const double f = kFst + (1.0 - kFst) * j / 21.0;
      const auto rep = run_activation(q, f);
      worst = std::max(worst, std::abs(rep.simulated_fidelity - activation_fidelity(q, f)));
      if (!(rep.simulated_fidelity > f2 && f2 > kFst)) ++dominance_failures;
    }
  }
  c.require(worst <= tol, fmt("max |simulated - closed form| = %.3g", worst));
  c.require(dominance_failures == 0, fmt("f' > f'' > f_st violated at %d grid points", dominance_failures));
  c.note(fmt("20x20 grid: max deviation %.3g", worst));
}

// -------------------------------------------------------------- 5
void reduction(Ctx& c) {
  const double tol = c.tol(1e-10);
  const double otol = c.tol(1e-12);
  for (double q : {0.55, 0.7, 0.9}) {
    const auto rep = reduction_survey_activator(q);
    const double expected = single_qubit_reduction_fidelity(q);
    c.require(std::abs(rep.simulated_fidelity - expected) <= tol,
              fmt("q=%g: survey max %.17g vs f'' %.17g", q, rep.simulated_fidelity, expected));
    c.note(fmt("q=%g: survey max %.15g, f'' %.15g", q, rep.simulated_fidelity, expected));
    if (q == 0.7) {
      const double plus = rep.metrics.at("gamma_plus_overlap");
      const double minus = rep.metrics.at("gamma_minus_overlap");
      c.require(std::abs(plus - (9.0 + std::sqrt(3.0)) / 12.0) <= otol, fmt("gamma+ overlap %.17g", plus));
      c.require(std::abs(minus - (9.0 - std::sqrt(3.0)) / 12.0) <= otol, fmt("gamma- overlap %.17g", minus));
    }
  }
}

// -------------------------------------------------------------- 6
void code_overlap(Ctx& c) {
  const double tol = c.tol(1e-10);
  for (int n = 1; n <= 3; ++n) {
    for (int m = 0; m <= n; ++m) {
      const auto rep = max_code_overlap(n, m);
      const double expected = std::pow(kFst, n - m);
      c.require(std::abs(rep.max_value - expected) <= tol,
                fmt("(n,m)=(%d,%d): max %.17g vs %.17g", n, m, rep.max_value, expected));
      c.require(std::abs(rep.computational_value - rep.max_value) <= tol,
                fmt("(n,m)=(%d,%d): computational code gives %.17g", n, m, rep.computational_value));
      c.note(fmt("(n,m)=(%d,%d): %zu codes, max %.15g", n, m, rep.codes_searched, rep.max_value));
    }
  }
}

// -------------------------------------------------------------- 7
void census(Ctx& c) {
  const std::size_t expected[] = {6, 60, 1080};
  for (int n = 1; n <= 3; ++n) {
    const std::size_t got = enumerate_pure_stabilizers(n).size();
    c.require(got == expected[n - 1], fmt("n=%d: %zu states, expected %zu", n, got, expected[n - 1]));
  }
  c.note("6 / 60 / 1080");
}

// -------------------------------------------------------------- 8
void witness_hull(Ctx& c) {
  std::mt19937_64 rng(c.opts.seed);
  int witnessed = 0;
  int draws = 0;
  int unverified = 0;
  while (witnessed < 200 && draws < 10000) {
    ++draws;
    const int n = 1 + draws % 2;
    const auto rho = DensityMatrix::from_ket(random_ket(n, rng));
    if (!(st_norm(rho).value > 1.0 + 1e-6)) continue;
    ++witnessed;
    const auto hull = hull_membership(rho);
    if (hull.member || !hull.verified) ++unverified;
  }
  c.require(witnessed == 200, fmt("only %d witnessed states in %d draws", witnessed, draws));
  c.require(unverified == 0, fmt("%d witnessed states without a verified non-membership certificate", unverified));

  int mismatches = 0;
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    const auto rho = random_density_matrix(1, rng);
    const auto w = st_norm(rho);
    if (std::abs(w.value - 1.0) < 1e-6) continue;
    ++compared;
    if (w.witnessed == hull_membership(rho).member) ++mismatches;
  }
  c.require(mismatches == 0, fmt("single-qubit equivalence broken on %d of %d states", mismatches, compared));
  c.note(fmt("%d witnessed states certified; %d single-qubit states compared", witnessed, compared));
}

// -------------------------------------------------------------- 9
double bisect(const std::function<double(double)>& g, double lo, double hi) {
  // g(lo) and g(hi) have opposite signs
  const bool rising = g(hi) > g(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((g(mid) > 0.0) == rising ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

void ins_formulas(Ctx& c) {
  const double tol = c.tol(1e-12);
  const double ltol = c.tol(1e-10);
  const double t0 = (1.0 + std::sqrt(3.0)) / 2.0;
  for (int n = 1; n <= 10; ++n) {
    // q_min: the stabilizer norm of sigma_ins(q, n) crosses 1
    const double qmin_oracle = bisect(
        [&](double q) { return q * std::pow(t0, n) + (1.0 - q) / std::ldexp(1.0, n) - 1.0; }, 0.0, 1.0);
    // q_max: the eigenvalue bound lambda*(q, n) reaches f_st
    const double qmax_oracle = bisect([&](double q) { return lambda_star(q, n) - kFst; }, 0.0, 1.0);
    const auto r = ins_region(n);
    c.require(std::abs(r.q_min - qmin_oracle) <= tol, fmt("n=%d: q_min %.17g vs %.17g", n, r.q_min, qmin_oracle));
    c.require(std::abs(r.q_max - qmax_oracle) <= tol, fmt("n=%d: q_max %.17g vs %.17g", n, r.q_max, qmax_oracle));
    if (n <= 4) {
      const double dense = st_norm(sigma_ins(r.q_min, n)).value;
      c.require(std::abs(dense - 1.0) <= c.tol(1e-10), fmt("n=%d: dense st_norm at q_min is %.17g", n, dense));
    }
    const double lam = lambda_star(q_max(n), n);
    c.require(std::abs(lam - kFst) <= ltol, fmt("n=%d: lambda*(q_max) %.17g", n, lam));
    if (n <= 2) {
      c.require(r.analytic_equality && r.q_min == r.q_max, fmt("n=%d: analytic equality not reported", n));
    } else if (r.q_min > r.q_max) {
      c.flag(fmt("n=%d: q_min=%.6f exceeds q_max=%.6f, so the closed-form window is empty", n, r.q_min, r.q_max));
    }
  }
}

// -------------------------------------------------------------- 10
void asymptotic(Ctx& c) {
  const double tol = c.tol(1e-10);
  const double otol = c.tol(1e-12);
  for (int n = 2; n <= 3; ++n) {
    const auto rep = run_asymptotic(0.9, n);
    const double a = rep.metrics.at("a_overlap");
    const double b = rep.metrics.at("b_overlap");
    c.require(std::abs(a - 0.45) <= otol, fmt("a = %.17g, expected f/2", a));
    c.require(std::abs(b - 0.25) <= otol, fmt("b = %.17g, expected 1/4", b));
    const double rec = asymptotic_fidelity_recurrence(0.9, n);
    c.require(std::abs(rep.simulated_fidelity - rec) <= tol,
              fmt("n=%d: dense %.17g vs recurrence %.17g", n, rep.simulated_fidelity, rec));
    c.note(fmt("n=%d: dense %.15g, recurrence %.15g, closed form as printed %.15g", n, rep.simulated_fidelity, rec,
               asymptotic_fidelity_printed(0.9, n)));
  }
  for (double f : {0.9, 0.95}) {
    for (int n = 2; n < 5; ++n) {
      c.require(asymptotic_fidelity_recurrence(f, n + 1) > asymptotic_fidelity_recurrence(f, n),
                fmt("recurrence not increasing at f=%g n=%d", f, n));
      c.require(asymptotic_fidelity_printed(f, n + 1) > asymptotic_fidelity_printed(f, n),
                fmt("printed form not increasing at f=%g n=%d", f, n));
    }
  }
  const double fbk = constants().f_bk;
  int n_rec = 0;
  int n_pr = 0;
  for (int n = 2; n <= 200 && (n_rec == 0 || n_pr == 0); ++n) {
    if (n_rec == 0 && asymptotic_fidelity_recurrence(0.95, n) > fbk) n_rec = n;
    if (n_pr == 0 && asymptotic_fidelity_printed(0.95, n) > fbk) n_pr = n;
  }
  c.require(n_rec > 0 && n_pr > 0, "f = 0.95 never exceeds f_bk");
  c.note(fmt("f=0.95 exceeds f_bk from n=%d (recurrence) and n=%d (printed form)", n_rec, n_pr));
}

// -------------------------------------------------------------- 11
void daisy(Ctx& c) {
  const double tol = c.tol(1e-10);
  const double ltol = c.tol(1e-9);
  double worst_dense = 0.0;
  double worst_limit = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double q = 0.05 + 0.9 * i / 9.0;
    for (int j = 0; j < 10; ++j) {
      const double r = (1.0 - q) / 2.0 * (0.05 + 0.9 * j / 9.0);
      const auto rep = run_daisy_chain(q, r, 3);
      worst_dense = std::max(worst_dense, rep.metrics.at("dense_recurrence_max_deviation"));
      Eigen::Matrix2d m;
      m << q, r, r, 1.0 - q - 2.0 * r;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
      Eigen::Vector2d v = es.eigenvectors().col(1);
      v /= v.sum();
      worst_limit = std::max(worst_limit, std::abs(daisy_limit(q, r).value - v(0)));
    }
  }
  c.require(worst_dense <= tol, fmt("dense vs recurrence max deviation %.3g", worst_dense));
  c.require(worst_limit <= ltol, fmt("limit vs dominant eigenvector max deviation %.3g", worst_limit));
  c.note(fmt("10x10 grid: dense deviation %.3g, limit deviation %.3g", worst_dense, worst_limit));
  for (double q : {0.2, 0.5, 0.8}) {
    const double r = std::sqrt(q) * (1.0 - std::sqrt(q));
    const auto t = transfer_step(q, r);
    const auto f = daisy_recurrence(q, r, 5);
    double drift = std::abs(daisy_f0(q, r) - std::sqrt(q));
    for (double v : f) drift = std::max(drift, std::abs(v - std::sqrt(q)));
    c.require(std::abs(t.mu1 - t.mu2) <= tol,
              fmt("product point q=%g: eigenvalues %.15g and %.3g are not equal (M has rank one)", q, t.mu1, t.mu2));
    c.note(fmt("product point q=%g: every link sits at sqrt(q) (max drift %.3g)", q, drift));
  }
}

// -------------------------------------------------------------- 12
void twirl_check(Ctx& c) {
  const double tol = c.tol(1e-12);
  std::mt19937_64 rng(c.opts.seed);
  const CMatrix tb = t_basis_two_qubit();
  double off = 0.0;
  double tie = 0.0;
  double idem = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto rho = random_density_matrix(2, rng);
    const auto out = twirl(rho);
    const CMatrix d = tb.adjoint() * out.state.matrix() * tb;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        if (a != b) off = std::max(off, std::abs(d(a, b)));
      }
    }
    tie = std::max(tie, std::abs(d(0, 0) - d(3, 3)));
    idem = std::max(idem, (twirl(out.state).state.matrix() - out.state.matrix()).cwiseAbs().maxCoeff());
  }
  c.require(off < tol, fmt("largest off-diagonal T-basis entry %.3g", off));
  c.require(tie < tol, fmt("tau_00 / tau_11 weights differ by %.3g", tie));
  c.require(idem <= tol, fmt("twirl is not idempotent: %.3g", idem));
  c.note(fmt("100 inputs: off-diagonal %.3g, weight tie %.3g, idempotence %.3g", off, tie, idem));
}

// -------------------------------------------------------------- 13
void figure_data(Ctx& c) {
  const std::string ins_a = ins_region_csv(10);
  const std::string ins_b = ins_region_csv(10);
  c.require(ins_a == ins_b, "ins-region CSV differs between runs");
  const auto q = parse_axis("0:1:50", "q");
  const auto r = parse_axis("0:0.5:50", "r");
  const std::string serial = phase_diagram_csv(q, r, 1);
  const std::string parallel = phase_diagram_csv(q, r, 0);
  c.require(serial == parallel, "phase-diagram CSV depends on the thread count");
  for (const char* label : {",STABILIZER\n", ",UNIVERSAL\n", ",OPEN\n"}) {
    const std::size_t count = [&] {
      std::size_t k = 0;
      for (std::size_t pos = serial.find(label); pos != std::string::npos; pos = serial.find(label, pos + 1)) ++k;
      return k;
    }();
    std::string name(label + 1);
    name.pop_back();
    c.require(count > 0, "phase diagram has no " + name + " points");
    c.note(fmt("%s: %zu points", name.c_str(), count));
  }
}

using Body = void (*)(Ctx&);

struct Entry {
  CriterionInfo info;
  Body body;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r{
      {{1, "catalysis", 1.0}, catalysis},
      {{2, "catalysis-no-go", 1.0}, catalysis_no_go},
      {{3, "many-copy-no-go", 5.0}, many_copy_no_go},
      {{4, "activation", 5.0}, activation},
      {{5, "reduction-optimality", 10.0}, reduction},
      {{6, "code-overlap", 60.0}, code_overlap},
      {{7, "stabilizer-census", 30.0}, census},
      {{8, "witness-hull", 60.0}, witness_hull},
      {{9, "ins-formulas", 1.0}, ins_formulas},
      {{10, "asymptotic", 30.0}, asymptotic},
      {{11, "daisy-chain", 60.0}, daisy},
      {{12, "twirl", 10.0}, twirl_check},
      {{13, "figure-data", 300.0}, figure_data},
  };
  return r;
}

}  // namespace

const std::vector<CriterionInfo>& criteria() {
  static const std::vector<CriterionInfo> out = [] {
    std::vector<CriterionInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return out;
}

bool criterion_selected(const CriterionInfo& c, const std::vector<std::string>& only) {
  if (only.empty()) return true;
  bool hit = false;
  for (const auto& token : only) {
    bool known = false;
    for (const auto& other : criteria()) {
      const std::string name = other.name;
      const bool match = token == std::to_string(other.id) || token == name || name.starts_with(token + "-");
      known = known || match;
      if (match && other.id == c.id) hit = true;
    }
    if (!known) throw ValidationError("--only: unknown criterion '" + token + "'");
  }
  return hit;
}

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const Entry& e) { return e.info.id == id; });
  if (it == reg.end()) throw ValidationError("unknown criterion " + std::to_string(id));
  CriterionResult res;
  res.id = id;
  res.name = it->info.name;
  res.runtime_limit = it->info.runtime_limit;
  Ctx ctx{res, opts};
  const auto start = std::chrono::steady_clock::now();
  try {
    it->body(ctx);
  } catch (const std::exception& e) {
    ctx.require(false, std::string("exception: ") + e.what());
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ctx.require(res.seconds < res.runtime_limit, fmt("runtime %.3f s exceeds %.0f s", res.seconds, res.runtime_limit));
  res.passed = ctx.ok;
  return res;
}

std::vector<CriterionResult> verify_all(const VerifyOptions& opts) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) {
    if (criterion_selected(c, opts.only)) out.push_back(run_criterion(c.id, opts));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::string s = fmt("[%s] %2d %-22s %8.3f s", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds);
  for (const auto& d : r.diagnostics) s += "\n       " + d;
  for (const auto& f : r.flagged) s += "\n       FLAG: " + f;
  return s;
}

Json to_json(const std::vector<CriterionResult>& results) {
  Json arr = Json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    arr.push_back({{"id", r.id},
                   {"name", r.name},
                   {"passed", r.passed},
                   {"seconds", r.seconds},
                   {"runtime_limit", r.runtime_limit},
                   {"diagnostics", r.diagnostics},
                   {"flagged", r.flagged}});
  }
  return {{"all_passed", all}, {"criteria", std::move(arr)}};
}

}  // namespace magic
