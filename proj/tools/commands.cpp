#include "commands.hpp"

#include "magic/report.hpp"
#include "magic/states.hpp"
#include "magic/verify.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace magicsim_cli {

namespace {

using magic::Json;

struct Common {
  std::string out;
  double tol = 1e-9;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Output path (default: standard output)");
  sub->add_option("--tol", c.tol, "Agreement tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "Seed for randomized checks");
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty() || c.out == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw magic::ValidationError("--out: cannot open '" + c.out + "' for writing");
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Emits the report and flags a closed-form disagreement beyond --tol.
int emit_report(const Common& c, magic::ProtocolReport rep, Json params, std::ostream& out, std::ostream& err) {
  Json j = magic::to_json(rep);
  j["parameters"] = std::move(params);
  emit(c, dump(j), out);
  if (rep.agreement && *rep.agreement > c.tol) {
    err << "error: simulation and closed form disagree by " << *rep.agreement << " (tol " << c.tol << ")\n";
    return kExitInvariant;
  }
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Magic-state catalysis, activation and stabilizer-hull toolkit", "magicsim"};
  app.require_subcommand(1);
  Common common;
  std::function<int()> action;

  // catalysis
  std::string variant = "pure";
  std::string interconvert;
  auto* cat = app.add_subcommand("catalysis", "Deterministic H-state catalysis or sigma_phi interconversion");
  cat->add_option("--variant", variant, "Catalyst form")->check(CLI::IsMember({"pure", "mixed"}));
  cat->add_option("--interconvert", interconvert, "Run the sigma_phi conversion instead")
      ->check(CLI::IsMember({"to-mixed", "to-pure"}));
  add_common(cat, common);
  cat->callback([&] {
    action = [&] {
      if (!interconvert.empty()) {
        const auto dir = interconvert == "to-mixed" ? magic::InterconvertDirection::TO_MIXED
                                                    : magic::InterconvertDirection::TO_PURE;
        return emit_report(common, magic::sigma_phi_interconvert(dir), {{"interconvert", interconvert}}, out, err);
      }
      const auto v = variant == "pure" ? magic::CatalysisVariant::PURE : magic::CatalysisVariant::MIXED;
      return emit_report(common, magic::run_catalysis(v), {{"variant", variant}}, out, err);
    };
  });

  // activation
  double act_q = 0.75;
  double act_f = 0.85;
  auto* act = app.add_subcommand("activation", "Activate tau(f) with the two-qubit activator sigma(q)");
  act->add_option("--q", act_q, "Activator weight")->check(CLI::Range(0.0, 1.0));
  act->add_option("--f", act_f, "Noisy T-state fidelity")->check(CLI::Range(0.0, 1.0));
  add_common(act, common);
  act->callback([&] {
    action = [&] { return emit_report(common, magic::run_activation(act_q, act_f), {{"q", act_q}, {"f", act_f}}, out, err); };
  });

  // asymptotic
  double asy_f = 0.9;
  int asy_n = 3;
  auto* asy = app.add_subcommand("asymptotic", "Activation with the n-qubit INS activator at q_max(n)");
  asy->add_option("--f", asy_f, "Noisy T-state fidelity")->check(CLI::Range(0.0, 1.0));
  asy->add_option("--n", asy_n, "Activator size")->check(CLI::Range(2, 5));
  add_common(asy, common);
  asy->callback([&] {
    action = [&] { return emit_report(common, magic::run_asymptotic(asy_f, asy_n), {{"f", asy_f}, {"n", asy_n}}, out, err); };
  });

  // daisy-chain
  double dc_q = 0.6;
  double dc_r = 0.05;
  int dc_n = 10;
  auto* dc = app.add_subcommand("daisy-chain", "Iterated singlet projections along copies of sigma(q,r)");
  dc->add_option("--q", dc_q, "Weight of tau_{1,0}")->check(CLI::Range(0.0, 1.0));
  dc->add_option("--r", dc_r, "Weight of tau_{0,0} and of tau_{1,1}")->check(CLI::Range(0.0, 0.5));
  dc->add_option("--n", dc_n, "Number of copies")->check(CLI::Range(2, 100000));
  add_common(dc, common);
  dc->callback([&] {
    action = [&] {
      return emit_report(common, magic::run_daisy_chain(dc_q, dc_r, dc_n), {{"q", dc_q}, {"r", dc_r}, {"n", dc_n}},
                         out, err);
    };
  });

  // phase-diagram
  std::string pd_q = "0:1:50";
  std::string pd_r = "0:0.5:50";
  unsigned pd_threads = 0;
  auto* pd = app.add_subcommand("phase-diagram", "Classify sigma(q,r) on a grid (CSV q,r,f_limit,class)");
  pd->add_option("--q", pd_q, "start:stop:steps");
  pd->add_option("--r", pd_r, "start:stop:steps");
  pd->add_option("--threads", pd_threads, "Worker threads (0 = hardware)");
  add_common(pd, common);
  pd->callback([&] {
    action = [&] {
      const auto q = magic::parse_axis(pd_q, "q");
      const auto r = magic::parse_axis(pd_r, "r");
      emit(common, magic::phase_diagram_csv(q, r, pd_threads), out);
      return kExitOk;
    };
  });

  // ins-region
  int ins_n = 10;
  auto* ins = app.add_subcommand("ins-region", "q_min and q_max of sigma_ins per n (CSV)");
  ins->add_option("--n-max", ins_n, "Largest n")->check(CLI::Range(1, 64));
  add_common(ins, common);
  ins->callback([&] {
    action = [&] {
      emit(common, magic::ins_region_csv(ins_n), out);
      return kExitOk;
    };
  });

  // ratios
  int rat_p = 4;
  std::string rat_target = "tan2pi8";
  auto* rat = app.add_subcommand("ratios", "Closest feasible amplitude ratio to a target (JSON)");
  rat->add_option("--p", rat_p, "Pseudo-stabilizer complexity")->check(CLI::Range(1, magic::kMaxRatioComplexity));
  rat->add_option("--target", rat_target, "A number, or tan2pi8");
  add_common(rat, common);
  rat->callback([&] {
    action = [&] {
      long double target = 0.0L;
      if (rat_target == "tan2pi8") {
        target = magic::tan2_pi8();
      } else {
        std::size_t used = 0;
        try {
          target = std::stold(rat_target, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != rat_target.size() || !std::isfinite(static_cast<double>(target)) || target < 0.0L) {
          throw magic::ValidationError("--target: expected a nonnegative number or tan2pi8, got '" + rat_target + "'");
        }
      }
      const auto set = magic::feasible_ratios(rat_p);
      const auto gap = magic::closest_ratio(set, target);
      Json j = magic::to_json(gap, rat_p);
      j["target"] = rat_target;
      bool exact = false;
      if (rat_target == "tan2pi8") {
        for (const auto& r : set.ratios) exact = exact || magic::equals_tan2_pi8_either(r);
        j["exact_hit"] = exact;
      }
      emit(common, dump(j), out);
      return kExitOk;
    };
  });

  // lemma2-check
  int l2_n = 3;
  auto* l2 = app.add_subcommand("lemma2-check", "max code overlap against f_st^(n-m) for every n, m (JSON)");
  l2->add_option("--n-max", l2_n, "Largest n")->check(CLI::Range(1, magic::kMaxEnumQubits));
  add_common(l2, common);
  l2->callback([&] {
    action = [&] {
      Json rows = Json::array();
      bool ok = true;
      for (int n = 1; n <= l2_n; ++n) {
        for (int m = 0; m <= n; ++m) {
          Json j = magic::to_json(magic::max_code_overlap(n, m));
          const bool match = std::abs(j["max_value"].get<double>() - j["expected"].get<double>()) <= common.tol &&
                             std::abs(j["computational_value"].get<double>() - j["max_value"].get<double>()) <= common.tol;
          j["match"] = match;
          ok = ok && match;
          rows.push_back(std::move(j));
        }
      }
      emit(common, dump({{"all_match", ok}, {"results", std::move(rows)}}), out);
      return ok ? kExitOk : kExitInvariant;
    };
  });

  // hull-check
  std::string hc_state;
  auto* hc = app.add_subcommand("hull-check", "Stabilizer-hull membership with certificate (JSON)");
  hc->add_option("--state", hc_state, "State spec, e.g. tau:f=0.85 or sigma_corr:q=0.6,r=0.05")->required();
  add_common(hc, common);
  hc->callback([&] {
    action = [&] {
      const auto spec = magic::StateSpec::parse(hc_state);
      spec.validate();
      const auto rho = magic::as_density(magic::make_state(spec));
      if (rho.num_qubits() > magic::kMaxEnumQubits) {
        throw magic::ValidationError("--state: hull membership supports at most 3 qubits");
      }
      const auto hull = magic::hull_membership(rho);
      Json j = magic::to_json(hull, rho);
      j["state"] = spec.to_string();
      j["st_norm"] = magic::st_norm(rho, common.tol).value;
      emit(common, dump(j), out);
      if (!hull.member && !hull.verified) {
        err << "error: non-membership certificate failed re-verification\n";
        return kExitInvariant;
      }
      return kExitOk;
    };
  });

  // dump-stabilizers
  int ds_n = 1;
  auto* ds = app.add_subcommand("dump-stabilizers", "All pure stabilizer states as amplitude pairs (JSON)");
  ds->add_option("--n", ds_n, "Qubits")->check(CLI::Range(1, magic::kMaxEnumQubits));
  add_common(ds, common);
  ds->callback([&] {
    action = [&] {
      emit(common, dump(magic::stabilizer_dump_json(ds_n)), out);
      return kExitOk;
    };
  });

  // verify-all
  std::optional<double> va_tol;
  std::vector<std::string> va_only;
  std::string va_format = "table";
  auto* va = app.add_subcommand("verify-all", "Run the acceptance criteria");
  va->add_option("--out", common.out, "Output path (default: standard output)");
  va->add_option("--tol", va_tol, "Replace every pinned tolerance")->check(CLI::PositiveNumber);
  va->add_option("--seed", common.seed, "Seed for randomized checks");
  va->add_option("--only", va_only, "Criterion numbers or names")->delimiter(',');
  va->add_option("--format", va_format, "table or json")->check(CLI::IsMember({"table", "json"}));
  va->callback([&] {
    action = [&] {
      magic::VerifyOptions opts;
      opts.tol = va_tol;
      opts.seed = common.seed;
      opts.only = va_only;
      const auto results = magic::verify_all(opts);
      bool all = true;
      std::string text;
      for (const auto& r : results) {
        all = all && r.passed;
        text += magic::format_result(r) + "\n";
      }
      std::size_t passed = 0;
      for (const auto& r : results) passed += r.passed ? 1 : 0;
      text += std::to_string(passed) + "/" + std::to_string(results.size()) + " criteria passed\n";
      emit(common, va_format == "json" ? dump(magic::to_json(results)) : text, out);
      return all ? kExitOk : kExitInvariant;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    return action();
  } catch (const magic::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const magic::InvariantError& e) {
    err << "internal invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
}

}  // namespace magicsim_cli
