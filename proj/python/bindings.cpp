#include "magic/report.hpp"
#include "magic/states.hpp"
#include "magic/verify.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace magic;

namespace {

std::string dumps(const Json& j) { return j.dump(); }

CatalysisVariant parse_variant(const std::string& v) {
  if (v == "pure") return CatalysisVariant::PURE;
  if (v == "mixed") return CatalysisVariant::MIXED;
  throw ValidationError("variant must be 'pure' or 'mixed'");
}

DensityMatrix state_from_spec(const std::string& text) {
  const auto spec = StateSpec::parse(text);
  spec.validate();
  return as_density(make_state(spec));
}

}  // namespace

PYBIND11_MODULE(_magicsim, m) {
  m.doc() = "Dense simulator for magic-state catalysis, activation and stabilizer-hull checks";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

  m.def("constants", [] {
    const auto& c = constants();
    return py::dict(py::arg("f_st") = c.f_st, py::arg("f_bk") = c.f_bk, py::arg("beta") = c.beta,
                    py::arg("gamma") = c.gamma);
  });

  m.def("state_matrix", [](const std::string& spec) { return CMatrix(state_from_spec(spec).matrix()); },
        py::arg("spec"), "Density matrix of a state spec such as 'tau:f=0.85'.");
  m.def("st_norm", [](const std::string& spec) { return st_norm(state_from_spec(spec)).value; }, py::arg("spec"));
  m.def("hull_check", [](const std::string& spec) {
    const auto rho = state_from_spec(spec);
    Json j = to_json(hull_membership(rho), rho);
    j["state"] = spec;
    return dumps(j);
  }, py::arg("spec"));
  m.def("stabilizer_count", [](int n) { return enumerate_pure_stabilizers(n).size(); }, py::arg("n"));
  m.def("dump_stabilizers", [](int n) { return dumps(stabilizer_dump_json(n)); }, py::arg("n"));

  m.def("run_catalysis", [](const std::string& v) { return dumps(to_json(run_catalysis(parse_variant(v)))); },
        py::arg("variant") = "pure");
  m.def("run_activation", [](double q, double f) { return dumps(to_json(run_activation(q, f))); }, py::arg("q"),
        py::arg("f"));
  m.def("run_asymptotic", [](double f, int n) { return dumps(to_json(run_asymptotic(f, n))); }, py::arg("f"),
        py::arg("n"));
  m.def("run_daisy_chain", [](double q, double r, int n) { return dumps(to_json(run_daisy_chain(q, r, n))); },
        py::arg("q"), py::arg("r"), py::arg("n"));
  m.def("reduction_survey_activator", [](double q) { return dumps(to_json(reduction_survey_activator(q))); },
        py::arg("q"));

  m.def("activation_fidelity", &activation_fidelity, py::arg("q"), py::arg("f"));
  m.def("single_qubit_reduction_fidelity", &single_qubit_reduction_fidelity, py::arg("q"));
  m.def("asymptotic_fidelity_recurrence", &asymptotic_fidelity_recurrence, py::arg("f"), py::arg("n"));
  m.def("asymptotic_fidelity_printed", &asymptotic_fidelity_printed, py::arg("f"), py::arg("n"));
  m.def("daisy_limit", [](double q, double r) { return daisy_limit(q, r).value; }, py::arg("q"), py::arg("r"));
  m.def("daisy_recurrence", &daisy_recurrence, py::arg("q"), py::arg("r"), py::arg("links"));
  m.def("classify_phase", [](double q, double r) {
    const auto pc = classify_phase(q, r);
    return py::make_tuple(phase_label_name(pc.label), pc.f_limit);
  }, py::arg("q"), py::arg("r"));
  m.def("twirl", [](const Eigen::MatrixXcd& rho) {
    const auto res = twirl(DensityMatrix(2, rho));
    return py::make_tuple(CMatrix(res.state.matrix()), res.q, res.r);
  }, py::arg("rho"));

  m.def("q_min", &q_min, py::arg("n"));
  m.def("q_max", &q_max, py::arg("n"));
  m.def("lambda_star", &lambda_star, py::arg("q"), py::arg("n"));
  m.def("ratios", [](int p, double target) {
    return dumps(to_json(closest_ratio(feasible_ratios(p), static_cast<long double>(target)), p));
  }, py::arg("p"), py::arg("target"));
  m.def("tan2_pi8", [] { return static_cast<double>(tan2_pi8()); });

  m.def("ins_region_csv", &ins_region_csv, py::arg("n_max"));
  m.def("phase_diagram_csv", [](const std::string& q, const std::string& r, unsigned threads) {
    return phase_diagram_csv(parse_axis(q, "q"), parse_axis(r, "r"), threads);
  }, py::arg("q"), py::arg("r"), py::arg("threads") = 0);

  m.def("verify", [](const std::vector<std::string>& only, std::uint64_t seed) {
    VerifyOptions opts;
    opts.only = only;
    opts.seed = seed;
    return dumps(to_json(verify_all(opts)));
  }, py::arg("only") = std::vector<std::string>{}, py::arg("seed") = 0);
}
