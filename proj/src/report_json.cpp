#include "magic/report.hpp"

#include "magic/states.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace magic {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

Json matrix_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Json ket_json(const Ket& k) {
  Json out = Json::array();
  for (std::size_t i = 0; i < k.dim(); ++i) out.push_back({k[i].real(), k[i].imag()});
  return out;
}

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const ProtocolReport& rep) {
  Json j;
  j["protocol"] = rep.protocol;
  j["success_probability"] = rep.success_probability;
  j["simulated_fidelity"] = rep.simulated_fidelity;
  j["closed_form_fidelity"] = rep.closed_form_fidelity ? Json(*rep.closed_form_fidelity) : Json(nullptr);
  j["agreement"] = rep.agreement ? Json(*rep.agreement) : Json(nullptr);
  j["output"] = {{"num_qubits", rep.output.num_qubits()}, {"matrix", matrix_json(rep.output.matrix())}};
  Json branches = Json::array();
  for (const auto& b : rep.branch_log) {
    branches.push_back({{"path", b.path},
                        {"observable", b.observable},
                        {"outcome", b.outcome},
                        {"probability", b.probability},
                        {"correction", b.correction}});
  }
  j["branch_log"] = std::move(branches);
  Json leaves = Json::array();
  for (const auto& l : rep.leaves) {
    leaves.push_back({{"path", l.path},
                      {"probability", l.probability},
                      {"fidelity", l.fidelity},
                      {"postselected", l.postselected}});
  }
  j["leaves"] = std::move(leaves);
  Json metrics = Json::object();
  for (const auto& [k, v] : rep.metrics) metrics[k] = finite_or_null(v);
  j["metrics"] = std::move(metrics);
  Json series = Json::object();
  for (const auto& [k, v] : rep.series) series[k] = v;
  j["series"] = std::move(series);
  j["notes"] = rep.notes;
  return j;
}

Json to_json(const HullResult& hull, const DensityMatrix& rho) {
  Json j;
  j["num_qubits"] = rho.num_qubits();
  j["member"] = hull.member;
  j["verified"] = hull.verified;
  j["slack"] = hull.slack;
  j["weights"] = hull.weights;
  j["certificate"] = hull.certificate;
  return j;
}

Json to_json(const OverlapReport& rep) {
  return {{"n", rep.n},
          {"m", rep.m},
          {"max_value", rep.max_value},
          {"expected", std::pow(constants().f_st, rep.n - rep.m)},
          {"computational_value", rep.computational_value},
          {"argmax_code", rep.argmax_code.to_string()},
          {"codes_searched", rep.codes_searched}};
}

Json to_json(const RatioGap& gap, int P) {
  return {{"p", P},
          {"closest", gap.closest.to_string()},
          {"gap", static_cast<double>(gap.gap)},
          {"count", gap.count},
          {"via_reciprocal", gap.via_reciprocal}};
}

Json stabilizer_dump_json(int n) {
  const auto& states = enumerate_pure_stabilizers(n);
  Json arr = Json::array();
  for (const auto& s : states) arr.push_back(ket_json(s));
  return {{"n", n}, {"count", states.size()}, {"states", std::move(arr)}};
}

// ---------------------------------------------------------------- sweeps

std::vector<double> GridAxis::points() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) {
    out.push_back(start);
    return out;
  }
  for (int i = 0; i < steps; ++i) out.push_back(start + (stop - start) * i / (steps - 1));
  out.back() = stop;
  return out;
}

GridAxis parse_axis(std::string_view text, std::string_view key) {
  const std::string name(key);
  const auto bad = [&](const std::string& why) {
    return ValidationError("--" + name + ": " + why + " (expected start:stop:steps, got '" + std::string(text) + "')");
  };
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos) throw bad("malformed grid");
  auto number = [&](std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) throw bad("bad number");
    return v;
  };
  GridAxis a;
  a.start = number(text.substr(0, c1));
  a.stop = number(text.substr(c1 + 1, c2 - c1 - 1));
  const auto steps_text = text.substr(c2 + 1);
  const auto res = std::from_chars(steps_text.data(), steps_text.data() + steps_text.size(), a.steps);
  if (res.ec != std::errc() || res.ptr != steps_text.data() + steps_text.size()) throw bad("bad step count");
  if (a.steps < 1 || a.steps > 10000) throw bad("steps must lie in 1..10000");
  if (a.start > a.stop) throw bad("start exceeds stop");
  return a;
}

std::string ins_region_csv(int n_max) {
  if (n_max < 1 || n_max > 64) throw ValidationError("--n-max must lie in 1..64");
  std::string out = "n,q_min,q_max,region_nonempty\n";
  for (int n = 1; n <= n_max; ++n) {
    const auto r = ins_region(n);
    out += std::to_string(n) + "," + format_number(r.q_min) + "," + format_number(r.q_max) + "," +
           (r.region_nonempty ? "true" : "false") + "\n";
  }
  return out;
}

std::string phase_diagram_csv(const GridAxis& q, const GridAxis& r, unsigned threads) {
  const auto qs = q.points();
  const auto rs = r.points();
  for (double v : qs) {
    if (v < 0.0 || v > 1.0) throw ValidationError("--q values must lie in [0,1]");
  }
  for (double v : rs) {
    if (v < 0.0 || v > 0.5) throw ValidationError("--r values must lie in [0,0.5]");
  }
  const std::size_t total = qs.size() * rs.size();
  std::vector<std::string> rows(total);
  // warm the shared enumeration cache before fanning out
  (void)enumerate_pure_stabilizers(2);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < total; i = next++) {
        const double qv = qs[i / rs.size()];
        const double rv = rs[i % rs.size()];
        std::string row = format_number(qv) + "," + format_number(rv) + ",";
        if (qv + 2.0 * rv > 1.0 + 1e-12) {
          row += ",INVALID\n";
        } else {
          const auto pc = classify_phase(qv, std::min(rv, (1.0 - qv) / 2.0));
          row += format_number(pc.f_limit) + "," + phase_label_name(pc.label) + "\n";
        }
        rows[i] = std::move(row);
      }
    } catch (...) {
      const std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = total;
    }
  };
  unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(total, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  std::string out = "q,r,f_limit,class\n";
  for (const auto& row : rows) out += row;
  return out;
}

}  // namespace magic
