#include "doctest.h"

#include "magic/report.hpp"
#include "magic/verify.hpp"

#include <sstream>

using namespace magic;

TEST_CASE("format_number uses 15 significant digits") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333333");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(2.0) == "2");
}

TEST_CASE("grid axes") {
  const auto a = parse_axis("0:1:5", "q");
  const auto p = a.points();
  REQUIRE(p.size() == 5);
  CHECK(p.front() == 0.0);
  CHECK(p.back() == 1.0);
  CHECK(p[2] == 0.5);
  CHECK(parse_axis("0.3:0.3:1", "q").points() == std::vector<double>{0.3});
  for (const char* bad : {"0:1", "0:1:0", "1:0:3", "a:1:3", "0:1:3:4", "0:1:2.5"}) {
    CHECK_THROWS_AS(parse_axis(bad, "q"), ValidationError);
  }
  try {
    parse_axis("0:1", "r");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("--r") != std::string::npos);
  }
}

TEST_CASE("ins-region CSV") {
  const std::string csv = ins_region_csv(3);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,q_min,q_max,region_nonempty");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv == ins_region_csv(3));
  CHECK_THROWS_AS(ins_region_csv(0), ValidationError);
}

TEST_CASE("phase diagram CSV is independent of thread count and marks invalid points") {
  const auto q = parse_axis("0:1:7", "q");
  const auto r = parse_axis("0:0.5:6", "r");
  const std::string one = phase_diagram_csv(q, r, 1);
  CHECK(one == phase_diagram_csv(q, r, 4));
  CHECK(one.starts_with("q,r,f_limit,class\n"));
  CHECK(one.find("1,0.5,,INVALID\n") != std::string::npos);
  CHECK(one.find("0,0,1,UNIVERSAL\n") != std::string::npos);
  CHECK_THROWS_AS(phase_diagram_csv(parse_axis("0:2:3", "q"), r, 1), ValidationError);
}

TEST_CASE("protocol report JSON") {
  const Json j = to_json(run_activation(0.75, 0.85));
  CHECK(j["protocol"] == "activation");
  CHECK(j["output"]["matrix"].size() == 2);
  CHECK(j["output"]["matrix"][0][0].size() == 2);
  CHECK(j["leaves"].size() == 4);
  CHECK(j["branch_log"].size() == 6);
  CHECK(std::abs(j["simulated_fidelity"].get<double>() - 17.0 / 18.0) < 1e-12);
  const Json d = to_json(run_daisy_chain(0.3, 0.2, 3));
  CHECK_FALSE(d["metrics"].contains("f_limit_printed"));
  CHECK(d["metrics"]["limit_branch_marker"] == 1.0);
}

TEST_CASE("stabilizer dump") {
  const Json j = stabilizer_dump_json(1);
  CHECK(j["count"] == 6);
  CHECK(j["states"].size() == 6);
  CHECK(j["states"][0].size() == 2);
}

TEST_CASE("criterion selection") {
  const auto& all = criteria();
  REQUIRE(all.size() == 13);
  int picked = 0;
  for (const auto& c : all) picked += criterion_selected(c, {"catalysis"}) ? 1 : 0;
  CHECK(picked == 2);
  picked = 0;
  for (const auto& c : all) picked += criterion_selected(c, {"7", "twirl"}) ? 1 : 0;
  CHECK(picked == 2);
  CHECK_THROWS_AS(criterion_selected(all[0], {"nope"}), ValidationError);
}

TEST_CASE("a tightened tolerance fails floating-point criteria with diagnostics") {
  VerifyOptions opts;
  opts.tol = 1e-30;
  const auto res = run_criterion(4, opts);
  CHECK_FALSE(res.passed);
  CHECK_FALSE(res.diagnostics.empty());
  // exact counting criteria ignore the tolerance
  CHECK(run_criterion(7, opts).passed);
}
