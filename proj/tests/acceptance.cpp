// Acceptance suite: one PASS/FAIL line per criterion, exit 0 iff all selected pass.

#include "magic/verify.hpp"

#include "CLI11.hpp"

#include <cstdio>

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria", "magicsim_acceptance"};
  magic::VerifyOptions opts;
  std::optional<double> tol;
  app.add_option("--only", opts.only, "Criterion numbers or names")->delimiter(',');
  app.add_option("--tol", tol, "Replace every pinned tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", opts.seed, "Seed for randomized checks");
  CLI11_PARSE(app, argc, argv);
  opts.tol = tol;

  std::vector<magic::CriterionResult> results;
  try {
    results = magic::verify_all(opts);
  } catch (const magic::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  int failed = 0;
  for (const auto& r : results) {
    std::puts(magic::format_result(r).c_str());
    failed += r.passed ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", results.size() - static_cast<std::size_t>(failed), results.size());
  return failed == 0 ? 0 : 1;
}
