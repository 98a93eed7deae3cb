#pragma once

// Acceptance criteria 1..13, each a self-contained check with diagnostics.

#include "magic/report.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace magic {

struct VerifyOptions {
  /// Replaces every pinned floating-point tolerance when set.
  std::optional<double> tol;
  std::uint64_t seed = 0;
  /// Criterion numbers or names; a name also selects "name-*". Empty runs everything.
  std::vector<std::string> only;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  double runtime_limit = 0.0;
  std::vector<std::string> diagnostics;
  /// Reported discrepancies that do not fail the criterion.
  std::vector<std::string> flagged;
};

struct CriterionInfo {
  int id;
  const char* name;
  double runtime_limit;
};

const std::vector<CriterionInfo>& criteria();

/// Throws ValidationError for a token matching no criterion.
bool criterion_selected(const CriterionInfo& c, const std::vector<std::string>& only);

CriterionResult run_criterion(int id, const VerifyOptions& opts);
std::vector<CriterionResult> verify_all(const VerifyOptions& opts);

/// "[PASS]  1 catalysis (0.012 s)" followed by indented diagnostics.
std::string format_result(const CriterionResult& r);
Json to_json(const std::vector<CriterionResult>& results);

}  // namespace magic
