#pragma once

// Machine-readable check reports shared by the verification commands.

#include <string>
#include <vector>

namespace pnet {

struct CheckResult {
  std::string check_id;
  std::string instance;
  bool passed = false;
  std::string lhs;  // rendered only for failures
  std::string rhs;
};

struct Report {
  std::vector<CheckResult> checks;

  void add(std::string check_id, std::string instance, bool passed, std::string lhs = "",
           std::string rhs = "") {
    checks.push_back(
        CheckResult{std::move(check_id), std::move(instance), passed, std::move(lhs), std::move(rhs)});
  }
  void merge(const Report& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  }
  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  size_t failures() const {
    size_t n = 0;
    for (const auto& c : checks)
      if (!c.passed) ++n;
    return n;
  }

  std::string to_text() const;
  std::string to_json() const;
};

}  // namespace pnet
