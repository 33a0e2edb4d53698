#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace grinder {

struct VerifyCheck {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyReport {
  std::string suite;
  std::vector<VerifyCheck> checks;

  bool passed() const;
  /// Machine-readable form: {"suite", "passed", "checks": [...]}.
  std::string to_json() const;
};

std::vector<std::string> list_suites();

/// Throws UnknownSuite for an unregistered name.
VerifyReport verify_suite(std::string_view name);

}  // namespace grinder
