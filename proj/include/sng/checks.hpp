#pragma once

// Self-verification suites run by `sng check`.

#include <string>
#include <vector>

namespace sng {

struct CheckResult {
  std::string suite;
  std::string name;
  double value;
  double threshold;
  bool passed;
};

const std::vector<std::string>& known_suites();

/// Throws InvalidArgument for an unknown suite name.
std::vector<CheckResult> run_suite(const std::string& suite);

}  // namespace sng
