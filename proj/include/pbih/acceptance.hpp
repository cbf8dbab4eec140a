#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pbih {

struct AcceptanceOptions {
  /// Replaces every residual and agreement tolerance of the suite.
  std::optional<double> tolerance;
  /// Substring matched against check names and tags; empty runs all.
  std::string filter;
  std::uint64_t seed = 20240601;
  int workers = 1;
};

struct CheckOutcome {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct CheckInfo {
  int id;
  std::string name;
  std::vector<std::string> tags;
};

const std::vector<CheckInfo>& acceptance_checks();

/// Runs the selected checks in id order, reporting each as it finishes.
std::vector<CheckOutcome> run_acceptance(const AcceptanceOptions& options,
                                         const std::function<void(const CheckOutcome&)>& on_result = {});

/// "[PASS]  4 dual_route_agreement  ...  (0.52 s)"
std::string format_outcome(const CheckOutcome& outcome);

}  // namespace pbih
