#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace gstlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool checks_pass = false;   // all numerical checks
  double seconds = 0.0;
  double budget = 0.0;        // wall-clock limit in seconds
  std::string detail;         // one-line summary of the measured values
  nlohmann::ordered_json metrics;

  bool pass() const { return checks_pass && seconds < budget; }
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240601;  // pinned; every stream derives from it
  int threads = 1;
};

// Suite tags: all, ou, well, sandwich, envelopes, markov, invariance, comparison.
const std::vector<std::string>& suite_names();
// Throws Error(InvalidArgument) for an unknown tag.
std::vector<int> suite_criteria(const std::string& suite);

CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});
std::vector<CriterionResult> run_suite(const std::string& suite, const AcceptanceOptions& opts = {});

// "PASS  3 finite_well  (0.41 s < 30 s)  ..." style line.
std::string format_line(const CriterionResult& r);
nlohmann::ordered_json to_json(const CriterionResult& r);

}  // namespace gstlab
