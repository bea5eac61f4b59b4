#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dtsel {

// Deliberate defects used as negative controls for the verifier.
enum class Fault { none, linear_rule, polya, fold };

struct VerifyOptions {
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::size_t max_q = 6;      // linear-rule suite: q in 1..max_q
  std::size_t max_cases = 30; // Polya suite: n in 0..max_cases
  Fault fault = Fault::none;
};

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::string first_failure;  // JSON manifest reproducing the first mismatch
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool passed() const;
};

// Polya-urn vs closed-form score, linear rule vs exhaustive argmin, and
// learn() vs the folded sequential decision tree.
VerifyReport run_verification(const VerifyOptions& options);

}  // namespace dtsel
