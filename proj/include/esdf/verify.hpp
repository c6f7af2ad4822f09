#pragma once

// Randomized property checks of the flux and entropy identities.

#include <cstdint>
#include <string>
#include <vector>

namespace esdf {

struct VerifyOptions {
  std::uint64_t seed = 1;
  long count = 10000;
  /// Mutation hook: flips the sign of the dissipation term.
  bool inject_sign_flip = false;
};

struct PropertyResult {
  std::string name;
  long samples = 0;
  long failures = 0;
  double max_error = 0.0;  // worst scaled error (or worst violation for sign checks)
  double tolerance = 0.0;
  std::string counterexample;  // first failing sample

  bool passed() const { return samples > 0 && failures == 0; }
};

struct VerifyReport {
  std::uint64_t seed = 0;
  long count = 0;
  std::vector<PropertyResult> properties;

  bool all_passed() const;
  const PropertyResult& find(const std::string& name) const;
  /// One key=value line per property, then one line per counterexample,
  /// then a final summary line.
  std::string text() const;
};

VerifyReport run_verify(const VerifyOptions& opt);

}  // namespace esdf
