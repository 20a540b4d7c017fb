#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace actsearch {

// A replay environment ran past the end of its logged permutation.
struct ExhaustedSamples : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A candidate was handed to the verifier twice.
struct AlreadyVerified : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The instance has zero positive mass; no search policy can succeed on it.
struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A replay trial contains no correct sample at any prefix.
struct InfeasibleTrial : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A difficulty class contains a trial that no fixed pair can solve.
struct NoFeasiblePair : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Policies being aggregated did not run the same paired trial set.
struct MismatchedTrialSets : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dataset file could not be parsed; carries the offending line number.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_number(line) {}
  std::size_t line_number;
};

// A problem in a dataset has no samples.
struct EmptyProblem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An exact combinatorial search ran out of node budget. Carries the best
// bound established before giving up.
struct SearchBudgetExceeded : std::runtime_error {
  SearchBudgetExceeded(const std::string& what, std::int64_t bound)
      : std::runtime_error(what), best_lower_bound(bound) {}
  std::int64_t best_lower_bound;
};

}  // namespace actsearch
