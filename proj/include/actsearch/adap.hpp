#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "actsearch/core.hpp"

namespace actsearch {

// Integer scale pair: q_t ~ 2^-a, s_t ~ 2^-b, a <= b. Its cost scale is
// B_{a,b} = c_rew * 2^b + c_ver * 2^(b-a).
struct DyadicPair {
  int a = 0;
  int b = 0;
};

inline double dyadic_cost_scale(const DyadicPair& p, const CostModel& costs) {
  return costs.c_rew() * std::exp2(p.b) + costs.c_ver() * std::exp2(p.b - p.a);
}

// Shell s: every pair whose cost scale lies in [2^s c_min, 2^(s+1) c_min),
// with the generation budget m_s = ceil(2^(b*+1)) and verification budget
// k_s = ceil(6 * 2^(j*)) taken from the shell's extreme scales.
struct ShellSpec {
  int s = 0;
  std::vector<DyadicPair> pairs;  // ordered by (b, a) ascending
  int b_star = 0;                 // max b over pairs
  int j_star = 0;                 // max b-a over pairs
  std::int64_t m_budget = 0;      // m_s
  std::int64_t k_budget = 0;      // k_s
  double lambda = 0.0;            // deterministic shell cost c_rew*m_s + c_ver*k_s

  bool contains(int a, int b) const;
};

// Enumerates shell s exactly; nullopt when no pair qualifies. Each of the
// two summands of B_{a,b} alone must stay below 2^(s+1) c_min, which bounds
// b and b-a and makes the enumeration finite.
std::optional<ShellSpec> enumerate_shell(int s, const CostModel& costs);

// The unique s with 2^s c_min <= B_{a,b} < 2^(s+1) c_min.
int shell_for_pair(int a, int b, const CostModel& costs);

// Per-shell outcome of one ADAP run, for shell-level diagnostics.
struct ShellOutcome {
  int s = 0;
  std::int64_t drawn = 0;
  std::int64_t verified = 0;
  bool succeeded = false;
  bool completed = false;  // full m_s/k_s budget spent (not cut by cap/exhaustion)
};
using ShellTrace = std::vector<ShellOutcome>;

// Shellwise adaptive search. Sweeps shells in increasing s; each non-empty
// shell adds m_s fresh draws to the pool of unverified candidates, re-ranks
// the pool by (reward desc, draw index asc), and verifies the top
// min{k_s, |pool|} one at a time, removing each, returning on the first
// positive label. Uses the reward only as a ranking signal.
class AdapPolicy : public Policy {
 public:
  explicit AdapPolicy(ShellTrace* trace = nullptr) : trace_(trace) {}

  std::string name() const override { return "adap"; }
  void run(Trial& trial) override;

 private:
  ShellTrace* trace_;
};

TrialRecord run_adap(const Instance& instance, const CostModel& costs, std::uint64_t seed,
                     double safety_cap, ShellTrace* trace = nullptr);

}  // namespace actsearch
