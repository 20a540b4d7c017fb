#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "actsearch/core.hpp"

namespace actsearch {

// A committed non-adaptive strategy: generate n_rew candidates, rank them by
// reward, verify the top n_ver.
struct FixedPair {
  std::int64_t n_rew = 0;
  std::int64_t n_ver = 0;
};

inline double nominal_cost(const FixedPair& pair, const CostModel& costs) {
  return costs.c_rew() * static_cast<double>(pair.n_rew) +
         costs.c_ver() * static_cast<double>(pair.n_ver);
}

constexpr std::int64_t kNoCorrect = std::numeric_limits<std::int64_t>::max();

// Per-trial backbone of the retroactive baselines: rank_at(n) is the 1-based
// reward rank of the best-ranked correct sample among the first n draws
// (reward descending, draw-index tie-break), kNoCorrect when none exists.
// A fixed pair (n, k) succeeds on the trial iff k >= rank_at(n).
class MinRankProfile {
 public:
  explicit MinRankProfile(std::vector<std::int64_t> minrank) : minrank_(std::move(minrank)) {}

  std::int64_t size() const { return static_cast<std::int64_t>(minrank_.size()); }
  std::int64_t rank_at(std::int64_t n) const {
    return minrank_[static_cast<std::size_t>(n - 1)];
  }
  bool feasible() const { return !minrank_.empty() && minrank_.back() != kNoCorrect; }

 private:
  std::vector<std::int64_t> minrank_;
};

// Incremental minrank over all prefixes in O(N log N) via a Fenwick tree
// over the global reward order.
MinRankProfile minrank_profile(std::span<const Sample> trial_samples);

// Plays the fixed pair on one logged trial: draws pair.n_rew, verifies the
// top pair.n_ver by reward in descending order, stopping early on the first
// success. The realized ledger reflects the early stop; accounting that
// needs the committed cost uses nominal_cost. Throws ExhaustedSamples when
// the log is shorter than pair.n_rew.
TrialRecord run_uniform(const FixedPair& pair, std::span<const Sample> trial_samples,
                        const CostModel& costs, const std::string& instance_name = "replay",
                        std::uint64_t seed = 0);

// Runs the fixed pair once against a live instance through the harness.
class UniformPolicy : public Policy {
 public:
  explicit UniformPolicy(FixedPair pair) : pair_(pair) {}

  std::string name() const override {
    return "uniform:" + std::to_string(pair_.n_rew) + ":" + std::to_string(pair_.n_ver);
  }
  void run(Trial& trial) override;

 private:
  FixedPair pair_;
};

struct SampleAwareChoice {
  double cost = 0.0;
  FixedPair pair;
};

// The retroactive per-trial lower bound: the cheapest (n, k) whose top-k
// verification of the first n draws succeeds, i.e. min over n of
// c_rew*n + c_ver*rank_at(n). Throws InfeasibleTrial when every prefix
// lacks a correct sample.
SampleAwareChoice sample_aware_cost(const MinRankProfile& profile, const CostModel& costs);

// One problem's replay trials, as consumed by the difficulty-stratified
// baselines.
struct ProblemTrials {
  std::string problem_id;
  double pass_rate = 0.0;
  std::vector<MinRankProfile> profiles;  // one per permutation
};

struct DapClass {
  std::size_t first = 0;  // inclusive indices into the sorted problem order
  std::size_t last = 0;
  FixedPair pair;
  double pair_cost = 0.0;
};

struct DapResult {
  std::vector<std::size_t> order;  // problem indices sorted by (pass_rate, id)
  std::vector<DapClass> classes;
  double mean_cost = 0.0;  // committed cost averaged over problems
};

// Sorts problems by empirical pass rate, partitions them into k contiguous
// difficulty classes by dynamic programming, and assigns each class the
// cheapest fixed pair succeeding on every trial of every problem in it.
// Throws NoFeasiblePair when some forced class contains an infeasible trial.
DapResult dap_partition(const std::vector<ProblemTrials>& problems, int k,
                        const CostModel& costs);

struct UniformBudgetChoice {
  FixedPair pair;
  double success_rate = 0.0;
  bool degenerate = false;  // even (1,1) exceeds the budget
};

// Best fixed pair whose committed cost stays within the budget, maximizing
// trial success rate; ties broken by lower cost, then lower n_ver.
UniformBudgetChoice uniform_matched_to_budget(const std::vector<ProblemTrials>& problems,
                                              double budget, const CostModel& costs);

}  // namespace actsearch
