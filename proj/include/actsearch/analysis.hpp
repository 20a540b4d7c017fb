#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actsearch/core.hpp"

namespace actsearch {

// Pairwise ranking quality of the reward signal on one problem:
// Pr(R > R' | V=1, V'=0), ties counted 1/2. Undefined (nullopt) when either
// class is empty.
std::optional<double> compute_auc(std::span<const Sample> samples);

// Whether the top-k-by-reward set of this ordering contains a correct
// sample (reward descending, draw-index tie-break).
bool topk_hit(std::span<const Sample> samples, std::int64_t k);

// Coverage probability over n_perms permutation trials, each re-pairing the
// reward column against the correctness column. Under rewards carrying no
// signal this converges to random_k_baseline.
double topk_coverage(std::span<const Sample> samples, std::int64_t k, int n_perms,
                     std::uint64_t seed);

// Probability that k uniformly random picks out of N samples (c of them
// correct) contain at least one correct: 1 - C(N-c, k) / C(N, k).
double random_k_baseline(std::int64_t n, std::int64_t c, std::int64_t k);

// Reward-signal diagnostics across a set of problems.
struct RewardDiagnostics {
  // AUC per problem; problems with a single class are absent.
  std::map<std::string, double> per_problem_auc;
  // Mean correctness probability at each reward rank (0-based), problems
  // weighted equally.
  Eigen::ArrayXd rank_curve;
  // Per-k probability that the top-k by reward holds a correct sample.
  Eigen::ArrayXd topk_curve;
  // Matching hypergeometric random-k baseline, averaged over problems.
  Eigen::ArrayXd random_k_curve;
};

struct DiagnosticsInput {
  std::string problem_id;
  std::vector<Sample> samples;
};

RewardDiagnostics compute_diagnostics(const std::vector<DiagnosticsInput>& problems);

// One aggregate row of the cross-policy comparison.
struct PolicyReport {
  std::string policy_name;
  double mean_n_rew = 0.0;
  double mean_n_ver = 0.0;
  double mean_cost = 0.0;
  double success_rate = 0.0;
  double ratio_to_reference = 0.0;
  std::int64_t trials = 0;
};

// Means over each policy's records plus cost ratios against the reference
// policy. All policies must have run the same paired trial set (same
// instance names and seeds); otherwise throws MismatchedTrialSets.
std::vector<PolicyReport> aggregate_report(
    const std::vector<std::pair<std::string, std::vector<TrialRecord>>>& records_by_policy,
    const std::string& reference_policy);

}  // namespace actsearch
