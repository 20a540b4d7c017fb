#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "actsearch/core.hpp"

namespace actsearch {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct BoundSuiteConfig {
  std::uint64_t seed = 1;
  int workers = 1;
  // Dyadic sandwich over random (instance, threshold) cases.
  std::int64_t dyadic_cases = 10'000;
  // Shell structure grid: cost ratios, max shell index, max shift offset.
  std::vector<double> cost_ratios = {1, 10, 20, 30, 100};
  int shell_s_max = 40;
  int shell_shift_max = 10;
  // Conditional shell-failure probabilities on planted instances.
  std::int64_t shell_failure_trials = 30'000;
  // Competitive-ratio sweep.
  int ratio_instances = 30;
  std::int64_t ratio_trials = 20'000;
  // Centered-star policy grid.
  std::vector<int> acs_m_grid = {2, 4, 8, 16};
  std::vector<double> acs_ratio_grid = {1, 4, 16, 64};
  std::int64_t acs_trials = 10'000;
  // Hitting-set certificates on random classes.
  int hitting_set_batches = 1'000;
};

// The provable-bound checks, one CheckResult per bound:
//   dyadic-sandwich   a_t <= b_t and J_t <= B_{a_t,b_t} <= 4 J_t
//   shell-structure   lambda_s <= 20 * 2^s * c_min, shift closure, s=3 table
//   shell-failure     conditional failure at offset u <= rho_u + 3 SE
//   tail-constant     1 + sum 2^u * rho_{u-1} <= 4
//   adap-ratio        mean ADAP cost <= 400 J* + 3 SE
//   acs-upper         mean centered-star cost <= 6 min{s0, ratio} J* + 3 SE
//   hitting-set       exact hitting sets of size <= s0 covering all traces
std::vector<CheckResult> run_bound_suite(const BoundSuiteConfig& config);

// Dyadic indices of a (q_t, s_t) pair: 2^(-a-1) < q <= 2^(-a) and
// 2^(-b) <= s < 2^(-b+1).
std::pair<int, int> dyadic_indices(double q, double s);

CheckResult check_dyadic_sandwich(const BoundSuiteConfig& config);
CheckResult check_shell_structure(const BoundSuiteConfig& config);
CheckResult check_shell_failure(const BoundSuiteConfig& config);
CheckResult check_tail_constant();
CheckResult check_adap_ratio(const BoundSuiteConfig& config);
CheckResult check_acs_upper(const BoundSuiteConfig& config);
CheckResult check_hitting_set_certificate(const BoundSuiteConfig& config);

}  // namespace actsearch
