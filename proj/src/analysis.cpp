#include "actsearch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace actsearch {

std::optional<double> compute_auc(std::span<const Sample> samples) {
  std::int64_t n_pos = 0;
  for (const Sample& s : samples) n_pos += s.correct;
  std::int64_t n_neg = static_cast<std::int64_t>(samples.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  // Rank-sum with midranks for ties.
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return samples[x].reward < samples[y].reward;
  });

  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && samples[order[j]].reward == samples[order[i]].reward) ++j;
    double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t t = i; t < j; ++t) {
      if (samples[order[t]].correct == 1) positive_rank_sum += midrank;
    }
    i = j;
  }
  double u = positive_rank_sum - 0.5 * static_cast<double>(n_pos) *
                                     static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

bool topk_hit(std::span<const Sample> samples, std::int64_t k) {
  if (k < 1 || k > static_cast<std::int64_t>(samples.size())) {
    throw std::invalid_argument("topk_hit: need 1 <= k <= N");
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return samples[x].reward > samples[y].reward;
  });
  for (std::int64_t j = 0; j < k; ++j) {
    if (samples[order[static_cast<std::size_t>(j)]].correct == 1) return true;
  }
  return false;
}

double topk_coverage(std::span<const Sample> samples, std::int64_t k, int n_perms,
                     std::uint64_t seed) {
  if (n_perms < 1) throw std::invalid_argument("topk_coverage: need n_perms >= 1");
  // Each trial re-pairs the reward column against the correctness column.
  // When rewards carry no signal this reproduces the random-k draw exactly;
  // a single trial with the identity pairing is the observed coverage.
  std::vector<Sample> paired(samples.begin(), samples.end());
  std::vector<double> rewards(paired.size());
  for (std::size_t i = 0; i < paired.size(); ++i) rewards[i] = paired[i].reward;
  std::int64_t hits = 0;
  for (int perm = 0; perm < n_perms; ++perm) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(perm)));
    fisher_yates(rewards, rng);
    for (std::size_t i = 0; i < paired.size(); ++i) paired[i].reward = rewards[i];
    hits += topk_hit(paired, k) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(n_perms);
}

double random_k_baseline(std::int64_t n, std::int64_t c, std::int64_t k) {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n) {
    throw std::invalid_argument("random_k_baseline: need 0 <= c <= N and 1 <= k <= N");
  }
  // 1 - C(N-c, k)/C(N, k) as a telescoping product of miss probabilities.
  double miss = 1.0;
  for (std::int64_t i = 0; i < k; ++i) {
    double numer = static_cast<double>(n - c - i);
    if (numer <= 0.0) return 1.0;
    miss *= numer / static_cast<double>(n - i);
  }
  return 1.0 - miss;
}

RewardDiagnostics compute_diagnostics(const std::vector<DiagnosticsInput>& problems) {
  if (problems.empty()) throw std::invalid_argument("compute_diagnostics: no problems");
  RewardDiagnostics diag;

  std::size_t max_n = 0;
  for (const auto& problem : problems) max_n = std::max(max_n, problem.samples.size());
  Eigen::ArrayXd rank_sum = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(max_n));
  Eigen::ArrayXd rank_weight = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(max_n));
  Eigen::ArrayXd topk_sum = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(max_n));
  Eigen::ArrayXd base_sum = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(max_n));
  Eigen::ArrayXd k_weight = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(max_n));

  for (const auto& problem : problems) {
    if (auto auc = compute_auc(problem.samples)) {
      diag.per_problem_auc[problem.problem_id] = *auc;
    }

    const auto n = static_cast<std::int64_t>(problem.samples.size());
    std::int64_t c = 0;
    for (const Sample& s : problem.samples) c += s.correct;

    std::vector<std::size_t> order(problem.samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return problem.samples[x].reward > problem.samples[y].reward;
    });
    bool hit = false;
    for (std::int64_t rank = 0; rank < n; ++rank) {
      int correct = problem.samples[order[static_cast<std::size_t>(rank)]].correct;
      rank_sum[rank] += correct;
      rank_weight[rank] += 1.0;
      hit = hit || correct == 1;
      topk_sum[rank] += hit ? 1.0 : 0.0;
      base_sum[rank] += random_k_baseline(n, c, rank + 1);
      k_weight[rank] += 1.0;
    }
  }

  diag.rank_curve = rank_sum / rank_weight.max(1.0);
  diag.topk_curve = topk_sum / k_weight.max(1.0);
  diag.random_k_curve = base_sum / k_weight.max(1.0);
  return diag;
}

std::vector<PolicyReport> aggregate_report(
    const std::vector<std::pair<std::string, std::vector<TrialRecord>>>& records_by_policy,
    const std::string& reference_policy) {
  if (records_by_policy.empty()) {
    throw std::invalid_argument("aggregate_report: no policies");
  }

  // Paired comparison requires identical trial sets across policies.
  std::vector<std::pair<std::string, std::uint64_t>> reference_key;
  for (std::size_t p = 0; p < records_by_policy.size(); ++p) {
    std::vector<std::pair<std::string, std::uint64_t>> key;
    key.reserve(records_by_policy[p].second.size());
    for (const TrialRecord& record : records_by_policy[p].second) {
      key.emplace_back(record.instance_name, record.seed);
    }
    std::sort(key.begin(), key.end());
    if (p == 0) {
      reference_key = std::move(key);
    } else if (key != reference_key) {
      throw MismatchedTrialSets("policy " + records_by_policy[p].first +
                                " ran a different trial set");
    }
  }

  double reference_mean = 0.0;
  bool reference_found = false;
  std::vector<PolicyReport> reports;
  for (const auto& [name, records] : records_by_policy) {
    if (records.empty()) throw std::invalid_argument("aggregate_report: empty record set");
    PolicyReport report;
    report.policy_name = name;
    report.trials = static_cast<std::int64_t>(records.size());
    double successes = 0.0;
    for (const TrialRecord& record : records) {
      report.mean_n_rew += static_cast<double>(record.ledger.n_rew());
      report.mean_n_ver += static_cast<double>(record.ledger.n_ver());
      report.mean_cost += record.ledger.total();
      successes += record.succeeded ? 1.0 : 0.0;
    }
    double n = static_cast<double>(records.size());
    report.mean_n_rew /= n;
    report.mean_n_ver /= n;
    report.mean_cost /= n;
    report.success_rate = successes / n;
    if (name == reference_policy) {
      reference_mean = report.mean_cost;
      reference_found = true;
    }
    reports.push_back(report);
  }
  if (!reference_found) {
    throw std::invalid_argument("aggregate_report: reference policy " + reference_policy +
                                " missing");
  }
  for (PolicyReport& report : reports) {
    report.ratio_to_reference = report.mean_cost / reference_mean;
  }
  return reports;
}

}  // namespace actsearch
