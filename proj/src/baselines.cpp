#include "actsearch/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace actsearch {

namespace {

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

  void insert(std::size_t pos) {
    for (std::size_t i = pos + 1; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }

  std::int64_t count_upto(std::size_t pos) const {
    std::int64_t sum = 0;
    for (std::size_t i = pos + 1; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

 private:
  std::vector<std::int64_t> tree_;
};

}  // namespace

MinRankProfile minrank_profile(std::span<const Sample> trial_samples) {
  const std::size_t n = trial_samples.size();
  // Global order position of each sample under (reward desc, draw asc).
  std::vector<std::size_t> by_rank(n);
  std::iota(by_rank.begin(), by_rank.end(), std::size_t{0});
  std::stable_sort(by_rank.begin(), by_rank.end(), [&](std::size_t x, std::size_t y) {
    return trial_samples[x].reward > trial_samples[y].reward;
  });
  std::vector<std::size_t> order_pos(n);
  for (std::size_t r = 0; r < n; ++r) order_pos[by_rank[r]] = r;

  Fenwick inserted(n);
  std::size_t best_correct_pos = n;  // sentinel: none seen yet
  std::vector<std::int64_t> minrank(n, kNoCorrect);
  for (std::size_t i = 0; i < n; ++i) {
    inserted.insert(order_pos[i]);
    if (trial_samples[i].correct == 1 && order_pos[i] < best_correct_pos) {
      best_correct_pos = order_pos[i];
    }
    if (best_correct_pos < n) {
      minrank[i] = inserted.count_upto(best_correct_pos);
    }
  }
  return MinRankProfile(std::move(minrank));
}

namespace {

// Replay shim so the fixed pair runs through the same ledger accounting as
// every other policy.
class LoggedTrialInstance final : public Instance {
 public:
  LoggedTrialInstance(std::span<const Sample> samples, std::string name)
      : samples_(samples.begin(), samples.end()), name_(std::move(name)) {}

  const std::string& name() const override { return name_; }
  std::unique_ptr<Instance> clone() const override {
    auto copy = std::make_unique<LoggedTrialInstance>(*this);
    copy->cursor_ = 0;
    return copy;
  }
  std::optional<std::int64_t> remaining_draws() const override {
    return static_cast<std::int64_t>(samples_.size()) - cursor_;
  }
  double sample_reward(Rng&) override {
    if (cursor_ >= static_cast<std::int64_t>(samples_.size())) {
      throw ExhaustedSamples("logged trial " + name_ + " is consumed");
    }
    return samples_[static_cast<std::size_t>(cursor_++)].reward;
  }
  int verifier_label(const ScoredCandidate& candidate, Rng&) override {
    return samples_[static_cast<std::size_t>(candidate.draw_index)].correct;
  }

 private:
  std::vector<Sample> samples_;
  std::string name_;
  std::int64_t cursor_ = 0;
};

}  // namespace

void UniformPolicy::run(Trial& trial) {
  auto remaining = trial.remaining_draws();
  if (remaining && *remaining < pair_.n_rew) {
    throw ExhaustedSamples("log shorter than the pair's generation count");
  }
  std::vector<ScoredCandidate> pool;
  pool.reserve(static_cast<std::size_t>(pair_.n_rew));
  for (std::int64_t i = 0; i < pair_.n_rew && trial.active(); ++i) {
    auto candidate = trial.draw();
    if (!candidate) return;
    pool.push_back(*candidate);
  }
  std::sort(pool.begin(), pool.end(), ranked_before);
  std::int64_t k = std::min<std::int64_t>(pair_.n_ver, static_cast<std::int64_t>(pool.size()));
  for (std::int64_t j = 0; j < k && trial.active(); ++j) {
    auto label = trial.verify(pool[static_cast<std::size_t>(j)]);
    if (!label || *label == 1) return;
  }
}

TrialRecord run_uniform(const FixedPair& pair, std::span<const Sample> trial_samples,
                        const CostModel& costs, const std::string& instance_name,
                        std::uint64_t seed) {
  LoggedTrialInstance instance(trial_samples, instance_name);
  UniformPolicy policy(pair);
  double cap = 2.0 * nominal_cost(pair, costs) + costs.c_min();
  return run_trial(policy, instance, costs, seed, cap);
}

SampleAwareChoice sample_aware_cost(const MinRankProfile& profile, const CostModel& costs) {
  SampleAwareChoice choice;
  bool found = false;
  for (std::int64_t n = 1; n <= profile.size(); ++n) {
    std::int64_t rank = profile.rank_at(n);
    if (rank == kNoCorrect) continue;
    double cost = costs.c_rew() * static_cast<double>(n) +
                  costs.c_ver() * static_cast<double>(rank);
    if (!found || cost < choice.cost) {
      found = true;
      choice.cost = cost;
      choice.pair = FixedPair{n, rank};
    }
  }
  if (!found) throw InfeasibleTrial("no prefix of the trial contains a correct sample");
  return choice;
}

namespace {

// Cheapest pair succeeding on every profile of problems[order[first..last]],
// given worst[n-1] = max rank_at(n) over those profiles.
std::pair<FixedPair, double> cheapest_pair(const std::vector<std::int64_t>& worst,
                                           const CostModel& costs) {
  FixedPair best_pair;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < worst.size(); ++i) {
    if (worst[i] == kNoCorrect) continue;
    double cost = costs.c_rew() * static_cast<double>(i + 1) +
                  costs.c_ver() * static_cast<double>(worst[i]);
    if (cost < best_cost) {
      best_cost = cost;
      best_pair = FixedPair{static_cast<std::int64_t>(i + 1), worst[i]};
    }
  }
  return {best_pair, best_cost};
}

}  // namespace

DapResult dap_partition(const std::vector<ProblemTrials>& problems, int k,
                        const CostModel& costs) {
  const std::size_t p_count = problems.size();
  if (p_count == 0) throw std::invalid_argument("dap_partition: no problems");
  if (k < 1 || static_cast<std::size_t>(k) > p_count) {
    throw std::invalid_argument("dap_partition: need 1 <= k <= #problems");
  }

  DapResult result;
  result.order.resize(p_count);
  std::iota(result.order.begin(), result.order.end(), std::size_t{0});
  std::sort(result.order.begin(), result.order.end(), [&](std::size_t x, std::size_t y) {
    if (problems[x].pass_rate != problems[y].pass_rate) {
      return problems[x].pass_rate < problems[y].pass_rate;
    }
    return problems[x].problem_id < problems[y].problem_id;
  });

  std::size_t n_max = 0;
  for (const auto& problem : problems) {
    if (problem.profiles.empty()) {
      throw std::invalid_argument("dap_partition: problem " + problem.problem_id +
                                  " has no trials");
    }
    for (const auto& profile : problem.profiles) {
      n_max = std::max(n_max, static_cast<std::size_t>(profile.size()));
    }
  }

  // pair_cost[l][r], extending the elementwise worst profile as r grows.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> class_cost(p_count, std::vector<double>(p_count, inf));
  std::vector<std::vector<FixedPair>> class_pair(p_count, std::vector<FixedPair>(p_count));
  for (std::size_t l = 0; l < p_count; ++l) {
    std::vector<std::int64_t> worst(n_max, 0);
    for (std::size_t r = l; r < p_count; ++r) {
      const ProblemTrials& problem = problems[result.order[r]];
      for (const MinRankProfile& profile : problem.profiles) {
        for (std::int64_t n = 1; n <= static_cast<std::int64_t>(n_max); ++n) {
          std::int64_t rank = n <= profile.size() ? profile.rank_at(n) : kNoCorrect;
          worst[static_cast<std::size_t>(n - 1)] =
              std::max(worst[static_cast<std::size_t>(n - 1)], rank);
        }
      }
      auto [pair, cost] = cheapest_pair(worst, costs);
      class_cost[l][r] = cost;
      class_pair[l][r] = pair;
    }
  }

  // best[j][i]: min committed cost of splitting the first i sorted problems
  // into exactly j classes.
  std::vector<std::vector<double>> best(static_cast<std::size_t>(k) + 1,
                                        std::vector<double>(p_count + 1, inf));
  std::vector<std::vector<std::size_t>> split(static_cast<std::size_t>(k) + 1,
                                              std::vector<std::size_t>(p_count + 1, 0));
  best[0][0] = 0.0;
  for (std::size_t j = 1; j <= static_cast<std::size_t>(k); ++j) {
    for (std::size_t i = j; i <= p_count; ++i) {
      for (std::size_t m = j - 1; m < i; ++m) {
        if (best[j - 1][m] == inf || class_cost[m][i - 1] == inf) continue;
        double total = best[j - 1][m] +
                       static_cast<double>(i - m) * class_cost[m][i - 1];
        if (total < best[j][i]) {
          best[j][i] = total;
          split[j][i] = m;
        }
      }
    }
  }
  if (best[static_cast<std::size_t>(k)][p_count] == inf) {
    throw NoFeasiblePair("some forced class contains a trial no fixed pair can solve");
  }

  std::size_t end = p_count;
  for (int j = k; j >= 1; --j) {
    std::size_t begin = split[static_cast<std::size_t>(j)][end];
    result.classes.push_back(DapClass{begin, end - 1, class_pair[begin][end - 1],
                                      class_cost[begin][end - 1]});
    end = begin;
  }
  std::reverse(result.classes.begin(), result.classes.end());
  result.mean_cost = best[static_cast<std::size_t>(k)][p_count] / static_cast<double>(p_count);
  return result;
}

UniformBudgetChoice uniform_matched_to_budget(const std::vector<ProblemTrials>& problems,
                                              double budget, const CostModel& costs) {
  if (!(budget > 0.0)) throw std::invalid_argument("uniform_matched_to_budget: budget <= 0");

  std::vector<const MinRankProfile*> trials;
  std::int64_t n_max = 0;
  for (const auto& problem : problems) {
    for (const auto& profile : problem.profiles) {
      trials.push_back(&profile);
      n_max = std::max(n_max, profile.size());
    }
  }
  if (trials.empty()) throw std::invalid_argument("uniform_matched_to_budget: no trials");

  UniformBudgetChoice best;
  best.pair = FixedPair{1, 1};
  best.degenerate = true;
  bool found = false;

  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (costs.c_rew() * static_cast<double>(n) + costs.c_ver() > budget) break;
    auto k_cap = static_cast<std::int64_t>(
        std::floor((budget - costs.c_rew() * static_cast<double>(n)) / costs.c_ver()));
    k_cap = std::min(k_cap, n);
    if (k_cap < 1) continue;

    // The minimal k attaining this n's best success under the budget is the
    // largest needed rank among the trials it solves.
    std::int64_t successes = 0;
    std::int64_t k_needed = 1;
    for (const MinRankProfile* profile : trials) {
      std::int64_t rank = n <= profile->size() ? profile->rank_at(n) : kNoCorrect;
      if (rank != kNoCorrect && rank <= k_cap) {
        ++successes;
        k_needed = std::max(k_needed, rank);
      }
    }
    FixedPair pair{n, k_needed};
    double rate = static_cast<double>(successes) / static_cast<double>(trials.size());
    double cost = nominal_cost(pair, costs);
    bool better = !found || rate > best.success_rate ||
                  (rate == best.success_rate && cost < nominal_cost(best.pair, costs)) ||
                  (rate == best.success_rate && cost == nominal_cost(best.pair, costs) &&
                   pair.n_ver < best.pair.n_ver);
    if (better) {
      best.pair = pair;
      best.success_rate = rate;
      best.degenerate = false;
      found = true;
    }
  }
  return best;
}

}  // namespace actsearch
