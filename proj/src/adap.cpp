#include "actsearch/adap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace actsearch {

namespace {

std::int64_t checked_pow2(int e) {
  if (e < 0 || e > 62) {
    throw std::overflow_error("shell budget 2^" + std::to_string(e) + " overflows");
  }
  return std::int64_t{1} << e;
}

// Largest exponent x with 2^x * unit <= value (value >= unit > 0).
int floor_log2_ratio(double value, double unit) {
  int s = static_cast<int>(std::floor(std::log2(value / unit)));
  while (std::exp2(s + 1) * unit <= value) ++s;
  while (s > 0 && std::exp2(s) * unit > value) --s;
  return s;
}

}  // namespace

bool ShellSpec::contains(int a, int b) const {
  for (const DyadicPair& p : pairs) {
    if (p.a == a && p.b == b) return true;
  }
  return false;
}

std::optional<ShellSpec> enumerate_shell(int s, const CostModel& costs) {
  if (s < 0) throw std::invalid_argument("enumerate_shell: s must be nonnegative");
  const double c_min = costs.c_min();
  const double lo = std::exp2(s) * c_min;
  const double hi = std::exp2(s + 1) * c_min;

  // c_rew * 2^b < hi and c_ver * 2^j < hi bound the search box.
  const int b_max = static_cast<int>(std::floor(std::log2(hi / costs.c_rew()))) + 1;
  const int j_max = static_cast<int>(std::floor(std::log2(hi / costs.c_ver()))) + 1;
  if (b_max < 0) return std::nullopt;

  ShellSpec spec;
  spec.s = s;
  for (int b = 0; b <= b_max; ++b) {
    for (int j = 0; j <= std::min(b, std::max(j_max, 0)); ++j) {
      double cost_scale = costs.c_rew() * std::exp2(b) + costs.c_ver() * std::exp2(j);
      if (cost_scale >= lo && cost_scale < hi) {
        spec.pairs.push_back(DyadicPair{b - j, b});
      }
    }
  }
  if (spec.pairs.empty()) return std::nullopt;

  std::sort(spec.pairs.begin(), spec.pairs.end(), [](const DyadicPair& x, const DyadicPair& y) {
    return x.b != y.b ? x.b < y.b : x.a < y.a;
  });
  spec.b_star = 0;
  spec.j_star = 0;
  for (const DyadicPair& p : spec.pairs) {
    spec.b_star = std::max(spec.b_star, p.b);
    spec.j_star = std::max(spec.j_star, p.b - p.a);
  }
  spec.m_budget = checked_pow2(spec.b_star + 1);
  spec.k_budget = 6 * checked_pow2(spec.j_star);
  spec.lambda = costs.c_rew() * static_cast<double>(spec.m_budget) +
                costs.c_ver() * static_cast<double>(spec.k_budget);
  return spec;
}

int shell_for_pair(int a, int b, const CostModel& costs) {
  if (a < 0 || b < a) throw std::invalid_argument("shell_for_pair: need 0 <= a <= b");
  double cost_scale = costs.c_rew() * std::exp2(b) + costs.c_ver() * std::exp2(b - a);
  return floor_log2_ratio(cost_scale, costs.c_min());
}

void AdapPolicy::run(Trial& trial) {
  std::vector<ScoredCandidate> pool;

  for (int s = 0; trial.active(); ++s) {
    auto spec = enumerate_shell(s, trial.costs());
    if (!spec) continue;  // skipped shells cost nothing

    std::int64_t drawn = 0;
    bool generation_cut = false;
    for (std::int64_t i = 0; i < spec->m_budget && trial.active(); ++i) {
      auto candidate = trial.draw();
      if (!candidate) {
        generation_cut = true;  // cap reached or replay log exhausted
        break;
      }
      pool.push_back(*candidate);
      ++drawn;
    }

    std::sort(pool.begin(), pool.end(), ranked_before);

    std::int64_t to_verify = std::min<std::int64_t>(spec->k_budget,
                                                    static_cast<std::int64_t>(pool.size()));
    std::int64_t verified = 0;
    bool success = false;
    while (verified < to_verify && trial.active()) {
      auto label = trial.verify(pool[static_cast<std::size_t>(verified)]);
      if (!label) break;
      ++verified;
      if (*label == 1) {
        success = true;
        break;
      }
    }
    pool.erase(pool.begin(), pool.begin() + verified);

    if (trace_) {
      bool completed = drawn == spec->m_budget && verified == to_verify && !generation_cut;
      trace_->push_back(ShellOutcome{s, drawn, verified, success, completed});
    }
    if (success || !trial.active()) return;

    // Finite log fully drawn and pool fully verified: nothing left to try.
    auto remaining = trial.remaining_draws();
    if (remaining && *remaining <= 0 && pool.empty()) return;
  }
}

TrialRecord run_adap(const Instance& instance, const CostModel& costs, std::uint64_t seed,
                     double safety_cap, ShellTrace* trace) {
  AdapPolicy policy(trace);
  return run_trial(policy, instance, costs, seed, safety_cap);
}

}  // namespace actsearch
