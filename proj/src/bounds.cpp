#include "actsearch/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "actsearch/adap.hpp"
#include "actsearch/environments.hpp"
#include "actsearch/oracle.hpp"
#include "actsearch/parallel.hpp"
#include "actsearch/starsearch.hpp"

namespace actsearch {

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe out;
  double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

}  // namespace

// Dyadic indices of a (q_t, s_t) pair: 2^(-a-1) < q <= 2^(-a) and
// 2^(-b) <= s < 2^(-b+1), computed by floor/ceil with boundary fix-ups.
std::pair<int, int> dyadic_indices(double q, double s) {
  // Probabilities by construction; the atom sums can overshoot 1 by an ulp.
  q = std::min(q, 1.0);
  s = std::min(s, q);
  int a = static_cast<int>(std::floor(-std::log2(q)));
  while (q > std::exp2(-a)) --a;
  while (q <= std::exp2(-a - 1)) ++a;
  int b = static_cast<int>(std::ceil(-std::log2(s)));
  while (s < std::exp2(-b)) ++b;
  while (s >= std::exp2(-b + 1)) --b;
  return {a, b};
}

CheckResult check_dyadic_sandwich(const BoundSuiteConfig& config) {
  CheckResult result{"dyadic-sandwich", true, ""};
  CostModel costs(1.0, 10.0);
  std::int64_t checked = 0;
  for (std::int64_t i = 0; i < config.dyadic_cases; ++i) {
    std::uint64_t case_seed = derive_seed(config.seed, 0xd1ad'0000 + static_cast<std::uint64_t>(i));
    Rng rng(case_seed);
    int n_atoms = 1 + static_cast<int>(rng.uniform_int(32));
    SyntheticInstance instance = make_random_monotone_instance(n_atoms, case_seed, 0.01);
    const DiscreteScoreModel& model = instance.model();
    auto atom = static_cast<Eigen::Index>(rng.uniform_int(model.atom_count()));
    ThresholdAnalytics at = threshold_analytics(model, costs, model.rewards()[atom]);
    if (!(at.q_t > 0.0) || !(at.s_t > 0.0)) continue;

    auto [a, b] = dyadic_indices(at.q_t, at.s_t);
    double scale = dyadic_cost_scale(DyadicPair{a, b}, costs);
    ++checked;
    if (a < 0 || b < a || !(at.j_t <= scale) || !(scale <= 4.0 * at.j_t)) {
      result.pass = false;
      std::ostringstream detail;
      detail << "violated at case " << i << ": q=" << at.q_t << " s=" << at.s_t << " a=" << a
             << " b=" << b << " J_t=" << at.j_t << " B=" << scale;
      result.detail = detail.str();
      return result;
    }
  }
  result.detail = std::to_string(checked) + " cases hold";
  return result;
}

CheckResult check_shell_structure(const BoundSuiteConfig& config) {
  CheckResult result{"shell-structure", true, ""};
  std::ostringstream detail;
  for (double ratio : config.cost_ratios) {
    CostModel costs(1.0, ratio);
    std::vector<std::optional<ShellSpec>> shells(
        static_cast<std::size_t>(config.shell_s_max + config.shell_shift_max) + 1);
    for (int s = 0; s <= config.shell_s_max + config.shell_shift_max; ++s) {
      shells[static_cast<std::size_t>(s)] = enumerate_shell(s, costs);
    }
    for (int s = 0; s <= config.shell_s_max; ++s) {
      const auto& spec = shells[static_cast<std::size_t>(s)];
      if (!spec) continue;
      double cap = 20.0 * std::exp2(s) * costs.c_min();
      if (!(spec->lambda <= cap)) {
        result.pass = false;
        detail << "lambda bound fails at ratio " << ratio << " s=" << s;
        result.detail = detail.str();
        return result;
      }
      for (const DyadicPair& pair : spec->pairs) {
        for (int u = 1; u <= config.shell_shift_max; ++u) {
          const auto& target = shells[static_cast<std::size_t>(s + u)];
          if (!target || !target->contains(pair.a, pair.b + u)) {
            result.pass = false;
            detail << "shift closure fails at ratio " << ratio << " s=" << s << " (a,b)=("
                   << pair.a << "," << pair.b << ") u=" << u;
            result.detail = detail.str();
            return result;
          }
        }
      }
    }
  }

  // Reference table at c_rew=1, c_ver=10.
  CostModel costs(1.0, 10.0);
  for (int s = 0; s <= 2; ++s) {
    if (enumerate_shell(s, costs)) {
      result.pass = false;
      result.detail = "shell " + std::to_string(s) + " should be empty at ratio 10";
      return result;
    }
  }
  auto s3 = enumerate_shell(3, costs);
  bool s3_ok = s3 && s3->pairs.size() == 3 && s3->contains(0, 0) && s3->contains(1, 1) &&
               s3->contains(2, 2) && s3->m_budget == 8 && s3->k_budget == 6;
  if (!s3_ok) {
    result.pass = false;
    result.detail = "shell 3 table mismatch at ratio 10";
    return result;
  }
  result.detail = "lambda cap, shift closure, and the s=3 table hold";
  return result;
}

namespace {

// Planted two-atom instance whose top-atom threshold has exact dyadic
// indices (a, b): q_t = 2^-a, s_t = 2^-b.
SyntheticInstance make_planted_instance(int a, int b) {
  double q = std::exp2(-a);
  double h = std::exp2(a - b);
  if (a == 0) {
    Eigen::ArrayXd rewards(1), masses(1), success(1);
    rewards << 1.0;
    masses << 1.0;
    success << std::exp2(-b);
    return SyntheticInstance(DiscreteScoreModel(rewards, masses, success),
                             "planted-a0b" + std::to_string(b));
  }
  Eigen::ArrayXd rewards(2), masses(2), success(2);
  rewards << 0.0, 1.0;
  masses << 1.0 - q, q;
  success << 0.0, h;
  return SyntheticInstance(DiscreteScoreModel(rewards, masses, success),
                           "planted-a" + std::to_string(a) + "b" + std::to_string(b));
}

}  // namespace

CheckResult check_shell_failure(const BoundSuiteConfig& config) {
  CheckResult result{"shell-failure", true, ""};
  const std::vector<std::pair<int, int>> plants = {{0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 4}};
  CostModel costs(1.0, 10.0);
  const double cap = kDefaultCapMultiple * costs.c_min();
  std::ostringstream detail;
  std::array<std::int64_t, 3> total_reach{0, 0, 0};

  for (const auto& [a, b] : plants) {
    SyntheticInstance instance = make_planted_instance(a, b);
    int s_star = shell_for_pair(a, b, costs);

    std::vector<std::array<int, 3>> reach(static_cast<std::size_t>(config.shell_failure_trials));
    std::vector<std::array<int, 3>> fail(static_cast<std::size_t>(config.shell_failure_trials));
    parallel_for(config.shell_failure_trials, config.workers, [&](std::int64_t t) {
      ShellTrace trace;
      std::uint64_t trial_seed =
          derive_seed(config.seed, 0x5e11'0000 + static_cast<std::uint64_t>(t) * 7 +
                                       static_cast<std::uint64_t>(a * 64 + b));
      run_adap(instance, costs, trial_seed, cap, &trace);
      std::array<int, 3> reached{0, 0, 0};
      std::array<int, 3> failed{0, 0, 0};
      for (const ShellOutcome& outcome : trace) {
        int u = outcome.s - s_star;
        if (u < 0 || u > 2) continue;
        reached[static_cast<std::size_t>(u)] = 1;
        failed[static_cast<std::size_t>(u)] = outcome.succeeded ? 0 : 1;
      }
      reach[static_cast<std::size_t>(t)] = reached;
      fail[static_cast<std::size_t>(t)] = failed;
    });

    for (int u = 0; u <= 2; ++u) {
      double rho = std::exp(-std::exp2(u + 1)) + std::exp(-std::exp2(u));
      std::int64_t n_reach = 0, n_fail = 0;
      for (std::int64_t t = 0; t < config.shell_failure_trials; ++t) {
        n_reach += reach[static_cast<std::size_t>(t)][static_cast<std::size_t>(u)];
        n_fail += fail[static_cast<std::size_t>(t)][static_cast<std::size_t>(u)];
      }
      total_reach[static_cast<std::size_t>(u)] += n_reach;
      if (n_reach == 0) continue;  // bound vacuously holds; nothing reached this shell
      double p_hat = static_cast<double>(n_fail) / static_cast<double>(n_reach);
      double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n_reach));
      if (!(p_hat <= rho + 3.0 * se)) {
        result.pass = false;
        detail << "planted (" << a << "," << b << ") offset " << u << ": failure " << p_hat
               << " > rho " << rho << " + 3se (" << n_reach << " reached)";
        result.detail = detail.str();
        return result;
      }
    }
  }
  detail << "conditional shell failures within rho_u + 3se on all plants (reached u=0/1/2: "
         << total_reach[0] << "/" << total_reach[1] << "/" << total_reach[2] << ")";
  result.detail = detail.str();
  return result;
}

CheckResult check_tail_constant() {
  CheckResult result{"tail-constant", true, ""};
  double gamma = 1.0;
  for (int u = 1; u < 80; ++u) {
    double term = std::exp2(u) * (std::exp(-std::exp2(u)) + std::exp(-std::exp2(u - 1)));
    gamma += term;
    if (term < 1e-15) break;
  }
  result.pass = gamma <= 4.0;
  std::ostringstream detail;
  detail << "1 + sum 2^u rho_(u-1) = " << gamma << (result.pass ? " <= 4" : " > 4");
  result.detail = detail.str();
  return result;
}

CheckResult check_adap_ratio(const BoundSuiteConfig& config) {
  CheckResult result{"adap-ratio", true, ""};
  CostModel costs(1.0, 10.0);
  const double cap = kDefaultCapMultiple * costs.c_min();
  double worst_ratio = 0.0;
  double ratio_sum = 0.0;

  for (int inst = 0; inst < config.ratio_instances; ++inst) {
    std::uint64_t inst_seed = derive_seed(config.seed, 0xada7'0000 + static_cast<std::uint64_t>(inst));
    Rng rng(inst_seed);
    int n_atoms = 1 + static_cast<int>(rng.uniform_int(32));
    SyntheticInstance instance = make_random_monotone_instance(n_atoms, inst_seed, 0.02);
    double j_star = solve_tau_star(instance.model(), costs).j_star;

    std::vector<double> trial_costs(static_cast<std::size_t>(config.ratio_trials));
    parallel_for(config.ratio_trials, config.workers, [&](std::int64_t t) {
      std::uint64_t trial_seed = derive_seed(inst_seed, static_cast<std::uint64_t>(t));
      TrialRecord record = run_adap(instance, costs, trial_seed, cap);
      trial_costs[static_cast<std::size_t>(t)] = record.ledger.total();
    });
    MeanSe stats = mean_se(trial_costs);
    double observed = stats.mean / j_star;
    worst_ratio = std::max(worst_ratio, observed);
    ratio_sum += observed;
    if (!(stats.mean <= 400.0 * j_star + 3.0 * stats.se)) {
      result.pass = false;
      std::ostringstream detail;
      detail << "instance " << instance.name() << ": mean " << stats.mean << " > 400 * "
             << j_star << " + 3se";
      result.detail = detail.str();
      return result;
    }
  }
  std::ostringstream detail;
  detail << "mean cost <= 400 J* on all instances; observed ratio mean "
         << ratio_sum / config.ratio_instances << ", max " << worst_ratio;
  result.detail = detail.str();
  return result;
}

CheckResult check_acs_upper(const BoundSuiteConfig& config) {
  CheckResult result{"acs-upper", true, ""};
  for (int m : config.acs_m_grid) {
    for (double ratio : config.acs_ratio_grid) {
      CostModel costs(1.0, ratio);
      double j_star = costs.c_rew() * static_cast<double>(m) + costs.c_ver();
      double bound = 6.0 * std::min(static_cast<double>(m), ratio) * j_star;
      const double cap = 1e9 * costs.c_min();

      std::vector<double> trial_costs(static_cast<std::size_t>(config.acs_trials));
      std::vector<char> hs_ok(static_cast<std::size_t>(config.acs_trials), 1);
      parallel_for(config.acs_trials, config.workers, [&](std::int64_t t) {
        std::uint64_t trial_seed = derive_seed(
            config.seed, 0xac5'0000 + static_cast<std::uint64_t>(t) * 31 +
                             static_cast<std::uint64_t>(m * 1000 + static_cast<int>(ratio)));
        StarInstance instance = make_star_instance(m, derive_seed(trial_seed, 0x7a26e7));
        AcsStats stats;
        TrialRecord record = run_acs(instance, costs, trial_seed, cap, &stats);
        trial_costs[static_cast<std::size_t>(t)] = record.ledger.total();
        bool ok = stats.all_minimal && record.succeeded;
        for (int size : stats.hitting_set_sizes) ok = ok && size <= m;
        hs_ok[static_cast<std::size_t>(t)] = ok ? 1 : 0;
      });

      MeanSe stats = mean_se(trial_costs);
      bool all_ok = std::all_of(hs_ok.begin(), hs_ok.end(), [](char c) { return c == 1; });
      if (!all_ok || !(stats.mean <= bound + 3.0 * stats.se)) {
        result.pass = false;
        std::ostringstream detail;
        detail << "cell m=" << m << " ratio=" << ratio << ": mean " << stats.mean
               << " bound " << bound << (all_ok ? "" : " (hitting set not exact)");
        result.detail = detail.str();
        return result;
      }
    }
  }
  result.detail = "mean cost <= 6 min{s0, ratio} J* with exact hitting sets on the full grid";
  return result;
}

CheckResult check_hitting_set_certificate(const BoundSuiteConfig& config) {
  CheckResult result{"hitting-set", true, ""};
  for (int batch_idx = 0; batch_idx < config.hitting_set_batches; ++batch_idx) {
    Rng rng(derive_seed(config.seed, 0x417'0000 + static_cast<std::uint64_t>(batch_idx)));
    int domain = 4 + static_cast<int>(rng.uniform_int(7));
    int extra = 2 + static_cast<int>(rng.uniform_int(10));
    std::vector<std::uint64_t> rows = {0};
    std::uint64_t mask = (std::uint64_t{1} << domain) - 1;
    for (int c = 0; c < extra; ++c) rows.push_back(rng.next_u64() & mask);
    FiniteConceptClass concepts(domain, rows);
    int s0 = centered_star_number(concepts);

    int batch_size = 4 + static_cast<int>(rng.uniform_int(9));
    std::vector<int> batch(static_cast<std::size_t>(batch_size));
    for (int& point : batch) point = static_cast<int>(rng.uniform_int(domain));
    TraceFamily family = build_trace_family(concepts, batch);
    HittingSet hs = min_hitting_set(family);

    bool covered = true;
    for (const auto& trace : family.traces) {
      bool hit = false;
      for (int e : hs.indices) {
        if (std::binary_search(trace.begin(), trace.end(), e)) {
          hit = true;
          break;
        }
      }
      covered = covered && hit;
    }
    if (!hs.minimal || !covered || static_cast<int>(hs.indices.size()) > s0) {
      result.pass = false;
      std::ostringstream detail;
      detail << "batch " << batch_idx << ": |I|=" << hs.indices.size() << " s0=" << s0
             << (hs.minimal ? "" : " non-minimal") << (covered ? "" : " uncovered trace");
      result.detail = detail.str();
      return result;
    }
  }
  result.detail = std::to_string(config.hitting_set_batches) +
                  " random batches certified: exact, covering, |I| <= s0";
  return result;
}

std::vector<CheckResult> run_bound_suite(const BoundSuiteConfig& config) {
  return {
      check_dyadic_sandwich(config), check_shell_structure(config),
      check_shell_failure(config),   check_tail_constant(),
      check_adap_ratio(config),      check_acs_upper(config),
      check_hitting_set_certificate(config),
  };
}

}  // namespace actsearch
