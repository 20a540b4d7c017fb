#include <doctest.h>

#include <cmath>
#include <set>

#include "actsearch/adap.hpp"
#include "actsearch/bounds.hpp"
#include "actsearch/environments.hpp"
#include "actsearch/oracle.hpp"

using namespace actsearch;

namespace {

DiscreteScoreModel model_from(std::initializer_list<double> rewards,
                              std::initializer_list<double> masses,
                              std::initializer_list<double> success) {
  auto n = static_cast<Eigen::Index>(rewards.size());
  Eigen::ArrayXd r(n), m(n), h(n);
  std::copy(rewards.begin(), rewards.end(), r.data());
  std::copy(masses.begin(), masses.end(), m.data());
  std::copy(success.begin(), success.end(), h.data());
  return DiscreteScoreModel(r, m, h);
}

// Independent shell enumeration: scan a generous (a, b) box and apply the
// window test directly.
std::set<std::pair<int, int>> brute_force_shell(int s, const CostModel& costs) {
  std::set<std::pair<int, int>> pairs;
  for (int b = 0; b <= s + 6; ++b) {
    for (int a = 0; a <= b; ++a) {
      double scale = costs.c_rew() * std::exp2(b) + costs.c_ver() * std::exp2(b - a);
      if (scale >= std::exp2(s) * costs.c_min() && scale < std::exp2(s + 1) * costs.c_min()) {
        pairs.emplace(a, b);
      }
    }
  }
  return pairs;
}

}  // namespace

TEST_SUITE_BEGIN("adap");

TEST_CASE("shell enumeration matches brute force") {
  for (double ratio : {1.0, 10.0, 20.0, 30.0, 100.0}) {
    CostModel costs(1.0, ratio);
    for (int s = 0; s <= 12; ++s) {
      std::set<std::pair<int, int>> expected = brute_force_shell(s, costs);
      auto spec = enumerate_shell(s, costs);
      std::set<std::pair<int, int>> got;
      if (spec) {
        for (const DyadicPair& p : spec->pairs) got.emplace(p.a, p.b);
      }
      CHECK(got == expected);
    }
  }
}

TEST_CASE("shell tables at the default cost pair") {
  CostModel costs(1.0, 10.0);

  SUBCASE("shells 0..2 are empty") {
    CHECK_FALSE(enumerate_shell(0, costs).has_value());
    CHECK_FALSE(enumerate_shell(1, costs).has_value());
    CHECK_FALSE(enumerate_shell(2, costs).has_value());
  }

  SUBCASE("shell 3 holds the three diagonal pairs") {
    auto spec = enumerate_shell(3, costs);
    REQUIRE(spec.has_value());
    CHECK(spec->pairs.size() == 3);
    CHECK(spec->contains(0, 0));
    CHECK(spec->contains(1, 1));
    CHECK(spec->contains(2, 2));
    CHECK(spec->b_star == 2);
    CHECK(spec->j_star == 0);
    CHECK(spec->m_budget == 8);
    CHECK(spec->k_budget == 6);
    CHECK(spec->lambda == doctest::Approx(68.0));
    CHECK(spec->lambda <= 20.0 * 8.0 * costs.c_min());
  }

  SUBCASE("shell 4 mixes diagonal and offset pairs") {
    auto spec = enumerate_shell(4, costs);
    REQUIRE(spec.has_value());
    CHECK(spec->pairs.size() == 5);
    CHECK(spec->contains(3, 3));
    CHECK(spec->contains(4, 4));
    CHECK(spec->contains(0, 1));
    CHECK(spec->contains(1, 2));
    CHECK(spec->contains(2, 3));
    CHECK(spec->b_star == 4);
    CHECK(spec->j_star == 1);
    CHECK(spec->m_budget == 32);
    CHECK(spec->k_budget == 12);
    CHECK(spec->lambda == doctest::Approx(152.0));
    CHECK(spec->lambda <= 20.0 * 16.0 * costs.c_min());
  }
}

TEST_CASE("shell_for_pair inverts the window") {
  CostModel ten(1.0, 10.0);
  CHECK(shell_for_pair(0, 0, ten) == 3);   // scale 11
  CHECK(shell_for_pair(0, 1, ten) == 4);   // scale 22, doubles exactly
  CostModel flat(1.0, 1.0);
  CHECK(shell_for_pair(0, 0, flat) == 1);  // scale 2 = 2 c_min

  SUBCASE("consistency with enumeration") {
    for (double ratio : {1.0, 10.0, 30.0}) {
      CostModel costs(1.0, ratio);
      for (int s = 0; s <= 10; ++s) {
        auto spec = enumerate_shell(s, costs);
        if (!spec) continue;
        for (const DyadicPair& p : spec->pairs) CHECK(shell_for_pair(p.a, p.b, costs) == s);
      }
    }
  }
}

TEST_CASE("shellwise run on a certain instance follows the hand trace") {
  // First non-empty shell at ratio 10 is s=3: draw 8, first verification
  // succeeds.
  CostModel costs(1.0, 10.0);
  SyntheticInstance instance(model_from({0.0}, {1.0}, {1.0}), "sure");
  TrialRecord record = run_adap(instance, costs, 5, 1e9);
  CHECK(record.succeeded);
  CHECK(record.ledger.n_rew() == 8);
  CHECK(record.ledger.n_ver() == 1);
  CHECK(record.ledger.total() == doctest::Approx(18.0));
}

TEST_CASE("infeasible instances spend exactly the shell budgets until the cap") {
  CostModel costs(1.0, 10.0);
  SyntheticInstance instance(model_from({0.0}, {1.0}, {0.0}), "never");
  ShellTrace trace;
  TrialRecord record = run_adap(instance, costs, 5, 1e4, &trace);
  CHECK_FALSE(record.succeeded);
  CHECK(record.ledger.total() >= 1e4);
  REQUIRE(trace.size() >= 3);
  int last_s = -1;
  for (const ShellOutcome& outcome : trace) {
    CHECK(outcome.s > last_s);
    last_s = outcome.s;
    CHECK_FALSE(outcome.succeeded);
    if (outcome.completed) {
      auto spec = enumerate_shell(outcome.s, costs);
      REQUIRE(spec.has_value());
      double spent = costs.c_rew() * static_cast<double>(outcome.drawn) +
                     costs.c_ver() * static_cast<double>(outcome.verified);
      CHECK(outcome.drawn == spec->m_budget);
      CHECK(spent == doctest::Approx(spec->lambda));
    }
  }
}

TEST_CASE("finite replay logs are drained rather than abandoned") {
  // Adversarial log: rewards strictly descending, the only correct sample
  // ranked dead last. Shells exhaust the 64-sample log mid-generation and
  // keep verifying the leftover pool until the log is fully labeled.
  CostModel costs(1.0, 10.0);
  std::vector<Sample> samples;
  for (int i = 0; i < 64; ++i) {
    samples.push_back(Sample{1.0 - static_cast<double>(i) / 64.0, i == 63 ? 1 : 0});
  }
  ReplayInstance instance("worst", 0, samples);
  ShellTrace trace;
  TrialRecord record = run_adap(instance, costs, 3, 1e7, &trace);
  CHECK(record.succeeded);
  CHECK(record.ledger.n_rew() == 64);
  CHECK(record.ledger.n_ver() == 64);
  bool saw_cut_generation = false;
  for (const ShellOutcome& outcome : trace) {
    auto spec = enumerate_shell(outcome.s, costs);
    REQUIRE(spec.has_value());
    saw_cut_generation = saw_cut_generation || outcome.drawn < spec->m_budget;
  }
  CHECK(saw_cut_generation);

  SUBCASE("an infeasible drained log ends the trial without a cap hit") {
    std::vector<Sample> hopeless;
    for (int i = 0; i < 16; ++i) hopeless.push_back(Sample{0.5 + i * 0.01, 0});
    ReplayInstance dead("dead", 0, hopeless);
    TrialRecord failed = run_adap(dead, costs, 4, 1e7);
    CHECK_FALSE(failed.succeeded);
    CHECK(failed.ledger.n_rew() == 16);
    CHECK(failed.ledger.n_ver() == 16);
  }
}

TEST_CASE("verifier calls never exceed draws") {
  CostModel costs(1.0, 10.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SyntheticInstance instance = make_random_monotone_instance(6, seed, 0.05);
    TrialRecord record = run_adap(instance, costs, seed, 1e7);
    CHECK(record.ledger.n_ver() <= record.ledger.n_rew());
    CHECK(record.succeeded);
  }
}

TEST_CASE("non-monotone success functions still terminate soundly") {
  // No cost guarantee applies here; the policy must still stop only on a
  // positive label.
  CostModel costs(1.0, 10.0);
  SyntheticInstance instance(model_from({0.1, 0.5, 0.9}, {0.3, 0.4, 0.3}, {0.7, 0.0, 0.1}),
                             "non-monotone");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TrialRecord record = run_adap(instance, costs, seed, 1e7);
    CHECK(record.succeeded);
    REQUIRE(record.winner.has_value());
    CHECK(record.winner->label == 1);
  }
}

TEST_CASE("top-ranked success mass dominates nested sub-multisets") {
  // Nondecreasing h and A subset of B with k <= l: the top-l of B carries at
  // least the success probability of the top-k of A.
  Rng rng(2024);
  for (int round = 0; round < 500; ++round) {
    int nb = 2 + static_cast<int>(rng.uniform_int(20));
    std::vector<double> b_rewards(static_cast<std::size_t>(nb));
    for (double& r : b_rewards) r = rng.uniform01();
    int na = 1 + static_cast<int>(rng.uniform_int(nb));
    std::vector<double> a_rewards(b_rewards.begin(), b_rewards.begin() + na);

    int k = 1 + static_cast<int>(rng.uniform_int(na));
    int l = k + static_cast<int>(rng.uniform_int(nb - k + 1));

    // Random nondecreasing step function as h.
    double knot = rng.uniform01();
    double low = 0.3 * rng.uniform01();
    double high = low + (1.0 - low) * rng.uniform01();
    auto h = [&](double r) { return r < knot ? low : high; };

    auto top_fail = [&](std::vector<double> rewards, int count) {
      std::sort(rewards.begin(), rewards.end(), std::greater<>());
      double fail = 1.0;
      for (int i = 0; i < count; ++i) fail *= 1.0 - h(rewards[static_cast<std::size_t>(i)]);
      return fail;
    };
    CHECK(1.0 - top_fail(b_rewards, l) >= 1.0 - top_fail(a_rewards, k) - 1e-12);
  }
}

TEST_CASE("dyadic sandwich and shell structure checks pass") {
  BoundSuiteConfig config;
  config.seed = 3;
  config.dyadic_cases = 1'000;
  CheckResult sandwich = check_dyadic_sandwich(config);
  CHECK_MESSAGE(sandwich.pass, sandwich.detail);
  CheckResult shells = check_shell_structure(config);
  CHECK_MESSAGE(shells.pass, shells.detail);
  CheckResult tail = check_tail_constant();
  CHECK_MESSAGE(tail.pass, tail.detail);
}

TEST_CASE("mean cost stays within the competitive budget on the two-atom model") {
  CostModel costs(1.0, 10.0);
  SyntheticInstance instance(model_from({0.2, 0.8}, {0.5, 0.5}, {0.0, 0.6}), "two-atom");
  double j_star = solve_tau_star(instance.model(), costs).j_star;
  REQUIRE(j_star == doctest::Approx(20.0));

  const int trials = 4'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    TrialRecord record = run_adap(instance, costs, derive_seed(11, t), 1e7);
    REQUIRE(record.succeeded);
    sum += record.ledger.total();
    sum_sq += record.ledger.total() * record.ledger.total();
  }
  double mean = sum / trials;
  double se = std::sqrt((sum_sq - sum * sum / trials) / (trials - 1.0) / trials);
  CHECK(mean <= 400.0 * j_star + 3.0 * se);
  MESSAGE("two-atom mean shellwise cost ", mean, " vs optimum ", j_star);
}

TEST_SUITE_END();
