#include <doctest.h>

#include <cmath>
#include <limits>

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

DiscreteScoreModel two_atom() { return model_from({0.2, 0.8}, {0.5, 0.5}, {0.0, 0.6}); }

// Random binary model with bounded-below positive mass.
DiscreteScoreModel random_binary(Rng& rng) {
  int n = 2 + static_cast<int>(rng.uniform_int(16));
  Eigen::ArrayXd r(n), m(n), h(n);
  for (int i = 0; i < n; ++i) {
    r[i] = (i + 0.1 + 0.8 * rng.uniform01()) / n;
    m[i] = 0.05 + rng.uniform01();
  }
  m /= m.sum();
  bool any = false;
  for (int i = 0; i < n; ++i) {
    h[i] = rng.bernoulli(0.4) ? 1.0 : 0.0;
    any = any || h[i] == 1.0;
  }
  if (!any) h[n - 1] = 1.0;
  return DiscreteScoreModel(r, m, h);
}

}  // namespace

TEST_SUITE_BEGIN("oracle");

TEST_CASE("model construction validates its atoms") {
  CHECK_THROWS_AS(model_from({0.5, 0.5}, {0.5, 0.5}, {0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(model_from({0.1, 0.5}, {0.6, 0.5}, {0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(model_from({0.1, 0.5}, {0.5, 0.5}, {0.1, 1.2}), std::invalid_argument);
  DiscreteScoreModel model = two_atom();
  CHECK(model.positive_mass() == doctest::Approx(0.3));
  CHECK(model.monotone());
  CHECK_FALSE(model.binary());
}

TEST_CASE("break-even threshold solves exactly solvable cases") {
  CostModel costs(1.0, 10.0);

  SUBCASE("certain success gives the closed linear form") {
    DiscreteScoreModel model = model_from({0.0}, {1.0}, {1.0});
    OracleSolution solution = solve_tau_star(model, costs);
    CHECK(solution.tau_star == doctest::Approx(10.0 / 11.0).epsilon(1e-12));
    CHECK(solution.j_star == doctest::Approx(11.0).epsilon(1e-12));
  }

  SUBCASE("two-atom model solved by hand") {
    // 10 * 0.5 * (0.6 - tau) = tau  =>  tau = 0.5, J* = 20.
    OracleSolution solution = solve_tau_star(two_atom(), costs);
    CHECK(solution.tau_star == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(solution.j_star == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(solution.verify_cutoff == 0.8);
  }

  SUBCASE("binary models match the closed form c_rew/p + c_ver") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(derive_seed(seed, 0xb1));
      DiscreteScoreModel model = random_binary(rng);
      double p = model.positive_mass();
      OracleSolution solution = solve_tau_star(model, costs);
      double expected = costs.c_rew() / p + costs.c_ver();
      CHECK(std::abs(solution.j_star - expected) <= 1e-9 * expected);
    }
  }

  SUBCASE("infeasible models are rejected") {
    DiscreteScoreModel model = model_from({0.3}, {1.0}, {0.0});
    CHECK_THROWS_AS(solve_tau_star(model, costs), Infeasible);
  }
}

TEST_CASE("threshold analytics are exact atom sums") {
  CostModel costs(1.0, 10.0);
  DiscreteScoreModel model = two_atom();

  SUBCASE("verify-everything threshold") {
    ThresholdAnalytics at = threshold_analytics(model, costs, -1e300);
    CHECK(at.q_t == 1.0);
    CHECK(at.s_t == doctest::Approx(0.3));
    CHECK(at.j_t == doctest::Approx((1.0 + 10.0) / 0.3));
  }

  SUBCASE("threshold at the top atom") {
    ThresholdAnalytics at = threshold_analytics(model, costs, 0.8);
    CHECK(at.q_t == 0.5);
    CHECK(at.s_t == doctest::Approx(0.3));
    CHECK(at.j_t == doctest::Approx(20.0));
  }

  SUBCASE("threshold above all atoms is infinite") {
    ThresholdAnalytics at = threshold_analytics(model, costs, 0.81);
    CHECK(at.q_t == 0.0);
    CHECK(at.s_t == 0.0);
    CHECK(at.j_t == std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("best threshold matches the fixed point on monotone models") {
  CostModel costs(1.0, 10.0);

  SUBCASE("two-atom minimum sits at the top atom") {
    ThresholdAnalytics best = best_threshold(two_atom(), costs);
    CHECK(best.t == 0.8);
    CHECK(best.j_t == doctest::Approx(20.0));
  }

  SUBCASE("certain success verifies everything") {
    ThresholdAnalytics best = best_threshold(model_from({0.0}, {1.0}, {1.0}), costs);
    CHECK(best.j_t == doctest::Approx(11.0));
  }

  SUBCASE("non-monotone success keeps the threshold optimum above J*") {
    DiscreteScoreModel model = model_from({0.2, 0.8}, {0.5, 0.5}, {0.9, 0.0});
    ThresholdAnalytics best = best_threshold(model, costs);
    CHECK(best.j_t == doctest::Approx((1.0 + 10.0) / 0.45));
    OracleSolution solution = solve_tau_star(model, costs);
    CHECK(best.j_t >= solution.j_star - 1e-9);
  }

  SUBCASE("fixed-point consistency on random monotone instances") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      SyntheticInstance instance =
          make_random_monotone_instance(1 + static_cast<int>(seed % 32), seed, 0.01);
      OracleSolution solution = solve_tau_star(instance.model(), costs);
      ThresholdAnalytics best = best_threshold(instance.model(), costs);
      CHECK(std::abs(best.j_t - solution.j_star) <= 1e-6 * solution.j_star);
    }
  }

  SUBCASE("every threshold lower-bounds at J* on monotone models") {
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
      SyntheticInstance instance = make_random_monotone_instance(8, seed, 0.02);
      OracleSolution solution = solve_tau_star(instance.model(), costs);
      const auto& model = instance.model();
      for (Eigen::Index i = 0; i < model.atom_count(); ++i) {
        ThresholdAnalytics at = threshold_analytics(model, costs, model.rewards()[i]);
        if (at.s_t > 0.0) CHECK(at.j_t >= solution.j_star - 1e-9);
      }
    }
  }
}

TEST_CASE("break-even gap is strictly decreasing") {
  CostModel costs(1.0, 10.0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    SyntheticInstance instance = make_random_monotone_instance(6, seed, 0.05);
    Rng rng(derive_seed(seed, 0x9));
    double t1 = rng.uniform01();
    double t2 = rng.uniform01();
    if (t1 > t2) std::swap(t1, t2);
    if (t1 == t2) continue;
    CHECK(break_even_gap(instance.model(), costs, t1) >
          break_even_gap(instance.model(), costs, t2));
  }
}

TEST_CASE("streaming simulation estimates J*") {
  CostModel costs(1.0, 10.0);

  SUBCASE("certain success is deterministic at c_rew + c_ver") {
    DiscreteScoreModel model = model_from({0.0}, {1.0}, {1.0});
    OracleSolution solution = solve_tau_star(model, costs);
    MonteCarloEstimate estimate = simulate_streaming_oracle(model, costs, solution, 10'000, 3);
    CHECK(estimate.mean == doctest::Approx(11.0));
    CHECK(estimate.std_error == doctest::Approx(0.0));
  }

  SUBCASE("two-atom mean within three standard errors of 20") {
    DiscreteScoreModel model = two_atom();
    OracleSolution solution = solve_tau_star(model, costs);
    MonteCarloEstimate estimate = simulate_streaming_oracle(model, costs, solution, 100'000, 5);
    CHECK(std::abs(estimate.mean - 20.0) <= 3.0 * estimate.std_error);
  }

  SUBCASE("binary quarter-mass model lands on 14") {
    DiscreteScoreModel model = model_from({0.1, 0.9}, {0.75, 0.25}, {0.0, 1.0});
    OracleSolution solution = solve_tau_star(model, costs);
    MonteCarloEstimate estimate = simulate_streaming_oracle(model, costs, solution, 100'000, 7);
    CHECK(std::abs(estimate.mean - 14.0) <= 3.0 * estimate.std_error);
  }
}

TEST_SUITE_END();
