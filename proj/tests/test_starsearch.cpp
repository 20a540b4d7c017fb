#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

#include "actsearch/environments.hpp"
#include "actsearch/starsearch.hpp"

using namespace actsearch;

namespace {

// Definition-level star check used as the independent oracle: every chosen
// point needs a concept positive exactly there among the chosen set.
bool is_star_subset(const FiniteConceptClass& concepts, std::uint64_t chosen) {
  for (int z = 0; z < concepts.domain_size(); ++z) {
    if (!((chosen >> z) & 1u)) continue;
    bool witnessed = false;
    for (int c = 0; c < concepts.concept_count(); ++c) {
      if ((concepts.row(c) & chosen) == (std::uint64_t{1} << z)) {
        witnessed = true;
        break;
      }
    }
    if (!witnessed) return false;
  }
  return true;
}

int brute_force_star_number(const FiniteConceptClass& concepts) {
  int best = 0;
  std::uint64_t limit = std::uint64_t{1} << concepts.domain_size();
  for (std::uint64_t chosen = 0; chosen < limit; ++chosen) {
    if (is_star_subset(concepts, chosen)) {
      best = std::max(best, static_cast<int>(std::popcount(chosen)));
    }
  }
  return best;
}

FiniteConceptClass random_class(Rng& rng, int domain, int extra_concepts) {
  std::vector<std::uint64_t> rows = {0};
  std::uint64_t mask = (std::uint64_t{1} << domain) - 1;
  for (int c = 0; c < extra_concepts; ++c) rows.push_back(rng.next_u64() & mask);
  return FiniteConceptClass(domain, rows);
}

std::vector<std::vector<int>> all_hitting_sets_of_size(const TraceFamily& family, int size) {
  std::vector<int> universe;
  for (const auto& trace : family.traces) {
    for (int e : trace) universe.push_back(e);
  }
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());

  std::vector<std::vector<int>> found;
  std::vector<int> pick;
  std::function<void(std::size_t)> recurse = [&](std::size_t from) {
    if (static_cast<int>(pick.size()) == size) {
      for (const auto& trace : family.traces) {
        bool hit = false;
        for (int e : pick) {
          if (std::binary_search(trace.begin(), trace.end(), e)) {
            hit = true;
            break;
          }
        }
        if (!hit) return;
      }
      found.push_back(pick);
      return;
    }
    for (std::size_t i = from; i < universe.size(); ++i) {
      pick.push_back(universe[i]);
      recurse(i + 1);
      pick.pop_back();
    }
  };
  recurse(0);
  return found;
}

}  // namespace

TEST_SUITE_BEGIN("starsearch");

TEST_CASE("centered star number on canonical classes") {
  SUBCASE("the singleton construction attains its size") {
    for (int m : {1, 2, 3, 5, 8, 16}) {
      CHECK(centered_star_number(FiniteConceptClass::singletons(m)) == m);
    }
  }

  SUBCASE("a single all-ones concept stars one point only") {
    for (int m : {2, 4, 7}) {
      std::vector<std::uint64_t> rows = {0, (std::uint64_t{1} << m) - 1};
      CHECK(centered_star_number(FiniteConceptClass(m, rows)) == 1);
    }
  }

  SUBCASE("threshold concepts star one point only") {
    // Upper sets over 10 ordered points: any concept covering z also covers
    // everything above it.
    std::vector<std::uint64_t> rows = {0};
    for (int t = 0; t < 10; ++t) {
      std::uint64_t row = 0;
      for (int z = t; z < 10; ++z) row |= std::uint64_t{1} << z;
      rows.push_back(row);
    }
    CHECK(centered_star_number(FiniteConceptClass(10, rows)) == 1);
  }

  SUBCASE("matches exhaustive search on random small classes") {
    Rng rng(5);
    for (int round = 0; round < 60; ++round) {
      int domain = 3 + static_cast<int>(rng.uniform_int(5));
      FiniteConceptClass concepts = random_class(rng, domain, 2 + static_cast<int>(rng.uniform_int(8)));
      CHECK(centered_star_number(concepts) == brute_force_star_number(concepts));
    }
  }

  SUBCASE("a tiny node budget reports its best bound") {
    FiniteConceptClass concepts = FiniteConceptClass::singletons(12);
    CHECK_THROWS_AS(centered_star_number(concepts, 3), SearchBudgetExceeded);
  }

  SUBCASE("fixed center never beats a free center") {
    Rng rng(6);
    for (int round = 0; round < 25; ++round) {
      int domain = 3 + static_cast<int>(rng.uniform_int(6));
      FiniteConceptClass concepts = random_class(rng, domain, 3 + static_cast<int>(rng.uniform_int(7)));
      int centered = centered_star_number(concepts);
      // Free-center search: recenter the class at each concept by symmetric
      // difference; the all-zero row reappears as the center itself.
      int free_center = 0;
      for (int c = 0; c < concepts.concept_count(); ++c) {
        std::vector<std::uint64_t> shifted;
        shifted.reserve(static_cast<std::size_t>(concepts.concept_count()));
        for (int other = 0; other < concepts.concept_count(); ++other) {
          shifted.push_back(concepts.row(other) ^ concepts.row(c));
        }
        free_center = std::max(
            free_center, centered_star_number(FiniteConceptClass(domain, shifted)));
      }
      CHECK(centered <= free_center);
    }
  }
}

TEST_CASE("eta-centered star number generalizes the binary case") {
  SUBCASE("binary-valued probabilistic classes agree at eta = 1") {
    Rng rng(8);
    for (int round = 0; round < 20; ++round) {
      int domain = 3 + static_cast<int>(rng.uniform_int(5));
      FiniteConceptClass binary = random_class(rng, domain, 5);
      std::vector<std::vector<double>> values;
      for (int c = 0; c < binary.concept_count(); ++c) {
        std::vector<double> row(static_cast<std::size_t>(domain));
        for (int z = 0; z < domain; ++z) row[static_cast<std::size_t>(z)] = binary.value(c, z);
        values.push_back(std::move(row));
      }
      ProbabilisticConceptClass prob(domain, values);
      CHECK(eta_centered_star_number(prob, 1.0) == centered_star_number(binary));
    }
  }

  SUBCASE("points reachable only below eta do not count") {
    // Two points: concept A hits point 0 at 0.9, concept B hits point 1 at 0.4.
    ProbabilisticConceptClass prob(2, {{0.0, 0.0}, {0.9, 0.0}, {0.0, 0.4}});
    CHECK(eta_centered_star_number(prob, 0.5) == 1);
    CHECK(eta_centered_star_number(prob, 0.4) == 2);
  }
}

TEST_CASE("minimum hitting sets") {
  FiniteConceptClass singles = FiniteConceptClass::singletons(4);

  SUBCASE("a shared element suffices") {
    TraceFamily family;
    family.batch = {0, 1, 2, 3};
    family.traces = {{1, 2}, {2, 3}};
    HittingSet hs = min_hitting_set(family);
    CHECK(hs.minimal);
    CHECK(hs.indices == std::vector<int>{2});
  }

  SUBCASE("disjoint singletons need one element each") {
    TraceFamily family;
    family.batch = {0, 1, 2};
    family.traces = {{0}, {1}, {2}};
    HittingSet hs = min_hitting_set(family);
    CHECK(hs.indices.size() == 3);
  }

  SUBCASE("matches the exhaustive minimum on random families") {
    Rng rng(9);
    for (int round = 0; round < 50; ++round) {
      TraceFamily family;
      family.batch.resize(8);
      int n_traces = 3 + static_cast<int>(rng.uniform_int(10));
      for (int t = 0; t < n_traces; ++t) {
        std::vector<int> trace;
        for (int e = 0; e < 8; ++e) {
          if (rng.bernoulli(0.3)) trace.push_back(e);
        }
        if (trace.empty()) trace.push_back(static_cast<int>(rng.uniform_int(8)));
        family.traces.push_back(std::move(trace));
      }
      HittingSet hs = min_hitting_set(family);
      REQUIRE(hs.minimal);
      // No smaller subset hits everything; the found one does.
      CHECK(all_hitting_sets_of_size(family, static_cast<int>(hs.indices.size()) - 1).empty());
      bool covers = true;
      for (const auto& trace : family.traces) {
        bool hit = false;
        for (int e : hs.indices) hit = hit || std::binary_search(trace.begin(), trace.end(), e);
        covers = covers && hit;
      }
      CHECK(covers);
    }
  }

  SUBCASE("trace families deduplicate and drop empties") {
    std::vector<int> batch = {0, 0, 1, 3};
    TraceFamily family = build_trace_family(singles, batch);
    // Singleton concepts on points 0,1,3 give traces {0,1},{2},{3}; point 2
    // never drawn, concept h0 contributes nothing.
    REQUIRE(family.traces.size() == 3);
    CHECK(family.traces[0] == std::vector<int>{0, 1});
  }
}

TEST_CASE("centered-star policy") {
  SUBCASE("expensive stars verify every draw") {
    // s0 = 8 > c_ver/c_rew = 4: alternate generate and verify; expected cost
    // (c_rew + c_ver)/p = 40.
    CostModel costs(1.0, 4.0);
    StarInstance instance = make_star_instance(8, 21);
    const int trials = 10'000;
    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
      TrialRecord record = run_acs(instance, costs, derive_seed(77, t), 1e9);
      REQUIRE(record.succeeded);
      sum += record.ledger.total();
      sum_sq += record.ledger.total() * record.ledger.total();
    }
    double mean = sum / trials;
    double se = std::sqrt((sum_sq - sum * sum / trials) / (trials - 1.0) / trials);
    CHECK(std::abs(mean - 40.0) <= 3.0 * se);
  }

  SUBCASE("cheap stars batch and certify with hitting sets") {
    // s0 = 4 <= c_ver/c_rew = 16: batches of 64 succeed unless the target
    // point misses the whole batch, probability (3/4)^64 ~ 1e-8.
    CostModel costs(1.0, 16.0);
    StarInstance instance = make_star_instance(4, 22);
    for (int t = 0; t < 500; ++t) {
      AcsStats stats;
      TrialRecord record = run_acs(instance, costs, derive_seed(78, t), 1e9, &stats);
      REQUIRE(record.succeeded);
      CHECK(record.ledger.n_rew() == 64);  // one batch
      CHECK(stats.all_minimal);
      for (int size : stats.hitting_set_sizes) CHECK(size <= 4);
    }
  }

  SUBCASE("the all-zero target cannot be built") {
    auto concepts = std::make_shared<const FiniteConceptClass>(FiniteConceptClass::singletons(3));
    CHECK_THROWS_AS(StarInstance(concepts, 0, "bad"), Infeasible);
  }

  SUBCASE("requires verification at least as costly as generation") {
    CostModel costs(2.0, 1.0);
    StarInstance instance = make_star_instance(4, 23);
    CHECK_THROWS_AS(run_acs(instance, costs, 1, 1e9), std::invalid_argument);
  }
}

TEST_CASE("uniform guesser on the star instance") {
  SUBCASE("one point is found immediately") {
    CostModel costs(1.0, 100.0);
    RandomGuesserPolicy guesser;
    StarLowerBoundResult result = star_lower_bound_experiment(1, costs, guesser, 200, 4);
    CHECK(result.mean_verifier_calls == doctest::Approx(1.0));
  }

  SUBCASE("mean verifier calls approach (m+1)/2") {
    CostModel costs(1.0, 100.0);
    RandomGuesserPolicy guesser;
    StarLowerBoundResult result = star_lower_bound_experiment(16, costs, guesser, 20'000, 4);
    CHECK(std::abs(result.mean_verifier_calls - 8.5) <= 3.0 * result.se_verifier_calls);
    // Adaptivity-gap lower bound at ratio 100.
    CHECK(result.mean_cost_ratio >= 0.25 * 16.0);
  }
}

TEST_SUITE_END();
