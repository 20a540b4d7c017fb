#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "actsearch/core.hpp"

namespace actsearch {

// Finite binary concept class over a small domain (at most 64 points, one
// bit per point). The all-zero concept must be present.
class FiniteConceptClass {
 public:
  // concept_rows[c] is the bitmask of points where concept c is positive.
  FiniteConceptClass(int domain_size, std::vector<std::uint64_t> concept_rows);

  // Plain-text 0/1 matrix: rows = concepts, columns = domain points,
  // first row must be all zeros. Blank lines and '#' comments are skipped.
  static FiniteConceptClass load(const std::string& path);

  // The canonical star construction: the all-zero concept plus the m
  // singletons, concept i positive exactly at point i-1.
  static FiniteConceptClass singletons(int m);

  int domain_size() const { return domain_size_; }
  int concept_count() const { return static_cast<int>(rows_.size()); }
  bool value(int concept_idx, int point) const {
    return (rows_[static_cast<std::size_t>(concept_idx)] >> point) & 1u;
  }
  std::uint64_t row(int concept_idx) const {
    return rows_[static_cast<std::size_t>(concept_idx)];
  }
  const std::vector<std::uint64_t>& rows() const { return rows_; }

 private:
  int domain_size_;
  std::vector<std::uint64_t> rows_;
};

// Probabilistic concept class: concepts take values in [0,1] per point.
class ProbabilisticConceptClass {
 public:
  ProbabilisticConceptClass(int domain_size, std::vector<std::vector<double>> concepts);

  int domain_size() const { return domain_size_; }
  int concept_count() const { return static_cast<int>(values_.size()); }
  double value(int concept_idx, int point) const {
    return values_[static_cast<std::size_t>(concept_idx)][static_cast<std::size_t>(point)];
  }

 private:
  int domain_size_;
  std::vector<std::vector<double>> values_;
};

constexpr std::int64_t kDefaultSearchBudget = 5'000'000;

// Largest m admitting points z_1..z_m and concepts h_1..h_m with
// h_i(z_j) = 1{i = j}. Exact branch-and-bound over point subsets; throws
// SearchBudgetExceeded (carrying the best size found) past the node budget.
int centered_star_number(const FiniteConceptClass& concepts,
                         std::int64_t search_budget = kDefaultSearchBudget);

// Probabilistic variant: h_i(z_i) >= eta and h_i(z_j) = 0 for j != i.
int eta_centered_star_number(const ProbabilisticConceptClass& concepts, double eta,
                             std::int64_t search_budget = kDefaultSearchBudget);

// The distinct nonempty positive traces A_h(S) = {i : h(S_i) = 1} induced by
// a drawn batch of points.
struct TraceFamily {
  std::vector<int> batch;                 // point id at each batch position
  std::vector<std::vector<int>> traces;   // each sorted ascending, deduplicated
};

TraceFamily build_trace_family(const FiniteConceptClass& concepts, const std::vector<int>& batch);

struct HittingSet {
  std::vector<int> indices;  // batch positions, sorted ascending
  bool minimal = true;       // false when the search fell back to greedy
};

// Minimum-cardinality hitting set over the family's traces, by branch and
// bound seeded with a greedy upper bound and a disjoint-trace lower bound.
// Past the node budget it falls back to the greedy cover, flagged
// non-minimal.
HittingSet min_hitting_set(const TraceFamily& family,
                           std::int64_t search_budget = kDefaultSearchBudget);

// Instance whose policy-visible structure is a point in a finite domain
// rather than a reward score.
class PointInstance : public Instance {
 public:
  virtual const FiniteConceptClass& concepts() const = 0;
  virtual int point_of(std::int64_t draw_index) const = 0;
};

// Hitting-set statistics of one centered-star search run.
struct AcsStats {
  std::vector<int> hitting_set_sizes;
  bool all_minimal = true;
};

// Centered-star active search. When the centered star number exceeds
// c_ver/c_rew, verifies every fresh draw; otherwise repeatedly draws a batch
// of ceil((c_ver/c_rew) * s0) points and verifies a minimum hitting set of
// the batch's trace family, which either finds a positive or certifies the
// whole batch dead.
class AcsPolicy : public Policy {
 public:
  explicit AcsPolicy(AcsStats* stats = nullptr) : stats_(stats) {}

  std::string name() const override { return "acs"; }
  void run(Trial& trial) override;

 private:
  AcsStats* stats_;
};

// Requires c_ver >= c_rew; the instance must be a PointInstance.
TrialRecord run_acs(const Instance& instance, const CostModel& costs, std::uint64_t seed,
                    double safety_cap, AcsStats* stats = nullptr);

// Verifies the domain points of a star instance in a uniformly random order
// without replacement, drawing until each chosen point appears.
class RandomGuesserPolicy : public Policy {
 public:
  std::string name() const override { return "guesser"; }
  void run(Trial& trial) override;
};

struct StarLowerBoundResult {
  double mean_verifier_calls = 0.0;
  double se_verifier_calls = 0.0;
  double mean_cost = 0.0;
  double se_cost = 0.0;
  double mean_cost_ratio = 0.0;  // cost / (c_rew * m + c_ver)
  std::int64_t trials = 0;
};

// Runs the policy against a freshly drawn random target each trial on the
// m-point uniform star instance and reports the verifier-call count and the
// cost ratio against the oracle bound c_rew * m + c_ver.
StarLowerBoundResult star_lower_bound_experiment(int m, const CostModel& costs, Policy& policy,
                                                 std::int64_t trials, std::uint64_t seed);

}  // namespace actsearch
