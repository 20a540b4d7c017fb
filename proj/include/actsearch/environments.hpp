#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "actsearch/core.hpp"
#include "actsearch/oracle.hpp"
#include "actsearch/starsearch.hpp"

namespace actsearch {

// Synthetic instance over a discrete score model: draws sample an atom from
// D, verification is Bernoulli(h*(reward)).
class SyntheticInstance final : public Instance {
 public:
  SyntheticInstance(DiscreteScoreModel model, std::string name);

  const std::string& name() const override { return name_; }
  std::unique_ptr<Instance> clone() const override;
  double sample_reward(Rng& env_rng) override;
  int verifier_label(const ScoredCandidate& candidate, Rng& env_rng) override;

  const DiscreteScoreModel& model() const { return *model_; }
  bool monotone() const { return model_->monotone(); }

 private:
  std::shared_ptr<const DiscreteScoreModel> model_;
  std::string name_;
};

// Random monotone instance: ascending rewards, normalized random masses, and
// a nondecreasing h* lifted so the positive mass reaches feasibility_floor.
SyntheticInstance make_random_monotone_instance(int n_atoms, std::uint64_t seed,
                                                double feasibility_floor);

// Adversarial star instance: D uniform over m domain points, target concept
// one of the m singletons h_i (h_i positive exactly on point i-1). The
// all-zero concept is not a valid target (zero positive mass).
class StarInstance final : public PointInstance {
 public:
  StarInstance(std::shared_ptr<const FiniteConceptClass> concepts, int target_concept,
               std::string name);

  const std::string& name() const override { return name_; }
  std::unique_ptr<Instance> clone() const override;
  double sample_reward(Rng& env_rng) override;
  int verifier_label(const ScoredCandidate& candidate, Rng& env_rng) override;

  const FiniteConceptClass& concepts() const override { return *concepts_; }
  int point_of(std::int64_t draw_index) const override;

  int target_concept() const { return target_; }
  // Pr(V = 1) on a fresh draw: positive points of the target / domain size.
  double positive_point_mass() const;

 private:
  std::shared_ptr<const FiniteConceptClass> concepts_;
  int target_;
  std::string name_;
  std::vector<int> drawn_points_;
};

// Uniform-D star instance over the singleton class of size m, with the
// target drawn uniformly from the m singletons.
StarInstance make_star_instance(int m, std::uint64_t seed);

// A replayable dataset: per-problem lists of (reward, correctness) records.
struct SampleLog {
  struct Problem {
    std::string id;
    std::vector<Sample> samples;

    int correct_count() const;
    double pass_rate() const;
  };

  std::string name;
  int samples_per_problem = 0;
  std::vector<Problem> problems;
};

// Line-oriented text format:
//   samplelog <name> <samples-per-problem>
//   <problem_id> <sample_index> <reward> <correct>
SampleLog load_sample_log(const std::string& path);
SampleLog read_sample_log(std::istream& in);
std::string format_sample_log(const SampleLog& log);
void save_sample_log(const SampleLog& log, const std::string& path);

// Drops problems with no correct sample; their ids are appended to
// dropped_ids when provided.
SampleLog filter_feasible(const SampleLog& log, std::vector<std::string>* dropped_ids = nullptr);

// Replays one problem's samples in a fixed permutation order. Draws return
// rewards in permutation order and throw ExhaustedSamples when consumed;
// verification returns the logged label deterministically.
class ReplayInstance final : public Instance {
 public:
  ReplayInstance(std::string problem_id, int perm_index, std::vector<Sample> permuted);

  const std::string& name() const override { return name_; }
  std::unique_ptr<Instance> clone() const override;
  std::optional<std::int64_t> remaining_draws() const override;
  double sample_reward(Rng& env_rng) override;
  int verifier_label(const ScoredCandidate& candidate, Rng& env_rng) override;

  const std::string& problem_id() const { return problem_id_; }
  int perm_index() const { return perm_index_; }
  const std::vector<Sample>& samples() const { return samples_; }

 private:
  std::string problem_id_;
  int perm_index_;
  std::vector<Sample> samples_;
  std::int64_t cursor_ = 0;
  std::string name_;
};

// Builds n_perms Fisher-Yates permutations per problem, seeded per
// (problem id, permutation index) so the trial set is deterministic and
// shared across policies for paired comparison. Ordered by problem, then
// permutation index.
std::vector<ReplayInstance> make_permutation_trials(const SampleLog& log, int n_perms,
                                                    std::uint64_t seed);

// The bundled miniature dataset: 30 problems x 64 samples with a planted
// monotone-ish reward signal and a per-problem AUC spread. Regenerable
// bit-identically from its seed.
constexpr std::uint64_t kBundledDatasetSeed = 12345;
SampleLog make_bundled_dataset(std::uint64_t seed = kBundledDatasetSeed);

}  // namespace actsearch
