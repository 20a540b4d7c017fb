#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "actsearch/errors.hpp"
#include "actsearch/rng.hpp"

namespace actsearch {

// The two action costs of active search: c_rew per generate+score, c_ver per
// verifier call. Every cost figure in the system flows through this pair.
class CostModel {
 public:
  CostModel(double c_rew, double c_ver);

  double c_rew() const { return c_rew_; }
  double c_ver() const { return c_ver_; }
  double c_min() const { return c_rew_ < c_ver_ ? c_rew_ : c_ver_; }
  double ratio() const { return c_ver_ / c_rew_; }

 private:
  double c_rew_;
  double c_ver_;
};

// One generated-and-scored candidate. The label stays unset until a verify
// action targets the candidate and is immutable afterwards.
struct ScoredCandidate {
  std::int64_t draw_index = 0;  // position in the i.i.d. draw sequence, 0-based
  double reward = 0.0;
  std::optional<int> label;
};

// Candidate ordering used everywhere ranking occurs: descending reward,
// ties by ascending draw index.
inline bool ranked_before(const ScoredCandidate& x, const ScoredCandidate& y) {
  if (x.reward != y.reward) return x.reward > y.reward;
  return x.draw_index < y.draw_index;
}

// One logged (reward, correctness) record of a replayable dataset.
struct Sample {
  double reward = 0.0;
  int correct = 0;
};

// Running cost account of one trial. The total is recomputed from the counts
// on every read, so c_rew*n_rew + c_ver*n_ver holds exactly at all times.
class CostLedger {
 public:
  explicit CostLedger(CostModel costs) : costs_(costs) {}
  CostLedger(CostModel costs, std::int64_t n_rew, std::int64_t n_ver)
      : costs_(costs), n_rew_(n_rew), n_ver_(n_ver) {}

  void add_draw() { ++n_rew_; }
  void add_verify() { ++n_ver_; }

  std::int64_t n_rew() const { return n_rew_; }
  std::int64_t n_ver() const { return n_ver_; }
  double total() const {
    return costs_.c_rew() * static_cast<double>(n_rew_) +
           costs_.c_ver() * static_cast<double>(n_ver_);
  }
  const CostModel& costs() const { return costs_; }

 private:
  CostModel costs_;
  std::int64_t n_rew_ = 0;
  std::int64_t n_ver_ = 0;
};

// Outcome of one policy run.
struct TrialRecord {
  CostLedger ledger;
  bool succeeded = false;
  std::optional<ScoredCandidate> winner;       // present iff succeeded, label = 1
  std::optional<std::int64_t> stop_index;      // verifier-call count at success
  std::uint64_t seed = 0;
  std::string policy_name;
  std::string instance_name;
};

// An active-search instance: a reward-score distribution plus the ground
// truth the verifier samples from. Instances handed to run_trial are cloned
// per trial, so mutable per-trial state (replay cursors, drawn-point lists)
// never leaks across trials.
class Instance {
 public:
  virtual ~Instance() = default;

  virtual const std::string& name() const = 0;
  virtual std::unique_ptr<Instance> clone() const = 0;

  // Draws still available, or nullopt when the supply is unlimited.
  virtual std::optional<std::int64_t> remaining_draws() const { return std::nullopt; }

  // Samples one reward score from D. Replay instances advance their cursor
  // and throw ExhaustedSamples once the permutation is consumed.
  virtual double sample_reward(Rng& env_rng) = 0;

  // Ground-truth verifier label for a drawn candidate: Bernoulli(h*) for
  // synthetic instances, the logged label for replay.
  virtual int verifier_label(const ScoredCandidate& candidate, Rng& env_rng) = 0;
};

// One trial's interaction window. Policies see exactly: rewards of drawn
// candidates, their own verify outcomes, and the cost model. Each paid
// action first checks the safety cap; once the running total reaches the
// cap the trial is capped and further actions are refused (recorded, not
// thrown).
class Trial {
 public:
  Trial(const Instance& instance, CostModel costs, std::uint64_t seed, double safety_cap);

  // Draws one fresh candidate, paying c_rew. Returns nullopt when the trial
  // is over (success or cap) or the replay log is exhausted.
  std::optional<ScoredCandidate> draw();

  // Verifies a drawn candidate, paying c_ver. Returns the label, or nullopt
  // when the trial is over. Throws AlreadyVerified on a repeat target.
  std::optional<int> verify(const ScoredCandidate& candidate);

  bool active() const { return !succeeded_ && !capped_; }
  bool succeeded() const { return succeeded_; }
  bool capped() const { return capped_; }

  const CostModel& costs() const { return ledger_.costs(); }
  const CostLedger& ledger() const { return ledger_; }
  const Instance& instance() const { return *instance_; }
  std::optional<std::int64_t> remaining_draws() const { return instance_->remaining_draws(); }

  Rng& policy_rng() { return policy_rng_; }

  TrialRecord finish(const std::string& policy_name) const;

 private:
  bool cap_reached() const { return ledger_.total() >= safety_cap_; }

  std::unique_ptr<Instance> instance_;
  CostLedger ledger_;
  double safety_cap_;
  std::uint64_t seed_;
  Rng env_rng_;
  Rng policy_rng_;
  std::int64_t next_draw_index_ = 0;
  std::vector<char> verified_;  // by draw index
  bool succeeded_ = false;
  bool capped_ = false;
  std::optional<ScoredCandidate> winner_;
  std::optional<std::int64_t> stop_index_;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  // Drives the trial until success, cap, or nothing left to do.
  virtual void run(Trial& trial) = 0;
};

constexpr double kDefaultCapMultiple = 1e7;  // safety cap default: 1e7 * c_min

// Runs one policy against one instance. Deterministic in (policy, instance,
// costs, seed, safety_cap); a cap hit is recorded as a failed trial.
TrialRecord run_trial(Policy& policy, const Instance& instance, const CostModel& costs,
                      std::uint64_t seed, double safety_cap);

}  // namespace actsearch
