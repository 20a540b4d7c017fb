#include "actsearch/core.hpp"

#include <stdexcept>

namespace actsearch {

namespace {
constexpr std::uint64_t kEnvStreamTag = 0x0e;
constexpr std::uint64_t kPolicyStreamTag = 0x70;
}  // namespace

CostModel::CostModel(double c_rew, double c_ver) : c_rew_(c_rew), c_ver_(c_ver) {
  if (!(c_rew > 0.0) || !(c_ver > 0.0)) {
    throw std::invalid_argument("CostModel: costs must be positive");
  }
}

Trial::Trial(const Instance& instance, CostModel costs, std::uint64_t seed, double safety_cap)
    : instance_(instance.clone()),
      ledger_(costs),
      safety_cap_(safety_cap),
      seed_(seed),
      env_rng_(derive_seed(seed, kEnvStreamTag)),
      policy_rng_(derive_seed(seed, kPolicyStreamTag)) {
  if (!(safety_cap > 0.0)) {
    throw std::invalid_argument("Trial: safety_cap must be positive");
  }
}

std::optional<ScoredCandidate> Trial::draw() {
  if (!active()) return std::nullopt;
  if (cap_reached()) {
    capped_ = true;
    return std::nullopt;
  }
  auto remaining = instance_->remaining_draws();
  if (remaining && *remaining <= 0) return std::nullopt;

  ScoredCandidate candidate;
  candidate.draw_index = next_draw_index_++;
  candidate.reward = instance_->sample_reward(env_rng_);
  ledger_.add_draw();
  verified_.push_back(0);
  return candidate;
}

std::optional<int> Trial::verify(const ScoredCandidate& candidate) {
  if (candidate.draw_index < 0 ||
      candidate.draw_index >= static_cast<std::int64_t>(verified_.size())) {
    throw std::logic_error("Trial::verify: candidate was never drawn in this trial");
  }
  if (verified_[static_cast<std::size_t>(candidate.draw_index)]) {
    throw AlreadyVerified("candidate " + std::to_string(candidate.draw_index) +
                          " already verified");
  }
  if (!active()) return std::nullopt;
  if (cap_reached()) {
    capped_ = true;
    return std::nullopt;
  }

  int label = instance_->verifier_label(candidate, env_rng_);
  ledger_.add_verify();
  verified_[static_cast<std::size_t>(candidate.draw_index)] = 1;
  if (label == 1) {
    succeeded_ = true;
    winner_ = candidate;
    winner_->label = 1;
    stop_index_ = ledger_.n_ver();
  }
  return label;
}

TrialRecord Trial::finish(const std::string& policy_name) const {
  TrialRecord record{ledger_, succeeded_, winner_, stop_index_, seed_, policy_name,
                     instance_->name()};
  return record;
}

TrialRecord run_trial(Policy& policy, const Instance& instance, const CostModel& costs,
                      std::uint64_t seed, double safety_cap) {
  Trial trial(instance, costs, seed, safety_cap);
  policy.run(trial);
  return trial.finish(policy.name());
}

}  // namespace actsearch
