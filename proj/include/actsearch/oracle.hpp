#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>

#include "actsearch/core.hpp"

namespace actsearch {

// Finite discrete reward-score model: atom i carries a reward, a probability
// mass, and the conditional success probability h*(reward). All expectations
// over (D, h*) reduce to exact sums over the atom columns. Continuous
// distributions are quantized by the caller.
class DiscreteScoreModel {
 public:
  DiscreteScoreModel(Eigen::ArrayXd rewards, Eigen::ArrayXd masses, Eigen::ArrayXd success);

  Eigen::Index atom_count() const { return rewards_.size(); }
  const Eigen::ArrayXd& rewards() const { return rewards_; }
  const Eigen::ArrayXd& masses() const { return masses_; }
  const Eigen::ArrayXd& success() const { return success_; }

  // Pr(V = 1) = sum(mass * h*).
  double positive_mass() const { return positive_mass_; }
  bool feasible() const { return positive_mass_ > 0.0; }
  // True iff h* is nondecreasing over the (ascending) atom rewards.
  bool monotone() const { return monotone_; }
  // True iff every h* value is 0 or 1.
  bool binary() const { return binary_; }

  // Index of the atom with this exact reward; throws if absent.
  Eigen::Index atom_for_reward(double reward) const;
  // Samples an atom index by CDF inversion.
  Eigen::Index sample_atom(Rng& rng) const;

 private:
  Eigen::ArrayXd rewards_;
  Eigen::ArrayXd masses_;
  Eigen::ArrayXd success_;
  Eigen::ArrayXd cdf_;
  double positive_mass_ = 0.0;
  bool monotone_ = false;
  bool binary_ = false;
};

// Exact statistics of the reward-threshold policy "verify iff R >= t":
// q_t = Pr(R >= t), s_t = E[h*(R) 1{R >= t}], and its expected cost
// J_t = (c_rew + c_ver q_t) / s_t (infinite when s_t = 0).
struct ThresholdAnalytics {
  double t = 0.0;
  double q_t = 0.0;
  double s_t = 0.0;
  double j_t = std::numeric_limits<double>::infinity();
};

// The distribution-aware optimum: tau_star is the break-even success
// probability, j_star = c_ver / tau_star its expected cost, and
// verify_cutoff the lowest atom reward whose h* clears tau_star
// (characterizes the verify set for monotone h*).
struct OracleSolution {
  double tau_star = 0.0;
  double j_star = 0.0;
  double verify_cutoff = 0.0;
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
};

constexpr double kDefaultTauTolerance = 1e-12;
constexpr int kMaxBisectionIterations = 200;

// Break-even excess value at threshold tau:
//   g(tau) = c_ver * E[(h*(R) - tau)_+] - tau * c_rew.
// Continuous, strictly decreasing, g(0) = c_ver * p > 0, g(1) = -c_rew < 0.
double break_even_gap(const DiscreteScoreModel& model, const CostModel& costs, double tau);

// Solves g(tau_star) = 0 by bisection on [0, 1]; |g(tau_star)| <= tol*c_rew.
// Throws Infeasible when the model has zero positive mass.
OracleSolution solve_tau_star(const DiscreteScoreModel& model, const CostModel& costs,
                              double tol = kDefaultTauTolerance);

ThresholdAnalytics threshold_analytics(const DiscreteScoreModel& model, const CostModel& costs,
                                       double t);

// Minimizes J_t over the finite candidate thresholds (one per atom).
// For monotone h* the minimum equals solve_tau_star().j_star.
ThresholdAnalytics best_threshold(const DiscreteScoreModel& model, const CostModel& costs);

// Monte-Carlo mean cost of the threshold rule "verify iff h*(r) >= tau_star"
// (ties verify); an unbiased estimator of j_star.
MonteCarloEstimate simulate_streaming_oracle(const DiscreteScoreModel& model,
                                             const CostModel& costs,
                                             const OracleSolution& solution,
                                             std::int64_t trials, std::uint64_t seed);

// The streaming threshold rule as a Policy, for harness-level runs against
// synthetic instances built on the same model.
class StreamingOraclePolicy : public Policy {
 public:
  StreamingOraclePolicy(const DiscreteScoreModel& model, OracleSolution solution)
      : model_(&model), solution_(solution) {}

  std::string name() const override { return "oracle"; }
  void run(Trial& trial) override;

 private:
  const DiscreteScoreModel* model_;
  OracleSolution solution_;
};

}  // namespace actsearch
