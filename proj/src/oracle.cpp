#include "actsearch/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace actsearch {

DiscreteScoreModel::DiscreteScoreModel(Eigen::ArrayXd rewards, Eigen::ArrayXd masses,
                                       Eigen::ArrayXd success)
    : rewards_(std::move(rewards)), masses_(std::move(masses)), success_(std::move(success)) {
  const Eigen::Index n = rewards_.size();
  if (n == 0 || masses_.size() != n || success_.size() != n) {
    throw std::invalid_argument("DiscreteScoreModel: atom columns must be nonempty and equal-sized");
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(rewards_[i] > rewards_[i - 1])) {
      throw std::invalid_argument("DiscreteScoreModel: rewards must be strictly ascending");
    }
  }
  if (!(masses_ > 0.0).all()) {
    throw std::invalid_argument("DiscreteScoreModel: masses must be strictly positive");
  }
  if (std::abs(masses_.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscreteScoreModel: masses must sum to 1 within 1e-12");
  }
  if (!((success_ >= 0.0) && (success_ <= 1.0)).all()) {
    throw std::invalid_argument("DiscreteScoreModel: success probabilities must lie in [0,1]");
  }

  positive_mass_ = (masses_ * success_).sum();
  monotone_ = true;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (success_[i] < success_[i - 1]) monotone_ = false;
  }
  binary_ = ((success_ == 0.0) || (success_ == 1.0)).all();

  cdf_.resize(n);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += masses_[i];
    cdf_[i] = acc;
  }
  cdf_[n - 1] = 1.0;
}

Eigen::Index DiscreteScoreModel::atom_for_reward(double reward) const {
  const double* begin = rewards_.data();
  const double* end = begin + rewards_.size();
  const double* it = std::lower_bound(begin, end, reward);
  if (it == end || *it != reward) {
    throw std::invalid_argument("DiscreteScoreModel: reward is not an atom");
  }
  return it - begin;
}

Eigen::Index DiscreteScoreModel::sample_atom(Rng& rng) const {
  double u = rng.uniform01();
  const double* begin = cdf_.data();
  const double* end = begin + cdf_.size();
  const double* it = std::upper_bound(begin, end, u);
  if (it == end) --it;
  return it - begin;
}

double break_even_gap(const DiscreteScoreModel& model, const CostModel& costs, double tau) {
  double excess = (model.masses() * (model.success() - tau).max(0.0)).sum();
  return costs.c_ver() * excess - tau * costs.c_rew();
}

OracleSolution solve_tau_star(const DiscreteScoreModel& model, const CostModel& costs,
                              double tol) {
  if (!model.feasible()) {
    throw Infeasible("solve_tau_star: model has zero positive mass");
  }
  // g is strictly decreasing with g(0) > 0 > g(1), so bisection cannot fail;
  // 200 halvings land below double resolution.
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < kMaxBisectionIterations; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (break_even_gap(model, costs, mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double tau = 0.5 * (lo + hi);
  if (tau <= 0.0) {
    // Positive mass so small that tau underflows; treat as infeasible in practice.
    throw Infeasible("solve_tau_star: break-even threshold underflows");
  }
  if (std::abs(break_even_gap(model, costs, tau)) > tol * costs.c_rew()) {
    throw std::runtime_error("solve_tau_star: bisection failed to meet tolerance");
  }

  OracleSolution solution;
  solution.tau_star = tau;
  solution.j_star = costs.c_ver() / tau;
  solution.verify_cutoff = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < model.atom_count(); ++i) {
    if (model.success()[i] >= tau) {
      solution.verify_cutoff = model.rewards()[i];
      break;
    }
  }
  return solution;
}

ThresholdAnalytics threshold_analytics(const DiscreteScoreModel& model, const CostModel& costs,
                                       double t) {
  ThresholdAnalytics out;
  out.t = t;
  const Eigen::Index n = model.atom_count();
  const double* begin = model.rewards().data();
  const double* end = begin + n;
  Eigen::Index first = std::lower_bound(begin, end, t) - begin;
  Eigen::Index count = n - first;
  if (count > 0) {
    out.q_t = model.masses().tail(count).sum();
    out.s_t = (model.masses().tail(count) * model.success().tail(count)).sum();
  }
  if (out.s_t > 0.0) {
    out.j_t = (costs.c_rew() + costs.c_ver() * out.q_t) / out.s_t;
  }
  return out;
}

ThresholdAnalytics best_threshold(const DiscreteScoreModel& model, const CostModel& costs) {
  if (!model.feasible()) {
    throw Infeasible("best_threshold: model has zero positive mass");
  }
  // Every reward threshold induces an atom suffix, so scanning the atom
  // rewards covers all distinct threshold policies.
  ThresholdAnalytics best;
  for (Eigen::Index i = 0; i < model.atom_count(); ++i) {
    ThresholdAnalytics cand = threshold_analytics(model, costs, model.rewards()[i]);
    if (cand.j_t < best.j_t) best = cand;
  }
  return best;
}

MonteCarloEstimate simulate_streaming_oracle(const DiscreteScoreModel& model,
                                             const CostModel& costs,
                                             const OracleSolution& solution,
                                             std::int64_t trials, std::uint64_t seed) {
  MonteCarloEstimate estimate;
  estimate.trials = trials;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    double cost = 0.0;
    while (true) {
      Eigen::Index atom = model.sample_atom(rng);
      cost += costs.c_rew();
      double h = model.success()[atom];
      if (h >= solution.tau_star) {
        cost += costs.c_ver();
        if (rng.bernoulli(h)) break;
      }
    }
    sum += cost;
    sum_sq += cost * cost;
  }
  double n = static_cast<double>(trials);
  estimate.mean = sum / n;
  if (trials > 1) {
    double var = (sum_sq - sum * sum / n) / (n - 1.0);
    estimate.std_error = std::sqrt(std::max(var, 0.0) / n);
  }
  return estimate;
}

void StreamingOraclePolicy::run(Trial& trial) {
  while (trial.active()) {
    auto candidate = trial.draw();
    if (!candidate) break;
    double h = model_->success()[model_->atom_for_reward(candidate->reward)];
    if (h >= solution_.tau_star) {
      auto label = trial.verify(*candidate);
      if (!label) break;
      if (*label == 1) return;
    }
  }
}

}  // namespace actsearch
