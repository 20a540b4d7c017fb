#include "actsearch/environments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace actsearch {

SyntheticInstance::SyntheticInstance(DiscreteScoreModel model, std::string name)
    : model_(std::make_shared<const DiscreteScoreModel>(std::move(model))),
      name_(std::move(name)) {}

std::unique_ptr<Instance> SyntheticInstance::clone() const {
  return std::make_unique<SyntheticInstance>(*this);
}

double SyntheticInstance::sample_reward(Rng& env_rng) {
  return model_->rewards()[model_->sample_atom(env_rng)];
}

int SyntheticInstance::verifier_label(const ScoredCandidate& candidate, Rng& env_rng) {
  double h = model_->success()[model_->atom_for_reward(candidate.reward)];
  return env_rng.bernoulli(h) ? 1 : 0;
}

SyntheticInstance make_random_monotone_instance(int n_atoms, std::uint64_t seed,
                                                double feasibility_floor) {
  if (n_atoms < 1) throw std::invalid_argument("make_random_monotone_instance: need n_atoms >= 1");
  if (feasibility_floor < 0.0 || feasibility_floor > 1.0) {
    throw std::invalid_argument("make_random_monotone_instance: floor must lie in [0,1]");
  }
  Rng rng(derive_seed(seed, 0x5f1));

  // Strictly ascending rewards: one random point per length-1/n cell.
  Eigen::ArrayXd rewards(n_atoms);
  for (int i = 0; i < n_atoms; ++i) {
    rewards[i] = (static_cast<double>(i) + 0.05 + 0.9 * rng.uniform01()) /
                 static_cast<double>(n_atoms);
  }

  Eigen::ArrayXd masses(n_atoms);
  for (int i = 0; i < n_atoms; ++i) masses[i] = 0.1 + 0.9 * rng.uniform01();
  masses /= masses.sum();

  std::vector<double> h(static_cast<std::size_t>(n_atoms));
  for (double& v : h) v = rng.uniform01();
  std::sort(h.begin(), h.end());
  Eigen::ArrayXd success = Eigen::Map<Eigen::ArrayXd>(h.data(), n_atoms);

  double p = (masses * success).sum();
  if (p < feasibility_floor) {
    // Affine lift keeps h nondecreasing, lands the positive mass at or
    // above the floor.
    success = feasibility_floor + (1.0 - feasibility_floor) * success;
  }

  std::ostringstream name;
  name << "synth-" << n_atoms << "a-" << seed;
  return SyntheticInstance(DiscreteScoreModel(rewards, masses, success), name.str());
}

StarInstance::StarInstance(std::shared_ptr<const FiniteConceptClass> concepts,
                           int target_concept, std::string name)
    : concepts_(std::move(concepts)), target_(target_concept), name_(std::move(name)) {
  if (target_ < 0 || target_ >= concepts_->concept_count()) {
    throw std::invalid_argument("StarInstance: target concept out of range");
  }
  if (concepts_->row(target_) == 0) {
    throw Infeasible("StarInstance: the all-zero target has zero positive mass");
  }
}

std::unique_ptr<Instance> StarInstance::clone() const {
  auto copy = std::make_unique<StarInstance>(*this);
  copy->drawn_points_.clear();
  return copy;
}

double StarInstance::sample_reward(Rng& env_rng) {
  int point = static_cast<int>(env_rng.uniform_int(concepts_->domain_size()));
  drawn_points_.push_back(point);
  // Point identity, not the reward, carries the structure here.
  return 0.0;
}

int StarInstance::verifier_label(const ScoredCandidate& candidate, Rng& /*env_rng*/) {
  return concepts_->value(target_, point_of(candidate.draw_index)) ? 1 : 0;
}

int StarInstance::point_of(std::int64_t draw_index) const {
  if (draw_index < 0 || draw_index >= static_cast<std::int64_t>(drawn_points_.size())) {
    throw std::out_of_range("StarInstance::point_of: unknown draw index");
  }
  return drawn_points_[static_cast<std::size_t>(draw_index)];
}

double StarInstance::positive_point_mass() const {
  return static_cast<double>(std::popcount(concepts_->row(target_))) /
         static_cast<double>(concepts_->domain_size());
}

StarInstance make_star_instance(int m, std::uint64_t seed) {
  auto concepts = std::make_shared<const FiniteConceptClass>(FiniteConceptClass::singletons(m));
  Rng rng(derive_seed(seed, 0x57a));
  int target = 1 + static_cast<int>(rng.uniform_int(m));  // concept 0 is all-zero
  std::ostringstream name;
  name << "star-m" << m << "-t" << target;
  return StarInstance(std::move(concepts), target, name.str());
}

int SampleLog::Problem::correct_count() const {
  int c = 0;
  for (const Sample& s : samples) c += s.correct;
  return c;
}

double SampleLog::Problem::pass_rate() const {
  if (samples.empty()) return 0.0;
  return static_cast<double>(correct_count()) / static_cast<double>(samples.size());
}

SampleLog read_sample_log(std::istream& in) {
  SampleLog log;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError("empty sample log", 1);
  ++line_no;
  {
    std::istringstream header(line);
    std::string magic;
    header >> magic >> log.name >> log.samples_per_problem;
    if (magic != "samplelog" || log.name.empty() || header.fail()) {
      throw ParseError("expected header 'samplelog <name> <samples-per-problem>'", line_no);
    }
  }

  std::size_t current = static_cast<std::size_t>(-1);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string problem_id;
    std::int64_t sample_index = 0;
    double reward = 0.0;
    int correct = 0;
    row >> problem_id >> sample_index >> reward >> correct;
    if (row.fail() || (correct != 0 && correct != 1)) {
      throw ParseError("expected '<problem_id> <sample_index> <reward> <0|1>'", line_no);
    }
    if (current == static_cast<std::size_t>(-1) || log.problems[current].id != problem_id) {
      for (const auto& p : log.problems) {
        if (p.id == problem_id) {
          throw ParseError("records of problem " + problem_id + " are not contiguous", line_no);
        }
      }
      log.problems.push_back(SampleLog::Problem{problem_id, {}});
      current = log.problems.size() - 1;
    }
    if (sample_index != static_cast<std::int64_t>(log.problems[current].samples.size())) {
      throw ParseError("sample_index out of order for problem " + problem_id, line_no);
    }
    log.problems[current].samples.push_back(Sample{reward, correct});
  }

  if (log.problems.empty()) throw ParseError("sample log has no records", line_no);
  for (const auto& p : log.problems) {
    if (p.samples.empty()) throw EmptyProblem("problem " + p.id + " has no samples");
  }
  return log;
}

SampleLog load_sample_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sample log " + path, 0);
  return read_sample_log(in);
}

std::string format_sample_log(const SampleLog& log) {
  std::ostringstream out;
  out << "samplelog " << log.name << " " << log.samples_per_problem << "\n";
  char buf[64];
  for (const auto& problem : log.problems) {
    for (std::size_t i = 0; i < problem.samples.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", problem.samples[i].reward);
      out << problem.id << " " << i << " " << buf << " " << problem.samples[i].correct << "\n";
    }
  }
  return out.str();
}

void save_sample_log(const SampleLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sample log " + path);
  out << format_sample_log(log);
}

SampleLog filter_feasible(const SampleLog& log, std::vector<std::string>* dropped_ids) {
  SampleLog filtered;
  filtered.name = log.name;
  filtered.samples_per_problem = log.samples_per_problem;
  for (const auto& problem : log.problems) {
    if (problem.correct_count() > 0) {
      filtered.problems.push_back(problem);
    } else if (dropped_ids) {
      dropped_ids->push_back(problem.id);
    }
  }
  return filtered;
}

ReplayInstance::ReplayInstance(std::string problem_id, int perm_index,
                               std::vector<Sample> permuted)
    : problem_id_(std::move(problem_id)), perm_index_(perm_index), samples_(std::move(permuted)) {
  std::ostringstream name;
  name << problem_id_ << "#" << perm_index_;
  name_ = name.str();
}

std::unique_ptr<Instance> ReplayInstance::clone() const {
  auto copy = std::make_unique<ReplayInstance>(*this);
  copy->cursor_ = 0;
  return copy;
}

std::optional<std::int64_t> ReplayInstance::remaining_draws() const {
  return static_cast<std::int64_t>(samples_.size()) - cursor_;
}

double ReplayInstance::sample_reward(Rng& /*env_rng*/) {
  if (cursor_ >= static_cast<std::int64_t>(samples_.size())) {
    throw ExhaustedSamples("replay permutation of " + name_ + " is consumed");
  }
  return samples_[static_cast<std::size_t>(cursor_++)].reward;
}

int ReplayInstance::verifier_label(const ScoredCandidate& candidate, Rng& /*env_rng*/) {
  return samples_[static_cast<std::size_t>(candidate.draw_index)].correct;
}

std::vector<ReplayInstance> make_permutation_trials(const SampleLog& log, int n_perms,
                                                    std::uint64_t seed) {
  if (n_perms < 1) throw std::invalid_argument("make_permutation_trials: need n_perms >= 1");
  std::vector<ReplayInstance> trials;
  trials.reserve(log.problems.size() * static_cast<std::size_t>(n_perms));
  for (const auto& problem : log.problems) {
    std::uint64_t problem_seed = derive_seed(seed, fnv1a64(problem.id));
    for (int perm = 0; perm < n_perms; ++perm) {
      std::vector<int> order(problem.samples.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      Rng rng(derive_seed(problem_seed, static_cast<std::uint64_t>(perm)));
      fisher_yates(order, rng);
      std::vector<Sample> permuted(order.size());
      for (std::size_t i = 0; i < order.size(); ++i) {
        permuted[i] = problem.samples[static_cast<std::size_t>(order[i])];
      }
      trials.emplace_back(problem.id, perm, std::move(permuted));
    }
  }
  return trials;
}

SampleLog make_bundled_dataset(std::uint64_t seed) {
  constexpr int kProblems = 30;
  constexpr int kSamples = 64;
  SampleLog log;
  log.name = "mini-30x64";
  log.samples_per_problem = kSamples;

  for (int p = 0; p < kProblems; ++p) {
    Rng rng(derive_seed(seed, 0xda7a'0000 + static_cast<std::uint64_t>(p)));

    // Difficulty and reward-signal quality both spread across problems,
    // echoing the skew of real reward models: most discriminative, a few
    // near chance.
    double pass_rate = 0.05 + 0.45 * rng.uniform01();
    double u = rng.uniform01();
    double auc_target = 0.55 + 0.44 * u * u;
    // reward = correct * delta + Uniform[0,1) gives
    // AUC = 1 - (1 - delta)^2 / 2 for delta <= 1.
    double delta = 1.0 - std::sqrt(2.0 * (1.0 - auc_target));

    SampleLog::Problem problem;
    std::ostringstream id;
    id << "p" << (p < 10 ? "0" : "") << p;
    problem.id = id.str();
    problem.samples.resize(kSamples);
    while (true) {
      bool any_correct = false;
      for (int i = 0; i < kSamples; ++i) {
        int correct = rng.bernoulli(pass_rate) ? 1 : 0;
        any_correct = any_correct || correct == 1;
        problem.samples[static_cast<std::size_t>(i)] =
            Sample{rng.uniform01() + (correct ? delta : 0.0), correct};
      }
      if (any_correct) break;  // keep every bundled problem feasible
    }
    log.problems.push_back(std::move(problem));
  }
  return log;
}

StarLowerBoundResult star_lower_bound_experiment(int m, const CostModel& costs, Policy& policy,
                                                 std::int64_t trials, std::uint64_t seed) {
  StarLowerBoundResult result;
  result.trials = trials;
  const double oracle_bound = costs.c_rew() * static_cast<double>(m) + costs.c_ver();
  const double cap = 1e9 * costs.c_min();

  double sum_t = 0.0, sum_t_sq = 0.0, sum_cost = 0.0, sum_cost_sq = 0.0, sum_ratio = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
    StarInstance instance = make_star_instance(m, derive_seed(trial_seed, 0x7a26e7));
    TrialRecord record = run_trial(policy, instance, costs, trial_seed, cap);
    double calls = static_cast<double>(record.ledger.n_ver());
    double cost = record.ledger.total();
    sum_t += calls;
    sum_t_sq += calls * calls;
    sum_cost += cost;
    sum_cost_sq += cost * cost;
    sum_ratio += cost / oracle_bound;
  }
  double n = static_cast<double>(trials);
  result.mean_verifier_calls = sum_t / n;
  result.mean_cost = sum_cost / n;
  result.mean_cost_ratio = sum_ratio / n;
  if (trials > 1) {
    double var_t = (sum_t_sq - sum_t * sum_t / n) / (n - 1.0);
    double var_c = (sum_cost_sq - sum_cost * sum_cost / n) / (n - 1.0);
    result.se_verifier_calls = std::sqrt(std::max(var_t, 0.0) / n);
    result.se_cost = std::sqrt(std::max(var_c, 0.0) / n);
  }
  return result;
}

}  // namespace actsearch
