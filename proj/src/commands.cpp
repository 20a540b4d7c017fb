#include "actsearch/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "actsearch/adap.hpp"
#include "actsearch/analysis.hpp"
#include "actsearch/baselines.hpp"
#include "actsearch/bounds.hpp"
#include "actsearch/environments.hpp"
#include "actsearch/oracle.hpp"
#include "actsearch/parallel.hpp"
#include "actsearch/starsearch.hpp"

namespace actsearch {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// One line of the per-trial record file.
struct TrialRow {
  std::string policy;
  std::string problem;
  std::int64_t perm = 0;
  std::int64_t n_rew = 0;
  std::int64_t n_ver = 0;
  double cost = 0.0;
  int success = 0;
  std::optional<std::int64_t> stop_index;
};

std::string format_trial_rows(const std::vector<TrialRow>& rows) {
  std::ostringstream out;
  out << "policy,problem,perm,n_rew,n_ver,cost,success,stop_index\n";
  for (const TrialRow& row : rows) {
    out << row.policy << "," << row.problem << "," << row.perm << "," << row.n_rew << ","
        << row.n_ver << "," << fmt(row.cost) << "," << row.success << ",";
    if (row.stop_index) out << *row.stop_index;
    out << "\n";
  }
  return out.str();
}

std::string format_report(const std::vector<PolicyReport>& reports) {
  std::ostringstream out;
  out << "policy,mean_n_rew,mean_n_ver,mean_cost,cost_ratio,success_rate\n";
  for (const PolicyReport& report : reports) {
    out << report.policy_name << "," << fmt(report.mean_n_rew) << "," << fmt(report.mean_n_ver)
        << "," << fmt(report.mean_cost) << "," << fmt(report.ratio_to_reference) << ","
        << fmt(report.success_rate) << "\n";
  }
  return out.str();
}

TrialRow row_from_record(const TrialRecord& record, std::string problem, std::int64_t perm) {
  TrialRow row;
  row.policy = record.policy_name;
  row.problem = std::move(problem);
  row.perm = perm;
  row.n_rew = record.ledger.n_rew();
  row.n_ver = record.ledger.n_ver();
  row.cost = record.ledger.total();
  row.success = record.succeeded ? 1 : 0;
  row.stop_index = record.stop_index;
  return row;
}

DiscreteScoreModel parse_atoms(const std::string& spec) {
  std::vector<double> rewards, masses, success;
  std::istringstream in(spec);
  std::string atom;
  while (std::getline(in, atom, ',')) {
    double r = 0.0, m = 0.0, h = 0.0;
    if (std::sscanf(atom.c_str(), "%lf:%lf:%lf", &r, &m, &h) != 3) {
      throw std::invalid_argument("bad atom '" + atom + "'; expected reward:mass:success");
    }
    rewards.push_back(r);
    masses.push_back(m);
    success.push_back(h);
  }
  if (rewards.empty()) throw std::invalid_argument("empty atom list");
  auto n = static_cast<Eigen::Index>(rewards.size());
  return DiscreteScoreModel(Eigen::Map<Eigen::ArrayXd>(rewards.data(), n),
                            Eigen::Map<Eigen::ArrayXd>(masses.data(), n),
                            Eigen::Map<Eigen::ArrayXd>(success.data(), n));
}

std::string resolve_out_dir(const RunConfig& config, const std::string& command) {
  if (!config.out_dir.empty()) return config.out_dir;
  const char* root = std::getenv(kOutputRootEnvVar);
  std::string base = (root != nullptr && *root != '\0') ? root : "runs";
  return base + "/" + command + "-seed" + std::to_string(config.seed);
}

void write_run_outputs(const RunConfig& config, const std::string& command,
                       const std::string& dir, const std::vector<TrialRow>& rows,
                       const std::vector<PolicyReport>& reports,
                       const ordered_json& extra_manifest) {
  std::filesystem::create_directories(dir);
  atomic_write_file(dir + "/config.json", config.to_json());
  atomic_write_file(dir + "/trials.csv", format_trial_rows(rows));
  atomic_write_file(dir + "/report.csv", format_report(reports));
  ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["seed"] = config.seed;
  manifest["c_rew"] = config.c_rew;
  manifest["c_ver"] = config.c_ver;
  manifest["safety_cap"] = config.resolved_cap();
  manifest["workers"] = config.workers;
  for (const auto& [key, value] : extra_manifest.items()) manifest[key] = value;
  atomic_write_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

TrialRecord blank_record(const CostModel& costs, std::int64_t n_rew = 0, std::int64_t n_ver = 0) {
  return TrialRecord{CostLedger(costs, n_rew, n_ver),
                     false,
                     std::nullopt,
                     std::nullopt,
                     0,
                     "",
                     ""};
}

FixedPair parse_uniform_pair(const std::string& policy) {
  std::int64_t n = 0, k = 0;
  if (std::sscanf(policy.c_str(), "uniform:%ld:%ld", &n, &k) != 2 || n < 1 || k < 1 || k > n) {
    throw std::invalid_argument("bad policy '" + policy + "'; expected uniform:N:K with K <= N");
  }
  return FixedPair{n, k};
}

int parse_dap_k(const std::string& policy) {
  int k = 0;
  if (std::sscanf(policy.c_str(), "dap:%d", &k) != 1 || k < 1) {
    throw std::invalid_argument("bad policy '" + policy + "'; expected dap:K");
  }
  return k;
}

}  // namespace

double RunConfig::resolved_cap() const {
  return cap.value_or(kDefaultCapMultiple * std::min(c_rew, c_ver));
}

std::string RunConfig::to_json() const {
  ordered_json j;
  j["c_rew"] = c_rew;
  j["c_ver"] = c_ver;
  j["seed"] = seed;
  j["perms"] = perms;
  j["trials"] = trials;
  if (cap) {
    j["cap"] = *cap;
  } else {
    j["cap"] = nullptr;
  }
  j["data"] = data_path;
  j["out"] = out_dir;
  j["policies"] = policies;
  j["ratio_grid"] = ratio_grid;
  j["workers"] = workers;
  j["atoms"] = atoms;
  j["n_instances"] = n_instances;
  j["n_atoms"] = n_atoms;
  j["feasibility_floor"] = feasibility_floor;
  j["star_m"] = star_m;
  j["class_file"] = class_file;
  j["s_min"] = s_min;
  j["s_max"] = s_max;
  return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  RunConfig config;
  config.c_rew = j.value("c_rew", config.c_rew);
  config.c_ver = j.value("c_ver", config.c_ver);
  config.seed = j.value("seed", config.seed);
  config.perms = j.value("perms", config.perms);
  config.trials = j.value("trials", config.trials);
  if (j.contains("cap") && !j["cap"].is_null()) config.cap = j["cap"].get<double>();
  config.data_path = j.value("data", config.data_path);
  config.out_dir = j.value("out", config.out_dir);
  if (j.contains("policies")) config.policies = j["policies"].get<std::vector<std::string>>();
  if (j.contains("ratio_grid")) config.ratio_grid = j["ratio_grid"].get<std::vector<double>>();
  config.workers = j.value("workers", config.workers);
  config.atoms = j.value("atoms", config.atoms);
  config.n_instances = j.value("n_instances", config.n_instances);
  config.n_atoms = j.value("n_atoms", config.n_atoms);
  config.feasibility_floor = j.value("feasibility_floor", config.feasibility_floor);
  config.star_m = j.value("star_m", config.star_m);
  config.class_file = j.value("class_file", config.class_file);
  config.s_min = j.value("s_min", config.s_min);
  config.s_max = j.value("s_max", config.s_max);
  return config;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return from_json_text(text.str());
}

void atomic_write_file(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

int cmd_oracle(const RunConfig& config, std::ostream& out) {
  if (config.atoms.empty()) {
    std::cerr << "oracle: --atoms r:mass:h,... is required\n";
    return kExitUsage;
  }
  DiscreteScoreModel model = parse_atoms(config.atoms);
  CostModel costs(config.c_rew, config.c_ver);
  OracleSolution solution = solve_tau_star(model, costs);
  out << "positive_mass " << fmt(model.positive_mass()) << "\n";
  out << "tau_star " << fmt(solution.tau_star) << "\n";
  out << "j_star " << fmt(solution.j_star) << "\n";
  out << "verify_cutoff " << fmt(solution.verify_cutoff) << "\n";
  out << "t,q_t,s_t,j_t\n";
  for (Eigen::Index i = 0; i < model.atom_count(); ++i) {
    ThresholdAnalytics at = threshold_analytics(model, costs, model.rewards()[i]);
    out << fmt(at.t) << "," << fmt(at.q_t) << "," << fmt(at.s_t) << "," << fmt(at.j_t) << "\n";
  }
  return kExitOk;
}

int cmd_shells(const RunConfig& config, std::ostream& out) {
  CostModel costs(config.c_rew, config.c_ver);
  out << "s,pairs,b_star,j_star,m_s,k_s,lambda_s,cap_20_2s_cmin\n";
  for (int s = config.s_min; s <= config.s_max; ++s) {
    double cap = 20.0 * std::exp2(s) * costs.c_min();
    auto spec = enumerate_shell(s, costs);
    if (!spec) {
      out << s << ",empty,,,,,," << fmt(cap) << "\n";
      continue;
    }
    std::ostringstream pairs;
    for (std::size_t i = 0; i < spec->pairs.size(); ++i) {
      if (i) pairs << " ";
      pairs << "(" << spec->pairs[i].a << " " << spec->pairs[i].b << ")";
    }
    out << s << "," << pairs.str() << "," << spec->b_star << "," << spec->j_star << ","
        << spec->m_budget << "," << spec->k_budget << "," << fmt(spec->lambda) << ","
        << fmt(cap) << "\n";
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  CostModel costs(config.c_rew, config.c_ver);
  const double cap = config.resolved_cap();

  std::vector<SyntheticInstance> instances;
  if (!config.atoms.empty()) {
    instances.emplace_back(parse_atoms(config.atoms), "atoms-0");
  } else {
    for (int i = 0; i < config.n_instances; ++i) {
      instances.push_back(make_random_monotone_instance(
          config.n_atoms, derive_seed(config.seed, 0x1457 + static_cast<std::uint64_t>(i)),
          config.feasibility_floor));
    }
  }

  std::vector<std::string> policies = config.policies;
  if (policies.empty()) policies = {"adap", "oracle"};
  RunConfig resolved = config;
  resolved.policies = policies;

  std::vector<TrialRow> rows;
  std::vector<std::pair<std::string, std::vector<TrialRecord>>> by_policy;
  std::ostringstream instance_csv;
  instance_csv << "instance,n_atoms,positive_mass,tau_star,j_star\n";
  for (const SyntheticInstance& instance : instances) {
    OracleSolution solution = solve_tau_star(instance.model(), costs);
    instance_csv << instance.name() << "," << instance.model().atom_count() << ","
                 << fmt(instance.model().positive_mass()) << "," << fmt(solution.tau_star)
                 << "," << fmt(solution.j_star) << "\n";
  }

  for (const std::string& policy_name : policies) {
    std::vector<TrialRecord> records;
    for (const SyntheticInstance& instance : instances) {
      OracleSolution solution = solve_tau_star(instance.model(), costs);
      std::uint64_t instance_seed = derive_seed(config.seed, fnv1a64(instance.name()));
      std::vector<TrialRecord> slot(static_cast<std::size_t>(config.trials),
                                    blank_record(costs));
      parallel_for(config.trials, config.workers, [&](std::int64_t t) {
        std::uint64_t trial_seed = derive_seed(instance_seed, static_cast<std::uint64_t>(t));
        if (policy_name == "adap") {
          slot[static_cast<std::size_t>(t)] = run_adap(instance, costs, trial_seed, cap);
        } else if (policy_name == "oracle") {
          StreamingOraclePolicy policy(instance.model(), solution);
          slot[static_cast<std::size_t>(t)] = run_trial(policy, instance, costs, trial_seed, cap);
        } else {
          UniformPolicy policy(parse_uniform_pair(policy_name));
          slot[static_cast<std::size_t>(t)] = run_trial(policy, instance, costs, trial_seed, cap);
        }
      });
      for (std::int64_t t = 0; t < config.trials; ++t) {
        rows.push_back(row_from_record(slot[static_cast<std::size_t>(t)], instance.name(), t));
        records.push_back(std::move(slot[static_cast<std::size_t>(t)]));
      }
    }
    by_policy.emplace_back(policy_name, std::move(records));
  }

  std::string reference = "adap";
  if (std::find(policies.begin(), policies.end(), reference) == policies.end()) {
    reference = policies.front();
  }
  std::vector<PolicyReport> reports = aggregate_report(by_policy, reference);

  std::string dir = resolve_out_dir(config, "simulate");
  resolved.out_dir = dir;
  ordered_json extra;
  extra["instances"] = instances.size();
  extra["trials_per_instance"] = config.trials;
  write_run_outputs(resolved, "simulate", dir, rows, reports, extra);
  atomic_write_file(dir + "/instances.csv", instance_csv.str());
  out << format_report(reports);
  out << "wrote " << dir << "\n";
  return kExitOk;
}

namespace {

struct ReplayContext {
  const RunConfig* config;
  CostModel costs;
  double cap;
  const SampleLog* log;
  const std::vector<ReplayInstance>* instances;
  const std::vector<MinRankProfile>* profiles;  // parallel to instances
  const std::vector<ProblemTrials>* problems;
  std::vector<std::uint64_t> trial_seeds;  // parallel to instances
};

std::vector<TrialRecord> replay_adap(const ReplayContext& ctx) {
  std::vector<TrialRecord> records(ctx.instances->size(), blank_record(ctx.costs));
  parallel_for(static_cast<std::int64_t>(ctx.instances->size()), ctx.config->workers,
               [&](std::int64_t i) {
                 records[static_cast<std::size_t>(i)] =
                     run_adap((*ctx.instances)[static_cast<std::size_t>(i)], ctx.costs,
                              ctx.trial_seeds[static_cast<std::size_t>(i)], ctx.cap);
               });
  return records;
}

std::vector<TrialRecord> replay_uniform(const ReplayContext& ctx, const FixedPair& pair) {
  std::vector<TrialRecord> records(ctx.instances->size(), blank_record(ctx.costs));
  parallel_for(static_cast<std::int64_t>(ctx.instances->size()), ctx.config->workers,
               [&](std::int64_t i) {
                 const ReplayInstance& instance = (*ctx.instances)[static_cast<std::size_t>(i)];
                 records[static_cast<std::size_t>(i)] =
                     run_uniform(pair, instance.samples(), ctx.costs, instance.name(),
                                 ctx.trial_seeds[static_cast<std::size_t>(i)]);
               });
  return records;
}

std::vector<TrialRecord> replay_sample_aware(const ReplayContext& ctx) {
  std::vector<TrialRecord> records;
  records.reserve(ctx.instances->size());
  for (std::size_t i = 0; i < ctx.instances->size(); ++i) {
    SampleAwareChoice choice = sample_aware_cost((*ctx.profiles)[i], ctx.costs);
    TrialRecord record = blank_record(ctx.costs, choice.pair.n_rew, choice.pair.n_ver);
    record.succeeded = true;
    record.stop_index = choice.pair.n_ver;
    record.seed = ctx.trial_seeds[i];
    record.policy_name = "sample_aware";
    record.instance_name = (*ctx.instances)[i].name();
    records.push_back(std::move(record));
  }
  return records;
}

// Committed-pair rows: nominal draw and verify counts regardless of the
// early stop the harness would take.
std::vector<TrialRecord> replay_committed(const ReplayContext& ctx, const std::string& name,
                                          const std::vector<FixedPair>& pair_by_instance) {
  std::vector<TrialRecord> records;
  records.reserve(ctx.instances->size());
  for (std::size_t i = 0; i < ctx.instances->size(); ++i) {
    const FixedPair& pair = pair_by_instance[i];
    const MinRankProfile& profile = (*ctx.profiles)[i];
    std::int64_t rank = pair.n_rew <= profile.size() ? profile.rank_at(pair.n_rew) : kNoCorrect;
    bool success = rank != kNoCorrect && rank <= pair.n_ver;
    TrialRecord record = blank_record(ctx.costs, pair.n_rew, pair.n_ver);
    record.succeeded = success;
    if (success) record.stop_index = rank;
    record.seed = ctx.trial_seeds[i];
    record.policy_name = name;
    record.instance_name = (*ctx.instances)[i].name();
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace

int cmd_replay(const RunConfig& config, std::ostream& out) {
  if (config.data_path.empty()) {
    std::cerr << "replay: --data PATH is required\n";
    return kExitUsage;
  }
  SampleLog raw = load_sample_log(config.data_path);
  std::vector<std::string> dropped;
  SampleLog log = filter_feasible(raw, &dropped);
  for (const std::string& id : dropped) {
    out << "note: dropped infeasible problem " << id << "\n";
  }
  if (log.problems.empty()) {
    std::cerr << "replay: no feasible problems in " << config.data_path << "\n";
    return kExitDataError;
  }

  std::vector<double> ratios = config.ratio_grid;
  bool grid_mode = !ratios.empty();
  if (!grid_mode) ratios = {config.c_ver / config.c_rew};

  std::string base_dir = resolve_out_dir(config, "replay");
  for (double ratio : ratios) {
    RunConfig run = config;
    run.c_ver = config.c_rew * ratio;
    run.ratio_grid.clear();  // the written config re-runs exactly one ratio

    CostModel costs(run.c_rew, run.c_ver);
    ReplayContext ctx{&run, costs, run.resolved_cap(), &log, nullptr, nullptr, nullptr, {}};

    std::vector<ReplayInstance> instances = make_permutation_trials(log, run.perms, run.seed);
    std::vector<MinRankProfile> profiles;
    profiles.reserve(instances.size());
    for (const ReplayInstance& instance : instances) {
      profiles.push_back(minrank_profile(instance.samples()));
    }
    std::vector<ProblemTrials> problems;
    for (const auto& problem : log.problems) {
      ProblemTrials entry;
      entry.problem_id = problem.id;
      entry.pass_rate = problem.pass_rate();
      problems.push_back(std::move(entry));
    }
    for (std::size_t i = 0; i < instances.size(); ++i) {
      std::size_t p = i / static_cast<std::size_t>(run.perms);
      problems[p].profiles.push_back(profiles[i]);
    }
    ctx.instances = &instances;
    ctx.profiles = &profiles;
    ctx.problems = &problems;
    ctx.trial_seeds.reserve(instances.size());
    for (const ReplayInstance& instance : instances) {
      std::uint64_t problem_seed = derive_seed(run.seed, fnv1a64(instance.problem_id()));
      ctx.trial_seeds.push_back(
          derive_seed(problem_seed, 0x9000 + static_cast<std::uint64_t>(instance.perm_index())));
    }

    std::vector<std::string> policies = run.policies;
    if (policies.empty()) {
      policies = {"sample_aware", "adap", "uniform_cadap", "dap:1", "dap:2", "dap:3"};
    }
    run.policies = policies;

    std::vector<std::pair<std::string, std::vector<TrialRecord>>> by_policy;
    std::optional<double> adap_mean_cost;
    ordered_json chosen_pairs;
    for (const std::string& policy : policies) {
      std::vector<TrialRecord> records;
      if (policy == "adap") {
        records = replay_adap(ctx);
        double total = 0.0;
        for (const TrialRecord& record : records) total += record.ledger.total();
        adap_mean_cost = total / static_cast<double>(records.size());
      } else if (policy == "sample_aware") {
        records = replay_sample_aware(ctx);
      } else if (policy == "uniform_cadap") {
        if (!adap_mean_cost) {
          std::cerr << "replay: uniform_cadap requires adap earlier in --policies\n";
          return kExitUsage;
        }
        UniformBudgetChoice choice = uniform_matched_to_budget(problems, *adap_mean_cost, costs);
        if (choice.degenerate) {
          out << "note: uniform_cadap budget below the cheapest pair; using (1,1)\n";
        }
        chosen_pairs["uniform_cadap"] = {choice.pair.n_rew, choice.pair.n_ver};
        records = replay_committed(
            ctx, policy, std::vector<FixedPair>(instances.size(), choice.pair));
      } else if (policy.rfind("dap:", 0) == 0) {
        int k = parse_dap_k(policy);
        if (k > static_cast<int>(problems.size())) {
          std::cerr << "replay: " << policy << " needs at least " << k << " problems\n";
          return kExitDataError;
        }
        DapResult dap = dap_partition(problems, k, costs);
        std::vector<FixedPair> pair_by_instance(instances.size());
        std::vector<FixedPair> pair_by_problem(problems.size());
        for (const DapClass& cls : dap.classes) {
          for (std::size_t pos = cls.first; pos <= cls.last; ++pos) {
            pair_by_problem[dap.order[pos]] = cls.pair;
          }
        }
        for (std::size_t i = 0; i < instances.size(); ++i) {
          pair_by_instance[i] = pair_by_problem[i / static_cast<std::size_t>(run.perms)];
        }
        ordered_json classes = ordered_json::array();
        for (const DapClass& cls : dap.classes) {
          classes.push_back({{"first", cls.first},
                             {"last", cls.last},
                             {"n_rew", cls.pair.n_rew},
                             {"n_ver", cls.pair.n_ver}});
        }
        chosen_pairs[policy] = classes;
        records = replay_committed(ctx, policy, pair_by_instance);
      } else {
        FixedPair pair = parse_uniform_pair(policy);
        if (pair.n_rew > log.samples_per_problem) {
          std::cerr << "replay: " << policy << " draws more than the log provides\n";
          return kExitDataError;
        }
        records = replay_uniform(ctx, pair);
      }
      by_policy.emplace_back(policy, std::move(records));
    }

    std::string reference = "adap";
    if (std::find(policies.begin(), policies.end(), reference) == policies.end()) {
      reference = policies.front();
    }
    std::vector<PolicyReport> reports = aggregate_report(by_policy, reference);

    std::vector<TrialRow> rows;
    for (const auto& [policy, records] : by_policy) {
      for (std::size_t i = 0; i < records.size(); ++i) {
        rows.push_back(row_from_record(records[i], instances[i].problem_id(),
                                       instances[i].perm_index()));
      }
    }

    std::string dir = grid_mode ? base_dir + "/ratio_" + fmt(ratio) : base_dir;
    run.out_dir = dir;
    ordered_json extra;
    extra["data"] = run.data_path;
    extra["dataset"] = log.name;
    extra["problems"] = log.problems.size();
    extra["dropped_problems"] = dropped;
    extra["perms"] = run.perms;
    extra["cost_ratio"] = ratio;
    extra["chosen_pairs"] = chosen_pairs;
    write_run_outputs(run, "replay", dir, rows, reports, extra);
    out << "# ratio " << fmt(ratio) << "\n" << format_report(reports);
    out << "wrote " << dir << "\n";
  }
  return kExitOk;
}

int cmd_star(const RunConfig& config, std::ostream& out) {
  CostModel costs(config.c_rew, config.c_ver);
  std::shared_ptr<const FiniteConceptClass> concepts;
  if (!config.class_file.empty()) {
    concepts = std::make_shared<const FiniteConceptClass>(
        FiniteConceptClass::load(config.class_file));
  } else {
    concepts = std::make_shared<const FiniteConceptClass>(
        FiniteConceptClass::singletons(config.star_m));
  }

  int s0 = centered_star_number(*concepts);
  out << "domain_size " << concepts->domain_size() << "\n";
  out << "concepts " << concepts->concept_count() << "\n";
  out << "centered_star_number " << s0 << "\n";
  if (s0 < 1) {
    std::cerr << "star: class has no nonzero concept; nothing to search for\n";
    return kExitDataError;
  }

  // Feasible targets: concepts with at least one positive point.
  std::vector<int> targets;
  for (int c = 0; c < concepts->concept_count(); ++c) {
    if (concepts->row(c) != 0) targets.push_back(c);
  }

  const double cap = 1e9 * costs.c_min();
  std::vector<double> trial_costs(static_cast<std::size_t>(config.trials));
  std::vector<double> trial_ratios(static_cast<std::size_t>(config.trials));
  std::vector<char> hs_exact(static_cast<std::size_t>(config.trials), 1);
  std::vector<int> hs_max(static_cast<std::size_t>(config.trials), 0);
  parallel_for(config.trials, config.workers, [&](std::int64_t t) {
    std::uint64_t trial_seed = derive_seed(config.seed, 0xce11 + static_cast<std::uint64_t>(t));
    Rng pick(derive_seed(trial_seed, 0x7a26e7));
    int target = targets[static_cast<std::size_t>(pick.uniform_int(
        static_cast<std::int64_t>(targets.size())))];
    StarInstance instance(concepts, target, "star-run");
    AcsStats stats;
    TrialRecord record = run_acs(instance, costs, trial_seed, cap, &stats);
    double p = instance.positive_point_mass();
    double j_star = costs.c_rew() / p + costs.c_ver();
    trial_costs[static_cast<std::size_t>(t)] = record.ledger.total();
    trial_ratios[static_cast<std::size_t>(t)] = record.ledger.total() / j_star;
    hs_exact[static_cast<std::size_t>(t)] = stats.all_minimal ? 1 : 0;
    for (int size : stats.hitting_set_sizes) {
      hs_max[static_cast<std::size_t>(t)] = std::max(hs_max[static_cast<std::size_t>(t)], size);
    }
  });

  double mean_cost = 0.0, mean_ratio = 0.0;
  int max_hs = 0;
  bool all_exact = true;
  for (std::int64_t t = 0; t < config.trials; ++t) {
    mean_cost += trial_costs[static_cast<std::size_t>(t)];
    mean_ratio += trial_ratios[static_cast<std::size_t>(t)];
    max_hs = std::max(max_hs, hs_max[static_cast<std::size_t>(t)]);
    all_exact = all_exact && hs_exact[static_cast<std::size_t>(t)] == 1;
  }
  mean_cost /= static_cast<double>(config.trials);
  mean_ratio /= static_cast<double>(config.trials);
  double bound = 6.0 * std::min(static_cast<double>(s0), costs.ratio());
  out << "acs_trials " << config.trials << "\n";
  out << "acs_mean_cost " << fmt(mean_cost) << "\n";
  out << "acs_mean_cost_ratio " << fmt(mean_ratio) << " (bound " << fmt(bound) << ")\n";
  out << "acs_hitting_sets_exact " << (all_exact ? 1 : 0) << "\n";
  out << "acs_max_hitting_set " << max_hs << " (star number " << s0 << ")\n";

  RandomGuesserPolicy guesser;
  int m_exp = config.class_file.empty() ? config.star_m : s0;
  StarLowerBoundResult lower =
      star_lower_bound_experiment(m_exp, costs, guesser, config.trials, derive_seed(config.seed, 0x9e55));
  out << "guesser_m " << m_exp << "\n";
  out << "guesser_mean_verifier_calls " << fmt(lower.mean_verifier_calls) << " (expected "
      << fmt((static_cast<double>(m_exp) + 1.0) / 2.0) << ")\n";
  out << "guesser_mean_cost_ratio " << fmt(lower.mean_cost_ratio) << " (lower bound "
      << fmt(0.25 * std::min(static_cast<double>(m_exp), costs.ratio())) << ")\n";

  std::string dir = resolve_out_dir(config, "star");
  std::filesystem::create_directories(dir);
  atomic_write_file(dir + "/config.json", config.to_json());
  std::ostringstream star_csv;
  star_csv << "metric,value\n";
  star_csv << "centered_star_number," << s0 << "\n";
  star_csv << "acs_mean_cost," << fmt(mean_cost) << "\n";
  star_csv << "acs_mean_cost_ratio," << fmt(mean_ratio) << "\n";
  star_csv << "acs_ratio_bound," << fmt(bound) << "\n";
  star_csv << "acs_hitting_sets_exact," << (all_exact ? 1 : 0) << "\n";
  star_csv << "guesser_mean_verifier_calls," << fmt(lower.mean_verifier_calls) << "\n";
  star_csv << "guesser_mean_cost_ratio," << fmt(lower.mean_cost_ratio) << "\n";
  atomic_write_file(dir + "/star_report.csv", star_csv.str());
  ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["command"] = "star";
  manifest["seed"] = config.seed;
  manifest["star_m"] = config.star_m;
  manifest["class_file"] = config.class_file;
  atomic_write_file(dir + "/manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << dir << "\n";
  return kExitOk;
}

int cmd_diagnose(const RunConfig& config, std::ostream& out) {
  if (config.data_path.empty()) {
    std::cerr << "diagnose: --data PATH is required\n";
    return kExitUsage;
  }
  SampleLog log = load_sample_log(config.data_path);
  std::vector<DiagnosticsInput> problems;
  problems.reserve(log.problems.size());
  for (const auto& problem : log.problems) {
    problems.push_back(DiagnosticsInput{problem.id, problem.samples});
  }
  RewardDiagnostics diag = compute_diagnostics(problems);

  std::ostringstream auc_csv;
  auc_csv << "problem_id,auc\n";
  double auc_sum = 0.0;
  int above_chance = 0;
  for (const auto& [id, auc] : diag.per_problem_auc) {
    auc_csv << id << "," << fmt(auc) << "\n";
    auc_sum += auc;
    above_chance += auc > 0.5 ? 1 : 0;
  }
  std::ostringstream rank_csv;
  rank_csv << "rank,mean_correct\n";
  for (Eigen::Index r = 0; r < diag.rank_curve.size(); ++r) {
    rank_csv << (r + 1) << "," << fmt(diag.rank_curve[r]) << "\n";
  }
  std::ostringstream topk_csv;
  topk_csv << "k,topk_coverage,random_k_baseline\n";
  for (Eigen::Index k = 0; k < diag.topk_curve.size(); ++k) {
    topk_csv << (k + 1) << "," << fmt(diag.topk_curve[k]) << "," << fmt(diag.random_k_curve[k])
             << "\n";
  }

  std::string dir = resolve_out_dir(config, "diagnose");
  std::filesystem::create_directories(dir);
  atomic_write_file(dir + "/config.json", config.to_json());
  atomic_write_file(dir + "/per_problem_auc.csv", auc_csv.str());
  atomic_write_file(dir + "/rank_curve.csv", rank_csv.str());
  atomic_write_file(dir + "/topk_curve.csv", topk_csv.str());
  ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["command"] = "diagnose";
  manifest["data"] = config.data_path;
  manifest["problems"] = log.problems.size();
  manifest["auc_defined"] = diag.per_problem_auc.size();
  atomic_write_file(dir + "/manifest.json", manifest.dump(2) + "\n");

  if (!diag.per_problem_auc.empty()) {
    auto n = static_cast<double>(diag.per_problem_auc.size());
    out << "mean_auc " << fmt(auc_sum / n) << "\n";
    out << "fraction_above_chance " << fmt(above_chance / n) << "\n";
  }
  out << "wrote " << dir << "\n";
  return kExitOk;
}

int cmd_verify_bounds(const RunConfig& config, std::ostream& out) {
  BoundSuiteConfig suite;
  suite.seed = config.seed;
  suite.workers = config.workers;
  std::vector<CheckResult> results = run_bound_suite(suite);
  bool all_pass = true;
  for (const CheckResult& result : results) {
    out << (result.pass ? "PASS " : "FAIL ") << result.name << " - " << result.detail << "\n";
    all_pass = all_pass && result.pass;
  }
  return all_pass ? kExitOk : kExitInvariantViolation;
}

int cmd_gen_dataset(const RunConfig& config, std::ostream& out) {
  std::string path = config.data_path.empty() ? "data/mini_samplelog.txt" : config.data_path;
  SampleLog log = make_bundled_dataset(config.seed);
  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  atomic_write_file(path, format_sample_log(log));
  out << "wrote " << path << " (" << log.problems.size() << " problems x "
      << log.samples_per_problem << " samples, seed " << config.seed << ")\n";
  return kExitOk;
}

}  // namespace actsearch
