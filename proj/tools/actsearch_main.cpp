#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "actsearch/commands.hpp"
#include "actsearch/environments.hpp"
#include "actsearch/errors.hpp"

namespace {

using actsearch::RunConfig;

void report_error(const char* type, const std::string& message) {
  nlohmann::ordered_json record;
  record["error"] = type;
  record["message"] = message;
  std::cerr << record.dump() << "\n";
}

bool parse_costs(const std::string& text, RunConfig& config) {
  double c_rew = 0.0, c_ver = 0.0;
  if (std::sscanf(text.c_str(), "%lf,%lf", &c_rew, &c_ver) != 2 || c_rew <= 0.0 || c_ver <= 0.0) {
    return false;
  }
  config.c_rew = c_rew;
  config.c_ver = c_ver;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"actsearch: cost-sensitive active search policies, baselines, and experiments"};
  app.set_version_flag("--version", actsearch::kVersion);
  app.require_subcommand(1);

  std::string config_file;
  std::string costs_text;
  RunConfig config;

  app.add_option("--config", config_file, "JSON config file (lowest precedence)");
  auto* costs_opt = app.add_option("--costs", costs_text, "c_rew,c_ver (default 1,10)");
  auto* seed_opt = app.add_option("--seed", config.seed, "root seed");
  auto* perms_opt = app.add_option("--perms", config.perms, "permutations per problem");
  auto* trials_opt = app.add_option("--trials", config.trials, "Monte-Carlo trials");
  double cap_value = 0.0;
  auto* cap_opt = app.add_option("--cap", cap_value, "safety cap on total cost per trial");
  auto* data_opt = app.add_option("--data", config.data_path, "sample log path");
  auto* out_opt = app.add_option("--out", config.out_dir, "output directory");
  std::vector<std::string> policies;
  auto* policies_opt =
      app.add_option("--policies", policies, "policy list (adap, oracle, sample_aware, "
                                             "uniform_cadap, uniform:N:K, dap:K)")
          ->delimiter(',');
  std::vector<double> ratio_grid;
  auto* grid_opt =
      app.add_option("--ratio-grid", ratio_grid, "c_ver/c_rew sweep values")->delimiter(',');
  auto* workers_opt = app.add_option("--workers", config.workers, "worker threads");
  auto* atoms_opt = app.add_option("--atoms", config.atoms, "model atoms reward:mass:success,...");
  auto* ninst_opt = app.add_option("--instances", config.n_instances, "random instance count");
  auto* natoms_opt = app.add_option("--n-atoms", config.n_atoms, "atoms per random instance");
  auto* floor_opt =
      app.add_option("--floor", config.feasibility_floor, "feasibility floor of random instances");
  auto* m_opt = app.add_option("--m", config.star_m, "star instance size");
  auto* class_opt = app.add_option("--class-file", config.class_file, "0/1 concept matrix file");
  auto* smin_opt = app.add_option("--s-min", config.s_min, "first shell index");
  auto* smax_opt = app.add_option("--s-max", config.s_max, "last shell index");

  auto* cmd_oracle = app.add_subcommand("oracle", "break-even threshold and J_t table");
  auto* cmd_shells = app.add_subcommand("shells", "dyadic shell table");
  auto* cmd_simulate = app.add_subcommand("simulate", "policy trials on synthetic instances");
  auto* cmd_replay = app.add_subcommand("replay", "paired policy comparison on a sample log");
  auto* cmd_star = app.add_subcommand("star", "centered star number and star-instance runs");
  auto* cmd_diagnose = app.add_subcommand("diagnose", "reward-signal diagnostics of a log");
  auto* cmd_verify = app.add_subcommand("verify-bounds", "run the full invariant suite");
  auto* cmd_gen = app.add_subcommand("gen-dataset", "regenerate the bundled miniature dataset");
  for (CLI::App* sub : {cmd_oracle, cmd_shells, cmd_simulate, cmd_replay, cmd_star, cmd_diagnose,
                        cmd_verify, cmd_gen}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : actsearch::kExitUsage;
  }

  try {
    // Precedence: config file < environment < flags. The file only fills
    // fields the command line leaves untouched.
    if (!config_file.empty()) {
      RunConfig from_file = RunConfig::from_json_file(config_file);
      if (seed_opt->count()) from_file.seed = config.seed;
      if (perms_opt->count()) from_file.perms = config.perms;
      if (trials_opt->count()) from_file.trials = config.trials;
      if (cap_opt->count()) from_file.cap = cap_value;
      if (data_opt->count()) from_file.data_path = config.data_path;
      if (out_opt->count()) from_file.out_dir = config.out_dir;
      if (policies_opt->count()) from_file.policies = policies;
      if (grid_opt->count()) from_file.ratio_grid = ratio_grid;
      if (workers_opt->count()) from_file.workers = config.workers;
      if (atoms_opt->count()) from_file.atoms = config.atoms;
      if (ninst_opt->count()) from_file.n_instances = config.n_instances;
      if (natoms_opt->count()) from_file.n_atoms = config.n_atoms;
      if (floor_opt->count()) from_file.feasibility_floor = config.feasibility_floor;
      if (m_opt->count()) from_file.star_m = config.star_m;
      if (class_opt->count()) from_file.class_file = config.class_file;
      if (smin_opt->count()) from_file.s_min = config.s_min;
      if (smax_opt->count()) from_file.s_max = config.s_max;
      config = from_file;
    } else {
      if (cap_opt->count()) config.cap = cap_value;
      if (policies_opt->count()) config.policies = policies;
      if (grid_opt->count()) config.ratio_grid = ratio_grid;
    }
    if (costs_opt->count() && !parse_costs(costs_text, config)) {
      report_error("usage", "--costs expects 'c_rew,c_ver' with both positive");
      return actsearch::kExitUsage;
    }
    if (cmd_gen->parsed() && !seed_opt->count()) {
      config.seed = actsearch::kBundledDatasetSeed;
    }

    if (cmd_oracle->parsed()) return actsearch::cmd_oracle(config, std::cout);
    if (cmd_shells->parsed()) return actsearch::cmd_shells(config, std::cout);
    if (cmd_simulate->parsed()) return actsearch::cmd_simulate(config, std::cout);
    if (cmd_replay->parsed()) return actsearch::cmd_replay(config, std::cout);
    if (cmd_star->parsed()) return actsearch::cmd_star(config, std::cout);
    if (cmd_diagnose->parsed()) return actsearch::cmd_diagnose(config, std::cout);
    if (cmd_verify->parsed()) return actsearch::cmd_verify_bounds(config, std::cout);
    if (cmd_gen->parsed()) return actsearch::cmd_gen_dataset(config, std::cout);
    return actsearch::kExitUsage;
  } catch (const actsearch::ParseError& e) {
    report_error("parse", e.what());
    return actsearch::kExitDataError;
  } catch (const actsearch::EmptyProblem& e) {
    report_error("empty-problem", e.what());
    return actsearch::kExitDataError;
  } catch (const actsearch::Infeasible& e) {
    report_error("infeasible", e.what());
    return actsearch::kExitDataError;
  } catch (const std::invalid_argument& e) {
    report_error("usage", e.what());
    return actsearch::kExitUsage;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return actsearch::kExitDataError;
  }
}
