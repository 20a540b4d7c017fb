#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace actsearch {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputRootEnvVar = "ACTSEARCH_OUT_ROOT";

// Exit codes shared by all commands.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitDataError = 2,
  kExitInvariantViolation = 3,
};

// Resolved run configuration. Precedence: config file < environment
// overrides < command-line flags. The resolved form is written verbatim
// into every output directory.
struct RunConfig {
  double c_rew = 1.0;
  double c_ver = 10.0;
  std::uint64_t seed = 1;
  int perms = 10;
  std::int64_t trials = 10'000;
  std::optional<double> cap;  // defaults to 1e7 * c_min when unset
  std::string data_path;
  std::string out_dir;
  std::vector<std::string> policies;
  std::vector<double> ratio_grid;
  int workers = 1;

  // Synthetic instance source: explicit atoms "r:mass:h,..." or a batch of
  // random monotone instances.
  std::string atoms;
  int n_instances = 10;
  int n_atoms = 8;
  double feasibility_floor = 0.05;

  // Star search source: singleton class of size m or a 0/1 matrix file.
  int star_m = 8;
  std::string class_file;

  // Shell table range.
  int s_min = 0;
  int s_max = 8;

  double resolved_cap() const;
  std::string to_json() const;
  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_json_file(const std::string& path);
};

int cmd_oracle(const RunConfig& config, std::ostream& out);
int cmd_shells(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_replay(const RunConfig& config, std::ostream& out);
int cmd_star(const RunConfig& config, std::ostream& out);
int cmd_diagnose(const RunConfig& config, std::ostream& out);
int cmd_verify_bounds(const RunConfig& config, std::ostream& out);
int cmd_gen_dataset(const RunConfig& config, std::ostream& out);

// Temp-then-rename write; partial outputs never land under their final name.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace actsearch
