#pragma once

// Command-line front end, kept in the library so tests can drive it.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "btcsim/scenario.hpp"

namespace btcsim {

/// Environment variable naming a config file used when --config is absent.
inline constexpr const char* kConfigEnvVar = "BTCSIM_CONFIG";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliInvocation {
  std::string subcommand;
  ScenarioConfig config;
  std::vector<std::int32_t> depths;
  std::string format = "table";  // csv, json or table
  std::string out;               // empty: standard output
  bool trace = false;
  bool dump_config = false;
  double q = 0.0;
  std::int32_t z = 0;
  /// oracle: replications of the simulated race; 0 prints only the analytic value.
  std::int64_t race_replications = 0;
  std::int64_t min_blocks = 2000;
  unsigned threads = 0;
};

/// "3" or "1..4". Throws UsageError.
std::vector<std::int32_t> parse_depths(const std::string& text);

/// "0.1,0.2". Throws UsageError.
std::vector<double> parse_shares(const std::string& text);

/// Defaults, then the config file, then flags. Throws UsageError for bad
/// flags and ConfigError for a configuration that fails validation.
/// `help` is set instead when --help was requested.
CliInvocation parse_and_validate(const std::vector<std::string>& args, std::string* help = nullptr);

/// Full program: returns 0 on success, 1 on config or runtime failure, 2 on
/// usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace btcsim
