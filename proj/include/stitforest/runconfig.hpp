#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace stitforest {

// One validated invocation: core fields plus the command-specific parameters
// under params.  Built by make_run_config, never by hand.
struct RunConfig {
  std::string command;     // sample-tessellation | fit | predict | experiment
  std::string experiment;  // rates | suboptimality | geometry | equivalence | bias
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out = ".";
  bool assert_checks = false;
  bool plot = false;
  nlohmann::json params = nlohmann::json::object();
};

// Command-line values; only fields actually given on the command line are
// engaged, so the config file keeps its say over the rest.
struct CliOverrides {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  bool assert_checks = false;
  bool plot = false;
};

// Layered config: built-in defaults, then the JSON file (must carry
// version = 1; unknown keys anywhere are rejected), then the flags.  The
// command/experiment fields in the file, when present, must agree with the
// subcommand.  Throws ConfigError before anything touches the filesystem.
RunConfig make_run_config(const std::string& command, const std::string& experiment,
                          const CliOverrides& overrides);

// Executes the command and writes its artifacts under config.out (created if
// missing, files written atomically).  Prints a one-line summary to out on
// success and error[<code>]: <message> to err on failure.  Exit status: 0 ok,
// 2 config error, 1 runtime error, 3 failed checks under --assert.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace stitforest
