#pragma once

// Subcommand bodies behind the dsanneal executable. Each returns a process
// exit code; human-readable reports go to `out`, errors to `err`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace dsanneal {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitDivergence = 2,
  kExitIo = 3,
  kExitCheckFailed = 4,
};

struct CommandOptions {
  std::string config_path;
  std::optional<std::string> out_dir;   // overrides output_dir
  std::optional<std::uint64_t> seed;    // overrides seed
  bool svg = false;
  int threads = 1;
};

int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_oracle(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_ensemble(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace dsanneal
