#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "blowup/error.hpp"

namespace blowup::cli {

/// 2 config, 3 domain / cone / data, 4 divergence.
int exit_code(ErrorKind kind);

struct Invocation {
  /// simulate | curve | selfsim | liouville | profile-eval
  std::string command;
  std::string config_path;
  /// "key=value" assignments applied to the config in order.
  std::vector<std::string> overrides;
};

/// Loads the config, runs the command and writes its run directory
/// (config output.directory, or BLOWUP_OUTPUT_DIR when set). Returns the exit code.
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

/// Acceptance table; 0 when every criterion passes, 1 otherwise.
int verify(bool quick, const std::vector<int>& only, std::ostream& out);

}  // namespace blowup::cli
