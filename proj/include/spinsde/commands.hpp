#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spinsde/config.hpp"
#include "spinsde/oracles.hpp"

namespace spinsde {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitGateFailed = 1,
  kExitConfig = 2,
  kExitScheme = 3,
  kExitUndefinedRate = 4,
};

struct OutputFile {
  std::string path;  // empty: standard output
  std::string content;
};

/// Result of a command: exit code, diagnostics, and the files to write.
/// Files are only written when the exit code is kExitOk.
struct CommandResult {
  int exit_code = kExitOk;
  std::string message;
  std::vector<OutputFile> files;
};

/// Single path at the record times: t,mu_x,mu_y,mu_z,norm.
CommandResult cmd_simulate(const RunConfig& cfg);

/// Gap-moment estimator series plus the squared-norm one, each followed by a
/// `limit,<value>,<z-score>,<n_paths>` row against the closed-form limit.
CommandResult cmd_moments(const RunConfig& cfg, int p, unsigned threads = 0);

/// Mean state and E|N_t|^{2p} (with its bound) on alpha0-exact paths.
CommandResult cmd_alpha0(const RunConfig& cfg, int p, unsigned threads = 0);

/// Oracle gates; `only` restricts to the named groups.
CommandResult cmd_verify(const std::vector<std::string>& only, const CorrectionFn& closed_form);
CommandResult cmd_verify(const std::vector<std::string>& only = {});

/// Norm drift and terminal error of every scheme on common random numbers,
/// measured against a midpoint reference at dt / 16.
CommandResult cmd_schemes_compare(const RunConfig& cfg, unsigned threads = 0);

/// Derived path for a secondary output: "a/b.csv" + "_x" -> "a/b_x.csv".
std::string sibling_path(const std::string& path, const std::string& suffix);

/// Full command-line entry point. Writes files, prints diagnostics to `err`
/// and stdout payloads to `out`; returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spinsde
