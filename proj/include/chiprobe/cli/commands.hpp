#pragma once

// Subcommands of the chiprobe tool. Each writes data files into the configured
// output directory and returns a process exit code.

#include <chiprobe/cli/config.hpp>
#include <chiprobe/reconstruct/samples.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chiprobe::cli {

/// Process exit codes.
enum ExitCode : int { kSuccess = 0, kConfigError = 2, kConvergenceFailure = 3, kCoverageFailure = 4 };

/// Exit code for a library error category.
int exit_code_for(Errc code);

std::string version();

struct CommandResult {
  int exit_code = kSuccess;
  std::vector<std::string> files;
};

/// Sequence plan for one family from the sweep settings, N = n_min..n_max.
reconstruct::SamplingPlan make_plan(FamilyKind family, const SweepConfig& sweep, int n_max, int draws, double nu);

/// The N label of a family member.
int sequence_order(const SequenceFamily& family);

struct FidelityPoint {
  FamilyKind family = FamilyKind::equidistant;
  double gamma = 0;
  int n_cap = 0;
  double fidelity = 0;  ///< chi overlap; NaN when coverage failed
  std::size_t distinct_points = 0;
  std::string status = "ok";
};

/// Fidelity of the configured state for every (family, gamma, N cap). Samples
/// are collected once per (family, gamma) up to the largest cap and filtered.
std::vector<FidelityPoint> fidelity_sweep(const RunConfig& config, const std::vector<FamilyKind>& families,
                                          const std::vector<double>& gammas, const std::vector<int>& n_caps,
                                          int draws);

CommandResult cmd_points(const RunConfig& config, std::ostream& log);
CommandResult cmd_measure(const RunConfig& config, std::ostream& log);
CommandResult cmd_reconstruct(const RunConfig& config, std::ostream& log);
CommandResult cmd_verify(const RunConfig& config, std::ostream& log);

}  // namespace chiprobe::cli
