#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ispmarket/equilibrium.hpp"
#include "ispmarket/queue_sim.hpp"
#include "ispmarket/sweep.hpp"

namespace ispmarket::cli {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitUsage = 1,
  kExitInfeasible = 2,
  kExitValidationFailure = 3,
  kExitIo = 4,
};

// Entry point of the `ispmarket` tool. args[0] is the program name.
// Subcommands: solve, sweep, validate, simulate-queue.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Stable key=value layout, one key per line.
std::string format_result(const EquilibriumResult& result);
std::string format_queue_report(const QueueRunReport& report);

// The three panel files written for `--plot base`: base_welfare.svg,
// base_x_hat.svg and base_n.svg (a trailing ".svg" on base is dropped).
std::vector<std::filesystem::path> plot_paths(const std::filesystem::path& base);

// Welfare, consumer market size and CP count against lambda, one series per
// regime. Throws std::runtime_error on I/O failure.
void write_sweep_plots(const std::filesystem::path& base, std::span<const SweepRow> rows);

}  // namespace ispmarket::cli
