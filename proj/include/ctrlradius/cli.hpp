#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctrlradius/problem_io.hpp"

namespace ctrlradius {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitNotConverged = 2,
  kExitUncontrollable = 3,
  kExitInconclusive = 4,
};

/// Solver flags given on the command line; they override the file.
struct SolverFlags {
  std::optional<double> omega;
  std::optional<double> epsilon;
  std::optional<int> max_iter;
  std::optional<std::string> partition_col;  ///< index or "last"
  bool multistart = false;

  void apply(StlnConfig& cfg) const;
};

/// Problem solved on its own working system, with the given settings.
RadiusResult solve_problem(const Problem& problem, const StlnConfig& cfg);

int cmd_radius(const std::string& path, const SolverFlags& flags, const std::optional<std::string>& out_path,
               std::ostream& out, std::ostream& err);

/// Accepts a problem file or a report file (its perturbed system is checked at
/// the report's verification tolerance).
int cmd_check(const std::string& path, std::ostream& out, std::ostream& err);

int cmd_sweep(const std::string& path, const std::string& param, const std::vector<std::string>& values,
              const SolverFlags& flags, std::ostream& out, std::ostream& err);

/// Full command-line entry point; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctrlradius
