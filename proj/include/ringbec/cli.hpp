#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ringbec/error.hpp"
#include "ringbec/grid.hpp"
#include "ringbec/landscape.hpp"
#include "ringbec/potential.hpp"
#include "ringbec/profile.hpp"
#include "ringbec/solver.hpp"

namespace ringbec {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitAudit = 3, kExitSolver = 4 };

/// Exit status for a library error: validation problems map to 2, audit shortfalls to 3,
/// solver and root-finding failures to 4.
int exit_code_for(ErrorCode code);

/// Everything a subcommand needs, after merging the --config file with explicit flags.
struct RunConfig {
  CouplingParams coupling = coupling_for_epsilon(1e-4);
  PotentialPair potentials = sine_potentials();
  double lambda = 100.0;
  std::vector<double> lambdas{50.0, 100.0, 200.0, 400.0};
  std::optional<double> radius;
  std::optional<Window> radius_window;
  double theta = 0.1;
  GridOptions grid{20.0, 15.0, 2'000'000};
  SolveConfig solver;
  Geometry mode = Geometry::Radial;
  std::optional<double> tol;  ///< command-specific pass threshold
  unsigned workers = 0;
  std::filesystem::path out = "ringbec-out";
};

/// Reads a JSON config document:
///   {"coupling": {"alpha", "gamma", "beta"} | {"epsilon"}, "potentials": {"P": ..., "Q": ...},
///    "lambda", "lambdas", "radius", "radius_window": [a, b], "theta", "mode": "line"|"radial",
///    "grid": {"points_per_width", "pad", "cap"}, "solver": {"tol", "max_iter"}, "tol", "workers", "out"}
/// Missing keys keep their defaults. Throws InvalidConfig (or the coupling validation error).
RunConfig config_from_json(const nlohmann::json& doc, RunConfig base = {});

/// Subcommands: profile, landscape, solve, reduce, audit, normalize, sweep.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ringbec
