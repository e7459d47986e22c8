#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ringbec/solver.hpp"

namespace ringbec {

/// Shortest-roundtrip-safe text form: 17 significant digits.
std::string format_number(double x);

nlohmann::ordered_json to_json(const CouplingParams& coupling);

/// lambda, geometry, coupling, grid, r_peak, mass, residual and solver counters.
nlohmann::ordered_json solution_metadata(const SolutionBundle& bundle);

/// Header "r,u,v" followed by one row per node.
void write_solution_csv(std::ostream& out, const SolutionBundle& bundle);

/// Writes `text` to `path`, creating parent directories. Throws InvalidConfig on I/O failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ringbec
