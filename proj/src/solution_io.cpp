#include "ringbec/solution_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "ringbec/error.hpp"

namespace ringbec {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::ordered_json to_json(const CouplingParams& c) {
  return {{"alpha", c.alpha}, {"gamma", c.gamma}, {"beta", c.beta},
          {"epsilon", c.epsilon}, {"c_u", c.c_u}, {"c_v", c.c_v}};
}

nlohmann::ordered_json solution_metadata(const SolutionBundle& b) {
  nlohmann::ordered_json j;
  j["lambda"] = b.problem.lambda;
  j["geometry"] = b.problem.geometry == Geometry::Radial ? "radial" : "line";
  j["coupling"] = to_json(b.problem.coupling);
  j["grid"] = {{"n", b.problem.grid.n}, {"h", b.problem.grid.h}, {"r_max", b.problem.grid.r_max()}};
  j["r_peak"] = b.r_peak;
  j["interior_peak"] = b.interior_peak;
  j["mass"] = b.mass;
  j["residual"] = b.residual;
  j["iterations"] = b.iterations;
  j["trivial"] = b.trivial;
  j["positive"] = b.positive;
  return j;
}

void write_solution_csv(std::ostream& out, const SolutionBundle& b) {
  out << "r,u,v\n";
  for (int i = 0; i < b.problem.grid.n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out << format_number(b.problem.grid.node(i)) << ',' << format_number(b.fields.u[k]) << ','
        << format_number(b.fields.v[k]) << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorCode::InvalidConfig, "write failed for " + path.string());
}

}  // namespace ringbec
