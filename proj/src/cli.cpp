#include "ringbec/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ringbec/audit.hpp"
#include "ringbec/normalizer.hpp"
#include "ringbec/reduction.hpp"
#include "ringbec/solution_io.hpp"
#include "ringbec/sweep.hpp"

namespace ringbec {

using ojson = nlohmann::ordered_json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InadmissibleBeta:
    case ErrorCode::NonPositive:
    case ErrorCode::InvalidConfig:
    case ErrorCode::NoCriticalPoint:
    case ErrorCode::GridTooLarge:
    case ErrorCode::NegativeBase:
      return kExitConfig;
    case ErrorCode::InsufficientTail:
      return kExitAudit;
    default:
      return kExitSolver;
  }
}

namespace {

double number_at(const nlohmann::json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw Error(ErrorCode::InvalidConfig, std::string("config field '") + key + "' must be a number");
  return v.get<double>();
}

Geometry parse_mode(const std::string& mode) {
  if (mode == "radial") return Geometry::Radial;
  if (mode == "line") return Geometry::Line;
  throw Error(ErrorCode::InvalidConfig, "mode must be 'line' or 'radial', got '" + mode + "'");
}

Window parse_window(const std::vector<double>& v) {
  if (v.size() != 2 || !(v[0] < v[1])) throw Error(ErrorCode::InvalidConfig, "radius window needs a,b with a < b");
  return {v[0], v[1]};
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& doc, RunConfig cfg) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  try {
    if (doc.contains("coupling")) {
      const auto& c = doc.at("coupling");
      if (c.contains("epsilon")) {
        cfg.coupling = coupling_for_epsilon(number_at(c, "epsilon"));
      } else {
        cfg.coupling = validate_coupling(number_at(c, "alpha"), number_at(c, "gamma"), number_at(c, "beta"));
      }
    }
    if (doc.contains("potentials")) cfg.potentials = potential_pair_from_json(doc.at("potentials"));
    if (doc.contains("lambda")) cfg.lambda = number_at(doc, "lambda");
    if (doc.contains("lambdas")) cfg.lambdas = doc.at("lambdas").get<std::vector<double>>();
    if (doc.contains("radius")) cfg.radius = number_at(doc, "radius");
    if (doc.contains("radius_window")) cfg.radius_window = parse_window(doc.at("radius_window").get<std::vector<double>>());
    if (doc.contains("theta")) cfg.theta = number_at(doc, "theta");
    if (doc.contains("mode")) cfg.mode = parse_mode(doc.at("mode").get<std::string>());
    if (doc.contains("grid")) {
      const auto& g = doc.at("grid");
      if (g.contains("points_per_width")) cfg.grid.points_per_width = number_at(g, "points_per_width");
      if (g.contains("pad")) cfg.grid.pad = number_at(g, "pad");
      if (g.contains("cap")) cfg.grid.cap = g.at("cap").get<std::size_t>();
    }
    if (doc.contains("solver")) {
      const auto& s = doc.at("solver");
      if (s.contains("tol")) cfg.solver.tol = number_at(s, "tol");
      if (s.contains("max_iter")) cfg.solver.max_iter = s.at("max_iter").get<int>();
    }
    if (doc.contains("tol")) cfg.tol = number_at(doc, "tol");
    if (doc.contains("workers")) cfg.workers = doc.at("workers").get<unsigned>();
    if (doc.contains("out")) cfg.out = doc.at("out").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  return cfg;
}

namespace {

struct Flags {
  std::string config;
  std::optional<double> lambda, epsilon, theta, alpha, gamma, beta, radius, ppw, pad, tol;
  std::vector<double> radius_window;
  std::vector<double> lambdas;
  std::string potentials;
  std::string mode;
  std::string out;
  std::optional<unsigned> workers;
};

RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config " + f.config);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, std::string("config JSON: ") + e.what());
    }
    cfg = config_from_json(doc, cfg);
  }
  if (f.epsilon) {
    cfg.coupling = coupling_for_epsilon(*f.epsilon);
  } else if (f.alpha || f.gamma || f.beta) {
    cfg.coupling = validate_coupling(f.alpha.value_or(cfg.coupling.alpha), f.gamma.value_or(cfg.coupling.gamma),
                                     f.beta.value_or(cfg.coupling.beta));
  }
  if (!f.potentials.empty()) cfg.potentials = load_potentials(f.potentials);
  if (f.lambda) cfg.lambda = *f.lambda;
  if (!f.lambdas.empty()) cfg.lambdas = f.lambdas;
  if (f.radius) cfg.radius = *f.radius;
  if (!f.radius_window.empty()) cfg.radius_window = parse_window(f.radius_window);
  if (f.theta) cfg.theta = *f.theta;
  if (f.ppw) cfg.grid.points_per_width = *f.ppw;
  if (f.pad) cfg.grid.pad = *f.pad;
  if (f.tol) cfg.tol = *f.tol;
  if (!f.mode.empty()) cfg.mode = parse_mode(f.mode);
  if (f.workers) cfg.workers = *f.workers;
  if (!f.out.empty()) cfg.out = f.out;
  if (!(cfg.lambda > 0.0)) throw Error(ErrorCode::InvalidConfig, "lambda must be positive");
  return cfg;
}

class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& text) {
    write_text_file(dir_ / name, text);
    files_.push_back(name);
  }
  void write_json(const std::string& name, const ojson& j) { write(name, j.dump(2) + "\n"); }

  void manifest(const std::string& command, const std::vector<std::string>& args, int status) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream stamp;
    stamp << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    ojson m;
    m["command"] = command;
    m["arguments"] = args;
    m["exit_code"] = status;
    m["outputs"] = files_;
    m["created_utc"] = stamp.str();
    write_text_file(dir_ / "manifest.json", m.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

std::string csv_line(std::initializer_list<double> values) {
  std::string s;
  bool first = true;
  for (double v : values) {
    if (!first) s += ',';
    s += format_number(v);
    first = false;
  }
  return s + '\n';
}

double concentration_radius(const RunConfig& cfg, double lambda) {
  if (cfg.radius) return *cfg.radius;
  if (cfg.mode == Geometry::Line) return 0.0;
  try {
    if (cfg.radius_window) return nearest_concentration(cfg.potentials, cfg.coupling, lambda, *cfg.radius_window).y;
    return predicted_concentration(cfg.potentials, cfg.coupling, lambda).y;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoCriticalPoint) throw;
    throw Error(ErrorCode::NoCriticalPoint,
                e.detail() + "; pass --radius to solve around a fixed ring");
  }
}

Problem make_problem(const RunConfig& cfg, double lambda, double r0) {
  return {cfg.coupling, cfg.potentials, lambda, build_grid(lambda, r0, cfg.grid), cfg.mode};
}

SolutionBundle solve_problem(const RunConfig& cfg, const Problem& pb, double r0) {
  const FieldPair start = cfg.mode == Geometry::Radial ? corrected_ansatz(pb, r0) : build_ansatz(pb, r0);
  return newton_solve(pb, start, cfg.solver);
}

struct AuditFailure {
  std::string message;
};

ojson profile_report(const RunConfig& cfg, double tol, Outputs& files) {
  const ScalarProfile w = solve_w(tol);
  const ProfileConstants k = compute_constants(w, 1e-3);
  const VectorPohozaevReport vp = audit_vector_pohozaev(cfg.coupling, k);
  double sup_err = 0.0;
  for (std::size_t i = 0; i < w.samples().size(); ++i) {
    sup_err = std::max(sup_err, std::abs(w.samples()[i] - line_soliton(w.step() * static_cast<double>(i))));
  }
  const double lemma_quartic = std::abs(3.0 * k.i4 - 4.0 * k.i2) / (4.0 * k.i2);
  const double lemma_kinetic = std::abs(4.0 * k.i2 - 12.0 * k.a) / (12.0 * k.a);

  ojson j;
  j["w0"] = w.samples().front();
  j["decay_rate"] = w.decay_rate();
  j["step"] = w.step();
  j["constants"] = {{"I2", k.i2}, {"I4", k.i4}, {"A", k.a}};
  j["coupling"] = to_json(cfg.coupling);
  j["residuals"] = {{"quartic_vs_mass", lemma_quartic},
                    {"mass_vs_kinetic", lemma_kinetic},
                    {"vector_mass_vs_quartic", vp.mass_vs_quartic},
                    {"vector_mass_vs_kinetic", vp.mass_vs_kinetic},
                    {"sup_error_vs_closed_form", sup_err},
                    {"ode_residual", w.max_ode_residual()}};
  j["tol"] = tol;
  const bool pass = lemma_quartic <= tol && lemma_kinetic <= tol && vp.mass_vs_quartic <= tol &&
                    vp.mass_vs_kinetic <= tol;
  j["pass"] = pass;
  files.write_json("profile.json", j);

  std::string table = "name,value\n";
  table += "I2," + format_number(k.i2) + "\n";
  table += "I4," + format_number(k.i4) + "\n";
  table += "A," + format_number(k.a) + "\n";
  files.write("constants.csv", table);

  std::string samples = "r,w,dw\n";
  for (std::size_t i = 0; i < w.samples().size(); ++i) {
    samples += csv_line({w.step() * static_cast<double>(i), w.samples()[i], w.derivative_samples()[i]});
  }
  files.write("profile.csv", samples);
  if (!pass) throw AuditFailure{"profile identity residuals exceed tol " + format_number(tol)};
  return j;
}

ojson landscape_report(const RunConfig& cfg, Outputs& files) {
  const double lambda = cfg.lambda;
  const Window window = cfg.radius_window.value_or(Window{0.6 * lambda, 1.5 * lambda});
  const LandscapeWeights lw = landscape_weights(cfg.coupling);
  ojson j;
  j["lambda"] = lambda;
  j["window"] = {window.lo, window.hi};
  j["weights"] = {{"w_p", lw.w_p}, {"w_q", lw.w_q}};
  auto points = ojson::array();
  std::vector<CriticalPoint> cps;
  try {
    cps = find_critical_points(cfg.potentials, cfg.coupling, lambda, window);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoCriticalPoint) throw;
  }
  for (const auto& p : cps) points.push_back({{"y", p.y}, {"m_second", p.m_second}});
  j["critical_points"] = points;
  j["branches"] = cps.size();
  if (!cps.empty()) {
    j["selected"] = nearest_concentration(cfg.potentials, cfg.coupling, lambda, window).y;
  } else {
    j["selected"] = nullptr;
  }
  std::string csv = "r,M,M_prime\n";
  constexpr int kSamples = 2000;
  for (int i = 0; i <= kSamples; ++i) {
    const double r = window.lo + (window.hi - window.lo) * i / kSamples;
    csv += csv_line({r, eval_M(cfg.potentials, cfg.coupling, lambda, r),
                     eval_M_prime(cfg.potentials, cfg.coupling, lambda, r)});
  }
  files.write_json("landscape.json", j);
  files.write("landscape.csv", csv);
  return j;
}

ojson solve_report(const RunConfig& cfg, Outputs& files) {
  const double r0 = concentration_radius(cfg, cfg.lambda);
  const Problem pb = make_problem(cfg, cfg.lambda, r0);
  const SolutionBundle s = solve_problem(cfg, pb, r0);
  ojson j = solution_metadata(s);
  j["r0"] = r0;
  std::ostringstream csv;
  write_solution_csv(csv, s);
  files.write("solution.csv", csv.str());
  files.write_json("solution.json", j);
  return j;
}

ojson reduce_report(const RunConfig& cfg, Outputs& files) {
  const double r0 = concentration_radius(cfg, cfg.lambda);
  const Problem pb = make_problem(cfg, cfg.lambda, cfg.radius_window ? std::max(r0, cfg.radius_window->hi) : r0);
  ojson j = to_json(reduction_report(pb, r0));
  if (cfg.radius_window) {
    const ReducedEvaluation root = solve_reduced_for_r(pb, *cfg.radius_window);
    j["reduced_root"] = {{"r", root.r0},
                         {"reduced_value", root.corrected.reduced_value},
                         {"omega_norm", ReductionEngine(pb, root.r0).metric().norm(root.omega)}};
  }
  files.write_json("reduction.json", j);
  return j;
}

ojson audit_report(const RunConfig& cfg, double tol, Outputs& files) {
  const double r0 = concentration_radius(cfg, cfg.lambda);
  const Problem pb = make_problem(cfg, cfg.lambda, r0);
  const SolutionBundle s = solve_problem(cfg, pb, r0);
  const ProfileConstants k = compute_constants(solve_w(1e-10), 1e-3);
  const AuditReport rep = audit_solution(s, k);
  ojson j;
  j["solution"] = solution_metadata(s);
  j["audit"] = to_json(rep);
  j["tol"] = tol;
  const bool pass = rep.identity1.residual <= tol && rep.poho2.residual <= tol;
  j["pass"] = pass;
  files.write_json("audit.json", j);
  if (!pass) throw AuditFailure{"identity residuals exceed tol " + format_number(tol)};
  return j;
}

ojson normalize_report(const RunConfig& cfg, Outputs& files) {
  NormalizerOptions opt;
  opt.theta = cfg.theta;
  opt.points_per_width = cfg.grid.points_per_width;
  opt.radius_window = cfg.radius_window;
  if (cfg.tol) opt.mass_tol = *cfg.tol;
  opt.profile_a = compute_constants(solve_w(1e-10), 1e-3).a;
  const NormalizedSolution n = solve_lambda_for_mass(cfg.coupling, cfg.potentials, opt);
  ojson j = to_json(n);
  std::ostringstream csv;
  write_solution_csv(csv, n.bundle);
  files.write_json("normalized.json", j);
  files.write("solution.csv", csv.str());
  return j;
}

ojson sweep_report(const RunConfig& cfg, Outputs& files) {
  SweepOptions opt;
  opt.lambdas = cfg.lambdas;
  opt.points_per_width = cfg.grid.points_per_width;
  opt.workers = cfg.workers;
  const ProfileConstants k = compute_constants(solve_w(1e-10), 1e-3);
  const SweepResult res = run_sweep(cfg.coupling, cfg.potentials, k, opt);
  std::ostringstream csv;
  write_sweep_csv(csv, res);
  files.write("sweep.csv", csv.str());
  ojson slopes;
  for (std::size_t i = 1; i < res.columns.size(); ++i) {
    if (std::isfinite(res.slopes[i])) slopes[res.columns[i]] = res.slopes[i];
  }
  ojson j;
  j["lambdas"] = cfg.lambdas;
  j["slopes"] = slopes;
  return j;
}

void print_error(std::ostream& err, const std::string& code, const std::string& message, int status) {
  ojson e;
  e["error"] = code;
  e["message"] = message;
  e["exit_code"] = status;
  err << e.dump() << '\n';
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ring-concentrated normalized solutions of a two-component radial system"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON run configuration");
    sub->add_option("--lambda", f.lambda, "frequency lambda");
    sub->add_option("--epsilon", f.epsilon, "target mass parameter (alpha = gamma = 1, beta = 2/eps - 1)");
    sub->add_option("--alpha", f.alpha, "self coupling of u");
    sub->add_option("--gamma", f.gamma, "self coupling of v");
    sub->add_option("--beta", f.beta, "cross coupling");
    sub->add_option("--theta", f.theta, "bracket exponent theta in (0, 1/2)");
    sub->add_option("--radius", f.radius, "explicit ring radius");
    sub->add_option("--radius-window", f.radius_window, "absolute radius window a,b")->delimiter(',')->expected(2);
    sub->add_option("--grid-ppw", f.ppw, "grid points per peak width");
    sub->add_option("--pad", f.pad, "margin past the ring, in peak widths");
    sub->add_option("--tol", f.tol, "pass threshold for profile, audit and normalize");
    sub->add_option("--potentials", f.potentials, "JSON file with P and Q");
    sub->add_option("--mode", f.mode, "line or radial")->check(CLI::IsMember({"line", "radial"}));
    sub->add_option("--out", f.out, "output directory");
  };

  const char* names[] = {"profile", "landscape", "solve", "reduce", "audit", "normalize", "sweep"};
  const char* help[] = {"shoot the line soliton and check its constants",
                        "critical points of the concentration landscape",
                        "Newton solve around the predicted ring",
                        "reduction diagnostics at a radius",
                        "identity and asymptotic audits of a solve",
                        "find lambda with unit mass",
                        "lambda sweep with log-log slope fits"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(names); ++i) {
    CLI::App* s = app.add_subcommand(names[i], help[i]);
    add_common(s);
    subs.push_back(s);
  }
  subs.back()->add_option("--lambdas", f.lambdas, "comma-separated lambda list")->delimiter(',');
  subs.back()->add_option("--workers", f.workers, "parallel lambda solves (0: hardware)");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "InvalidConfig", e.what(), kExitConfig);
    return kExitConfig;
  }

  std::string command;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) command = names[i];
  }

  std::optional<Outputs> files;
  auto finish = [&](int status) {
    if (files) {
      try {
        files->manifest(command, args, status);
      } catch (const Error&) {
      }
    }
    return status;
  };
  try {
    const RunConfig cfg = resolve(f);
    files.emplace(cfg.out);
    ojson summary;
    if (command == "profile") {
      summary = profile_report(cfg, cfg.tol.value_or(1e-8), *files);
    } else if (command == "landscape") {
      summary = landscape_report(cfg, *files);
    } else if (command == "solve") {
      summary = solve_report(cfg, *files);
    } else if (command == "reduce") {
      summary = reduce_report(cfg, *files);
    } else if (command == "audit") {
      summary = audit_report(cfg, cfg.tol.value_or(1e-3), *files);
    } else if (command == "normalize") {
      summary = normalize_report(cfg, *files);
    } else {
      summary = sweep_report(cfg, *files);
    }
    out << summary.dump(2) << '\n';
    return finish(kExitOk);
  } catch (const AuditFailure& a) {
    print_error(err, "AuditFailure", a.message, kExitAudit);
    return finish(kExitAudit);
  } catch (const Error& e) {
    const int status = exit_code_for(e.code());
    print_error(err, std::string(to_string(e.code())), e.detail(), status);
    return finish(status);
  } catch (const std::exception& e) {
    print_error(err, "InternalError", e.what(), kExitSolver);
    return finish(kExitSolver);
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("ringbec");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ringbec
