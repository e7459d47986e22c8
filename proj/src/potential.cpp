#include "ringbec/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "ringbec/error.hpp"

namespace ringbec {

Tabulated make_tabulated(std::vector<double> r, std::vector<double> value) {
  const std::size_t n = r.size();
  if (n < 2 || value.size() != n) {
    throw Error(ErrorCode::InvalidConfig, "tabulated potential needs >= 2 matching samples");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(r[i] > r[i - 1])) throw Error(ErrorCode::InvalidConfig, "tabulated r must increase");
  }
  // Natural spline: tridiagonal system for the interior second derivatives.
  std::vector<double> m(n, 0.0);
  if (n > 2) {
    std::vector<double> diag(n - 2), upper(n - 2), rhs(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = r[i] - r[i - 1];
      const double h1 = r[i + 1] - r[i];
      diag[i - 1] = 2.0 * (h0 + h1);
      upper[i - 1] = h1;
      rhs[i - 1] = 6.0 * ((value[i + 1] - value[i]) / h1 - (value[i] - value[i - 1]) / h0);
    }
    for (std::size_t k = 1; k < diag.size(); ++k) {
      const double lower = r[k + 1] - r[k];
      const double f = lower / diag[k - 1];
      diag[k] -= f * upper[k - 1];
      rhs[k] -= f * rhs[k - 1];
    }
    for (std::size_t k = diag.size(); k-- > 0;) {
      const double next = k + 1 < diag.size() ? m[k + 2] : 0.0;
      m[k + 1] = (rhs[k] - upper[k] * next) / diag[k];
    }
  }
  return Tabulated{std::move(r), std::move(value), std::move(m)};
}

namespace {

struct SplineEval {
  double value;
  double slope;
};

SplineEval eval_spline(const Tabulated& t, double x) {
  if (x <= t.r.front()) return {t.value.front(), 0.0};
  if (x >= t.r.back()) return {t.value.back(), 0.0};
  const auto it = std::upper_bound(t.r.begin(), t.r.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - t.r.begin()) - 1;
  const double h = t.r[i + 1] - t.r[i];
  const double a = (t.r[i + 1] - x) / h;
  const double b = (x - t.r[i]) / h;
  const double value = a * t.value[i] + b * t.value[i + 1] +
                       ((a * a * a - a) * t.second[i] + (b * b * b - b) * t.second[i + 1]) * h * h / 6.0;
  const double slope = (t.value[i + 1] - t.value[i]) / h -
                       (3 * a * a - 1) / 6.0 * h * t.second[i] + (3 * b * b - 1) / 6.0 * h * t.second[i + 1];
  return {value, slope};
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Potential::Potential(Kind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [&](const ZeroPotential&) {
                   sup_value_ = 0.0;
                   sup_derivative_ = 0.0;
                 },
                 [&](const Sinusoid& s) {
                   sup_value_ = std::abs(s.amplitude);
                   sup_derivative_ = std::abs(s.amplitude * s.frequency);
                 },
                 [&](const GaussianBump& g) {
                   if (!(g.width > 0.0)) {
                     throw Error(ErrorCode::InvalidConfig, "gaussian bump width must be positive");
                   }
                   sup_value_ = std::abs(g.height);
                   // max |d/dr exp(-x^2)| = sqrt(2/e) at x = 1/sqrt(2)
                   sup_derivative_ = std::abs(g.height) * std::sqrt(2.0 / std::numbers::e) / g.width;
                 },
                 [&](const Tabulated& t) {
                   // Exact extrema per interval: the spline is cubic, its slope quadratic.
                   sup_value_ = 0.0;
                   sup_derivative_ = 0.0;
                   for (std::size_t i = 0; i + 1 < t.r.size(); ++i) {
                     const double h = t.r[i + 1] - t.r[i];
                     const double m0 = t.second[i];
                     const double m1 = t.second[i + 1];
                     std::vector<double> at{0.0, 1.0};
                     if (m0 != m1) at.push_back(m0 / (m0 - m1));
                     // slope(b) = c2 b^2 + c1 b + c0 with b the fraction of the interval
                     const double c2 = h * (m1 - m0) / 2.0;
                     const double c1 = h * m0;
                     const double c0 = (t.value[i + 1] - t.value[i]) / h - h * m0 / 3.0 - h * m1 / 6.0;
                     if (c2 != 0.0) {
                       const double disc = c1 * c1 - 4.0 * c2 * c0;
                       if (disc >= 0.0) {
                         at.push_back((-c1 + std::sqrt(disc)) / (2.0 * c2));
                         at.push_back((-c1 - std::sqrt(disc)) / (2.0 * c2));
                       }
                     } else if (c1 != 0.0) {
                       at.push_back(-c0 / c1);
                     }
                     for (double b : at) {
                       if (!(b >= 0.0 && b <= 1.0)) continue;
                       const SplineEval e = eval_spline(t, t.r[i] + b * h);
                       sup_value_ = std::max(sup_value_, std::abs(e.value));
                       sup_derivative_ = std::max(sup_derivative_, std::abs(e.slope));
                     }
                   }
                 },
             },
             kind_);
}

double Potential::value(double r) const {
  return std::visit(Overloaded{
                        [](const ZeroPotential&) { return 0.0; },
                        [r](const Sinusoid& s) { return s.amplitude * std::sin(s.frequency * r + s.phase); },
                        [r](const GaussianBump& g) {
                          const double x = (r - g.center) / g.width;
                          return g.height * std::exp(-x * x);
                        },
                        [r](const Tabulated& t) { return eval_spline(t, r).value; },
                    },
                    kind_);
}

double Potential::derivative(double r) const {
  return std::visit(Overloaded{
                        [](const ZeroPotential&) { return 0.0; },
                        [r](const Sinusoid& s) {
                          return s.amplitude * s.frequency * std::cos(s.frequency * r + s.phase);
                        },
                        [r](const GaussianBump& g) {
                          const double x = (r - g.center) / g.width;
                          return -2.0 * x / g.width * g.height * std::exp(-x * x);
                        },
                        [r](const Tabulated& t) { return eval_spline(t, r).slope; },
                    },
                    kind_);
}

double Potential::scan_step() const {
  return std::visit(Overloaded{
                        [](const ZeroPotential&) { return 0.5; },
                        [](const Sinusoid& s) {
                          return 2.0 * std::numbers::pi / (16.0 * std::max(std::abs(s.frequency), 1e-12));
                        },
                        [](const GaussianBump& g) { return g.width / 16.0; },
                        [](const Tabulated& t) {
                          double h = t.r.back() - t.r.front();
                          for (std::size_t i = 1; i < t.r.size(); ++i) h = std::min(h, t.r[i] - t.r[i - 1]);
                          return h / 4.0;
                        },
                    },
                    kind_);
}

PotentialPair zero_potentials() { return {}; }

PotentialPair sine_potentials() {
  return {Potential(Sinusoid{1.0, 1.0, 0.0}), Potential(Sinusoid{1.0, 1.0, 0.0})};
}

namespace {

double number_or(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw Error(ErrorCode::InvalidConfig, std::string("potential field '") + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

Potential potential_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw Error(ErrorCode::InvalidConfig, "potential entry needs a string 'kind'");
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "zero") return Potential(ZeroPotential{});
  if (kind == "sinusoid") {
    return Potential(Sinusoid{number_or(j, "amplitude", 1.0), number_or(j, "frequency", 1.0),
                              number_or(j, "phase", 0.0)});
  }
  if (kind == "gaussian_bump") {
    return Potential(GaussianBump{number_or(j, "center", 0.0), number_or(j, "width", 1.0),
                                  number_or(j, "height", 1.0)});
  }
  if (kind == "tabulated") {
    if (!j.contains("r") || !j.contains("value")) {
      throw Error(ErrorCode::InvalidConfig, "tabulated potential needs 'r' and 'value' arrays");
    }
    return Potential(make_tabulated(j.at("r").get<std::vector<double>>(),
                                    j.at("value").get<std::vector<double>>()));
  }
  throw Error(ErrorCode::InvalidConfig, "unknown potential kind '" + kind + "'");
}

nlohmann::ordered_json potential_to_json(const Potential& p) {
  nlohmann::ordered_json j;
  std::visit(Overloaded{
                 [&](const ZeroPotential&) { j["kind"] = "zero"; },
                 [&](const Sinusoid& s) {
                   j["kind"] = "sinusoid";
                   j["amplitude"] = s.amplitude;
                   j["frequency"] = s.frequency;
                   j["phase"] = s.phase;
                 },
                 [&](const GaussianBump& g) {
                   j["kind"] = "gaussian_bump";
                   j["center"] = g.center;
                   j["width"] = g.width;
                   j["height"] = g.height;
                 },
                 [&](const Tabulated& t) {
                   j["kind"] = "tabulated";
                   j["r"] = t.r;
                   j["value"] = t.value;
                 },
             },
             p.kind());
  return j;
}

}  // namespace

PotentialPair potential_pair_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("P") || !doc.contains("Q")) {
    throw Error(ErrorCode::InvalidConfig, "potential document needs 'P' and 'Q'");
  }
  return {potential_from_json(doc.at("P")), potential_from_json(doc.at("Q"))};
}

nlohmann::ordered_json to_json(const PotentialPair& pair) {
  nlohmann::ordered_json j;
  j["P"] = potential_to_json(pair.p);
  j["Q"] = potential_to_json(pair.q);
  return j;
}

PotentialPair load_potentials(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open potential file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("potential JSON: ") + e.what());
  }
  return potential_pair_from_json(doc);
}

}  // namespace ringbec
