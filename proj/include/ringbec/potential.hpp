#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ringbec {

struct ZeroPotential {};

/// amplitude * sin(frequency * r + phase)
struct Sinusoid {
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
};

/// height * exp(-((r - center) / width)^2)
struct GaussianBump {
  double center = 0.0;
  double width = 1.0;
  double height = 1.0;
};

/// Natural cubic spline through (r_i, value_i); constant extension outside the table.
struct Tabulated {
  std::vector<double> r;
  std::vector<double> value;
  std::vector<double> second;  ///< spline second derivatives, filled by make_tabulated
};

Tabulated make_tabulated(std::vector<double> r, std::vector<double> value);

/// Radial potential with value, derivative and declared sup bounds.
class Potential {
 public:
  using Kind = std::variant<ZeroPotential, Sinusoid, GaussianBump, Tabulated>;

  Potential() = default;
  explicit Potential(Kind kind);

  double value(double r) const;
  double derivative(double r) const;

  double sup_value() const { return sup_value_; }
  double sup_derivative() const { return sup_derivative_; }

  /// Scan step that brackets every simple root of the landscape derivative.
  double scan_step() const;

  bool is_zero() const { return std::holds_alternative<ZeroPotential>(kind_); }
  const Kind& kind() const { return kind_; }

 private:
  Kind kind_{ZeroPotential{}};
  double sup_value_ = 0.0;
  double sup_derivative_ = 0.0;
};

struct PotentialPair {
  Potential p;
  Potential q;

  bool both_zero() const { return p.is_zero() && q.is_zero(); }
};

PotentialPair zero_potentials();
PotentialPair sine_potentials();

/// {"P": {"kind": "sinusoid", "amplitude": 1.0, "frequency": 1.0, "phase": 0.0}, "Q": {...}}
PotentialPair potential_pair_from_json(const nlohmann::json& doc);
nlohmann::ordered_json to_json(const PotentialPair& pair);
PotentialPair load_potentials(const std::string& path);

}  // namespace ringbec
