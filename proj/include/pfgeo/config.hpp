// Scenario files: one `key = value` per line, `#` starts a comment.
//
//   name = linear-c
//   n = 3
//   a0 = -x
//   a2 = 1
//   xmin = -1          # also xmax, ymin, ymax
//   seed = x=-0.5, y=0, p=0.3
//   seed = x=0.25, y=0, iso=0    # isotropic direction number 0 at (x, y)
//
// With `mode = berwald-moor` the immersion is given by f1..fn instead of
// a0..an; adapted_a, adapted_b and adapted_g<k>x / adapted_g<k>y optionally
// supply the adapted local form.  See README for the full key list.

#pragma once

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfgeo/berwald_moor.hpp"
#include "pfgeo/flow.hpp"
#include "pfgeo/metric.hpp"

namespace pfgeo {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class ScenarioMode { Coefficients, BerwaldMoor };

// A start point for integration: any of x, y, p, q, iso, alpha.
using SeedSpec = std::map<std::string, double>;
SeedSpec parse_seed(const std::string& text);

struct ScenarioConfig {
  std::string name = "scenario";
  ScenarioMode mode = ScenarioMode::Coefficients;
  int n = 0;
  std::vector<std::string> coeffs;     // a0..an
  std::vector<std::string> immersion;  // f1..fn
  std::optional<std::string> adapted_a, adapted_b;
  std::map<int, std::pair<std::string, std::string>> adapted_g;
  Box domain;
  int resolution = 160;
  std::vector<SeedSpec> seeds;
  std::vector<double> alphas;
  std::optional<std::array<double, 3>> family;  // (x, y, p0) on the discriminant curve
  double bm_y0 = 0.0;
  IntegratorConfig integrator;
  int puiseux_s = 0;
  std::vector<double> puiseux_seed;
  int puiseux_order = 12;
  std::map<int, double> puiseux_free;
  int verify_samples = 200;
  unsigned rng_seed = 1;
  std::string out_dir = ".";

  PseudoFinslerMetric metric() const;
  std::optional<SurfaceImmersion> surface() const;
  // Explicit adapted keys win; otherwise the immersion helper is tried.
  std::optional<AdaptedLocalMetric> adapted(std::string* why = nullptr) const;
};

ScenarioConfig parse_config(std::istream& in, const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path);

}  // namespace pfgeo
