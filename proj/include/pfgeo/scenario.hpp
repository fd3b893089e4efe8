// Scenario-level drivers shared by the command line tool and the checks:
// seed resolution, portrait assembly, stratum rasters and the verify suite.

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "pfgeo/config.hpp"
#include "pfgeo/singular.hpp"
#include "pfgeo/svg.hpp"

namespace pfgeo {

struct ResolvedSeed {
  PTMPoint start;
  bool isotropic = false;
};

// x and y are required; then p, q or iso=k (k-th real isotropic direction,
// ascending, infinity last).
ResolvedSeed resolve_seed(const PseudoFinslerMetric& m, const SeedSpec& s);

// Integrates one seed: isotropic seeds stay on F = 0.
GeodesicTrace trace_seed(const PseudoFinslerMetric& m, const ResolvedSeed& seed,
                         const IntegratorConfig& cfg);

struct PortraitData {
  std::vector<CurveSamples> discriminant;
  std::vector<CurveSamples> s_curves;
  std::vector<TangencyReport> tangencies;
  std::vector<CurveSamples> singular_lines;
  std::vector<GeodesicTrace> isotropic;
  std::vector<GeodesicTrace> geodesics;
  std::vector<FamilyMember> family;
};

PortraitData build_portrait(const ScenarioConfig& cfg);
SvgCanvas render_portrait(const ScenarioConfig& cfg, const PortraitData& data);

// x, y, stratum (n = 3, else "-"), disc_F (n = 3), number of real
// projective isotropic directions counted with multiplicity.
void write_stratum_raster(std::ostream& os, const ScenarioConfig& cfg);

struct VerifyCheck {
  std::string name;
  int count = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return max_residual <= tolerance; }
};

std::vector<VerifyCheck> run_verify(const ScenarioConfig& cfg);

}  // namespace pfgeo
