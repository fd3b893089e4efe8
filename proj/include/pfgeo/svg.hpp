// Minimal deterministic SVG 1.1 output for phase portraits.  Coordinates
// are printed with a fixed precision so identical input gives identical
// bytes.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "pfgeo/flow.hpp"

namespace pfgeo {

struct StrokeStyle {
  std::string color;
  double width = 1.0;
  std::string dash;  // empty for solid
  const char* label = "";
};

// Legend conventions of the portraits.
namespace styles {
inline const StrokeStyle kDiscriminant{"#000000", 2.6, "", "discriminant curve"};
inline const StrokeStyle kGeodesic{"#1f4e9c", 1.0, "", "geodesic"};
inline const StrokeStyle kIsotropic{"#b03a2e", 0.9, "6,4", "isotropic line"};
inline const StrokeStyle kSingularLine{"#555555", 0.9, "1.2,2.4", "singular line"};
inline const StrokeStyle kSReal{"#1e8449", 1.4, "3,3", "S_i, real eigenvalues"};
inline const StrokeStyle kSImaginary{"#7d3c98", 1.4, "10,4", "S_i, imaginary eigenvalues"};
}  // namespace styles

class SvgCanvas {
 public:
  explicit SvgCanvas(const Box& view, int width = 720, int height = 720);

  // Points outside the view or non-finite split the line; so do jumps
  // longer than max_jump (in view units).
  void polyline(const Polyline& pts, const StrokeStyle& style, double max_jump = 0.25);
  void dot(double x, double y, double radius, const std::string& fill);
  void title(const std::string& text);
  void legend(const std::vector<StrokeStyle>& entries);

  std::string str() const;
  void write(const std::string& path) const;
  std::size_t polyline_count() const { return lines_; }

 private:
  std::array<double, 2> map(double x, double y) const;
  void emit_run(const Polyline& run, const StrokeStyle& style);

  Box view_;
  int w_, h_;
  std::string body_;
  std::string overlay_;
  std::size_t lines_ = 0;
};

}  // namespace pfgeo
