#include "pfgeo/svg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pfgeo {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

SvgCanvas::SvgCanvas(const Box& view, int width, int height) : view_(view), w_(width), h_(height) {
  if (!(view.xmax > view.xmin) || !(view.ymax > view.ymin)) throw std::invalid_argument("empty view box");
}

std::array<double, 2> SvgCanvas::map(double x, double y) const {
  double u = (x - view_.xmin) / (view_.xmax - view_.xmin) * w_;
  double v = (view_.ymax - y) / (view_.ymax - view_.ymin) * h_;
  return {u, v};
}

void SvgCanvas::emit_run(const Polyline& run, const StrokeStyle& style) {
  if (run.size() < 2) return;
  std::string pts;
  std::array<double, 2> last{NAN, NAN};
  for (const auto& p : run) {
    auto q = map(p[0], p[1]);
    // Skip points that land on the same output pixel hundredth.
    if (num(q[0]) == num(last[0]) && num(q[1]) == num(last[1])) continue;
    if (!pts.empty()) pts += ' ';
    pts += num(q[0]) + ',' + num(q[1]);
    last = q;
  }
  body_ += "<polyline fill=\"none\" stroke=\"" + style.color + "\" stroke-width=\"" + num(style.width) + "\"";
  if (!style.dash.empty()) body_ += " stroke-dasharray=\"" + style.dash + "\"";
  body_ += " points=\"" + pts + "\"/>\n";
  ++lines_;
}

void SvgCanvas::polyline(const Polyline& pts, const StrokeStyle& style, double max_jump) {
  double span = std::max(view_.xmax - view_.xmin, view_.ymax - view_.ymin);
  Polyline run;
  for (const auto& p : pts) {
    bool ok = std::isfinite(p[0]) && std::isfinite(p[1]) && view_.contains(p[0], p[1]);
    if (ok && !run.empty() &&
        std::hypot(p[0] - run.back()[0], p[1] - run.back()[1]) > max_jump * span) {
      emit_run(run, style);
      run.clear();
    }
    if (ok) {
      run.push_back(p);
    } else {
      emit_run(run, style);
      run.clear();
    }
  }
  emit_run(run, style);
}

void SvgCanvas::dot(double x, double y, double radius, const std::string& fill) {
  if (!view_.contains(x, y)) return;
  auto q = map(x, y);
  body_ += "<circle cx=\"" + num(q[0]) + "\" cy=\"" + num(q[1]) + "\" r=\"" + num(radius) +
           "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::title(const std::string& text) {
  overlay_ += "<text x=\"8\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" + escape(text) +
              "</text>\n";
}

void SvgCanvas::legend(const std::vector<StrokeStyle>& entries) {
  double y = h_ - 14.0 * static_cast<double>(entries.size()) - 6.0;
  overlay_ += "<rect x=\"" + num(w_ - 170.0) + "\" y=\"" + num(y - 12) + "\" width=\"164\" height=\"" +
              num(14.0 * entries.size() + 10) + "\" fill=\"#ffffff\" fill-opacity=\"0.85\" stroke=\"#999999\"/>\n";
  for (const auto& s : entries) {
    overlay_ += "<line x1=\"" + num(w_ - 162.0) + "\" y1=\"" + num(y - 4) + "\" x2=\"" + num(w_ - 122.0) +
                "\" y2=\"" + num(y - 4) + "\" stroke=\"" + s.color + "\" stroke-width=\"" + num(s.width) + "\"";
    if (!s.dash.empty()) overlay_ += " stroke-dasharray=\"" + s.dash + "\"";
    overlay_ += "/>\n<text x=\"" + num(w_ - 114.0) + "\" y=\"" + num(y) +
                "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(s.label) + "</text>\n";
    y += 14.0;
  }
}

std::string SvgCanvas::str() const {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(w_) +
       "\" height=\"" + std::to_string(h_) + "\" viewBox=\"0 0 " + std::to_string(w_) + " " +
       std::to_string(h_) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  s += body_;
  s += overlay_;
  s += "</svg>\n";
  return s;
}

void SvgCanvas::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << str();
}

}  // namespace pfgeo
