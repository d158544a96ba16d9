#ifndef MDLNMF_SVG_HPP
#define MDLNMF_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace mdlnmf {

// Just enough hand-rolled SVG to plot curves and scatters without a
// rendering dependency.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height) : width_(width), height_(height) {
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
             "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
             num(height) + "\">\n";
    body_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& color,
            double stroke = 1.0, bool dashed = false) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
             "\" y2=\"" + num(y2) + "\" stroke=\"" + color + "\" stroke-width=\"" +
             num(stroke) + "\"" + (dashed ? " stroke-dasharray=\"5,4\"" : "") + "/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& color) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
             "\" fill=\"" + color + "\" fill-opacity=\"0.7\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& points,
                const std::string& color, double stroke = 1.5) {
    body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
             num(stroke) + "\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i) body_ += " ";
      body_ += num(points[i].first) + "," + num(points[i].second);
    }
    body_ += "\"/>\n";
  }

  void text(double x, double y, const std::string& content, double size = 11.0,
            const std::string& color = "black") {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
             "\" font-family=\"sans-serif\" fill=\"" + color + "\">" + escape(content) +
             "</text>\n";
  }

  double width() const { return width_; }
  double height() const { return height_; }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << body_ << "</svg>\n";
  }

 private:
  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '<') out += "&lt;";
      else if (c == '>') out += "&gt;";
      else if (c == '&') out += "&amp;";
      else out += c;
    }
    return out;
  }

  double width_;
  double height_;
  std::string body_;
};

// Maps data coordinates into a margined plot box, optionally log10 on each axis.
struct PlotFrame {
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  double left = 55, right = 15, top = 15, bottom = 40;
  double width = 480, height = 360;
  bool log_x = false, log_y = false;

  double tx(double x) const {
    const double a = log_x ? std::log10(x) : x;
    const double lo = log_x ? std::log10(x_min) : x_min;
    const double hi = log_x ? std::log10(x_max) : x_max;
    const double span = hi - lo;
    return left + (span == 0.0 ? 0.5 : (a - lo) / span) * (width - left - right);
  }

  double ty(double y) const {
    const double a = log_y ? std::log10(y) : y;
    const double lo = log_y ? std::log10(y_min) : y_min;
    const double hi = log_y ? std::log10(y_max) : y_max;
    const double span = hi - lo;
    return height - bottom - (span == 0.0 ? 0.5 : (a - lo) / span) * (height - top - bottom);
  }

  void draw_axes(SvgCanvas& svg, const std::string& x_label,
                 const std::string& y_label) const {
    svg.line(left, height - bottom, width - right, height - bottom, "black");
    svg.line(left, top, left, height - bottom, "black");
    svg.text((left + width - right) / 2 - 30, height - 8, x_label);
    svg.text(8, top + 10, y_label);
  }
};

}  // namespace mdlnmf

#endif  // MDLNMF_SVG_HPP
