#ifndef MDLNMF_REPORT_HPP
#define MDLNMF_REPORT_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "csv.hpp"
#include "errors.hpp"
#include "svg.hpp"

namespace mdlnmf {

struct ScatterRow {
  std::string method;
  std::string variant;
  double noise_sigma = 0.0;
  int r_gen = 0;
  int r_fit = 0;
  std::uint64_t seed = 0;
  double true_error = 0.0;
  double noise_error = 0.0;
  double final_bits = 0.0;
};

inline const char* scatter_header() {
  return "method,variant,noise_sigma,r_gen,r_fit,seed,true_error,noise_error,final_bits";
}

inline void save_scatter(const std::filesystem::path& path,
                         const std::vector<ScatterRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << scatter_header() << "\n";
  for (const ScatterRow& r : rows) {
    out << r.method << ',' << r.variant << ',' << detail::format_double(r.noise_sigma)
        << ',' << r.r_gen << ',' << r.r_fit << ',' << r.seed << ','
        << detail::format_double(r.true_error) << ','
        << detail::format_double(r.noise_error) << ','
        << detail::format_double(r.final_bits) << "\n";
  }
}

inline std::vector<ScatterRow> load_scatter(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open " + path.string());
  std::string line;
  std::vector<ScatterRow> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    if (line_no == 1) continue;  // header
    const auto f = detail::split_line(line, ',');
    if (f.size() != 9) throw RaggedRowsError(line_no, 9, f.size());
    const auto num = [&](std::size_t i) {
      const auto v = detail::parse_double(f[i]);
      if (!v) throw ParseError(line_no, "cannot parse '" + f[i] + "'");
      return *v;
    };
    ScatterRow r;
    r.method = f[0];
    r.variant = f[1];
    r.noise_sigma = num(2);
    r.r_gen = static_cast<int>(num(3));
    r.r_fit = static_cast<int>(num(4));
    r.seed = static_cast<std::uint64_t>(num(5));
    r.true_error = num(6);
    r.noise_error = num(7);
    r.final_bits = num(8);
    rows.push_back(std::move(r));
  }
  if (rows.empty())
    throw MissingInputError(path.string() + " has no data rows");
  return rows;
}

namespace detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors = {
      "steelblue", "firebrick", "seagreen", "darkorange", "purple", "teal"};
  return colors;
}

}  // namespace detail

struct ReportSpec {
  std::filesystem::path input_dir;
  std::filesystem::path out_dir;
};

inline void write_trace_curves(const std::filesystem::path& trace_csv,
                               const std::filesystem::path& out_svg);

// True-vs-noise scatter with the y=x reference, per-method medians against
// the noise level, and one curves file per normalized trace found.
inline void run_report(const ReportSpec& spec) {
  namespace fs = std::filesystem;
  const auto rows = load_scatter(spec.input_dir / "scatter.csv");
  fs::create_directories(spec.out_dir);

  // Summary: a result below the diagonal recovered signal better than noise.
  std::map<std::string, std::pair<long, long>> below_by_method;  // below, total
  long below_total = 0;
  for (const ScatterRow& r : rows) {
    auto& [below, total] = below_by_method[r.method];
    ++total;
    if (r.true_error < r.noise_error) {
      ++below;
      ++below_total;
    }
  }
  {
    std::ofstream out(spec.out_dir / "report_summary.txt");
    out << "runs=" << rows.size() << "\n";
    out << "fraction_below_diagonal=" << detail::format_double(static_cast<double>(below_total) / rows.size()) << "\n";
    for (const auto& [method, counts] : below_by_method)
      out << "fraction_below_diagonal[" << method << "]="
          << detail::format_double(static_cast<double>(counts.first) / counts.second) << "\n";
  }

  // Scatter plot, log-log.
  {
    double lo = 1e300, hi = -1e300;
    for (const ScatterRow& r : rows) {
      for (double v : {r.true_error, r.noise_error}) {
        const double c = std::max(v, 1e-12);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
    }
    if (hi <= lo) hi = lo * 10.0;
    PlotFrame frame;
    frame.x_min = lo; frame.x_max = hi; frame.y_min = lo; frame.y_max = hi;
    frame.log_x = frame.log_y = true;
    SvgCanvas svg(frame.width, frame.height);
    frame.draw_axes(svg, "noise error", "true error");
    svg.line(frame.tx(lo), frame.ty(lo), frame.tx(hi), frame.ty(hi), "gray", 1.0, true);
    std::map<std::string, std::string> color_of;
    for (const ScatterRow& r : rows) {
      auto [it, inserted] = color_of.try_emplace(
          r.method, detail::palette()[color_of.size() % detail::palette().size()]);
      svg.circle(frame.tx(std::max(r.noise_error, 1e-12)),
                 frame.ty(std::max(r.true_error, 1e-12)), 3.0, it->second);
    }
    double y = 20.0;
    for (const auto& [method, color] : color_of) {
      svg.text(frame.width - 110, y, method, 11, color);
      y += 14.0;
    }
    svg.save(spec.out_dir / "scatter.svg");
  }

  // Median true error against noise level, per method.
  {
    std::map<std::string, std::map<double, std::vector<double>>> series;
    for (const ScatterRow& r : rows) series[r.method][r.noise_sigma].push_back(r.true_error);
    std::ofstream out(spec.out_dir / "noise_curve.csv");
    out << "method,noise_sigma,median_true_error,runs\n";
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    std::map<std::string, std::vector<std::pair<double, double>>> curves;
    for (const auto& [method, by_noise] : series) {
      for (const auto& [noise, values] : by_noise) {
        const double med = detail::median(values);
        out << method << ',' << detail::format_double(noise) << ','
            << detail::format_double(med) << ',' << values.size() << "\n";
        curves[method].emplace_back(noise, med);
        x_lo = std::min(x_lo, noise); x_hi = std::max(x_hi, noise);
        y_lo = std::min(y_lo, med); y_hi = std::max(y_hi, med);
      }
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    if (y_hi <= y_lo) y_hi = y_lo + 1.0;
    PlotFrame frame;
    frame.x_min = x_lo; frame.x_max = x_hi;
    frame.y_min = 0.0; frame.y_max = y_hi * 1.05;
    SvgCanvas svg(frame.width, frame.height);
    frame.draw_axes(svg, "noise level", "median true error");
    std::size_t idx = 0;
    double y = 20.0;
    for (auto& [method, pts] : curves) {
      const std::string& color = detail::palette()[idx++ % detail::palette().size()];
      std::vector<std::pair<double, double>> mapped;
      for (auto [nx, ny] : pts) mapped.emplace_back(frame.tx(nx), frame.ty(ny));
      svg.polyline(mapped, color);
      svg.text(frame.width - 110, y, method, 11, color);
      y += 14.0;
    }
    svg.save(spec.out_dir / "noise_curve.svg");
  }

  // One curves plot per normalized trace below the input directory.
  std::vector<fs::path> traces;
  for (const auto& entry : fs::recursive_directory_iterator(spec.input_dir))
    if (entry.is_regular_file() && entry.path().filename() == "trace_normalized.csv")
      traces.push_back(entry.path());
  std::sort(traces.begin(), traces.end());
  for (const fs::path& t : traces) {
    const std::string stem = t.parent_path().filename().string();
    write_trace_curves(t, spec.out_dir / (stem.empty() ? "trace_curves.svg" : stem + "_curves.svg"));
  }
}

// Renders every numeric column of a trace CSV (except iteration/accepted)
// as one polyline over iterations.
inline void write_trace_curves(const std::filesystem::path& trace_csv,
                               const std::filesystem::path& out_svg) {
  std::ifstream in(trace_csv);
  if (!in) throw MissingInputError("cannot open " + trace_csv.string());
  std::string line;
  if (!std::getline(in, line)) throw MissingInputError(trace_csv.string() + " is empty");
  const auto header = detail::split_line(line, ',');
  std::vector<std::size_t> series_cols;
  std::size_t iter_col = 0;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "iteration") iter_col = i;
    else if (header[i] != "accepted") series_cols.push_back(i);
  }
  std::vector<double> iterations;
  std::vector<std::vector<double>> series(series_cols.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_line(line, ',');
    if (f.size() != header.size()) throw RaggedRowsError(line_no, header.size(), f.size());
    const auto num = [&](std::size_t i) {
      const auto v = detail::parse_double(f[i]);
      if (!v) throw ParseError(line_no, "cannot parse '" + f[i] + "'");
      return *v;
    };
    iterations.push_back(num(iter_col));
    for (std::size_t s = 0; s < series_cols.size(); ++s) series[s].push_back(num(series_cols[s]));
  }
  if (iterations.empty()) throw MissingInputError(trace_csv.string() + " has no data rows");

  double y_lo = 1e300, y_hi = -1e300;
  for (const auto& s : series)
    for (double v : s) {
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  PlotFrame frame;
  frame.x_min = iterations.front();
  frame.x_max = std::max(iterations.back(), iterations.front() + 1.0);
  frame.y_min = y_lo;
  frame.y_max = y_hi;
  SvgCanvas svg(frame.width, frame.height);
  frame.draw_axes(svg, "iteration", "normalized value");
  double label_y = 20.0;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const std::string& color = detail::palette()[s % detail::palette().size()];
    std::vector<std::pair<double, double>> pts;
    pts.reserve(iterations.size());
    for (std::size_t i = 0; i < iterations.size(); ++i)
      pts.emplace_back(frame.tx(iterations[i]), frame.ty(series[s][i]));
    svg.polyline(pts, color);
    svg.text(frame.width - 140, label_y, header[series_cols[s]], 11, color);
    label_y += 14.0;
  }
  svg.save(out_svg);
}

}  // namespace mdlnmf

#endif  // MDLNMF_REPORT_HPP
