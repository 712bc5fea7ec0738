#include "acetrec/report.hpp"

#include "acetrec/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace acetrec {

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "level,run,strategy,seed,initial_mae_mm,mae_mm,sd_mm,cup_diameter_mm,target_cup_diameter_mm,"
         "outer_iterations,gn_iterations,recorrespondences,converged,failed,message,wall_time_s\r\n";
  for (const auto& r : records) {
    out << fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{},{},{},{},{},{:.3f}\r\n", r.level, r.run,
                       to_string(r.strategy), r.seed, r.initial_mae, r.mae, r.sd, r.cup_diameter,
                       r.target_cup_diameter, r.outer_iterations, r.gn_iterations, r.recorrespondences,
                       r.converged ? 1 : 0, r.failed ? 1 : 0, csv_field(r.message), r.wall_time);
  }
}

BoxStats box_stats(std::vector<double> values) {
  BoxStats s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.min = values.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = values.back();
  return s;
}

void write_error_boxplot_svg(std::ostream& out, const std::vector<RunRecord>& records) {
  std::map<std::pair<int, int>, std::vector<double>> pooled;  // (level, strategy)
  for (const auto& r : records) {
    auto& bucket = pooled[{r.level, static_cast<int>(r.strategy)}];
    bucket.insert(bucket.end(), r.errors.begin(), r.errors.end());
  }
  std::vector<std::pair<std::string, BoxStats>> boxes;
  double top = 1.0;
  for (const auto& [key, values] : pooled) {
    const BoxStats s = box_stats(values);
    boxes.emplace_back(fmt::format("L{} {}", key.first, to_string(static_cast<StrategyTag>(key.second))), s);
    top = std::max(top, s.max);
  }
  top = std::ceil(top);

  const double left = 60.0, plot_h = 300.0, pad_top = 30.0, box_w = 40.0, gap = 30.0;
  const double width = left + static_cast<double>(boxes.size()) * (box_w + gap) + gap;
  const double height = pad_top + plot_h + 90.0;
  auto y = [&](double v) { return pad_top + plot_h * (1.0 - v / top); };

  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n",
      width, height);
  out << fmt::format("<text x=\"{:.1f}\" y=\"16\" font-size=\"13\">Per-vertex error (mm)</text>\n", left);
  out << fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n", left,
                     y(top), y(0.0));
  for (int t = 0; t <= 5; ++t) {
    const double v = top * t / 5.0;
    out << fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#ccc\"/>"
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.1f}</text>\n",
        left, y(v), width - gap / 2, y(v), left - 4, y(v) + 4, v);
  }
  double x = left + gap;
  for (const auto& [label, s] : boxes) {
    const double cx = x + box_w / 2;
    if (s.count > 0) {
      out << fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.2f}\" x2=\"{0:.1f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n",
                         cx, y(s.max), y(s.min));
      out << fmt::format(
          "<rect x=\"{:.1f}\" y=\"{:.2f}\" width=\"{:.1f}\" height=\"{:.2f}\" fill=\"#9ecae1\" stroke=\"black\"/>\n", x,
          y(s.q3), box_w, std::max(0.0, y(s.q1) - y(s.q3)));
      out << fmt::format(
          "<line x1=\"{:.1f}\" y1=\"{:.2f}\" x2=\"{:.1f}\" y2=\"{:.2f}\" stroke=\"black\" stroke-width=\"2\"/>\n", x,
          y(s.median), x + box_w, y(s.median));
    }
    out << fmt::format(
        "<text x=\"{0:.1f}\" y=\"{1:.1f}\" transform=\"rotate(45 {0:.1f} {1:.1f})\">{2}</text>\n", x,
        pad_top + plot_h + 14, label);
    x += box_w + gap;
  }
  out << "</svg>\n";
}

}  // namespace acetrec
