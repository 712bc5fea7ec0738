#pragma once

#include "acetrec/experiment.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace acetrec {

/// RFC 4180 field quoting (only when needed).
std::string csv_field(const std::string& value);

/// Header plus one row per record; wall time is the last column.
void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records);

struct BoxStats {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  std::size_t count = 0;
};

/// Quartiles by linear interpolation between order statistics.
BoxStats box_stats(std::vector<double> values);

/// Box plot of pooled per-vertex errors, one box per (level, strategy).
void write_error_boxplot_svg(std::ostream& out, const std::vector<RunRecord>& records);

}  // namespace acetrec
