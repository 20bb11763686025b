#pragma once

#include <string>
#include <utility>
#include <vector>

namespace stitforest {

// %.17g: enough digits to round-trip the double exactly.
std::string fmt_full(double v);
// %.6g: for plot labels and log lines.
std::string fmt_short(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Writes to path + ".tmp" and renames into place, so failures never leave a
// partial file at the destination.
void write_csv_atomic(const std::string& path, const CsvTable& table);
void write_text_atomic(const std::string& path, const std::string& content);

struct LogLogSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (x, y), all positive
  double slope = 0.0;      // fitted log10-log10 line, drawn when finite
  double intercept = 0.0;  // log10 y at log10 x = 0
  bool draw_fit = false;
};

// Minimal self-contained log-log line chart with decade ticks.
void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<LogLogSeries>& series);

}  // namespace stitforest
