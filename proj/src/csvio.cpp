#include "stitforest/csvio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stitforest/errors.hpp"

namespace stitforest {

std::string fmt_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + tmp);
    out << content;
    if (!out) throw IoError("failed writing file: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move output into place: " + ec.message());
}

void write_csv_atomic(const std::string& path, const CsvTable& table) {
  std::ostringstream out;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    out << (c ? "," : "") << table.header[c];
  out << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw IoError("csv row width does not match the header");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
  write_text_atomic(path, out.str());
}

namespace {

struct Frame {
  double x0 = 80, y0 = 40, w = 520, h = 380;  // plot area in a 680x500 canvas
  double lx_min = 0, lx_max = 1, ly_min = 0, ly_max = 1;

  double px(double lx) const { return x0 + (lx - lx_min) / (lx_max - lx_min) * w; }
  double py(double ly) const { return y0 + h - (ly - ly_min) / (ly_max - ly_min) * h; }
};

const char* kSeriesColors[] = {"#1f5fa8", "#c2452d", "#3a8f4d", "#8252a1"};

}  // namespace

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<LogLogSeries>& series) {
  double lx_min = 1e300, lx_max = -1e300, ly_min = 1e300, ly_max = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0)) throw IoError("log-log plot needs positive coordinates");
      lx_min = std::min(lx_min, std::log10(x));
      lx_max = std::max(lx_max, std::log10(x));
      ly_min = std::min(ly_min, std::log10(y));
      ly_max = std::max(ly_max, std::log10(y));
    }
  if (lx_min > lx_max) throw IoError("log-log plot needs at least one point");
  const double pad_x = std::max(0.05 * (lx_max - lx_min), 0.1);
  const double pad_y = std::max(0.05 * (ly_max - ly_min), 0.1);
  Frame f;
  f.lx_min = lx_min - pad_x;
  f.lx_max = lx_max + pad_x;
  f.ly_min = ly_min - pad_y;
  f.ly_max = ly_max + pad_y;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"680\" height=\"500\" "
         "viewBox=\"0 0 680 500\">\n";
  svg << "<rect width=\"680\" height=\"500\" fill=\"white\"/>\n";
  svg << "<text x=\"340\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">"
      << title << "</text>\n";
  svg << "<rect x=\"" << f.x0 << "\" y=\"" << f.y0 << "\" width=\"" << f.w << "\" height=\""
      << f.h << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // decade ticks with light grid lines
  for (int e = static_cast<int>(std::ceil(f.lx_min)); e <= static_cast<int>(std::floor(f.lx_max));
       ++e) {
    const double px = f.px(e);
    svg << "<line x1=\"" << px << "\" y1=\"" << f.y0 << "\" x2=\"" << px << "\" y2=\""
        << f.y0 + f.h << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << f.y0 + f.h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">1e" << e
        << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(f.ly_min)); e <= static_cast<int>(std::floor(f.ly_max));
       ++e) {
    const double py = f.py(e);
    svg << "<line x1=\"" << f.x0 << "\" y1=\"" << py << "\" x2=\"" << f.x0 + f.w << "\" y2=\""
        << py << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << f.x0 - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e" << e
        << "</text>\n";
  }
  svg << "<text x=\"" << f.x0 + f.w / 2 << "\" y=\"488\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\">"
      << x_label << "</text>\n";
  svg << "<text x=\"20\" y=\"" << f.y0 + f.h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 20 "
      << f.y0 + f.h / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kSeriesColors[si % 4];
    if (s.draw_fit) {
      const double y1 = s.intercept + s.slope * f.lx_min;
      const double y2 = s.intercept + s.slope * f.lx_max;
      svg << "<line x1=\"" << f.px(f.lx_min) << "\" y1=\"" << f.py(y1) << "\" x2=\""
          << f.px(f.lx_max) << "\" y2=\"" << f.py(y2) << "\" stroke=\"" << color
          << "\" stroke-dasharray=\"5,4\" stroke-width=\"1\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points)
      svg << f.px(std::log10(x)) << "," << f.py(std::log10(y)) << " ";
    svg << "\"/>\n";
    for (const auto& [x, y] : s.points)
      svg << "<circle cx=\"" << f.px(std::log10(x)) << "\" cy=\"" << f.py(std::log10(y))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    std::string label = s.name;
    if (s.draw_fit) label += " (slope " + fmt_short(s.slope) + ")";
    svg << "<text x=\"" << f.x0 + 10 << "\" y=\"" << f.y0 + 18 + 18 * static_cast<double>(si)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">" << label
        << "</text>\n";
  }
  svg << "</svg>\n";
  write_text_atomic(path, svg.str());
}

}  // namespace stitforest
