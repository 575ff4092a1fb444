#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lipfm/error.hpp"
#include "lipfm/experiments.hpp"

namespace lipfm {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIoError, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::kIoError, "write to '" + path + "' failed");
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  if (rows.empty()) fail(ErrorKind::kIoError, "refusing to write an empty sweep to '" + path + "'");
  std::string text = std::string(kSweepCsvHeader) + "\n";
  for (const auto& r : rows) {
    text += std::to_string(r.n) + ',' + format_real(r.t_hat) + ',' +
            std::to_string(r.quantile_index) + ',' + format_real(r.lip_hat_mean) + ',' +
            format_real(r.lip_hat_sd) + '\n';
  }
  write_text_file(path, text);
}

std::vector<SweepRow> read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIoError, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) {
    fail(ErrorKind::kIoError, "'" + path + "' lacks the sweep CSV header");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string f[5];
    for (auto& s : f) std::getline(fields, s, ',');
    try {
      rows.push_back({std::stoull(f[0]), std::stod(f[1]), std::stoull(f[2]), std::stod(f[3]),
                      std::stod(f[4])});
    } catch (const std::exception&) {
      fail(ErrorKind::kIoError, "malformed sweep row '" + line + "'");
    }
  }
  return rows;
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& path) {
  if (rows.empty()) fail(ErrorKind::kIoError, "refusing to write an empty sweep to '" + path + "'");
  std::string text = std::string(kConvergenceCsvHeader) + "\n";
  for (const auto& r : rows) text += std::to_string(r.n) + ',' + format_real(r.sup_error) + '\n';
  write_text_file(path, text);
}

namespace {

std::string xml_escape(const std::string& s) {
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

std::string render_svg_chart(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<ChartSeries>& series) {
  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!(s.x[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      const double lx = std::log10(s.x[i]);
      x0 = std::min(x0, lx);
      x1 = std::max(x1, lx);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double lx) { return kLeft + (lx - x0) / (x1 - x0) * (kW - kLeft - kRight); };
  auto py = [&](double y) { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::ostringstream svg;
  svg.precision(6);
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << xml_escape(title) << "</text>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight
      << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kH - kBottom << "\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(std::ceil(x0)); e <= static_cast<int>(std::floor(x1)); ++e) {
    svg << "<text x=\"" << px(e) << "\" y=\"" << kH - kBottom + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">1e" << e << "</text>\n";
  }
  for (double y : {y0, 0.5 * (y0 + y1), y1}) {
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(y) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << y << "</text>\n";
  }
  if (y0 < 0.0 && y1 > 0.0) {
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kW - kRight
        << "\" y2=\"" << py(0) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  svg << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << kH / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    svg << "<polyline fill=\"none\" stroke=\"" << kColors[k % 4] << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!(s.x[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      svg << (first ? "" : " ") << px(std::log10(s.x[i])) << ',' << py(s.y[i]);
      first = false;
    }
    svg << "\"><title>" << xml_escape(s.name) << "</title></polyline>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace lipfm
