// Copyright 2026 The fnsup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fnsup/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace fnsup {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw InvalidParam("CsvTable: row has " + std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(header_.size()));
  }
  rows_.push_back(std::move(cells));
  return *this;
}

CsvTable& CsvTable::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(fmt(v));
  return row(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    out += "\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::string& path) const { write_text(path, str()); }

std::string grid_csv(const ImageGrid& g) {
  std::string out;
  for (Eigen::Index u = 0; u < g.rows(); ++u) {
    for (Eigen::Index v = 0; v < g.cols(); ++v) out += (v ? "," : "") + fmt(g(u, v));
    out += "\n";
  }
  return out;
}

namespace {

// Piecewise-linear dark-blue -> teal -> yellow ramp.
std::string ramp(double t) {
  static const double stops[3][3] = {{68, 1, 84}, {33, 145, 140}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0);
  const int seg = t < 0.5 ? 0 : 1;
  const double f = t < 0.5 ? t * 2 : (t - 0.5) * 2;
  char buf[16];
  int c[3];
  for (int i = 0; i < 3; ++i) {
    c[i] = static_cast<int>(std::lround(stops[seg][i] + f * (stops[seg + 1][i] - stops[seg][i])));
  }
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '<') out += "&lt;";
    else if (ch == '>') out += "&gt;";
    else if (ch == '&') out += "&amp;";
    else out += ch;
  }
  return out;
}

}  // namespace

std::string svg_heatmap(const ImageGrid& g, const std::string& title, bool log_scale) {
  const int cell = static_cast<int>(std::max<Eigen::Index>(2, 512 / std::max(g.rows(), g.cols())));
  const int w = static_cast<int>(g.cols()) * cell, h = static_cast<int>(g.rows()) * cell;
  ImageGrid t = g;
  if (log_scale) {
    const double floor = std::max(g.maxCoeff() * 1e-12, std::numeric_limits<double>::min());
    t = g.max(floor).log10();
  }
  const double lo = t.minCoeff(), hi = t.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
                    "\" height=\"" + std::to_string(h + 40) + "\">\n";
  out += "<text x=\"4\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">" + escape(title) +
         (log_scale ? " (log10)" : "") + " min " + fmt(lo) + " max " + fmt(hi) + "</text>\n";
  for (Eigen::Index u = 0; u < g.rows(); ++u) {
    for (Eigen::Index v = 0; v < g.cols(); ++v) {
      out += "<rect x=\"" + std::to_string(v * cell) + "\" y=\"" + std::to_string(24 + u * cell) +
             "\" width=\"" + std::to_string(cell) + "\" height=\"" + std::to_string(cell) +
             "\" fill=\"" + ramp((t(u, v) - lo) / span) + "\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

std::string svg_lines(const std::vector<SvgSeries>& series, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel) {
  const double W = 640, H = 400, L = 60, R = 20, T = 30, B = 50;
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  if (!(xhi > xlo)) xhi = xlo + 1, xlo -= 1;
  if (!(yhi > ylo)) yhi = ylo + 1, ylo -= 1;
  auto px = [&](double x) { return L + (x - xlo) / (xhi - xlo) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ylo) / (yhi - ylo) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
  out += "<text x=\"" + fmt(L) + "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" +
         escape(title) + "</text>\n";
  out += "<rect x=\"" + fmt(L) + "\" y=\"" + fmt(T) + "\" width=\"" + fmt(W - L - R) +
         "\" height=\"" + fmt(H - T - B) + "\" fill=\"none\" stroke=\"#888\"/>\n";
  out += "<text x=\"" + fmt(W / 2) + "\" y=\"" + fmt(H - 12) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" + escape(xlabel) +
         " [" + fmt(xlo) + ", " + fmt(xhi) + "]</text>\n";
  out += "<text x=\"12\" y=\"" + fmt(H / 2) +
         "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 12 " + fmt(H / 2) +
         ")\" text-anchor=\"middle\">" + escape(ylabel) + " [" + fmt(ylo) + ", " + fmt(yhi) +
         "]</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += (pts.empty() ? "" : " ") + fmt(px(s.x[i])) + "," + fmt(py(s.y[i]));
    }
    const std::string color = colors[k % 5];
    out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
    out += "<text x=\"" + fmt(L + 8) + "\" y=\"" + fmt(T + 16 + 14 * static_cast<double>(k)) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + color + "\">" +
           escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace fnsup
