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

#ifndef FNSUP_REPORT_HPP_
#define FNSUP_REPORT_HPP_

#include <string>
#include <vector>

#include "fnsup/grid.hpp"

namespace fnsup {

/// Fixed-format number for reports: up to 12 significant digits.
std::string fmt(double v);

/// Row-oriented CSV builder. Cells are written as given; use fmt() for
/// numbers so repeated runs produce identical bytes.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(std::vector<std::string> cells);
  CsvTable& row(const std::vector<double>& values);
  std::string str() const;
  void write(const std::string& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// U x V grid as CSV, one image row per line, no header.
std::string grid_csv(const ImageGrid& g);

/// Heatmap of a grid (log10 scale when `log_scale`), one rect per cell.
std::string svg_heatmap(const ImageGrid& g, const std::string& title, bool log_scale);

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Line chart of one or more series sharing axes.
std::string svg_lines(const std::vector<SvgSeries>& series, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel);

void write_text(const std::string& path, const std::string& text);

}  // namespace fnsup

#endif  // FNSUP_REPORT_HPP_
