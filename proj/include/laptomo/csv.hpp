// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace laptomo {

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double value);

/// Minimal CSV emitter: one header row, then typed value rows.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  template <typename... Ts>
  void row(const Ts&... values) {
    bool first = true;
    (write_cell(values, first), ...);
    out_ << '\n';
  }

 private:
  void write_cell(double v, bool& first);
  void write_cell(int v, bool& first);
  void write_cell(long v, bool& first);
  void write_cell(const std::string& v, bool& first);
  void write_cell(const char* v, bool& first);

  std::ofstream out_;
};

/// Reads a CSV file with a header row into per-column string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);

}  // namespace laptomo
