// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include "laptomo/csv.hpp"

#include <sstream>
#include <stdexcept>

namespace laptomo {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path) {
  if (!out_) {
    throw std::runtime_error("CsvWriter: cannot open " + path);
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::write_cell(double v, bool& first) {
  if (!first) out_ << ',';
  out_ << format_double(v);
  first = false;
}

void CsvWriter::write_cell(int v, bool& first) {
  if (!first) out_ << ',';
  out_ << v;
  first = false;
}

void CsvWriter::write_cell(long v, bool& first) {
  if (!first) out_ << ',';
  out_ << v;
  first = false;
}

void CsvWriter::write_cell(const std::string& v, bool& first) {
  if (!first) out_ << ',';
  out_ << v;
  first = false;
}

void CsvWriter::write_cell(const char* v, bool& first) {
  if (!first) out_ << ',';
  out_ << v;
  first = false;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_csv: cannot open " + path);
  }
  CsvTable table;
  std::string line;
  bool in_header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
    }
    if (in_header) {
      table.header = std::move(cells);
      in_header = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace laptomo
