#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "meyers/lab.hpp"

namespace meyers::lab {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void Table::add(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw std::invalid_argument("table row has " + std::to_string(row.size()) + " cells, header has " +
                                std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

void Table::append(const Table& other) {
  if (header_.empty() && rows_.empty()) header_ = other.header_;
  if (other.header_ != header_) throw std::invalid_argument("appending a table with a different header");
  for (const auto& r : other.rows_) rows_.push_back(r);
}

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return static_cast<int>(i);
  throw std::out_of_range("table has no column '" + name + "'");
}

std::string Table::cell(std::size_t row, const std::string& name) const {
  return rows_.at(row)[static_cast<std::size_t>(column(name))];
}

double Table::value(std::size_t row, const std::string& name) const {
  const std::string s = cell(row, name);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw std::invalid_argument("cell '" + s + "' in column " + name + " is not a number");
  return v;
}

namespace {
void write_line(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}
}  // namespace

void Table::write(std::ostream& out) const {
  write_line(out, header_);
  for (const auto& r : rows_) write_line(out, r);
}

Table Table::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Table t(split_line(line));
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    t.add(split_line(line));
  }
  return t;
}

Row& Row::operator<<(double v) {
  cells.push_back(format_number(v));
  return *this;
}

Row& Row::operator<<(int v) {
  cells.push_back(std::to_string(v));
  return *this;
}

Row& Row::operator<<(const std::string& v) {
  if (v.find_first_of(",\n") != std::string::npos) throw std::invalid_argument("CSV cell contains a separator: " + v);
  cells.push_back(v);
  return *this;
}

}  // namespace meyers::lab
