#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace meyers::lab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration; `#` starts a comment. Lists are
/// comma separated.
class Config {
 public:
  Config() = default;
  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& file);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string text(const std::string& key, const std::string& fallback) const;
  std::string text(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  std::uint64_t seed() const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> integers(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<std::string> texts(const std::string& key, const std::vector<std::string>& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// `%.17g`.
std::string format_number(double v);
/// `%g`, for labels.
std::string brief(double v);

/// CSV table of text cells with a fixed header.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// Throws std::invalid_argument when the cell count differs from the header.
  void add(std::vector<std::string> row);
  void append(const Table& other);

  int column(const std::string& name) const;
  std::string cell(std::size_t row, const std::string& name) const;
  double value(std::size_t row, const std::string& name) const;

  void write(std::ostream& out) const;
  static Table read(std::istream& in);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Builds a row from numbers and text.
class Row {
 public:
  Row& operator<<(double v);
  Row& operator<<(int v);
  Row& operator<<(const std::string& v);
  Row& operator<<(const char* v) { return *this << std::string(v); }
  std::vector<std::string> cells;
};

struct Verdict {
  std::string name;
  double value = 0.0;
  std::string requirement;  ///< e.g. "<= 1.3"
  bool pass = false;
  bool gating = true;  ///< informational verdicts do not affect the exit code
};

struct RunResult {
  std::string experiment;
  /// Output tables keyed by suffix; "" is the main table.
  std::map<std::string, Table> tables;
  std::vector<Verdict> verdicts;
  /// `cell: message` for every aborted cell.
  std::vector<std::string> aborted;

  bool passed() const;
};

const std::vector<std::string>& experiment_names();

/// Runs the configured experiment. Throws ConfigError for invalid configs.
RunResult run(const Config& config);

/// `<dir>/<experiment>.csv`, `<dir>/<experiment>_<suffix>.csv` and
/// `<dir>/<experiment>_verdicts.csv`.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

/// Verdicts recomputed from emitted tables alone.
std::vector<Verdict> evaluate(const std::string& experiment, const std::map<std::string, Table>& tables);

/// Table of verdicts: `verdict,value,requirement,pass,gating`.
Table verdict_table(const std::vector<Verdict>& verdicts);

/// Column layout of every experiment's tables, for --help.
std::string schema_help();

}  // namespace meyers::lab
