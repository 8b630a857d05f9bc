#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "meyers/lab.hpp"

namespace meyers::lab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("config key '" + key + "': '" + s + "' is not a number");
  return v;
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config c;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    if (c.has(key)) throw ConfigError("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
    c.values_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  return parse(in);
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Config::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config key '" + key + "' is required");
  return it->second;
}

double Config::number(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number(key, it->second);
}

int Config::integer(const std::string& key, int fallback) const {
  const double v = number(key, fallback);
  if (v != static_cast<int>(v)) throw ConfigError("config key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::uint64_t Config::seed() const {
  const double v = number("seed", 1.0);
  if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::uint64_t>(v)))
    throw ConfigError("config key 'seed' must be a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

std::vector<double> Config::numbers(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split(it->second)) out.push_back(parse_number(key, item));
  if (out.empty()) throw ConfigError("config key '" + key + "' is an empty list");
  return out;
}

std::vector<int> Config::integers(const std::string& key, const std::vector<int>& fallback) const {
  std::vector<double> fb(fallback.begin(), fallback.end());
  std::vector<int> out;
  for (double v : numbers(key, fb)) {
    if (v != static_cast<int>(v)) throw ConfigError("config key '" + key + "' must list integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> Config::texts(const std::string& key, const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  auto out = split(it->second);
  if (out.empty()) throw ConfigError("config key '" + key + "' is an empty list");
  return out;
}

}  // namespace meyers::lab
