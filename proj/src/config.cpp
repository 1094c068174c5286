#include "pstokes/config.hpp"
#include "pstokes/time_stepping.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace pstokes {

namespace {

std::string trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text)
{
  const std::string s = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("config: bad value for '" + key + "': '" + text + "'");
  return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text)
{
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_number<T>(key, item));
  if (out.empty())
    throw ConfigError("config: empty list for '" + key + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& text)
{
  const std::string s = trim(text);
  if (s == "true" || s == "1")
    return true;
  if (s == "false" || s == "0")
    return false;
  throw ConfigError("config: bad boolean for '" + key + "': '" + text + "'");
}

// Shortest decimal text that reads back to the same double.
std::string exact(double v)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T>
std::string join(const std::vector<T>& values)
{
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i)
      out += ',';
    if constexpr (std::is_floating_point_v<T>)
      out += exact(values[i]);
    else
      out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

double StudyConfig::dt_for_level(std::size_t index) const
{
  if (!dt_list.empty())
    return dt_list.at(index);
  const double h = std::sqrt(2.0) / levels.at(index);
  return dt_couple * std::pow(h, std::min(1.0, 2.0 / p));
}

void StudyConfig::validate() const
{
  if (!(p > 1.0))
    throw ConfigError("config: p must exceed 1");
  if (!(delta >= 0.0 && delta <= 1.0))
    throw ConfigError("config: delta must lie in [0, 1]");
  if (levels.empty())
    throw ConfigError("config: no mesh levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const int n = levels[i];
    if (n < 1 || (n & (n - 1)) != 0)
      throw ConfigError("config: mesh level " + std::to_string(n) + " is not a power of 2");
    if (i > 0 && !(n > levels[i - 1]))
      throw ConfigError("config: mesh levels must increase strictly");
  }
  if (!dt_list.empty() && dt_list.size() != levels.size())
    throw ConfigError("config: dt_list needs one entry per level");
  if (dt_list.empty() && !(dt_couple > 0.0))
    throw ConfigError("config: dt_couple must be positive");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double dt = dt_for_level(i);
    if (!(dt > 0.0 && dt < kMaxTimeStep))
      throw ConfigError("config: dt = " + exact(dt) + " outside (0, 0.5)");
  }
  for (double dt : temporal_dts)
    if (!(dt > 0.0 && dt < kMaxTimeStep))
      throw ConfigError("config: temporal dt = " + exact(dt) + " outside (0, 0.5)");
  if (!(temporal_ref_dt > 0.0 && temporal_ref_dt < kMaxTimeStep))
    throw ConfigError("config: temporal_ref_dt outside (0, 0.5)");
  if (!(t_end > 0.0) || !(temporal_t_end > 0.0))
    throw ConfigError("config: end times must be positive");
  if (!(tol > 0.0))
    throw ConfigError("config: tol must be positive");
  if (jobs < 1)
    throw ConfigError("config: jobs must be at least 1");
  if (temporal_n < 1 || (temporal_n & (temporal_n - 1)) != 0)
    throw ConfigError("config: temporal_n must be a power of 2");
  if (solution.empty() || out.empty())
    throw ConfigError("config: solution and out must be non-empty");
}

void StudyConfig::set(const std::string& key, const std::string& value)
{
  if (key == "p")
    p = parse_number<double>(key, value);
  else if (key == "delta")
    delta = parse_number<double>(key, value);
  else if (key == "levels")
    levels = parse_list<int>(key, value);
  else if (key == "dt_couple")
    dt_couple = parse_number<double>(key, value);
  else if (key == "dt_list")
    dt_list = trim(value).empty() ? std::vector<double>{} : parse_list<double>(key, value);
  else if (key == "T")
    t_end = parse_number<double>(key, value);
  else if (key == "solution")
    solution = trim(value);
  else if (key == "tol")
    tol = parse_number<double>(key, value);
  else if (key == "out")
    out = trim(value);
  else if (key == "jobs")
    jobs = parse_number<int>(key, value);
  else if (key == "seed")
    seed = parse_number<std::uint64_t>(key, value);
  else if (key == "timing")
    timing = parse_bool(key, value);
  else if (key == "temporal_n")
    temporal_n = parse_number<int>(key, value);
  else if (key == "temporal_T")
    temporal_t_end = parse_number<double>(key, value);
  else if (key == "temporal_dts")
    temporal_dts = parse_list<double>(key, value);
  else if (key == "temporal_ref_dt")
    temporal_ref_dt = parse_number<double>(key, value);
  else
    throw ConfigError("config: unknown key '" + key + "'");
}

StudyConfig StudyConfig::parse(std::istream& is)
{
  StudyConfig c;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    if (trim(line).empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(number) + " has no '='");
    c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

StudyConfig StudyConfig::parse_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config: cannot open " + path);
  return parse(in);
}

void StudyConfig::serialize(std::ostream& os) const
{
  os << "p = " << exact(p) << '\n'
     << "delta = " << exact(delta) << '\n'
     << "levels = " << join(levels) << '\n'
     << "dt_couple = " << exact(dt_couple) << '\n'
     << "dt_list = " << join(dt_list) << '\n'
     << "T = " << exact(t_end) << '\n'
     << "solution = " << solution << '\n'
     << "tol = " << exact(tol) << '\n'
     << "out = " << out << '\n'
     << "jobs = " << jobs << '\n'
     << "seed = " << seed << '\n'
     << "timing = " << (timing ? "true" : "false") << '\n'
     << "temporal_n = " << temporal_n << '\n'
     << "temporal_T = " << exact(temporal_t_end) << '\n'
     << "temporal_dts = " << join(temporal_dts) << '\n'
     << "temporal_ref_dt = " << exact(temporal_ref_dt) << '\n';
}

}  // namespace pstokes
