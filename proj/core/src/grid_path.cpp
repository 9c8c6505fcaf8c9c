#include "fracdrift/grid_path.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "fracdrift/errors.hpp"

namespace fracdrift {

std::string_view to_string(PathKind k) {
  switch (k) {
    case PathKind::oBm: return "oBm";
    case PathKind::fBm: return "fBm";
    case PathKind::LevyfBm: return "LevyfBm";
    case PathKind::derived: return "derived";
  }
  return "derived";
}

PathKind path_kind_from_string(std::string_view s) {
  if (s == "oBm") return PathKind::oBm;
  if (s == "fBm") return PathKind::fBm;
  if (s == "LevyfBm") return PathKind::LevyfBm;
  if (s == "derived") return PathKind::derived;
  throw DomainError("unknown path kind '" + std::string(s) + "'");
}

std::size_t GridPath::index_of(double t) const {
  const double k = (t - t0) / dt;
  const double kr = std::round(k);
  if (std::abs(k - kr) > 1e-9 * std::max(1.0, std::abs(k)) || kr < 0 || kr >= static_cast<double>(size()))
    throw DomainError("time " + format_double(t) + " is not a node of the grid");
  return static_cast<std::size_t>(kr);
}

void GridPath::validate() const {
  if (values.empty()) throw DomainError("GridPath: values must be non-empty");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("GridPath: dt must be positive");
  if (!std::isfinite(t0)) throw DomainError("GridPath: t0 must be finite");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("GridPath: values contain NaN or Inf");
  if ((kind == PathKind::fBm || kind == PathKind::LevyfBm) && t0 == 0.0 && values[0] != 0.0)
    throw DomainError("GridPath: fBm and Levy fBm paths starting at t = 0 must start at 0");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& os, const GridPath& p) {
  os << "t,value\n";
  for (std::size_t k = 0; k < p.size(); ++k) os << format_double(p.time(k)) << ',' << format_double(p.values[k]) << '\n';
}

void write_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,value\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    os << format_double(tr.times[k]) << ',' << format_double(tr.values[k]) << '\n';
}

GridPath read_csv(std::istream& is, PathKind kind) {
  std::string line;
  std::vector<double> ts, vs;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && (line.find('t') != std::string::npos && line.find(',') != std::string::npos) &&
        !(line[0] >= '0' && line[0] <= '9') && line[0] != '-' && line[0] != '+' && line[0] != '.')
      continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw DomainError("CSV line " + std::to_string(lineno) + ": expected 't,value'");
    try {
      ts.push_back(std::stod(a));
      vs.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw DomainError("CSV line " + std::to_string(lineno) + ": not a number");
    }
  }
  if (ts.empty()) throw DomainError("CSV: no data rows");
  GridPath p;
  p.t0 = ts.front();
  p.dt = ts.size() > 1 ? (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1) : 1.0;
  for (std::size_t k = 1; k < ts.size(); ++k)
    if (std::abs(ts[k] - p.time(k)) > 1e-9 * std::max(1.0, std::abs(ts[k])))
      throw DomainError("CSV: times are not on a uniform grid (row " + std::to_string(k + 1) + ")");
  p.values = std::move(vs);
  p.kind = kind;
  p.validate();
  return p;
}

nlohmann::json to_json(const GridPath& p) {
  return nlohmann::json{{"t0", p.t0}, {"dt", p.dt}, {"kind", std::string(to_string(p.kind))}, {"values", p.values}};
}

GridPath grid_path_from_json(const nlohmann::json& j) {
  try {
    GridPath p;
    p.t0 = j.at("t0").get<double>();
    p.dt = j.at("dt").get<double>();
    p.kind = path_kind_from_string(j.at("kind").get<std::string>());
    p.values = j.at("values").get<std::vector<double>>();
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("GridPath JSON: ") + e.what());
  }
}

nlohmann::json to_json(const Trajectory& tr) {
  return nlohmann::json{{"times", tr.times}, {"values", tr.values}};
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  try {
    Trajectory tr;
    tr.times = j.at("times").get<std::vector<double>>();
    tr.values = j.at("values").get<std::vector<double>>();
    if (tr.times.size() != tr.values.size()) throw DomainError("Trajectory JSON: times and values differ in length");
    return tr;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("Trajectory JSON: ") + e.what());
  }
}

}  // namespace fracdrift
