#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fracdrift {

enum class PathKind { oBm, fBm, LevyfBm, derived };

std::string_view to_string(PathKind k);
PathKind path_kind_from_string(std::string_view s);

// Values on the uniform grid t0 + k dt, k = 0..size()-1.
struct GridPath {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> values;
  PathKind kind = PathKind::derived;

  std::size_t size() const noexcept { return values.size(); }
  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
  double back_time() const noexcept { return time(values.size() - 1); }

  // Index of the node at time t, or throws DomainError if t is not a grid node.
  std::size_t index_of(double t) const;

  // Throws DomainError when an invariant is violated.
  void validate() const;
};

// Sample of a function at arbitrary ascending times (outputs of the drift operators).
struct Trajectory {
  std::vector<double> times;
  std::vector<double> values;
};

// Formats x with 17 significant digits.
std::string format_double(double x);

void write_csv(std::ostream& os, const GridPath& p);
GridPath read_csv(std::istream& is, PathKind kind = PathKind::derived);
void write_csv(std::ostream& os, const Trajectory& tr);

nlohmann::json to_json(const GridPath& p);
GridPath grid_path_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Trajectory& tr);
Trajectory trajectory_from_json(const nlohmann::json& j);

}  // namespace fracdrift
