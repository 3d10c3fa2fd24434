#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace brth {

// One uniformly spaced coordinate axis. Endpoints are met exactly:
// coord(0) == min, coord(count-1) == max, and interior nodes are computed as
// min + i*(max-min)/(count-1) so there is no cumulative drift.
struct Axis {
  std::string name;  // one of t, x, y, z, r
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  double spacing() const { return (max - min) / static_cast<double>(count - 1); }
  double coord(std::size_t i) const {
    if (i == 0) return min;
    if (i + 1 == count) return max;
    return min + (static_cast<double>(i) * (max - min)) / static_cast<double>(count - 1);
  }
};

// Rectangular spacetime lattice, at most four axes, row-major with the last
// axis fastest. Immutable after construction.
class SpacetimeGrid {
 public:
  explicit SpacetimeGrid(std::vector<Axis> axes);

  std::size_t rank() const { return axes_.size(); }
  std::size_t size() const { return size_; }
  const Axis& axis(std::size_t i) const { return axes_[i]; }
  const std::vector<Axis>& axes() const { return axes_; }

  std::optional<std::size_t> axis_index(std::string_view name) const;
  bool has_axis(std::string_view name) const { return axis_index(name).has_value(); }

  std::size_t stride(std::size_t axis) const { return strides_[axis]; }

  void unflatten(std::size_t flat, std::span<std::size_t> idx) const;
  std::size_t flatten(std::span<const std::size_t> idx) const;
  // Coordinates of a node, in axis order. coords.size() must be >= rank().
  void point(std::size_t flat, std::span<double> coords) const;
  // True when every index is at least one node away from each axis boundary.
  bool is_interior(std::size_t flat) const;

  // Product of per-axis cell sizes; the measure used by volume-weighted norms.
  double cell_volume() const;

  friend bool operator==(const SpacetimeGrid& a, const SpacetimeGrid& b);

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

SpacetimeGrid build_grid(std::vector<Axis> axes);

}  // namespace brth
