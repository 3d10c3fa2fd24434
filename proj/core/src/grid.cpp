#include "brth/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace brth {

namespace {

constexpr std::array<std::string_view, 5> kAxisNames = {"t", "x", "y", "z", "r"};

}  // namespace

SpacetimeGrid::SpacetimeGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 4)
    throw std::invalid_argument("SpacetimeGrid: between 1 and 4 axes required");
  for (const Axis& ax : axes_) {
    if (std::find(kAxisNames.begin(), kAxisNames.end(), ax.name) == kAxisNames.end())
      throw std::invalid_argument("SpacetimeGrid: unknown axis name '" + ax.name + "'");
    if (ax.count < 4)
      throw std::invalid_argument("SpacetimeGrid: axis '" + ax.name +
                                  "' needs at least 4 points");
    if (!(ax.max > ax.min))
      throw std::invalid_argument("SpacetimeGrid: axis '" + ax.name + "' has max <= min");
    if (!std::isfinite(ax.min) || !std::isfinite(ax.max))
      throw std::invalid_argument("SpacetimeGrid: axis '" + ax.name + "' has non-finite bounds");
    if (ax.name == "r" && ax.min < 0.0)
      throw std::invalid_argument("SpacetimeGrid: radial axis must start at r >= 0");
  }
  for (std::size_t i = 0; i < axes_.size(); ++i)
    for (std::size_t j = i + 1; j < axes_.size(); ++j)
      if (axes_[i].name == axes_[j].name)
        throw std::invalid_argument("SpacetimeGrid: duplicate axis '" + axes_[i].name + "'");

  strides_.assign(axes_.size(), 1);
  size_ = 1;
  for (std::size_t i = axes_.size(); i-- > 0;) {
    strides_[i] = size_;
    size_ *= axes_[i].count;
  }
}

std::optional<std::size_t> SpacetimeGrid::axis_index(std::string_view name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name == name) return i;
  return std::nullopt;
}

void SpacetimeGrid::unflatten(std::size_t flat, std::span<std::size_t> idx) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    idx[i] = flat / strides_[i];
    flat %= strides_[i];
  }
}

std::size_t SpacetimeGrid::flatten(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) flat += idx[i] * strides_[i];
  return flat;
}

void SpacetimeGrid::point(std::size_t flat, std::span<double> coords) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const std::size_t k = flat / strides_[i];
    flat %= strides_[i];
    coords[i] = axes_[i].coord(k);
  }
}

bool SpacetimeGrid::is_interior(std::size_t flat) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const std::size_t k = flat / strides_[i];
    flat %= strides_[i];
    if (k == 0 || k + 1 == axes_[i].count) return false;
  }
  return true;
}

double SpacetimeGrid::cell_volume() const {
  double v = 1.0;
  for (const Axis& ax : axes_) v *= ax.spacing();
  return v;
}

bool operator==(const SpacetimeGrid& a, const SpacetimeGrid& b) {
  if (a.axes_.size() != b.axes_.size()) return false;
  for (std::size_t i = 0; i < a.axes_.size(); ++i) {
    const Axis &x = a.axes_[i], &y = b.axes_[i];
    if (x.name != y.name || x.min != y.min || x.max != y.max || x.count != y.count)
      return false;
  }
  return true;
}

SpacetimeGrid build_grid(std::vector<Axis> axes) { return SpacetimeGrid(std::move(axes)); }

}  // namespace brth
