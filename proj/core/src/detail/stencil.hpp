#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "brth/grid.hpp"
#include "brth/parallel.hpp"
#include "brth/residual.hpp"
#include "brth/types.hpp"

// Internal stencil plumbing shared by the finite-difference checks. Not
// installed.
namespace brth::detail {

struct StencilLayout {
  std::size_t t_axis = 0;
  std::vector<std::size_t> space_axes;  // non-t axes in grid order
  bool radial = false;                  // grid is exactly (t, r)
  std::size_t r_axis = 0;
};

inline StencilLayout analyze_grid(const SpacetimeGrid& grid, const std::string& who) {
  const auto t = grid.axis_index("t");
  if (!t) throw std::invalid_argument(who + ": grid needs a t axis");
  StencilLayout lay;
  lay.t_axis = *t;
  for (std::size_t a = 0; a < grid.rank(); ++a) {
    if (a == *t) continue;
    lay.space_axes.push_back(a);
    if (grid.axis(a).name == "r") {
      lay.radial = true;
      lay.r_axis = a;
    }
  }
  if (lay.space_axes.empty())
    throw std::invalid_argument(who + ": grid needs at least one spatial axis");
  if (lay.radial && lay.space_axes.size() != 1)
    throw std::invalid_argument(who + ": a radial grid is exactly the axis pair (t, r)");
  return lay;
}

inline double axis_component(const std::string& name, Vec3 v) {
  if (name == "x") return v.x;
  if (name == "y") return v.y;
  return v.z;
}

inline void shift_along(const std::string& name, SpacetimeEvent& e, double h) {
  if (name == "x")
    e.x.x += h;
  else if (name == "y")
    e.x.y += h;
  else
    e.x.z += h;
}

inline SpacetimeEvent event_at(const SpacetimeGrid& grid, std::span<const double> coords) {
  SpacetimeEvent e{};
  for (std::size_t a = 0; a < grid.rank(); ++a) {
    const std::string& n = grid.axis(a).name;
    if (n == "t")
      e.t = coords[a];
    else if (n == "y")
      e.x.y = coords[a];
    else if (n == "z")
      e.x.z = coords[a];
    else  // x or r: radial fields are evaluated along the x half-axis
      e.x.x = coords[a];
  }
  return e;
}

// Runs fn(flat, idx, coords) over every node, in fixed-block parallel order.
template <class Fn>
void for_each_node(const SpacetimeGrid& grid, Fn&& fn) {
  const std::size_t rank = grid.rank();
  par::parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    std::size_t idx[4];
    double coords[4];
    for (std::size_t i = begin; i < end; ++i) {
      grid.unflatten(i, {idx, rank});
      for (std::size_t a = 0; a < rank; ++a) coords[a] = grid.axis(a).coord(idx[a]);
      fn(i, std::span<const std::size_t>(idx, rank), std::span<const double>(coords, rank));
    }
  });
}

inline bool stencil_complete(const SpacetimeGrid& grid, std::span<const std::size_t> idx) {
  for (std::size_t a = 0; a < grid.rank(); ++a)
    if (idx[a] == 0 || idx[a] + 1 >= grid.axis(a).count) return false;
  return true;
}

// Norms over the contributing points of a residual array.
inline ResolutionSample reduce_sample(const std::vector<cplx>& res,
                                      const std::vector<std::uint8_t>& use, std::size_t masked,
                                      double spacing) {
  const std::size_t n = res.size();
  const double count = par::blocked_sum(n, [&](std::size_t i) { return use[i] ? 1.0 : 0.0; });
  const double sum2 =
      par::blocked_sum(n, [&](std::size_t i) { return use[i] ? std::norm(res[i]) : 0.0; });
  ResolutionSample out;
  out.spacing = spacing;
  out.interior_points = static_cast<std::size_t>(count);
  out.masked_points = masked;
  if (out.interior_points > 0) {
    out.l2 = std::sqrt(sum2 / count);
    out.linf = par::blocked_max(n, [&](std::size_t i) { return use[i] ? std::abs(res[i]) : 0.0; });
  }
  return out;
}

inline double max_axis_spacing(const SpacetimeGrid& grid) {
  double h = 0.0;
  for (const auto& ax : grid.axes()) h = std::max(h, ax.spacing());
  return h;
}

inline ResidualReport report_from_sample(ResolutionSample s) {
  ResidualReport rep;
  rep.l2_norm = s.l2;
  rep.linf_norm = s.linf;
  rep.interior_point_count = s.interior_points;
  rep.masked_point_count = s.masked_points;
  rep.resolutions = {s.spacing};
  rep.samples = {std::move(s)};
  return rep;
}

}  // namespace brth::detail
