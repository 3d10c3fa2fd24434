#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "brth/grid.hpp"
#include "brth/types.hpp"

namespace brth {

enum class Quantity : std::uint8_t { Psi, Action, Potential, Perturbation };

// Complex scalar samples over a SpacetimeGrid, row-major in grid order.
// An optional mask marks nodes whose values are not meaningful (excluded
// singular points, stencil boundaries); masked nodes never enter norms.
class ComplexField {
 public:
  ComplexField(SpacetimeGrid grid, std::vector<cplx> values, Quantity quantity,
               std::vector<std::uint8_t> mask = {});

  const SpacetimeGrid& grid() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& mutable_values() { return values_; }
  Quantity quantity() const { return quantity_; }

  bool has_mask() const { return !mask_.empty(); }
  bool masked(std::size_t i) const { return has_mask() && mask_[i] != 0; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  std::size_t masked_count() const;

  cplx operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

 private:
  SpacetimeGrid grid_;
  std::vector<cplx> values_;
  Quantity quantity_;
  std::vector<std::uint8_t> mask_;
};

// Pointwise sampler; coords arrive in grid axis order (see SpacetimeGrid::point).
using PointSampler = std::function<cplx(std::span<const double>)>;
// Mask predicate: true marks the node invalid before sampling (it is skipped).
using MaskPredicate = std::function<bool(std::span<const double>)>;

// Evaluates expr at every node in parallel. A non-finite value at an unmasked
// node is an error naming the offending point.
ComplexField sample(const PointSampler& expr, const SpacetimeGrid& grid, Quantity quantity,
                    const MaskPredicate* mask = nullptr);

}  // namespace brth
