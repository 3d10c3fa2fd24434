#include "brth/field.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "brth/parallel.hpp"

namespace brth {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string describe_point(const SpacetimeGrid& grid, std::size_t flat) {
  double coords[4];
  grid.point(flat, std::span<double>(coords, grid.rank()));
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < grid.rank(); ++i) {
    if (i) os << ", ";
    os << grid.axis(i).name << "=" << coords[i];
  }
  os << ")";
  return os.str();
}

}  // namespace

ComplexField::ComplexField(SpacetimeGrid grid, std::vector<cplx> values, Quantity quantity,
                           std::vector<std::uint8_t> mask)
    : grid_(std::move(grid)), values_(std::move(values)), quantity_(quantity),
      mask_(std::move(mask)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("ComplexField: value count does not match grid size");
  if (!mask_.empty() && mask_.size() != values_.size())
    throw std::invalid_argument("ComplexField: mask size does not match grid size");
}

std::size_t ComplexField::masked_count() const {
  std::size_t n = 0;
  for (std::uint8_t m : mask_) n += (m != 0);
  return n;
}

ComplexField sample(const PointSampler& expr, const SpacetimeGrid& grid, Quantity quantity,
                    const MaskPredicate* mask) {
  const std::size_t n = grid.size();
  std::vector<cplx> values(n);
  std::vector<std::uint8_t> mask_bits;
  if (mask != nullptr) mask_bits.assign(n, 0);

  // First offending node wins so the error message is deterministic.
  std::atomic<std::size_t> first_bad{n};

  par::parallel_for(n, [&](std::size_t begin, std::size_t end) {
    double coords[4];
    const std::span<double> view(coords, grid.rank());
    for (std::size_t i = begin; i < end; ++i) {
      grid.point(i, view);
      if (mask != nullptr && (*mask)(view)) {
        mask_bits[i] = 1;
        values[i] = cplx{0.0, 0.0};
        continue;
      }
      const cplx v = expr(view);
      values[i] = v;
      if (!finite(v)) {
        std::size_t expected = first_bad.load(std::memory_order_relaxed);
        while (i < expected &&
               !first_bad.compare_exchange_weak(expected, i, std::memory_order_relaxed)) {
        }
      }
    }
  });

  const std::size_t bad = first_bad.load();
  if (bad < n)
    throw std::runtime_error("sample: non-finite value at unmasked point " +
                             describe_point(grid, bad));

  return ComplexField(grid, std::move(values), quantity, std::move(mask_bits));
}

}  // namespace brth
