#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "vecgrav/errors.hpp"
#include "vecgrav/parallel.hpp"
#include "vecgrav/units.hpp"

namespace vecgrav {

/// Uniform isotropic Cartesian grid. Node (i, j, k) sits at
/// origin + dx * (i, j, k); storage order is z-fastest.
struct Grid3 {
  std::array<int, 3> counts{3, 3, 3};
  double dx = 1.0;
  Vec3 origin{};

  /// Grid of spacing dx symmetric about the coordinate origin.
  static Grid3 centered(const std::array<int, 3>& counts, double dx) {
    return Grid3{counts, dx,
                 {-0.5 * (counts[0] - 1) * dx, -0.5 * (counts[1] - 1) * dx,
                  -0.5 * (counts[2] - 1) * dx}};
  }
  static Grid3 cube(int n, double dx) { return centered({n, n, n}, dx); }

  void validate() const {
    for (int a = 0; a < 3; ++a)
      if (counts[a] < 3)
        throw ShapeError("grid: every axis needs at least 3 cells, axis " +
                         std::to_string(a) + " has " + std::to_string(counts[a]));
    if (!(dx > 0.0) || !std::isfinite(dx))
      throw ShapeError("grid: spacing must be positive and finite");
  }

  std::size_t size() const {
    return static_cast<std::size_t>(counts[0]) * counts[1] * counts[2];
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * counts[1] + j) * counts[2] + k;
  }
  std::size_t stride(int axis) const {
    if (axis == 0) return static_cast<std::size_t>(counts[1]) * counts[2];
    if (axis == 1) return static_cast<std::size_t>(counts[2]);
    return 1;
  }
  Vec3 position(int i, int j, int k) const {
    return {origin[0] + dx * i, origin[1] + dx * j, origin[2] + dx * k};
  }
  double cell_volume() const { return dx * dx * dx; }
  Vec3 upper() const {
    return position(counts[0] - 1, counts[1] - 1, counts[2] - 1);
  }

  friend bool operator==(const Grid3&, const Grid3&) = default;
};

inline void require_same_grid(const Grid3& a, const Grid3& b, const char* what) {
  if (!(a == b)) throw ShapeError(std::string(what) + ": grids do not match");
}

struct ScalarField {
  Grid3 grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid3& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}

  double& operator()(int i, int j, int k) { return values[grid.index(i, j, k)]; }
  double operator()(int i, int j, int k) const {
    return values[grid.index(i, j, k)];
  }
  double& operator[](std::size_t n) { return values[n]; }
  double operator[](std::size_t n) const { return values[n]; }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;
};

struct VectorField {
  std::array<ScalarField, 3> comp;

  VectorField() = default;
  explicit VectorField(const Grid3& g)
      : comp{ScalarField(g), ScalarField(g), ScalarField(g)} {}

  const Grid3& grid() const { return comp[0].grid; }
  ScalarField& operator[](int a) { return comp[a]; }
  const ScalarField& operator[](int a) const { return comp[a]; }
  Vec3 at(std::size_t n) const {
    return {comp[0].values[n], comp[1].values[n], comp[2].values[n]};
  }
  void set(std::size_t n, const Vec3& v) {
    comp[0].values[n] = v[0];
    comp[1].values[n] = v[1];
    comp[2].values[n] = v[2];
  }

  friend bool operator==(const VectorField&, const VectorField&) = default;
};

/// Half-open index box [lo, hi) per axis.
struct IndexRegion {
  std::array<int, 3> lo{};
  std::array<int, 3> hi{};

  bool contains(int i, int j, int k) const {
    return i >= lo[0] && i < hi[0] && j >= lo[1] && j < hi[1] && k >= lo[2] &&
           k < hi[2];
  }
  bool empty() const {
    return hi[0] <= lo[0] || hi[1] <= lo[1] || hi[2] <= lo[2];
  }
};

/// Cells at least `margin` cells away from every grid face.
inline IndexRegion interior_region(const Grid3& g, int margin) {
  IndexRegion r;
  for (int a = 0; a < 3; ++a) {
    r.lo[a] = std::min(margin, g.counts[a]);
    r.hi[a] = std::max(r.lo[a], g.counts[a] - margin);
  }
  return r;
}

/// Max-norm and discrete L2 norm (sqrt of sum r^2 dx^3).
struct Norms {
  double max = 0.0;
  double l2 = 0.0;
};

template <typename Value>
Norms region_norms(const Grid3& g, const IndexRegion& r, Value&& value) {
  if (r.empty()) return {};
  const long planes = r.hi[0] - r.lo[0];
  std::vector<double> pmax(static_cast<std::size_t>(planes), 0.0);
  std::vector<double> psum(static_cast<std::size_t>(planes), 0.0);
  parallel_for(planes, [&](long p) {
    const int i = r.lo[0] + static_cast<int>(p);
    double m = 0.0, s = 0.0;
    for (int j = r.lo[1]; j < r.hi[1]; ++j)
      for (int k = r.lo[2]; k < r.hi[2]; ++k) {
        const double v = value(g.index(i, j, k));
        m = std::max(m, std::abs(v));
        s += v * v;
      }
    pmax[static_cast<std::size_t>(p)] = m;
    psum[static_cast<std::size_t>(p)] = s;
  });
  Norms n;
  double total = 0.0;
  for (long p = 0; p < planes; ++p) {
    n.max = std::max(n.max, pmax[static_cast<std::size_t>(p)]);
    total += psum[static_cast<std::size_t>(p)];
  }
  n.l2 = std::sqrt(total * g.cell_volume());
  return n;
}

inline Norms norms(const ScalarField& f, const IndexRegion& r) {
  return region_norms(f.grid, r, [&](std::size_t n) { return f.values[n]; });
}

/// Norms of the Euclidean magnitude of a vector field.
inline Norms norms(const VectorField& f, const IndexRegion& r) {
  return region_norms(f.grid(), r, [&](std::size_t n) { return norm(f.at(n)); });
}

/// Sum of value(n) * dx^3 over a region, in deterministic order.
template <typename Value>
double region_integral(const Grid3& g, const IndexRegion& r, Value&& value) {
  if (r.empty()) return 0.0;
  const double total = ordered_sum(r.hi[0] - r.lo[0], [&](long p) {
    const int i = r.lo[0] + static_cast<int>(p);
    double s = 0.0;
    for (int j = r.lo[1]; j < r.hi[1]; ++j)
      for (int k = r.lo[2]; k < r.hi[2]; ++k) s += value(g.index(i, j, k));
    return s;
  });
  return total * g.cell_volume();
}

inline bool all_finite(const ScalarField& f) {
  const long planes = f.grid.counts[0];
  const std::size_t plane_size = f.grid.stride(0);
  const double bad = ordered_sum(planes, [&](long p) {
    double count = 0.0;
    const std::size_t base = static_cast<std::size_t>(p) * plane_size;
    for (std::size_t n = base; n < base + plane_size; ++n)
      if (!std::isfinite(f.values[n])) count += 1.0;
    return count;
  });
  return bad == 0.0;
}

inline bool all_finite(const VectorField& f) {
  return all_finite(f[0]) && all_finite(f[1]) && all_finite(f[2]);
}

}  // namespace vecgrav
