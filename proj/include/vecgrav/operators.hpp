#pragma once

// Second-order finite differences on a Grid3: central stencils in the
// interior, one-sided second-order stencils on the outermost cells.

#include <array>
#include <string>

#include "vecgrav/grid.hpp"
#include "vecgrav/parallel.hpp"

namespace vecgrav {

namespace detail {

template <typename Stencil>
void for_each_along(const Grid3& g, int axis, Stencil&& stencil) {
  parallel_for(g.counts[0], [&](long ip) {
    const int i = static_cast<int>(ip);
    for (int j = 0; j < g.counts[1]; ++j)
      for (int k = 0; k < g.counts[2]; ++k) {
        const std::array<int, 3> idx{i, j, k};
        stencil(g.index(i, j, k), idx[axis], g.counts[axis]);
      }
  });
}

}  // namespace detail

/// d f / d x_axis.
inline ScalarField derivative(const ScalarField& f, int axis) {
  const Grid3& g = f.grid;
  if (f.values.size() != g.size())
    throw ShapeError("derivative: field size does not match its grid");
  ScalarField out(g);
  const std::size_t st = g.stride(axis);
  const double h = 0.5 / g.dx;
  const double* u = f.values.data();
  detail::for_each_along(g, axis, [&](std::size_t n, int m, int count) {
    double d;
    if (m == 0)
      d = -3.0 * u[n] + 4.0 * u[n + st] - u[n + 2 * st];
    else if (m == count - 1)
      d = 3.0 * u[n] - 4.0 * u[n - st] + u[n - 2 * st];
    else
      d = u[n + st] - u[n - st];
    out.values[n] = h * d;
  });
  return out;
}

/// d^2 f / d x_axis^2. Grids with only 3 cells along an axis fall back to
/// the shifted three-point stencil on their boundary cells.
inline ScalarField second_derivative(const ScalarField& f, int axis) {
  const Grid3& g = f.grid;
  if (f.values.size() != g.size())
    throw ShapeError("second_derivative: field size does not match its grid");
  ScalarField out(g);
  const std::size_t st = g.stride(axis);
  const double h2 = 1.0 / (g.dx * g.dx);
  const double* u = f.values.data();
  detail::for_each_along(g, axis, [&](std::size_t n, int m, int count) {
    double d;
    if (m == 0) {
      d = count >= 4
              ? 2.0 * u[n] - 5.0 * u[n + st] + 4.0 * u[n + 2 * st] - u[n + 3 * st]
              : u[n] - 2.0 * u[n + st] + u[n + 2 * st];
    } else if (m == count - 1) {
      d = count >= 4
              ? 2.0 * u[n] - 5.0 * u[n - st] + 4.0 * u[n - 2 * st] - u[n - 3 * st]
              : u[n] - 2.0 * u[n - st] + u[n - 2 * st];
    } else {
      d = u[n + st] - 2.0 * u[n] + u[n - st];
    }
    out.values[n] = h2 * d;
  });
  return out;
}

inline VectorField grad(const ScalarField& phi) {
  VectorField out;
  for (int a = 0; a < 3; ++a) out[a] = derivative(phi, a);
  return out;
}

inline void require_consistent(const VectorField& A, const char* what) {
  if (!(A[0].grid == A[1].grid) || !(A[0].grid == A[2].grid))
    throw ShapeError(std::string(what) + ": vector components on different grids");
  for (int a = 0; a < 3; ++a)
    if (A[a].values.size() != A[a].grid.size())
      throw ShapeError(std::string(what) + ": field size does not match its grid");
}

inline ScalarField div(const VectorField& A) {
  require_consistent(A, "div");
  ScalarField out = derivative(A[0], 0);
  const ScalarField dy = derivative(A[1], 1);
  const ScalarField dz = derivative(A[2], 2);
  for (std::size_t n = 0; n < out.values.size(); ++n)
    out.values[n] += dy.values[n] + dz.values[n];
  return out;
}

inline VectorField curl(const VectorField& A) {
  require_consistent(A, "curl");
  VectorField out(A.grid());
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3;
    const int c = (a + 2) % 3;
    // (curl A)_a = d_b A_c - d_c A_b
    const ScalarField p = derivative(A[c], b);
    const ScalarField m = derivative(A[b], c);
    for (std::size_t n = 0; n < p.values.size(); ++n)
      out[a].values[n] = p.values[n] - m.values[n];
  }
  return out;
}

inline ScalarField laplacian(const ScalarField& phi) {
  ScalarField out = second_derivative(phi, 0);
  const ScalarField yy = second_derivative(phi, 1);
  const ScalarField zz = second_derivative(phi, 2);
  for (std::size_t n = 0; n < out.values.size(); ++n)
    out.values[n] += yy.values[n] + zz.values[n];
  return out;
}

/// Samples f(x) at every node.
template <typename Fn>
ScalarField sample_scalar(const Grid3& g, Fn&& fn) {
  ScalarField out(g);
  parallel_for(g.counts[0], [&](long ip) {
    const int i = static_cast<int>(ip);
    for (int j = 0; j < g.counts[1]; ++j)
      for (int k = 0; k < g.counts[2]; ++k)
        out(i, j, k) = fn(g.position(i, j, k));
  });
  return out;
}

template <typename Fn>
VectorField sample_vector(const Grid3& g, Fn&& fn) {
  VectorField out(g);
  parallel_for(g.counts[0], [&](long ip) {
    const int i = static_cast<int>(ip);
    for (int j = 0; j < g.counts[1]; ++j)
      for (int k = 0; k < g.counts[2]; ++k)
        out.set(g.index(i, j, k), fn(g.position(i, j, k)));
  });
  return out;
}

}  // namespace vecgrav
