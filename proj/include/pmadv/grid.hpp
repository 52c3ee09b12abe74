#pragma once

#include <array>
#include <string>
#include <vector>

#include "pmadv/common.hpp"

namespace pmadv {

// Uniform cell-centered Cartesian mesh on a truncated box, n = 1 or 2.
// Cell centers sit at lo + (i + 1/2) h. Linear storage is row-major with
// axis 0 slowest: idx = i * n[1] + j.
struct Grid {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> n{1, 1};
  std::array<double, 2> h{1.0, 1.0};

  static Grid line(double lo, double hi, int cells);
  static Grid box(double lo0, double hi0, int n0, double lo1, double hi1,
                  int n1);
  static Grid square(double lo, double hi, int cells);

  int total() const { return n[0] * n[1]; }
  double volume() const { return dim == 1 ? h[0] : h[0] * h[1]; }
  double min_h() const { return dim == 1 ? h[0] : std::min(h[0], h[1]); }
  double center(int axis, int i) const { return lo[axis] + (i + 0.5) * h[axis]; }
  int idx(int i, int j = 0) const { return i * n[1] + j; }
  // True for cells in the outermost ring of the box.
  bool on_boundary_ring(int i, int j = 0) const;
};

// Cell values of u at one time level; the discrete unknown.
struct Field {
  Grid grid;
  std::vector<double> values;
  double time = 0.0;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0)
      : grid(g), values(static_cast<size_t>(g.total()), fill) {}

  double& operator()(int i, int j = 0) { return values[grid.idx(i, j)]; }
  double operator()(int i, int j = 0) const { return values[grid.idx(i, j)]; }

  // Index of the first non-finite cell, or -1. Non-finite values are the
  // discrete blow-up signal.
  int first_nonfinite() const;
};

// Discrete L^q norm with midpoint quadrature: (sum |u_i|^q h^n)^(1/q),
// max |u_i| for q = inf. Throws std::domain_error for q < 1.
double lq_norm(const Field& f, double q);

// Signed mass sum u_i h^n; equals lq_norm(.,1) for nonnegative fields.
double mass(const Field& f);

// Integral of |grad Phi(u)|^2 with Phi(u) = |u|^a u/(a+1), accumulated
// from centered face differences with mirror (no-flux) boundary
// extension; face differences are weighted by the cell volume.
// Throws std::domain_error for alpha <= 0.
double grad_sq_phi(const Field& f, double alpha);

// Snapshot CSV: header "x,u" or "x,y,u", one row per cell, row-major,
// 17 significant digits.
void write_field_csv(const Field& f, const std::string& path);
Field read_field_csv(const Grid& g, const std::string& path);

}  // namespace pmadv
