#include "pmadv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pmadv {

namespace {

void check_axis(double lo, double hi, int cells) {
  if (cells < 4) throw ConfigError("grid needs at least 4 cells per axis");
  if (!(hi > lo)) throw ConfigError("grid extent must satisfy hi > lo");
}

}  // namespace

Grid Grid::line(double lo, double hi, int cells) {
  check_axis(lo, hi, cells);
  Grid g;
  g.dim = 1;
  g.lo = {lo, 0.0};
  g.hi = {hi, 1.0};
  g.n = {cells, 1};
  g.h = {(hi - lo) / cells, 1.0};
  return g;
}

Grid Grid::box(double lo0, double hi0, int n0, double lo1, double hi1,
               int n1) {
  check_axis(lo0, hi0, n0);
  check_axis(lo1, hi1, n1);
  Grid g;
  g.dim = 2;
  g.lo = {lo0, lo1};
  g.hi = {hi0, hi1};
  g.n = {n0, n1};
  g.h = {(hi0 - lo0) / n0, (hi1 - lo1) / n1};
  return g;
}

Grid Grid::square(double lo, double hi, int cells) {
  return box(lo, hi, cells, lo, hi, cells);
}

bool Grid::on_boundary_ring(int i, int j) const {
  if (i == 0 || i == n[0] - 1) return true;
  if (dim == 2 && (j == 0 || j == n[1] - 1)) return true;
  return false;
}

int Field::first_nonfinite() const {
  for (size_t k = 0; k < values.size(); ++k)
    if (!std::isfinite(values[k])) return static_cast<int>(k);
  return -1;
}

double lq_norm(const Field& f, double q) {
  const bool is_inf = std::isinf(q);
  if (!is_inf && q < 1.0) throw std::domain_error("lq_norm requires q >= 1");
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::fabs(v));
  if (is_inf || m == 0.0) return m;
  // Factor out the max so |u_i|^q cannot overflow for large q.
  double s = 0.0;
  for (double v : f.values) {
    const double r = std::fabs(v) / m;
    s += std::pow(r, q);
  }
  return m * std::pow(s * f.grid.volume(), 1.0 / q);
}

double mass(const Field& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.volume();
}

double grad_sq_phi(const Field& f, double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("grad_sq_phi requires alpha > 0");
  const Grid& g = f.grid;
  const double inv = 1.0 / (alpha + 1.0);
  std::vector<double> phi(f.values.size());
  for (size_t k = 0; k < f.values.size(); ++k)
    phi[k] = pow_abs(f.values[k], alpha) * f.values[k] * inv;

  // Mirror extension makes every boundary-face difference zero, so only
  // interior faces contribute.
  double total = 0.0;
  const double vol = g.volume();
  for (int i = 0; i + 1 < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j) {
      const double d = (phi[g.idx(i + 1, j)] - phi[g.idx(i, j)]) / g.h[0];
      total += d * d * vol;
    }
  if (g.dim == 2)
    for (int i = 0; i < g.n[0]; ++i)
      for (int j = 0; j + 1 < g.n[1]; ++j) {
        const double d = (phi[g.idx(i, j + 1)] - phi[g.idx(i, j)]) / g.h[1];
        total += d * d * vol;
      }
  return total;
}

void write_field_csv(const Field& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  const Grid& g = f.grid;
  out << (g.dim == 1 ? "x,u\n" : "x,y,u\n");
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j) {
      out << fmt_full(g.center(0, i));
      if (g.dim == 2) out << ',' << fmt_full(g.center(1, j));
      out << ',' << fmt_full(f(i, j)) << '\n';
    }
}

Field read_field_csv(const Grid& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("empty snapshot file: " + path);
  const std::string want = g.dim == 1 ? "x,u" : "x,y,u";
  if (header != want)
    throw ConfigError("snapshot header mismatch in " + path + ": got '" +
                      header + "', want '" + want + "'");
  Field f(g);
  std::string line;
  size_t k = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (k >= f.values.size())
      throw ConfigError("snapshot has more rows than grid cells: " + path);
    std::istringstream ss(line);
    std::string tok;
    double u = 0.0;
    int col = 0;
    const int ncol = g.dim + 1;
    while (std::getline(ss, tok, ',')) {
      if (col == ncol - 1) u = std::stod(tok);
      ++col;
    }
    if (col != ncol)
      throw ConfigError("snapshot row has wrong column count: " + path);
    f.values[k++] = u;
  }
  if (k != f.values.size())
    throw ConfigError("snapshot row count does not match grid: " + path);
  return f;
}

}  // namespace pmadv
