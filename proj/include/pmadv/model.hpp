#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pmadv/grid.hpp"

namespace pmadv {

using Vec = std::array<double, 2>;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// A named velocity field b(x,t) from the built-in catalog. The catalog is
// closed: fields are constructed by make_velocity from an identifier, so
// runs are reproducible from their textual configuration alone.
//
// Catalog identifiers:
//   zero
//   linear            b = -x
//   linear_out        b = x
//   rotation          b = (-x2, x1)          (2-d only)
//   constant:<c0>[,<c1>]
//   fig1_eps:<eps>    b = -|x|^2 x / (eps + |x|^4/4)        default eps 1e-4
//   fig2_eps:<eps>    b1 = -(4/25) x1 / [(16+x1^2)^2 (eps+x2^2)]
//                     b2 = -(4/25) x2 / [(16+x1^2) (eps+x2^2)^2]   (2-d only)
//   fig2b             as fig2 with coefficient 1e-5, (4+x1^2), eps 1e-10
struct VelocityField {
  std::string name;
  int dim = 2;
  std::function<Vec(const Vec&, double)> eval;
  bool time_dependent = false;
};

VelocityField make_velocity(const std::string& id, int dim);

// x-independent flux component g(t,u) = c |u|^kg u with constant vector c.
struct GFlux {
  Vec c{0.0, 0.0};
  double kappa_g = 0.0;
};

// Advective flux f(x,t,u). The power-law form b(x,t) |u|^k u satisfies
// f(x,t,0) = 0 by construction.
struct AdvectionSpec {
  enum class Kind { zero, power_law };
  Kind kind = Kind::zero;
  VelocityField b;
  double kappa = 0.0;
  std::optional<GFlux> g;

  static AdvectionSpec none();
  static AdvectionSpec power_law(const std::string& b_name, double kappa,
                                 int dim);
  AdvectionSpec& with_g(const Vec& c, double kappa_g);
  bool has_advection() const { return kind != Kind::zero || g.has_value(); }
};

// Positive time coefficient, either constant or a table with linear
// interpolation (clamped outside the table range).
class MuFunction {
 public:
  static MuFunction constant(double v);
  static MuFunction table(std::vector<std::pair<double, double>> pts);
  double operator()(double t) const;

 private:
  std::vector<std::pair<double, double>> pts_;
};

struct DiffusionSpec {
  double alpha = 1.0;
  MuFunction mu = MuFunction::constant(1.0);
  std::optional<MuFunction> M_bound;
};

DiffusionSpec make_diffusion(double alpha, MuFunction mu);

// Initial datum descriptor. `eval` samples u0 at a point; csv-backed data
// instead read a full snapshot aligned with the run grid.
struct InitialDatum {
  std::string kind;
  double amplitude = 1.0;
  std::function<double(const Vec&)> eval;
  std::string csv_path;
};

Field materialize_initial(const InitialDatum& init, const Grid& grid);

// The full continuous problem: u_t + div f + div g = mu(t) div(|u|^a grad u).
struct ProblemSpec {
  AdvectionSpec advection;
  DiffusionSpec diffusion;
  InitialDatum initial;
  int dim = 2;
};

Vec eval_b(const VelocityField& b, const Vec& x, double t);
Vec eval_f(const AdvectionSpec& spec, const Vec& x, double t, double u);
Vec eval_g(const AdvectionSpec& spec, double t, double u);

// -div b by central differences with step 1e-6 (1 + |x|). Positive values
// mark regions where the advection amplifies |u|.
double neg_div_b(const VelocityField& b, const Vec& x, double t);

// Tightest constant F with |f(x,t,u)| <= F |u|^(k+1) over the sampled cell
// centers and u in [-u_range, u_range]. For the power-law flux the
// u-dependence cancels and this is max |b| over cell centers.
double empirical_F(const AdvectionSpec& spec, const Grid& grid, double t,
                   double u_range);

// Checks sum_i u d(f_i)/d(x_i) >= 0 at all cell centers and supplied u
// samples (derivatives by central differences). For the power-law flux the
// sign is that of (div b) |u|^k u^2, so the check fails exactly where
// -div b > 0.
struct FluxMonotonicityReport {
  bool holds = true;
  double worst_value = 0.0;
  Vec worst_x{0.0, 0.0};
  double worst_u = 0.0;
};

FluxMonotonicityReport check_flux_monotonicity(const AdvectionSpec& spec,
                                               const Grid& grid, double t,
                                               std::span<const double> u_samples);

// Degenerate ellipticity audit for a pluggable diffusion flux A(x,t,u,v):
//   <A, v> >= mu(t) |u|^a |v|^2      (lower)
//   |A|    <= M(t) |u|^a |v|         (upper)
// Margins are lhs - rhs for the lower bound and rhs - lhs for the upper,
// so nonnegative margins mean the condition holds at that sample.
using DiffusionFluxFn =
    std::function<Vec(const Vec& x, double t, double u, const Vec& v)>;

struct EllipticitySample {
  Vec x{0.0, 0.0};
  double t = 0.0;
  double u = 0.0;
  Vec v{0.0, 0.0};
};

struct EllipticityReport {
  bool lower_holds = true;
  bool upper_holds = true;
  double worst_lower_margin = 0.0;
  double worst_upper_margin = 0.0;
  int worst_lower_index = -1;
  int worst_upper_index = -1;
};

EllipticityReport check_ellipticity(const DiffusionFluxFn& A,
                                    const DiffusionSpec& diffusion,
                                    std::span<const EllipticitySample> samples);

// The isotropic special case A = mu(t) |u|^a v, for which both ellipticity
// bounds hold with equality when M = mu.
DiffusionFluxFn isotropic_diffusion_flux(const DiffusionSpec& diffusion);

}  // namespace pmadv
