#include "pmadv/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pmadv {

namespace {

std::vector<double> parse_params(const std::string& s) {
  std::vector<double> out;
  std::istringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw ConfigError("bad numeric parameter '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

VelocityField fig1_field(double eps, int dim) {
  VelocityField vf;
  vf.dim = dim;
  vf.eval = [eps](const Vec& x, double) -> Vec {
    const double r2 = dot(x, x);
    const double den = eps + 0.25 * r2 * r2;
    return {-r2 * x[0] / den, -r2 * x[1] / den};
  };
  return vf;
}

VelocityField fig2_field(double coeff, double shift, double eps, int dim) {
  if (dim != 2) throw ConfigError("fig2 velocity fields are 2-d only");
  VelocityField vf;
  vf.dim = dim;
  vf.eval = [coeff, shift, eps](const Vec& x, double) -> Vec {
    const double q1 = shift + x[0] * x[0];
    const double q2 = eps + x[1] * x[1];
    return {-coeff * x[0] / (q1 * q1 * q2), -coeff * x[1] / (q1 * q2 * q2)};
  };
  return vf;
}

}  // namespace

VelocityField make_velocity(const std::string& id, int dim) {
  if (dim != 1 && dim != 2) throw ConfigError("velocity dim must be 1 or 2");
  std::string head = id, param;
  if (auto p = id.find(':'); p != std::string::npos) {
    head = id.substr(0, p);
    param = id.substr(p + 1);
  }
  VelocityField vf;
  vf.name = id;
  vf.dim = dim;

  if (head == "zero") {
    vf.eval = [](const Vec&, double) -> Vec { return {0.0, 0.0}; };
  } else if (head == "linear") {
    vf.eval = [](const Vec& x, double) -> Vec { return {-x[0], -x[1]}; };
  } else if (head == "linear_out") {
    vf.eval = [](const Vec& x, double) -> Vec { return {x[0], x[1]}; };
  } else if (head == "rotation") {
    if (dim != 2) throw ConfigError("rotation velocity field is 2-d only");
    vf.eval = [](const Vec& x, double) -> Vec { return {-x[1], x[0]}; };
  } else if (head == "constant") {
    Vec c{0.0, 0.0};
    if (!param.empty()) {
      auto vals = parse_params(param);
      if (vals.size() > 2) throw ConfigError("constant velocity takes at most 2 components");
      c[0] = vals.empty() ? 0.0 : vals[0];
      c[1] = vals.size() > 1 ? vals[1] : (dim == 2 ? vals[0] : 0.0);
    }
    if (dim == 1) c[1] = 0.0;
    vf.eval = [c](const Vec&, double) -> Vec { return c; };
  } else if (head == "fig1_eps") {
    const double eps = param.empty() ? 1e-4 : parse_params(param).at(0);
    if (!(eps > 0)) throw ConfigError("fig1_eps requires eps > 0");
    VelocityField f = fig1_field(eps, dim);
    vf.eval = f.eval;
  } else if (head == "fig2_eps") {
    const double eps = param.empty() ? 1e-4 : parse_params(param).at(0);
    if (!(eps > 0)) throw ConfigError("fig2_eps requires eps > 0");
    VelocityField f = fig2_field(4.0 / 25.0, 16.0, eps, dim);
    vf.eval = f.eval;
  } else if (head == "fig2b") {
    VelocityField f = fig2_field(1e-5, 4.0, 1e-10, dim);
    vf.eval = f.eval;
  } else {
    throw ConfigError("unknown velocity field '" + id + "'");
  }
  return vf;
}

AdvectionSpec AdvectionSpec::none() {
  AdvectionSpec s;
  s.kind = Kind::zero;
  return s;
}

AdvectionSpec AdvectionSpec::power_law(const std::string& b_name, double kappa,
                                       int dim) {
  if (kappa < 0.0) throw ConfigError("kappa must be >= 0");
  AdvectionSpec s;
  s.kind = Kind::power_law;
  s.b = make_velocity(b_name, dim);
  s.kappa = kappa;
  return s;
}

AdvectionSpec& AdvectionSpec::with_g(const Vec& c, double kappa_g) {
  if (kappa_g < 0.0) throw ConfigError("kappa_g must be >= 0");
  g = GFlux{c, kappa_g};
  return *this;
}

MuFunction MuFunction::constant(double v) {
  if (!(v > 0.0)) throw ConfigError("mu must be positive");
  MuFunction m;
  m.pts_ = {{0.0, v}};
  return m;
}

MuFunction MuFunction::table(std::vector<std::pair<double, double>> pts) {
  if (pts.empty()) throw ConfigError("mu table must be nonempty");
  std::sort(pts.begin(), pts.end());
  for (auto& [t, v] : pts)
    if (!(v > 0.0)) throw ConfigError("mu must be positive at every table point");
  MuFunction m;
  m.pts_ = std::move(pts);
  return m;
}

double MuFunction::operator()(double t) const {
  if (pts_.size() == 1) return pts_.front().second;
  if (t <= pts_.front().first) return pts_.front().second;
  if (t >= pts_.back().first) return pts_.back().second;
  auto it = std::upper_bound(pts_.begin(), pts_.end(),
                             std::make_pair(t, std::numeric_limits<double>::max()));
  auto [t1, v1] = *it;
  auto [t0, v0] = *(it - 1);
  const double w = (t - t0) / (t1 - t0);
  return v0 + w * (v1 - v0);
}

DiffusionSpec make_diffusion(double alpha, MuFunction mu) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  DiffusionSpec d;
  d.alpha = alpha;
  d.mu = std::move(mu);
  return d;
}

Field materialize_initial(const InitialDatum& init, const Grid& grid) {
  if (!init.csv_path.empty()) return read_field_csv(grid, init.csv_path);
  if (!init.eval) throw ConfigError("initial datum has no evaluator");
  Field f(grid);
  for (int i = 0; i < grid.n[0]; ++i)
    for (int j = 0; j < grid.n[1]; ++j) {
      Vec x{grid.center(0, i), grid.dim == 2 ? grid.center(1, j) : 0.0};
      f(i, j) = init.eval(x);
    }
  return f;
}

Vec eval_b(const VelocityField& b, const Vec& x, double t) { return b.eval(x, t); }

Vec eval_f(const AdvectionSpec& spec, const Vec& x, double t, double u) {
  if (spec.kind == AdvectionSpec::Kind::zero) return {0.0, 0.0};
  const Vec bv = spec.b.eval(x, t);
  const double w = pow_abs(u, spec.kappa) * u;
  return {bv[0] * w, bv[1] * w};
}

Vec eval_g(const AdvectionSpec& spec, double /*t*/, double u) {
  if (!spec.g) return {0.0, 0.0};
  const double w = pow_abs(u, spec.g->kappa_g) * u;
  return {spec.g->c[0] * w, spec.g->c[1] * w};
}

double neg_div_b(const VelocityField& b, const Vec& x, double t) {
  const double step = 1e-6 * (1.0 + norm2(x));
  double div = 0.0;
  for (int a = 0; a < b.dim; ++a) {
    Vec xp = x, xm = x;
    xp[a] += step;
    xm[a] -= step;
    div += (b.eval(xp, t)[a] - b.eval(xm, t)[a]) / (2.0 * step);
  }
  return -div;
}

double empirical_F(const AdvectionSpec& spec, const Grid& grid, double t,
                   double u_range) {
  if (!(u_range > 0.0)) throw std::domain_error("empirical_F requires u_range > 0");
  if (spec.kind == AdvectionSpec::Kind::zero) return 0.0;
  std::vector<double> us;
  for (int k = 1; k <= 8; ++k) {
    us.push_back(u_range * k / 8.0);
    us.push_back(-u_range * k / 8.0);
  }
  double best = 0.0;
  for (int i = 0; i < grid.n[0]; ++i)
    for (int j = 0; j < grid.n[1]; ++j) {
      Vec x{grid.center(0, i), grid.dim == 2 ? grid.center(1, j) : 0.0};
      for (double u : us) {
        const Vec f = eval_f(spec, x, t, u);
        const double val = norm2(f) / pow_abs(u, spec.kappa + 1.0);
        if (!std::isfinite(val)) {
          std::ostringstream msg;
          msg << "empirical_F: non-finite flux sample at x=(" << x[0];
          if (grid.dim == 2) msg << "," << x[1];
          msg << "), u=" << u;
          throw std::runtime_error(msg.str());
        }
        best = std::max(best, val);
      }
    }
  return best;
}

FluxMonotonicityReport check_flux_monotonicity(const AdvectionSpec& spec,
                                               const Grid& grid, double t,
                                               std::span<const double> u_samples) {
  if (u_samples.empty())
    throw std::domain_error("check_flux_monotonicity requires u samples");
  FluxMonotonicityReport rep;
  rep.worst_value = std::numeric_limits<double>::infinity();
  if (spec.kind == AdvectionSpec::Kind::zero) {
    // g is x-independent, so every term is exactly zero.
    rep.worst_value = 0.0;
    rep.worst_u = u_samples[0];
    rep.worst_x = {grid.center(0, 0), grid.dim == 2 ? grid.center(1, 0) : 0.0};
    return rep;
  }
  const double tol = -1e-9;
  for (int i = 0; i < grid.n[0]; ++i)
    for (int j = 0; j < grid.n[1]; ++j) {
      Vec x{grid.center(0, i), grid.dim == 2 ? grid.center(1, j) : 0.0};
      const double step = 1e-6 * (1.0 + norm2(x));
      for (double u : u_samples) {
        double val = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
          Vec xp = x, xm = x;
          xp[a] += step;
          xm[a] -= step;
          const double dfa =
              (eval_f(spec, xp, t, u)[a] - eval_f(spec, xm, t, u)[a]) /
              (2.0 * step);
          val += u * dfa;
        }
        if (val < rep.worst_value) {
          rep.worst_value = val;
          rep.worst_x = x;
          rep.worst_u = u;
        }
      }
    }
  rep.holds = rep.worst_value >= tol;
  return rep;
}

EllipticityReport check_ellipticity(const DiffusionFluxFn& A,
                                    const DiffusionSpec& diffusion,
                                    std::span<const EllipticitySample> samples) {
  if (!diffusion.M_bound)
    throw ConfigError("check_ellipticity requires an M bound in the diffusion spec");
  EllipticityReport rep;
  rep.worst_lower_margin = std::numeric_limits<double>::infinity();
  rep.worst_upper_margin = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    const Vec Av = A(s.x, s.t, s.u, s.v);
    const double ua = pow_abs(s.u, diffusion.alpha);
    const double vv = dot(s.v, s.v);
    const double lower = dot(Av, s.v) - diffusion.mu(s.t) * ua * vv;
    const double upper =
        (*diffusion.M_bound)(s.t) * ua * std::sqrt(vv) - norm2(Av);
    if (lower < rep.worst_lower_margin) {
      rep.worst_lower_margin = lower;
      rep.worst_lower_index = static_cast<int>(k);
    }
    if (upper < rep.worst_upper_margin) {
      rep.worst_upper_margin = upper;
      rep.worst_upper_index = static_cast<int>(k);
    }
  }
  const double tol = -1e-12;
  rep.lower_holds = rep.worst_lower_margin >= tol;
  rep.upper_holds = rep.worst_upper_margin >= tol;
  return rep;
}

DiffusionFluxFn isotropic_diffusion_flux(const DiffusionSpec& diffusion) {
  const double alpha = diffusion.alpha;
  const MuFunction mu = diffusion.mu;
  return [alpha, mu](const Vec&, double t, double u, const Vec& v) -> Vec {
    const double c = mu(t) * pow_abs(u, alpha);
    return {c * v[0], c * v[1]};
  };
}

}  // namespace pmadv
