#include "pmadv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pmadv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBlowUpMagnitude = 1e100;

// Face-normal velocity samples and the x-independent flux coefficients,
// fixed once per run (all catalog fields are time-independent; the build
// time is re-checked for time-dependent fields).
struct AdvCtx {
  bool active = false;  // power-law b present
  bool any = false;     // active or g present
  double kappa = 0.0;
  bool has_g = false;
  double c[2] = {0.0, 0.0};
  double kg = 0.0;
  bool time_dependent = false;
  double built_t = 0.0;
  std::vector<double> face_b[2];

  void build(const Grid& grid, const AdvectionSpec& spec, double t) {
    active = spec.kind == AdvectionSpec::Kind::power_law;
    has_g = spec.g.has_value();
    any = active || has_g;
    kappa = spec.kappa;
    if (has_g) {
      c[0] = spec.g->c[0];
      c[1] = spec.g->c[1];
      kg = spec.g->kappa_g;
    }
    if (!active) return;
    time_dependent = spec.b.time_dependent;
    built_t = t;
    face_b[0].assign(static_cast<size_t>((grid.n[0] + 1) * grid.n[1]), 0.0);
    for (int k = 1; k < grid.n[0]; ++k)
      for (int j = 0; j < grid.n[1]; ++j) {
        Vec x{grid.lo[0] + k * grid.h[0],
              grid.dim == 2 ? grid.center(1, j) : 0.0};
        face_b[0][static_cast<size_t>(k) * grid.n[1] + j] = spec.b.eval(x, t)[0];
      }
    if (grid.dim == 2) {
      face_b[1].assign(static_cast<size_t>(grid.n[0] * (grid.n[1] + 1)), 0.0);
      for (int i = 0; i < grid.n[0]; ++i)
        for (int k = 1; k < grid.n[1]; ++k) {
          Vec x{grid.center(0, i), grid.lo[1] + k * grid.h[1]};
          face_b[1][static_cast<size_t>(i) * (grid.n[1] + 1) + k] =
              spec.b.eval(x, t)[1];
        }
    }
  }

  void refresh(const Grid& grid, const AdvectionSpec& spec, double t) {
    if (active && time_dependent && t != built_t) build(grid, spec, t);
  }
};

struct Stepper {
  Grid grid;
  const ProblemSpec* prob;
  SchemeConfig cfg;
  AdvCtx adv;
  std::vector<double> phibuf, rhs1, rhs2, stage, unew, lam[2];
  std::vector<int> ring;

  Stepper(const Grid& g, const ProblemSpec& p, const SchemeConfig& c)
      : grid(g), prob(&p), cfg(c) {
    cfg.validate();
    const size_t nc = static_cast<size_t>(grid.total());
    phibuf.resize(nc);
    rhs1.resize(nc);
    rhs2.resize(nc);
    stage.resize(nc);
    unew.resize(nc);
    adv.build(grid, p.advection, 0.0);
    for (int i = 0; i < grid.n[0]; ++i)
      for (int j = 0; j < grid.n[1]; ++j)
        if (grid.on_boundary_ring(i, j)) ring.push_back(grid.idx(i, j));
  }

  // Local Lax-Friedrichs value of the combined axis flux
  // h(u) = B |u|^k u + c_a |u|^kg u at one face.
  double face_flux(double B, double ca, double uL, double uR) const {
    double hL = 0.0, hR = 0.0, lambda = 0.0;
    const double am = std::max(std::fabs(uL), std::fabs(uR));
    if (B != 0.0) {
      hL += B * pow_abs(uL, adv.kappa) * uL;
      hR += B * pow_abs(uR, adv.kappa) * uR;
      lambda += std::fabs(B) * (adv.kappa + 1.0) * pow_abs(am, adv.kappa);
    }
    if (adv.has_g && ca != 0.0) {
      hL += ca * pow_abs(uL, adv.kg) * uL;
      hR += ca * pow_abs(uR, adv.kg) * uR;
      lambda += std::fabs(ca) * (adv.kg + 1.0) * pow_abs(am, adv.kg);
    }
    return 0.5 * (hL + hR) - 0.5 * lambda * (uR - uL);
  }

  double face_lambda(double B, double ca, double uL, double uR) const {
    const double am = std::max(std::fabs(uL), std::fabs(uR));
    double lambda = 0.0;
    if (B != 0.0) lambda += std::fabs(B) * (adv.kappa + 1.0) * pow_abs(am, adv.kappa);
    if (adv.has_g && ca != 0.0)
      lambda += std::fabs(ca) * (adv.kg + 1.0) * pow_abs(am, adv.kg);
    return lambda;
  }

  // rhs = [mu lap Phi(u)] - [div(f+g)], either side optional.
  void total_rhs(const std::vector<double>& u, double t, double mu_t,
                 bool with_diff, bool with_adv, std::vector<double>& rhs) {
    std::fill(rhs.begin(), rhs.end(), 0.0);
    adv.refresh(grid, prob->advection, t);
    const double alpha = prob->diffusion.alpha;
    if (with_diff) {
      const double inv = 1.0 / (alpha + 1.0);
      for (size_t k = 0; k < u.size(); ++k)
        phibuf[k] = pow_abs(u[k], alpha) * u[k] * inv;
    }
    const bool do_adv = with_adv && adv.any;
    const int n0 = grid.n[0], n1 = grid.n[1];
    {
      const double inv_h = 1.0 / grid.h[0];
      for (int k = 1; k < n0; ++k) {
        const double* brow =
            adv.active ? &adv.face_b[0][static_cast<size_t>(k) * n1] : nullptr;
        for (int j = 0; j < n1; ++j) {
          const int L = (k - 1) * n1 + j, R = k * n1 + j;
          double T = 0.0;
          if (with_diff) T += mu_t * (phibuf[R] - phibuf[L]) * inv_h;
          if (do_adv)
            T -= face_flux(brow ? brow[j] : 0.0, adv.c[0], u[L], u[R]);
          rhs[L] += T * inv_h;
          rhs[R] -= T * inv_h;
        }
      }
    }
    if (grid.dim == 2) {
      const double inv_h = 1.0 / grid.h[1];
      for (int i = 0; i < n0; ++i) {
        const double* bcol =
            adv.active ? &adv.face_b[1][static_cast<size_t>(i) * (n1 + 1)] : nullptr;
        const int base = i * n1;
        for (int k = 1; k < n1; ++k) {
          const int L = base + k - 1, R = base + k;
          double T = 0.0;
          if (with_diff) T += mu_t * (phibuf[R] - phibuf[L]) * inv_h;
          if (do_adv) T -= face_flux(bcol ? bcol[k] : 0.0, adv.c[1], u[L], u[R]);
          rhs[L] += T * inv_h;
          rhs[R] -= T * inv_h;
        }
      }
    }
  }

  double stable(const SolverState& state, double cap) {
    const std::vector<double>& u = state.field.values;
    adv.refresh(grid, prob->advection, state.t);
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::fabs(v));

    double dt = cap;
    const double alpha = prob->diffusion.alpha;
    const double mu_t = prob->diffusion.mu(state.t);
    if (umax > 0.0) {
      const double hmin = grid.min_h();
      const double dpm = pow_abs(umax, alpha);
      if (dpm > 0.0)
        dt = std::min(dt, cfg.cfl_diff * hmin * hmin / (2.0 * grid.dim * mu_t * dpm));
    }
    if (adv.any && umax > 0.0) {
      const int n0 = grid.n[0], n1 = grid.n[1];
      lam[0].assign(static_cast<size_t>((n0 + 1) * n1), 0.0);
      for (int k = 1; k < n0; ++k)
        for (int j = 0; j < n1; ++j)
          lam[0][static_cast<size_t>(k) * n1 + j] = face_lambda(
              adv.active ? adv.face_b[0][static_cast<size_t>(k) * n1 + j] : 0.0,
              adv.c[0], u[(k - 1) * n1 + j], u[k * n1 + j]);
      if (grid.dim == 2) {
        lam[1].assign(static_cast<size_t>(n0 * (n1 + 1)), 0.0);
        for (int i = 0; i < n0; ++i)
          for (int k = 1; k < n1; ++k)
            lam[1][static_cast<size_t>(i) * (n1 + 1) + k] = face_lambda(
                adv.active ? adv.face_b[1][static_cast<size_t>(i) * (n1 + 1) + k]
                           : 0.0,
                adv.c[1], u[i * n1 + k - 1], u[i * n1 + k]);
      }
      double max_s = 0.0;
      for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) {
          double s = std::max(lam[0][static_cast<size_t>(i) * n1 + j],
                              lam[0][static_cast<size_t>(i + 1) * n1 + j]) /
                     grid.h[0];
          if (grid.dim == 2)
            s += std::max(lam[1][static_cast<size_t>(i) * (n1 + 1) + j],
                          lam[1][static_cast<size_t>(i) * (n1 + 1) + j + 1]) /
                 grid.h[1];
          max_s = std::max(max_s, s);
        }
      if (max_s > 0.0) dt = std::min(dt, cfg.cfl_adv / max_s);
    }
    return dt;
  }

  void advance(SolverState& state, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw std::domain_error("step requires a positive finite dt");
    const std::vector<double>& u = state.field.values;
    const double t = state.t;
    const double mu0 = prob->diffusion.mu(t);
    if (cfg.integrator == SchemeConfig::Integrator::euler) {
      total_rhs(u, t, mu0, true, true, rhs1);
      for (size_t k = 0; k < u.size(); ++k) unew[k] = u[k] + dt * rhs1[k];
    } else {
      total_rhs(u, t, mu0, true, true, rhs1);
      for (size_t k = 0; k < u.size(); ++k) stage[k] = u[k] + dt * rhs1[k];
      const double mu1 = prob->diffusion.mu(t + dt);
      total_rhs(stage, t + dt, mu1, true, true, rhs2);
      for (size_t k = 0; k < u.size(); ++k)
        unew[k] = u[k] + 0.5 * dt * (rhs1[k] + rhs2[k]);
    }

    double umax = 0.0;
    for (size_t k = 0; k < unew.size(); ++k) {
      const double a = std::fabs(unew[k]);
      if (!(a <= kBlowUpMagnitude))
        throw BlowUpError(t + dt, static_cast<int>(k));
      umax = std::max(umax, a);
    }
    for (int idx : ring)
      if (std::fabs(unew[idx]) > cfg.boundary_guard * umax) {
        ++state.guard_violations;
        break;
      }
    state.field.values.swap(unew);
    state.t = t + dt;
    state.field.time = state.t;
    state.dt_last = dt;
    ++state.step_count;
  }
};

}  // namespace

void SchemeConfig::validate() const {
  if (!(cfl_adv > 0.0 && cfl_adv <= 1.0))
    throw ConfigError("cfl_adv must be in (0, 1]");
  if (!(cfl_diff > 0.0 && cfl_diff <= 1.0))
    throw ConfigError("cfl_diff must be in (0, 1]");
  if (!(boundary_guard > 0.0 && boundary_guard < 1.0))
    throw ConfigError("boundary_guard must be in (0, 1)");
}

BlowUpError::BlowUpError(double t_, int cell_)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "solution blew up at t=" << t_ << " (cell " << cell_ << ")";
        return os.str();
      }()),
      t(t_),
      cell(cell_) {}

double phi(double u, double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("phi requires alpha > 0");
  return pow_abs(u, alpha) * u / (alpha + 1.0);
}

Field diffusion_rhs(const Field& field, double alpha, double mu_t) {
  if (!(mu_t > 0.0)) throw std::domain_error("diffusion_rhs requires mu > 0");
  if (!(alpha > 0.0)) throw std::domain_error("diffusion_rhs requires alpha > 0");
  ProblemSpec p;
  p.dim = field.grid.dim;
  p.advection = AdvectionSpec::none();
  p.diffusion = make_diffusion(alpha, MuFunction::constant(mu_t));
  SchemeConfig cfg;
  Stepper st(field.grid, p, cfg);
  Field out(field.grid);
  out.time = field.time;
  st.total_rhs(field.values, field.time, mu_t, true, false, out.values);
  return out;
}

Field advection_rhs(const Field& field, const AdvectionSpec& spec, double t) {
  ProblemSpec p;
  p.dim = field.grid.dim;
  p.advection = spec;
  p.diffusion = make_diffusion(1.0, MuFunction::constant(1.0));
  SchemeConfig cfg;
  Stepper st(field.grid, p, cfg);
  Field out(field.grid);
  out.time = field.time;
  st.total_rhs(field.values, t, 1.0, false, true, out.values);
  // total_rhs accumulates -div(f+g); this operation reports the divergence.
  for (double& v : out.values) v = -v;
  return out;
}

double stable_dt(const SolverState& state, const ProblemSpec& problem,
                 const SchemeConfig& config, double dt_cap) {
  Stepper st(state.field.grid, problem, config);
  return st.stable(state, dt_cap);
}

void step(SolverState& state, const ProblemSpec& problem,
          const SchemeConfig& config, double dt) {
  Stepper st(state.field.grid, problem, config);
  st.advance(state, dt);
}

RunReport run(const ProblemSpec& problem, const Grid& grid,
              const SchemeConfig& config, double horizon,
              double output_interval, const Observer& observer,
              const ReportSpec& report_spec) {
  config.validate();
  if (horizon < 0.0) throw std::domain_error("horizon must be >= 0");
  if (horizon > 0.0 && !(output_interval > 0.0))
    throw std::domain_error("output_interval must be > 0");
  if (problem.dim != grid.dim)
    throw ConfigError("problem dim does not match grid dim");

  SolverState state;
  state.field = materialize_initial(problem.initial, grid);
  state.field.time = 0.0;
  if (int bad = state.field.first_nonfinite(); bad >= 0)
    throw ConfigError("initial datum is not finite at cell " +
                      std::to_string(bad));

  RunReport report = make_report(report_spec.report_p, report_spec.extra_q);
  report.flux_bound_note =
      "F(t) sampled over truncated-grid cell centers (empirical bound)";

  Stepper st(grid, problem, config);
  const double alpha = problem.diffusion.alpha;

  auto emit = [&](double dt_elapsed) {
    double umax = lq_norm(state.field, kInf);
    const double F_t = empirical_F(problem.advection, grid, state.t,
                                   std::max(1.0, umax));
    update_diagnostics(report, state.field, dt_elapsed, F_t,
                       problem.diffusion.mu(state.t), alpha);
    if (observer) observer(state, report);
  };

  emit(0.0);
  if (horizon == 0.0) return report;

  double prev_out = 0.0;
  long long k_out = 1;
  double next_out = std::min(k_out * output_interval, horizon);
  while (true) {
    const double cap = next_out - state.t;
    const double dt = st.stable(state, cap);
    try {
      st.advance(state, dt);
    } catch (const BlowUpError& e) {
      report.flags.blow_up = true;
      report.flags.blow_up_cell = e.cell;
      report.flags.last_valid_time = state.t;
      break;
    }
    // A step below time resolution only happens when |u| is effectively
    // blowing up (the diffusive bound collapses); flag rather than spin.
    if (dt < 1e-15 * std::max(1.0, state.t)) {
      report.flags.blow_up = true;
      report.flags.last_valid_time = state.t;
      break;
    }
    if (state.t >= next_out - 1e-9 * output_interval) {
      state.t = next_out;
      state.field.time = next_out;
      emit(next_out - prev_out);
      prev_out = next_out;
      if (next_out >= horizon) break;
      ++k_out;
      next_out = std::min(k_out * output_interval, horizon);
    }
  }
  if (!report.flags.blow_up) report.flags.last_valid_time = state.t;
  report.flags.boundary_contaminated = state.guard_violations > 0;
  return report;
}

}  // namespace pmadv
