#pragma once

#include <functional>
#include <limits>

#include "pmadv/diagnostics.hpp"
#include "pmadv/model.hpp"

namespace pmadv {

// Explicit conservative scheme: local Lax-Friedrichs fluxes for the
// advection and a centered Laplacian of Phi(u) = |u|^a u/(a+1) for the
// degenerate diffusion, with zero total flux across the box boundary.
struct SchemeConfig {
  double cfl_adv = 0.4;
  double cfl_diff = 0.4;
  enum class Integrator { euler, heun };
  Integrator integrator = Integrator::euler;
  // Max |u| tolerated in the outermost cell ring, relative to the sup
  // norm. Violations mean the truncated box is too small for the run.
  double boundary_guard = 1e-8;

  void validate() const;
};

struct SolverState {
  Field field;
  double t = 0.0;
  long long step_count = 0;
  double dt_last = 0.0;
  long long guard_violations = 0;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double t, int cell);
  double t;
  int cell;
};

// Phi(u) = |u|^a u / (a+1); odd, strictly increasing, Phi(0) = 0. Its
// derivative |u|^a is the local diffusivity.
double phi(double u, double alpha);

// mu_t * discrete Laplacian of Phi(u) (3-point in 1d, 5-point in 2d) with
// zero-flux boundary faces. The increment sums to zero over all cells.
Field diffusion_rhs(const Field& field, double alpha, double mu_t);

// Discrete divergence of the advective flux f + g from per-axis local
// Lax-Friedrichs face values; boundary faces carry zero flux. Enters the
// update with a minus sign. The increment sums to zero over all cells.
Field advection_rhs(const Field& field, const AdvectionSpec& spec, double t);

// Largest stable step: min of the advective bound cfl_adv / max_cells
// sum_axes(lambda/h) and the diffusive bound cfl_diff h^2/(2 n mu max|u|^a),
// clamped to dt_cap. A zero field returns dt_cap.
double stable_dt(const SolverState& state, const ProblemSpec& problem,
                 const SchemeConfig& config,
                 double dt_cap = std::numeric_limits<double>::infinity());

// One explicit step u <- u + dt (diffusion - advection), forward Euler or
// Heun. Throws BlowUpError when a non-finite value or |u| > 1e100 appears.
void step(SolverState& state, const ProblemSpec& problem,
          const SchemeConfig& config, double dt);

struct ReportSpec {
  double report_p = 2.0;
  std::vector<double> extra_q;
};

using Observer = std::function<void(const SolverState&, const RunReport&)>;

// Advances the problem to `horizon` with adaptive dt, updating diagnostics
// and invoking the observer at every multiple of output_interval (and at 0
// and horizon). Blow-up is caught and flagged, not rethrown; boundary
// guard violations flag the report as contaminated.
RunReport run(const ProblemSpec& problem, const Grid& grid,
              const SchemeConfig& config, double horizon,
              double output_interval, const Observer& observer = {},
              const ReportSpec& report_spec = {});

}  // namespace pmadv
