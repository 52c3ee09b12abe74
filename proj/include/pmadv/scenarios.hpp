#pragma once

#include <map>
#include <string>
#include <vector>

#include "pmadv/solver.hpp"

namespace pmadv {

// A named per-run check evaluated on the finished report.
struct Expectation {
  enum class Kind {
    l1_decay,
    no_blow_up,
    no_boundary_contamination,
    linf_growth_factor,   // peak sup-norm / initial sup-norm >= threshold,
                          // and within rel_tol of the recorded reference
    linf_nonincreasing,   // sup norm never grows (1e-8 relative slack)
    exact_l1_error,       // L1 error vs the exact profile <= threshold * h^0.8
  };
  Kind kind;
  double threshold = 0.0;
  double reference = 0.0;
  double rel_tol = 0.0;
};

// Fully parameterized experiment: grid + problem + horizon + expected
// qualitative outcome, reproducible from its name and overrides alone.
struct Scenario {
  std::string name;
  std::string description;
  Grid grid;
  ProblemSpec problem;
  SchemeConfig scheme;
  double horizon = 1.0;
  double output_interval = 0.1;
  double report_p = 2.0;
  std::vector<Expectation> expectations;
  // Exact-solution oracle (self-similar source solution), when available.
  bool has_exact = false;
  double exact_C = 0.0;
  double exact_t0 = 0.0;
};

// Registered scenario names with one-line descriptions.
std::vector<std::pair<std::string, std::string>> list_scenarios();

// Builds a registered scenario. Override keys: cells, box, horizon,
// output_interval, eps, amplitude, cfl_adv, cfl_diff, integrator, guard,
// report_p. Unknown names or keys raise ConfigError.
Scenario build_scenario(const std::string& name,
                        const std::map<std::string, std::string>& overrides = {});

// Self-similar source solution of u_t = div(|u|^a grad u) for u >= 0
// (equivalently u_t = Lap(u^m)/m, m = a+1), profile constant mass_C:
//   u(x,t) = s^(-n b) (C - k |x|^2 s^(-2b))_+^(1/a),  s = t/m,
//   b = 1/(n a + 2),  k = a b / (2m).
// Nonnegative, compactly supported, mass constant in time.
double exact_barenblatt(const Vec& x, double t, double alpha, double mass_C,
                        int n);

InitialDatum canonical_bump(double amplitude);
InitialDatum barenblatt_datum(double alpha, double mass_C, double t0);
InitialDatum custom_csv_datum(const std::string& path);

struct ScenarioRunResult {
  RunReport report;
  Field final_field;
};

ScenarioRunResult run_scenario(const Scenario& sc, const Observer& observer = {});

struct ExpectationResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<ExpectationResult> evaluate_expectations(const Scenario& sc,
                                                     const RunReport& report,
                                                     const Field& final_field);

// Discrete L1 distance between the final field and the exact profile at
// the matching absolute time. Requires the scenario's exact oracle.
double scenario_exact_l1_error(const Scenario& sc, const Field& final_field);

}  // namespace pmadv
