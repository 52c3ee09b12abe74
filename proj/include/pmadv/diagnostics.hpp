#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "pmadv/grid.hpp"

namespace pmadv {

struct RunFlags {
  bool blow_up = false;
  bool boundary_contaminated = false;
  double last_valid_time = 0.0;
  int blow_up_cell = -1;
};

// Time series of run diagnostics, appended once per output time.
//   norms[q]       discrete L^q norm at each output time
//   running_sup[q] running supremum of that norm (discrete sup over the
//                  output times seen so far)
//   energy_cum     running sum of dt * grad_sq_phi, the space-time
//                  dissipation integral
//   fmu            running sup of F(t)/mu(t)
struct RunReport {
  std::vector<double> times;
  std::map<double, std::vector<double>> norms;
  std::map<double, std::vector<double>> running_sup;
  std::vector<double> mass_series;
  std::vector<double> energy_cum;
  std::vector<double> fmu;
  double report_p = 2.0;
  RunFlags flags;
  // How F(t) was obtained (the sup is taken over the truncated grid, not
  // all of space); recorded in every summary.
  std::string flux_bound_note;

  double m1() const;    // final running sup of the L1 norm
  double minf() const;  // final running sup of the Linf norm
  double u0_l1() const;
  double u0_linf() const;
  size_t size() const { return times.size(); }
};

// Report with norm series tracked for q in {1, 2, report_p, inf} plus any
// extra q values (duplicates collapse).
RunReport make_report(double report_p = 2.0, std::span<const double> extra_q = {});

void update_diagnostics(RunReport& report, const Field& field, double dt_elapsed,
                        double F_t, double mu_t, double alpha);

// Exponent admissibility for the sup-norm estimate: p >= 1, p > n(k-a),
// sigma > 1 and sigma >= max{2/p, 1 + (2k-a)_- / p}, with (s)_- = max(-s,0).
bool admissible(double p, double sigma, double kappa, double alpha, int n);

struct AdmissiblePair {
  double p = 2.0;
  double sigma = 1.01;
  double kappa = 0.0;
  double alpha = 1.0;
  int n = 2;

  double a() const { return n * (kappa - alpha); }
  bool ok() const { return admissible(p, sigma, kappa, alpha, n); }
};

// Pointwise ratio of the running sup-norm to the estimate's right-hand
// side max{u0_inf, Fmu^(n/(p-a)) Up^(p/(p-a))}. Entries where the
// denominator underflows (< 1e-300) are marked absent. empirical_K is the
// sup of the present entries.
struct RatioSeries {
  std::vector<double> times;
  std::vector<double> ratio;
  std::vector<unsigned char> present;
  double empirical_K = 0.0;
  double t_of_sup = 0.0;
  bool all_finite = true;
};

RatioSeries linf_estimate_ratio(const RunReport& report, const AdmissiblePair& pair,
                                double u0_inf);

// L1 non-increase check: every consecutive increment must stay below
// 1e-8 times the initial L1 norm.
struct L1DecayCheck {
  bool pass = true;
  double worst_increment = 0.0;
  int worst_index = -1;
};

L1DecayCheck check_l1_decay(const RunReport& report);

struct PairAudit {
  AdmissiblePair pair;
  double empirical_K = 0.0;
  double t_of_sup = 0.0;
  bool all_finite = true;
};

// diagnostics.csv: t,l1,l2,lp,linf,mass,energy_cum,U1,Up,Uinf,Fmu
void write_diagnostics_csv(const RunReport& report, const std::string& path);
// audit.csv: p,sigma,a,empirical_K,t_of_sup
void write_audit_csv(std::span<const PairAudit> audits, const std::string& path);
void write_summary(const RunReport& report, std::span<const PairAudit> audits,
                   const std::string& path);

}  // namespace pmadv
