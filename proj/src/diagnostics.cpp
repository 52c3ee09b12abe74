#include "pmadv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace pmadv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double RunReport::m1() const {
  const auto& s = running_sup.at(1.0);
  return s.empty() ? 0.0 : s.back();
}

double RunReport::minf() const {
  const auto& s = running_sup.at(kInf);
  return s.empty() ? 0.0 : s.back();
}

double RunReport::u0_l1() const {
  const auto& s = norms.at(1.0);
  return s.empty() ? 0.0 : s.front();
}

double RunReport::u0_linf() const {
  const auto& s = norms.at(kInf);
  return s.empty() ? 0.0 : s.front();
}

RunReport make_report(double report_p, std::span<const double> extra_q) {
  if (report_p < 1.0) throw std::domain_error("report_p must be >= 1");
  RunReport r;
  r.report_p = report_p;
  std::set<double> qs{1.0, 2.0, report_p, kInf};
  for (double q : extra_q) {
    if (q < 1.0) throw std::domain_error("tracked q must be >= 1");
    qs.insert(q);
  }
  for (double q : qs) {
    r.norms[q] = {};
    r.running_sup[q] = {};
  }
  return r;
}

void update_diagnostics(RunReport& report, const Field& field, double dt_elapsed,
                        double F_t, double mu_t, double alpha) {
  if (!(mu_t > 0.0)) throw std::domain_error("update_diagnostics requires mu > 0");
  if (dt_elapsed < 0.0) throw std::domain_error("dt_elapsed must be >= 0");
  report.times.push_back(field.time);
  for (auto& [q, series] : report.norms) {
    const double v = lq_norm(field, q);
    series.push_back(v);
    auto& sup = report.running_sup[q];
    sup.push_back(sup.empty() ? v : std::max(sup.back(), v));
  }
  report.mass_series.push_back(mass(field));
  const double prev_energy = report.energy_cum.empty() ? 0.0 : report.energy_cum.back();
  report.energy_cum.push_back(prev_energy +
                              dt_elapsed * grad_sq_phi(field, alpha));
  const double ratio = F_t / mu_t;
  report.fmu.push_back(report.fmu.empty() ? ratio : std::max(report.fmu.back(), ratio));
}

bool admissible(double p, double sigma, double kappa, double alpha, int n) {
  if (p < 1.0) return false;
  if (!(p > n * (kappa - alpha))) return false;
  if (!(sigma > 1.0)) return false;
  const double neg_part = std::max(-(2.0 * kappa - alpha), 0.0);
  const double bound = std::max(2.0 / p, 1.0 + neg_part / p);
  return sigma >= bound;
}

RatioSeries linf_estimate_ratio(const RunReport& report, const AdmissiblePair& pair,
                                double u0_inf) {
  if (!pair.ok())
    throw std::domain_error(
        "pair (p,sigma) is not admissible: requires p >= 1, p > n(kappa-alpha), "
        "sigma > 1 and sigma >= max(2/p, 1 + max(alpha-2*kappa,0)/p)");
  auto it = report.running_sup.find(pair.p);
  if (it == report.running_sup.end())
    throw std::invalid_argument("report does not track the L^p series for this pair");
  const auto& up = it->second;
  const auto& uinf = report.running_sup.at(kInf);
  const double a = pair.a();
  const double e_f = pair.n / (pair.p - a);
  const double e_p = pair.p / (pair.p - a);

  RatioSeries out;
  out.times = report.times;
  out.ratio.assign(report.size(), 0.0);
  out.present.assign(report.size(), 0);
  double best = -1.0;
  for (size_t k = 0; k < report.size(); ++k) {
    const double den =
        std::max(u0_inf, std::pow(report.fmu[k], e_f) * std::pow(up[k], e_p));
    if (!(den >= 1e-300)) continue;
    const double r = uinf[k] / den;
    out.ratio[k] = r;
    out.present[k] = 1;
    if (!std::isfinite(r)) out.all_finite = false;
    if (r > best) {
      best = r;
      out.t_of_sup = report.times[k];
    }
  }
  out.empirical_K = std::max(best, 0.0);
  return out;
}

L1DecayCheck check_l1_decay(const RunReport& report) {
  const auto& l1 = report.norms.at(1.0);
  if (l1.size() < 2)
    throw std::invalid_argument("check_l1_decay needs at least 2 output times");
  const double tol = 1e-8 * report.u0_l1();
  L1DecayCheck res;
  res.worst_increment = -kInf;
  for (size_t k = 0; k + 1 < l1.size(); ++k) {
    const double inc = l1[k + 1] - l1[k];
    if (inc > res.worst_increment) {
      res.worst_increment = inc;
      res.worst_index = static_cast<int>(k + 1);
    }
  }
  res.pass = res.worst_increment <= tol;
  return res;
}

void write_diagnostics_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "t,l1,l2,lp,linf,mass,energy_cum,U1,Up,Uinf,Fmu\n";
  const auto& l1 = report.norms.at(1.0);
  const auto& l2 = report.norms.at(2.0);
  const auto& lp = report.norms.at(report.report_p);
  const auto& li = report.norms.at(kInf);
  const auto& u1 = report.running_sup.at(1.0);
  const auto& up = report.running_sup.at(report.report_p);
  const auto& ui = report.running_sup.at(kInf);
  for (size_t k = 0; k < report.size(); ++k) {
    out << fmt_full(report.times[k]) << ',' << fmt_full(l1[k]) << ','
        << fmt_full(l2[k]) << ',' << fmt_full(lp[k]) << ',' << fmt_full(li[k])
        << ',' << fmt_full(report.mass_series[k]) << ','
        << fmt_full(report.energy_cum[k]) << ',' << fmt_full(u1[k]) << ','
        << fmt_full(up[k]) << ',' << fmt_full(ui[k]) << ','
        << fmt_full(report.fmu[k]) << '\n';
  }
}

void write_audit_csv(std::span<const PairAudit> audits, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "p,sigma,a,empirical_K,t_of_sup\n";
  for (const auto& a : audits)
    out << fmt_full(a.pair.p) << ',' << fmt_full(a.pair.sigma) << ','
        << fmt_full(a.pair.a()) << ',' << fmt_full(a.empirical_K) << ','
        << fmt_full(a.t_of_sup) << '\n';
}

void write_summary(const RunReport& report, std::span<const PairAudit> audits,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "blow_up: " << (report.flags.blow_up ? "yes" : "no") << '\n';
  out << "boundary_contaminated: "
      << (report.flags.boundary_contaminated ? "yes" : "no") << '\n';
  if (report.flags.blow_up)
    out << "last_valid_time: " << fmt_full(report.flags.last_valid_time) << '\n';
  out << "M1: " << fmt_full(report.m1()) << '\n';
  out << "Minf: " << fmt_full(report.minf()) << '\n';
  out << "final_mass: "
      << fmt_full(report.mass_series.empty() ? 0.0 : report.mass_series.back())
      << '\n';
  out << "energy_cum: "
      << fmt_full(report.energy_cum.empty() ? 0.0 : report.energy_cum.back())
      << '\n';
  out << "Fmu: " << fmt_full(report.fmu.empty() ? 0.0 : report.fmu.back()) << '\n';
  if (!report.flux_bound_note.empty())
    out << "flux_bound: " << report.flux_bound_note << '\n';
  for (const auto& a : audits) {
    out << "empirical_K[p=" << fmt_full(a.pair.p)
        << ",sigma=" << fmt_full(a.pair.sigma) << "]: " << fmt_full(a.empirical_K)
        << " at t=" << fmt_full(a.t_of_sup)
        << (a.all_finite ? "" : " (non-finite entries)") << '\n';
  }
}

}  // namespace pmadv
