#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace pmadv {

// Bad scenario names, malformed overrides, unknown velocity ids, missing
// problem data. Distinct from std::domain_error, which we reserve for
// out-of-range numeric arguments (q < 1, alpha <= 0, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// |x|^p with cheap paths for the exponents that dominate the hot loops.
inline double pow_abs(double x, double p) {
  if (p == 0.0) return 1.0;
  if (p == 1.0) return std::fabs(x);
  if (p == 2.0) return x * x;
  return std::pow(std::fabs(x), p);
}

// Full-precision formatting used by every emitted CSV: 17 significant
// digits round-trips a double exactly.
inline std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline bool nearly_equal(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace pmadv
