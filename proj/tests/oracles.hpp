#pragma once

// Shared oracles and helpers for the test suites. Reference values are
// computed with the C standard library (lgamma, pow) so they are independent
// of the implementation under test, or frozen as literal constants.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifdef PSIFRAC_CLI_PATH
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// Gamma(delta)/Gamma(delta+alpha) * u^(delta+alpha-1), the closed-form left
// integral of u^(delta-1), via std::lgamma (not the library's gamma).
inline double power_rule(double delta, double alpha, double u) {
  if (u <= 0.0) return delta + alpha - 1.0 > 0.0 ? 0.0 : INFINITY;
  const double c = std::exp(std::lgamma(delta) - std::lgamma(delta + alpha));
  return c * std::pow(u, delta + alpha - 1.0);
}

// Generalized half-period of the one-dimensional p-Laplacian spectrum.
inline double pi_p(double p) { return 2.0 * kPi / (p * std::sin(kPi / p)); }

// First eigenvalue of the classical p-Laplacian on (0, T).
inline double lambda1_classical(double p, double T) {
  return (p - 1.0) * std::pow(pi_p(p) / T, p);
}

// Deterministic uniform variates for property-style tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double a, double b) {
    const double u = (eng_() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
  }
  int integer(int a, int b) {  // inclusive
    return a + static_cast<int>(eng_() % static_cast<std::uint64_t>(b - a + 1));
  }

 private:
  std::mt19937_64 eng_;
};

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

// max_i |num_i - ref_i| / max_i |ref_i|
inline double rel_max_err(const std::vector<double>& num, const std::vector<double>& ref) {
  const double scale = max_abs(ref);
  return max_abs_diff(num, ref) / (scale > 0.0 ? scale : 1.0);
}

// Interior sign changes, ignoring entries below the noise floor.
inline int sign_changes(const std::vector<double>& v, double floor) {
  int changes = 0, last = 0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (std::fabs(v[i]) <= floor) continue;
    const int s = v[i] > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

inline bool one_signed(const std::vector<double>& v, double floor) {
  return sign_changes(v, floor) == 0;
}

// Overloads with a noise floor relative to the profile's own scale.
inline int sign_changes(const std::vector<double>& v) {
  return sign_changes(v, 1e-7 * max_abs(v));
}
inline bool one_signed(const std::vector<double>& v) {
  return sign_changes(v) == 0;
}

// Piecewise-linear evaluation of (xs, ys) at x; xs strictly increasing.
inline double interp1(const std::vector<double>& xs, const std::vector<double>& ys,
                      double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  std::size_t lo = 0, hi = xs.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (xs[mid] <= x ? lo : hi) = mid;
  }
  const double w = (x - xs[lo]) / (xs[lo + 1] - xs[lo]);
  return ys[lo] + w * (ys[lo + 1] - ys[lo]);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool file_exists(const std::string& path) {
  std::ifstream in(path);
  return in.good();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

#ifdef PSIFRAC_CLI_PATH
// Run the shipped binary with the given argument tail; returns the exit code.
inline int run_cli(const std::string& args) {
  const std::string cmd = std::string(PSIFRAC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc < 0 ? -1 : WEXITSTATUS(rc);
}

inline std::string make_temp_dir(const char* tag) {
  std::string tmpl = std::string("/tmp/psifrac_") + tag + "_XXXXXX";
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (!mkdtemp(buf.data())) return "/tmp";
  return std::string(buf.data());
}
#endif

}  // namespace oracle
