#ifndef FTL_UTIL_HPP
#define FTL_UTIL_HPP

#include <random>
#include <string>
#include <vector>

#include "ftl/cpoly.hpp"

namespace ftl {

using Rng = std::mt19937_64;

/// Uniform point on the complex unit sphere S^{2m-1} in C^m.
Eigen::VectorXcd random_unit_vector(Rng& rng, int m);
/// Uniform in the complex unit disc.
Cplx random_disc(Rng& rng);

/// Least-squares line y = a + b x; returns (a, b, r2).
struct LineFit {
  double a = 0, b = 0, r2 = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of log(y) vs log(x); .b is the log-log slope.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Log-spaced grid from lo to hi inclusive (lo < hi), descending option.
std::vector<double> log_grid(double lo, double hi, int count);

/// Format a double with 17 significant digits (CSV contract).
std::string fmt17(double v);

/// Simple CSV writer: header once, then rows of preformatted cells.
struct CsvWriter {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void write() const;
};

/// Environment-overridable seed (FTL_SEED), else the given default.
uint64_t effective_seed(uint64_t config_seed);

} // namespace ftl

#endif
