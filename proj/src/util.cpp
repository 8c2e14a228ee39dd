#include "ftl/util.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace ftl {

Eigen::VectorXcd random_unit_vector(Rng& rng, int m) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(m);
  double s2;
  do {
    for (int i = 0; i < m; ++i) v[i] = Cplx(g(rng), g(rng));
    s2 = v.norm();
  } while (s2 < 1e-12);
  return v / s2;
}

Cplx random_disc(Rng& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double r = std::sqrt(U(rng));
  double th = 2.0 * M_PI * U(rng);
  return Cplx(r * std::cos(th), r * std::sin(th));
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  LineFit f;
  f.b = (n * sxy - sx * sy) / den;
  f.a = (sy - f.b * sx) / n;
  double ss_tot = syy - sy * sy / n;
  double ss_res = 0;
  for (size_t i = 0; i < n; ++i) {
    double e = y[i] - (f.a + f.b * x[i]);
    ss_res += e * e;
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    g[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
  return g;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::write() const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows)
    for (size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

uint64_t effective_seed(uint64_t config_seed) {
  if (const char* s = std::getenv("FTL_SEED")) return std::strtoull(s, nullptr, 10);
  return config_seed;
}

} // namespace ftl
