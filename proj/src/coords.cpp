#include "ftl/coords.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

namespace ftl {

namespace {

double key_factorials(const CPoly::Key& k) {
  double f = 1.0;
  for (int e : k)
    for (int j = 2; j <= e; ++j) f *= j;
  return f;
}

int key_total(const CPoly::Key& k, int from, int to) {
  int s = 0;
  for (int i = from; i < to; ++i) s += k[i];
  return s;
}

/// Pure tangential holomorphic part: terms z'^alpha, 1 <= |alpha| <= maxdeg.
CPoly pure_tangential(const CPoly& q, int n, int maxdeg) {
  CPoly out(n);
  for (const auto& [k, c] : q.terms()) {
    if (key_total(k, n, 2 * n) != 0 || k[n - 1] != 0) continue;
    int deg = key_total(k, 0, n - 1);
    if (deg < 1 || deg > maxdeg) continue;
    out.add_term(k, c);
  }
  return out;
}

CPoly trunc_deg(const CPoly& q, int maxdeg) {
  CPoly out(q.n());
  for (const auto& [k, c] : q.terms())
    if (key_total(k, 0, 2 * q.n()) <= maxdeg) out.add_term(k, c);
  return out;
}

/// T(v', v_n - h) truncated to total degree maxdeg (h depends on v' only).
CPoly subst_shear(const CPoly& T, const CPoly& h, int maxdeg) {
  int n = T.n();
  int bmax = 0, bbmax = 0;
  for (const auto& [k, c] : T.terms()) {
    (void)c;
    bmax = std::max(bmax, k[n - 1]);
    bbmax = std::max(bbmax, k[2 * n - 1]);
  }
  CPoly vn = CPoly::variable(n, n - 1) - h;
  CPoly vnb = vn.conj();
  std::vector<CPoly> pn(bmax + 1), pnb(bbmax + 1);
  pn[0] = CPoly::constant(n, 1.0);
  for (int b = 1; b <= bmax; ++b) pn[b] = trunc_deg(pn[b - 1] * vn, maxdeg);
  pnb[0] = CPoly::constant(n, 1.0);
  for (int b = 1; b <= bbmax; ++b)
    pnb[b] = trunc_deg(pnb[b - 1] * vnb, maxdeg);
  CPoly out(n);
  for (const auto& [k, c] : T.terms()) {
    CPoly::Key base = k;
    int b = base[n - 1], bb = base[2 * n - 1];
    base[n - 1] = base[2 * n - 1] = 0;
    if (key_total(base, 0, 2 * n) > maxdeg) continue;
    CPoly mono(n);
    mono.add_term(base, c);
    out += trunc_deg(mono * pn[b] * pnb[bb], maxdeg);
  }
  return out;
}

double max_coeff(const CPoly& q) {
  double m = 0;
  for (const auto& [k, c] : q.terms()) m = std::max(m, std::abs(c));
  return m;
}

Eigen::MatrixXcd frame_matrix(const Frame& f, const Point& p) {
  int n = (int)f.L.size() + 1;
  Eigen::MatrixXcd B(n, n);
  std::vector<Field> fs = f.all_fields();
  for (int i = 0; i < n; ++i) B.col(i) = field_at(fs[i], p);
  return B;
}

} // namespace

Point PolyMap::apply(const Point& z) const {
  Point w((int)forward.size());
  for (int i = 0; i < (int)forward.size(); ++i) w[i] = forward[i].eval(z);
  return w;
}

Point PolyMap::apply_inverse(const Point& w) const {
  Point z((int)inverse.size());
  for (int i = 0; i < (int)inverse.size(); ++i) z[i] = inverse[i].eval(w);
  return z;
}

Cplx PolyMap::inverse_jacobian(const Point& w) const {
  int n = (int)inverse.size();
  Eigen::MatrixXcd J(n, n);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) J(i, a) = inverse[i].deriv(a, false).eval(w);
  return J.determinant();
}

AdaptedChart adapted_coords(const Frame& f, const ModelDomain& d,
                            const Point& p, double delta, int M) {
  int n = d.n;
  Eigen::MatrixXcd B = frame_matrix(f, p);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(B);
  if (!lu.isInvertible())
    throw std::runtime_error("adapted_coords: frame singular at p");
  Eigen::MatrixXcd A = lu.inverse();

  // T(w) = rho(p + B w), exact in w.
  std::vector<CPoly> zofw(n);
  for (int j = 0; j < n; ++j) {
    CPoly zj = CPoly::constant(n, p[j]);
    for (int a = 0; a < n; ++a)
      zj += CPoly::variable(n, a) * B(j, a);
    zofw[j] = zj.pruned(0.0);
  }
  CPoly T = d.rho_poly.compose(zofw);

  // Graded Newton for the shear h(w') killing pure tangential terms: each
  // substitution round strictly raises the minimal degree of the residual.
  CPoly::Key lam_key(2 * n, 0);
  lam_key[n - 1] = 1;
  Cplx lam = T.coeff(lam_key);
  if (std::abs(lam) < 1e-12)
    throw std::runtime_error("adapted_coords: degenerate normal pairing");

  // Each correction strictly raises the minimal degree of the pure residual,
  // so 2M+2 rounds reach the exact fixed point (up to roundoff). S holds the
  // chart expansion of rho through total degree 2M.
  CPoly h(n);
  CPoly S = trunc_deg(T, 2 * M);
  for (int iter = 0; iter < 2 * M + 2; ++iter) {
    CPoly res = pure_tangential(S, n, 2 * M);
    if (max_coeff(res) < 1e-16) break;
    h += res * (1.0 / lam);
    h = h.pruned(1e-300);
    S = subst_shear(T, h, 2 * M).pruned(1e-300);
  }
  // The exact fixed point has identically zero pure tangential part (the
  // degree-graded corrections terminate), so sub-roundoff pure coefficients
  // are composition noise and are snapped to their exact value.
  {
    CPoly cleaned(n);
    for (const auto& [k, c] : S.terms()) {
      int ha = key_total(k, 0, n - 1), aa = key_total(k, n, 2 * n - 1);
      bool pure = (k[n - 1] == 0 && k[2 * n - 1] == 0) &&
                  ((ha > 0 && aa == 0) || (ha == 0 && aa > 0)) &&
                  ha + aa <= 2 * M;
      if (pure && std::abs(c) < 1e-12) continue;
      cleaned.add_term(k, c);
    }
    S = cleaned;
  }

  AdaptedChart ch;
  ch.delta = delta;
  ch.M = M;
  ch.rho_chart = S;

  PolyMap& m = ch.map;
  m.p = p;
  m.forward.resize(n);
  m.inverse.resize(n);
  std::vector<CPoly> linw(n); // w = A (z - p)
  for (int i = 0; i < n; ++i) {
    CPoly wi(n);
    for (int j = 0; j < n; ++j) {
      wi += CPoly::variable(n, j) * A(i, j);
      wi += CPoly::constant(n, -A(i, j) * p[j]);
    }
    linw[i] = wi.pruned(0.0);
  }
  for (int i = 0; i + 1 < n; ++i) m.forward[i] = linw[i];
  m.forward[n - 1] = (linw[n - 1] + h.compose(linw)).pruned(0.0);
  for (int j = 0; j < n; ++j) {
    CPoly zj = CPoly::constant(n, p[j]);
    for (int a = 0; a < n; ++a) zj += CPoly::variable(n, a) * B(j, a);
    zj += h * (-B(j, n - 1));
    m.inverse[j] = zj.pruned(0.0);
  }
  for (int i = 0; i < n; ++i) {
    m.degree = std::max({m.degree, m.forward[i].degree(), m.inverse[i].degree()});
    m.coeff_bound =
        std::max({m.coeff_bound, max_coeff(m.forward[i]), max_coeff(m.inverse[i])});
  }
  {
    Rng rng(977);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 20; ++t) {
      Point w(n);
      for (int i = 0; i < n; ++i) w[i] = 0.1 * Cplx(U(rng), U(rng));
      Point back = m.apply(m.apply_inverse(w));
      m.roundtrip_residual =
          std::max(m.roundtrip_residual, (back - w).cwiseAbs().maxCoeff());
    }
  }

  // Condition (2) residual and condition (4) constant.
  WeightEngine eng(f, d, p, M);
  ch.F = eng.all_F(delta);
  for (const auto& [k, c] : S.terms()) {
    int ha = key_total(k, 0, n - 1), aa = key_total(k, n, 2 * n - 1);
    bool pure = (k[n - 1] == 0 && k[2 * n - 1] == 0) &&
                ((ha > 0 && aa == 0) || (ha == 0 && aa > 0));
    if (pure && ha + aa <= 2 * M)
      ch.max_pure = std::max(ch.max_pure, std::abs(c) * key_factorials(k));
    int tot = key_total(k, 0, 2 * n);
    if (tot >= 1 && tot <= M) {
      double fpow = 1.0;
      for (int i = 0; i < n; ++i)
        fpow *= std::pow(ch.F[i], 0.5 * (k[i] + k[n + i]));
      double bound = std::min(delta * fpow, 1.0);
      ch.K_prime =
          std::max(ch.K_prime, std::abs(c) * key_factorials(k) / bound);
    }
  }

  // Condition (3) triangular residual (measured only; needs polynomial
  // frame coefficients).
  ch.cond3_max = 0;
  bool poly_frame = true;
  for (int ii = 0; ii + 1 < n && poly_frame; ++ii)
    for (int kk = 0; kk < n; ++kk)
      if (!expr_as_poly(f.L[ii].holo[kk])) poly_frame = false;
  if (!poly_frame) {
    ch.cond3_max = std::numeric_limits<double>::quiet_NaN();
  } else {
    for (int ii = 0; ii + 1 < n; ++ii)
      for (int jj = 0; jj < ii; ++jj) {
        CPoly aij(n);
        for (int kk = 0; kk < n; ++kk)
          aij += m.forward[jj].deriv(kk, false) *
                 (*expr_as_poly(f.L[ii].holo[kk]));
        CPoly aw = aij.compose(m.inverse);
        for (const auto& [k, c] : aw.terms()) {
          if (key_total(k, n, 2 * n) != 0) continue;
          int deg = key_total(k, 0, n);
          if (deg < 1 || deg > M) continue;
          bool supported = true;
          for (int s = 0; s < n; ++s)
            if (k[s] != 0 && (s <= jj || s > ii)) supported = false;
          if (supported)
            ch.cond3_max =
                std::max(ch.cond3_max, std::abs(c) * key_factorials(k));
        }
      }
  }
  return ch;
}

PseudoBall make_pseudo_ball(std::shared_ptr<const AdaptedChart> chart,
                            double c) {
  PseudoBall b;
  b.kind = BallKind::polydisc_pullback;
  b.p = chart->map.p;
  b.delta = chart->delta;
  b.c = c;
  b.radii = (c * chart->F.cwiseSqrt().cwiseInverse()).eval();
  b.chart = std::move(chart);
  return b;
}

bool ball_membership(const Point& q, const PseudoBall& b) {
  if (b.kind != BallKind::polydisc_pullback)
    throw std::invalid_argument("ball_membership needs a polydisc pullback");
  Point w = b.chart->map.apply(q);
  for (int i = 0; i < w.size(); ++i)
    if (std::abs(w[i]) >= b.radii[i]) return false;
  return true;
}

Point exp_ball_point(const Frame& f, const ModelDomain& d, const Point& p,
                     double delta, const Eigen::VectorXd& u,
                     const ExpOptions& opt) {
  (void)delta;
  int n = d.n;
  if (u.size() != 2 * n)
    throw std::invalid_argument("exp_ball_point: u needs 2n entries");
  Eigen::VectorXcd c(n);
  for (int i = 0; i < n; ++i) c[i] = Cplx(u[i], u[n + i]);
  std::vector<Field> fs = f.all_fields();
  if (opt.frozen) {
    Point v = p;
    for (int i = 0; i < n; ++i) v += c[i] * field_at(fs[i], p);
    return v;
  }
  auto vel = [&](const Point& z) {
    Point v = Point::Zero(n);
    for (int i = 0; i < n; ++i)
      if (c[i] != Cplx(0.0)) v += c[i] * field_at(fs[i], z);
    return v;
  };
  double limit = 2.0 * d.window + 1.0;
  Point z = p;
  double dt = 1.0 / opt.steps;
  for (int s = 0; s < opt.steps; ++s) {
    Point k1 = vel(z);
    Point k2 = vel(z + 0.5 * dt * k1);
    Point k3 = vel(z + 0.5 * dt * k2);
    Point k4 = vel(z + dt * k3);
    z += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (z.cwiseAbs().maxCoeff() > limit)
      throw std::runtime_error("exp_ball_point: flow left the window");
  }
  return z;
}

BallEquivalence ball_equivalence_check(const Frame& f, const ModelDomain& d,
                                       const Point& p, double delta, double c,
                                       int samples, uint64_t seed,
                                       const ExpOptions& opt) {
  int n = d.n;
  auto chart = std::make_shared<const AdaptedChart>(
      adapted_coords(f, d, p, delta, d.M));
  PseudoBall ball = make_pseudo_ball(chart, c);
  Eigen::MatrixXcd B = frame_matrix(f, p);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(B);

  Rng rng(seed);
  std::uniform_real_distribution<double> TH(0.0, 2 * M_PI);

  BallEquivalence out;
  out.samples = samples;

  // Directions on the polydisc torus, reused across the alpha bisection.
  std::vector<Eigen::VectorXcd> dirs;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXcd w(n);
    for (int i = 0; i < n; ++i) w[i] = std::polar(1.0, TH(rng));
    dirs.push_back(w);
  }
  auto exp_of = [&](const Eigen::VectorXcd& coords) {
    Eigen::VectorXd u(2 * n);
    for (int i = 0; i < n; ++i) {
      u[i] = coords[i].real();
      u[n + i] = coords[i].imag();
    }
    return exp_ball_point(f, d, p, delta, u, opt);
  };
  auto all_inside = [&](double a) {
    for (const auto& w : dirs) {
      Eigen::VectorXcd coords(n);
      for (int i = 0; i < n; ++i) coords[i] = a * ball.radii[i] * w[i];
      try {
        if (!ball_membership(exp_of(coords), ball)) return false;
      } catch (const std::runtime_error&) {
        return false;
      }
    }
    return true;
  };
  double lo = 1.0 / 64, hi = 4.0;
  if (!all_inside(lo)) {
    out.alpha = 0;
  } else if (all_inside(hi)) {
    out.alpha = hi;
  } else {
    for (int it = 0; it < 30; ++it) {
      double mid = 0.5 * (lo + hi);
      (all_inside(mid) ? lo : hi) = mid;
    }
    out.alpha = lo;
  }

  // Shooting: invert exp on sampled ball points with a frozen-Jacobian
  // Newton iteration (d exp ~ B near the base point).
  double beta = 0;
  for (int s = 0; s < samples; ++s) {
    Point v(n);
    for (int i = 0; i < n; ++i) v[i] = ball.radii[i] * random_disc(rng);
    Point q = chart->map.apply_inverse(v);
    Eigen::VectorXcd coords = lu.solve(q - p);
    bool okc = false;
    double scale = std::max(1.0, (q - p).norm());
    for (int it = 0; it < 80; ++it) {
      Point r = exp_of(coords) - q;
      if (r.norm() <= 1e-11 * scale) {
        okc = true;
        break;
      }
      coords -= lu.solve(r);
    }
    if (!okc) {
      ++out.shooting_failures;
      continue;
    }
    double need = 0;
    for (int i = 0; i < n; ++i)
      need = std::max(need, std::abs(coords[i]) * std::sqrt(chart->F[i]));
    beta = std::max(beta, need / c);
  }
  out.beta = beta;
  return out;
}

VolumeEstimate ball_volume(const PseudoBall& b, int mc_samples, uint64_t seed,
                           double window) {
  int n = (int)b.radii.size();
  const PolyMap& m = b.chart->map;
  int workers = 4;
  auto run = [&](int widx) {
    Rng rng(seed + 1000003 * widx);
    long count = mc_samples / workers + (widx < mc_samples % workers ? 1 : 0);
    double sum = 0, sumsq = 0;
    Point v(n);
    for (long s = 0; s < count; ++s) {
      for (int i = 0; i < n; ++i) v[i] = b.radii[i] * random_disc(rng);
      double wgt = std::norm(m.inverse_jacobian(v));
      if (window > 0) {
        Point z = m.apply_inverse(v);
        if (z.cwiseAbs().maxCoeff() > window) wgt = 0;
      }
      sum += wgt;
      sumsq += wgt * wgt;
    }
    return std::array<double, 3>{sum, sumsq, (double)count};
  };
  std::vector<std::future<std::array<double, 3>>> futs;
  for (int wdx = 0; wdx < workers; ++wdx)
    futs.push_back(std::async(std::launch::async, run, wdx));
  double sum = 0, sumsq = 0, count = 0;
  for (auto& fu : futs) {
    auto r = fu.get();
    sum += r[0];
    sumsq += r[1];
    count += r[2];
  }
  double base = 1.0;
  for (int i = 0; i < n; ++i) base *= M_PI * b.radii[i] * b.radii[i];
  double mean = sum / count;
  double var = std::max(0.0, sumsq / count - mean * mean);
  VolumeEstimate est;
  est.value = base * mean;
  est.std_error = base * std::sqrt(var / count);
  est.samples = (int)count;
  return est;
}

double find_c0(const std::shared_ptr<const AdaptedChart>& chart,
               const ModelDomain& d, int samples, uint64_t seed) {
  int n = d.n;
  Rng rng(seed);
  std::vector<Eigen::VectorXcd> unit;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXcd u(n);
    for (int i = 0; i < n; ++i) u[i] = random_disc(rng);
    unit.push_back(u);
  }
  Eigen::VectorXd base = chart->F.cwiseSqrt().cwiseInverse();
  auto ok = [&](double c) {
    for (const auto& u : unit) {
      Point v(n);
      for (int i = 0; i < n; ++i) v[i] = c * base[i] * u[i];
      Point q = chart->map.apply_inverse(v);
      if (std::abs(d.rho_poly.eval(q).real()) > 0.5 * chart->delta)
        return false;
    }
    return true;
  };
  if (ok(0.5)) return 0.5;
  double lo = 1e-4;
  if (!ok(lo)) return 0.0;
  double hi = 0.5;
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

} // namespace ftl
