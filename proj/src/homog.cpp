#include "ftl/homog.hpp"

#include <cmath>
#include <limits>

namespace ftl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Chart + weight engine at one base point; membership at any scale reuses
/// the delta-independent list tensor.
struct BallStation {
  AdaptedChart chart;
  WeightEngine eng;

  BallStation(const ModelDomain& d, const Point& p, const Frame& f, int M,
              double delta_ref)
      : chart(adapted_coords(f, d, p, delta_ref, M)), eng(f, d, p, M) {}

  bool inside(const Point& q, double delta, double c) const {
    Point w = chart.map.apply(q);
    Eigen::VectorXd F = eng.all_F(delta);
    for (int i = 0; i < w.size(); ++i)
      if (std::abs(w[i]) >= c / std::sqrt(F[i])) return false;
    return true;
  }

  Point pull(const Point& w) const { return chart.map.apply_inverse(w); }
};

int eff_M(const ModelDomain& d, const HomogOptions& opt) {
  return opt.M > 0 ? opt.M : d.M;
}

} // namespace

FrameProvider canonical_provider() {
  return [](const ModelDomain& d, const Point&, double) {
    return tangent_frame(d);
  };
}

FrameProvider levi_eigen_provider() {
  return [](const ModelDomain& d, const Point& p, double) {
    Frame f = levi_eigen_frame(d, p);
    // Degenerate Levi points keep the canonical combination.
    return f.degenerate ? tangent_frame(d) : f;
  };
}

double gamma(const ModelDomain& d, const Point& p, const Point& q,
             const FrameProvider& frames, const HomogOptions& opt) {
  if ((p - q).norm() == 0.0) return 0.0;
  Frame f = frames(d, p, opt.delta0);
  BallStation st(d, p, f, eff_M(d, opt), opt.delta0);
  if (!st.inside(q, opt.delta0, opt.c)) return kInf;

  // Decreasing scan to the first exit, then bisection on that bracket.
  std::vector<double> probes = log_grid(opt.delta_floor, opt.delta0,
                                        opt.probes);
  double lo = opt.delta_floor, hi = opt.delta0;
  bool bracketed = false;
  for (int i = (int)probes.size() - 2; i >= 0; --i) {
    if (!st.inside(q, probes[i], opt.c)) {
      lo = probes[i];
      hi = probes[i + 1];
      bracketed = true;
      break;
    }
    hi = probes[i];
  }
  if (!bracketed) return opt.delta_floor; // inside all the way down
  while (hi - lo > opt.rel_tol * lo) {
    double mid = std::sqrt(lo * hi);
    (st.inside(q, mid, opt.c) ? hi : lo) = mid;
  }
  return hi;
}

double engulfing_constant(const ModelDomain& d, const Point& p, double delta,
                          int samples, const FrameProvider& frames,
                          const HomogOptions& opt, uint64_t seed) {
  int n = d.n;
  int M = eff_M(d, opt);
  BallStation stp(d, p, frames(d, p, delta), M, delta);
  Eigen::VectorXd Fp = stp.eng.all_F(delta);
  Rng rng(seed);

  double worst = 1.0;
  int accepted = 0, tries = 0;
  while (accepted < samples && tries < 40 * samples) {
    ++tries;
    // Boundary point of B(p,delta): sample the chart polydisc, pull back,
    // project along Re z_n.
    Point v(n);
    for (int i = 0; i < n; ++i)
      v[i] = opt.c / std::sqrt(Fp[i]) * random_disc(rng);
    Point q0 = stp.pull(v);
    Point zp(n - 1);
    for (int i = 0; i + 1 < n; ++i) zp[i] = q0[i];
    Point q = d.boundary_point(zp, q0[n - 1].imag());
    if (!stp.inside(q, delta, opt.c)) continue;
    ++accepted;

    BallStation stq(d, q, frames(d, q, delta), M, delta);
    Eigen::VectorXd Fq = stq.eng.all_F(delta);
    double need = 1.0;
    for (int s = 0; s < samples; ++s) {
      Point w(n);
      for (int i = 0; i < n; ++i)
        w[i] = opt.c / std::sqrt(Fq[i]) * random_disc(rng);
      Point r = stq.pull(w);
      bool placed = false;
      for (double C = need; C <= 64.0 + 1e-9; C *= std::pow(2.0, 0.25)) {
        if (stp.inside(r, C * delta, opt.c)) {
          need = std::max(need, C);
          placed = true;
          break;
        }
      }
      if (!placed) return kInf;
    }
    worst = std::max(worst, need);
  }
  return worst;
}

double doubling_constant(const ModelDomain& d, const Point& p, double delta,
                         int mc_samples, const FrameProvider& frames,
                         const HomogOptions& opt, uint64_t seed) {
  int M = eff_M(d, opt);
  auto vol = [&](double dl) {
    Frame f = frames(d, p, dl);
    auto chart = std::make_shared<const AdaptedChart>(
        adapted_coords(f, d, p, dl, M));
    return ball_volume(make_pseudo_ball(chart, opt.c), mc_samples, seed).value;
  };
  return vol(2 * delta) / vol(delta);
}

HomogReport homog_report(const ModelDomain& d, const Point& p,
                         const std::vector<double>& deltas,
                         const FrameProvider& frames, const HomogOptions& opt,
                         int point_samples, int ball_samples, uint64_t seed) {
  HomogReport rep;
  rep.domain = d.name;
  rep.frame = "provider";
  rep.point_samples = point_samples;
  rep.ball_samples = ball_samples;
  rep.delta_lo = *std::min_element(deltas.begin(), deltas.end());
  rep.delta_hi = *std::max_element(deltas.begin(), deltas.end());

  for (double dl : deltas) {
    rep.engulfing = std::max(
        rep.engulfing, engulfing_constant(d, p, dl, point_samples, frames, opt,
                                          seed));
    rep.doubling = std::max(
        rep.doubling, doubling_constant(d, p, dl, ball_samples, frames, opt,
                                        seed));
  }

  // Pseudo-distance diagnostics over nearby boundary points (p included).
  Rng rng(seed + 1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Point> pts{p};
  for (int s = 0; s + 1 < point_samples; ++s) {
    Point zp(d.n - 1);
    for (int i = 0; i + 1 < d.n; ++i) zp[i] = 0.02 * Cplx(U(rng), U(rng));
    pts.push_back(d.boundary_point(zp, 0.004 * U(rng)));
  }
  int m = (int)pts.size();
  Eigen::MatrixXd G(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      G(a, b) = a == b ? 0.0 : gamma(d, pts[a], pts[b], frames, opt);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (a == b) continue;
      if (!std::isfinite(G(a, b))) {
        rep.diverged = true;
        continue;
      }
      if (std::isfinite(G(b, a)) && G(b, a) > 0)
        rep.quasi_symmetry = std::max(rep.quasi_symmetry, G(a, b) / G(b, a));
      for (int cpt = 0; cpt < m; ++cpt) {
        if (cpt == a || cpt == b) continue;
        double via = G(a, cpt) + G(cpt, b);
        if (std::isfinite(via) && via > 0)
          rep.quasi_triangle =
              std::max(rep.quasi_triangle, G(a, b) / via);
      }
    }
  return rep;
}

} // namespace ftl
