#include "ftl/psh.hpp"

#include <cmath>
#include <algorithm>
#include <future>
#include <sstream>
#include <stdexcept>

namespace ftl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Smooth transition 0 -> 1 on [0,1] built from the one-sided bump profile:
/// g(v) / (g(v) + g(1-v)) with g(v) = exp(-1/v) for v > 0. Exactly 0 for
/// v <= 0 and exactly 1 for v >= 1, with closed-form derivatives.
Expr smooth_step(const Expr& v, int n) {
  Expr g1 = make_bump(0.0, 1.0, 0, v);
  Expr g2 = make_bump(0.0, 1.0, 0, make_const(n, 1.0) - v);
  return g1 * make_pow(make_sum({g1, g2}), -1.0);
}

/// Substitute the exact boundary projection pi (z_n -> z_n - rho(z), other
/// slots fixed) into a polynomial. rho is linear in Re z_n, so this lands on
/// the boundary exactly.
CPoly subst_projection(const CPoly& f, const ModelDomain& d) {
  int n = d.n;
  CPoly pin = CPoly::variable(n, n - 1) - d.rho_poly;
  CPoly pinc = CPoly::variable(n, n - 1, true) - d.rho_poly;
  CPoly out(n);
  for (const auto& [k, cf] : f.terms()) {
    CPoly t = CPoly::constant(n, cf);
    for (int s = 0; s < n; ++s) {
      int a = k[s], b = k[n + s];
      if (s == n - 1) {
        if (a) t = t * pin.pow(a);
        if (b) t = t * pinc.pow(b);
      } else {
        CPoly::Key kk(2 * n, 0);
        kk[s] = a;
        kk[n + s] = b;
        if (a || b) {
          CPoly m(n);
          m.add_term(kk, 1.0);
          t = t * m;
        }
      }
    }
    out += t;
  }
  return out.pruned(1e-300);
}

const CPoly* as_poly_or_throw(const Expr& e, const char* what) {
  const CPoly* p = expr_as_poly(e);
  if (!p)
    throw std::runtime_error(std::string("psh: non-polynomial ") + what);
  return p;
}

std::string poly_key(const CPoly& p) {
  std::ostringstream os;
  for (const auto& [k, c] : p.terms()) {
    for (int e : k) os << e << ',';
    os << fmt17(c.real()) << ' ' << fmt17(c.imag()) << ';';
  }
  return os.str();
}

/// Real and imaginary parts of a polynomial-valued expression as CPolys.
std::pair<CPoly, CPoly> re_im(const CPoly& g) {
  CPoly re = (g + g.conj()) * 0.5;
  CPoly im = (g - g.conj()) * Cplx(0, -0.5);
  return {re.pruned(1e-12), im.pruned(1e-12)};
}

std::vector<std::vector<PSHComponent>> slot_components(const Frame& fr,
                                                       const ModelDomain& d,
                                                       const Point& p,
                                                       double delta, int M) {
  int n = d.n;
  std::vector<Field> fields = fr.all_fields();
  WeightEngine eng(fr, d, p, M);
  std::vector<std::vector<PSHComponent>> slots(n - 1);

  for (int i = 0; i + 1 < n; ++i) {
    double Fi = eng.F(i, delta);
    auto push = [&](PSHComponent comp) {
      comp.slot = i;
      comp.ratio_p = Fi > 0 ? comp.value_p / Fi : 0.0;
      slots[i].push_back(std::move(comp));
    };

    // Levi component |c_ii| / delta.
    ListSpec levi;
    levi.word = {Letter{i, false}, Letter{i, true}};
    CPoly cii =
        (*as_poly_or_throw(list_apply(levi, fields, d.rho), "Levi value"))
            .pruned(1e-12);
    CPoly cre = re_im(cii).first; // diagonal Levi coefficient is real
    if (!cre.is_zero()) {
      PSHComponent comp;
      comp.order = 2;
      comp.levi = true;
      comp.spec = levi;
      comp.phi = make_poly(cre);
      comp.mag2 = make_poly((cre * cre).pruned(1e-300));
      comp.value_p = std::abs(cre.eval(p).real()) / delta;
      push(std::move(comp));
    }

    // |L_i phi / delta|^{2/l} for phi = Re/Im of length-(l-1) lists in the
    // single direction L_i.
    std::map<std::string, bool> seen;
    for (int l = 3; l <= M; ++l) {
      int len = l - 1;
      for (int mask = 0; mask < (1 << len); ++mask) {
        ListSpec spec;
        for (int s = 0; s < len; ++s)
          spec.word.push_back(Letter{i, ((mask >> s) & 1) != 0});
        CPoly g =
            (*as_poly_or_throw(list_apply(spec, fields, d.rho), "list value"))
                .pruned(1e-12);
        if (g.is_zero()) continue;
        auto [re, im] = re_im(g);
        for (int part = 0; part < 2; ++part) {
          const CPoly& phi = part ? im : re;
          if (phi.is_zero()) continue;
          if (!seen.emplace(poly_key(phi), true).second) continue;
          CPoly dphi =
              (*as_poly_or_throw(apply_field(fr.L[i], make_poly(phi)),
                                 "component derivative"))
                  .pruned(1e-12);
          if (dphi.is_zero()) continue;
          PSHComponent comp;
          comp.order = l;
          comp.levi = false;
          comp.im_part = part == 1;
          comp.spec = spec;
          comp.phi = make_poly(phi);
          comp.mag2 = make_poly((dphi * dphi.conj()).pruned(1e-300));
          double m2 = std::abs(eval_at(comp.mag2, p).real());
          comp.value_p = std::pow(m2 / (delta * delta), 1.0 / l);
          push(std::move(comp));
        }
      }
    }
  }
  return slots;
}

/// chi_0: radial chart bump, identically 1 on the half-scale ellipsoid of
/// B^c(p,delta) and exactly 0 outside it, evaluated at the projection pi(q).
Expr chart_bump(const AdaptedChart& chart, const ModelDomain& d, double c) {
  int n = d.n;
  CPoly s(n);
  for (int k = 0; k < n; ++k) {
    CPoly w = subst_projection(chart.map.forward[k], d);
    s += (w * w.conj()) * (chart.F[k] / (c * c));
  }
  // Complementary form step(1 - v): value and all derivatives are exactly
  // zero outside the ball (v >= 1), since the bump numerator vanishes there.
  Expr v = make_scale(1.0 / 0.75,
                      make_poly(s.pruned(1e-300)) + make_const(n, -0.25));
  return smooth_step(make_const(n, 1.0) - v, n);
}

Expr local_piece(const AdaptedChart& chart, const ModelDomain& d,
                 const ComponentTuple& tuple, double lambda, double B,
                 double c, double delta) {
  int n = d.n;
  std::vector<Expr> factors;
  // Dominance cutoffs, one per slot, thresholded on the smooth |L phi|^2.
  for (int i = 0; i + 1 < n; ++i) {
    const PSHComponent& comp = tuple.f[i];
    double Fl = std::pow(chart.F[i], comp.order);
    double lo = std::pow(2.0 * B, -comp.order);
    double hi = std::pow(B, -comp.order);
    Expr u = make_scale(1.0 / (delta * delta * Fl), comp.mag2);
    Expr v = make_scale(1.0 / (hi - lo), u + make_const(n, -lo));
    factors.push_back(smooth_step(v, n));
  }
  factors.push_back(chart_bump(chart, d, c));
  Expr chi = make_prod(std::move(factors));

  std::vector<Expr> pieces;
  for (int i : tuple.I) {
    const PSHComponent& comp = tuple.f[i];
    double scale =
        lambda / delta * std::pow(chart.F[i], 0.5 * (1 - comp.order));
    Expr lpsi = make_scale(scale, comp.phi);
    // Both exponential signs: the component family lists Re/Im of each list
    // value but not their negatives, and either sign of psi must activate.
    pieces.push_back(make_exp(lpsi) + make_exp(make_scale(-1.0, lpsi)));
  }
  return make_scale(std::pow(lambda, -1.5), make_sum(std::move(pieces)) * chi);
}

struct Probe {
  Point q;
  std::vector<Eigen::VectorXcd> dirs; // frame coefficients, normal last
};

std::vector<Probe> make_probes(const ModelDomain& d, const Point& p0,
                               const Eigen::VectorXd& F0, double c,
                               double delta, double strip, int count,
                               int ndirs, uint64_t seed) {
  int n = d.n;
  Rng rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Eigen::VectorXcd> dirs;
  for (int i = 0; i < n; ++i)
    dirs.push_back(Eigen::VectorXcd::Unit(n, i));
  while ((int)dirs.size() < ndirs) dirs.push_back(random_unit_vector(rng, n));

  std::vector<Probe> probes;
  for (int s = 0; s < count; ++s) {
    Point zp(n - 1);
    for (int i = 0; i + 1 < n; ++i)
      zp[i] = p0[i] +
              0.8 * (c / 2) / std::sqrt(F0[i]) * random_disc(rng);
    double imn = p0[n - 1].imag() + 0.8 * (c / 2) * delta * (2 * U(rng) - 1);
    Point q = d.boundary_point(zp, imn);
    q[n - 1] -= std::max(1e-4, U(rng)) * strip * delta; // rho(q) = -t*strip*d
    probes.push_back({q, dirs});
  }
  return probes;
}

std::vector<std::vector<Expr>> hessian_exprs(const Expr& H, int n) {
  std::vector<std::vector<Expr>> hess(n, std::vector<Expr>(n));
  for (int j = 0; j < n; ++j) {
    Expr dj = derive(H, j, false);
    for (int k = 0; k < n; ++k) hess[j][k] = derive(dj, k, true);
  }
  return hess;
}

Eigen::MatrixXcd eval_hessian(const std::vector<std::vector<Expr>>& hess,
                              EvalCtx& ctx) {
  int n = (int)hess.size();
  Eigen::MatrixXcd M(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) M(j, k) = eval(hess[j][k], ctx);
  return 0.5 * (M + M.adjoint().eval());
}

/// <ddbar H; L, Lbar> for the field with euclidean coefficients v.
double pairing(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& v) {
  return (v.adjoint() * M * v)(0, 0).real();
}

Eigen::VectorXcd euclid_coeffs(const Frame& fr, const Eigen::VectorXcd& b,
                               const Point& q) {
  int n = fr.N.n();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  for (int i = 0; i + 1 < n; ++i) v += b[i] * field_at(fr.L[i], q);
  v += b[n - 1] * field_at(fr.N, q);
  return v;
}

} // namespace

std::vector<ComponentTuple> enumerate_components(const Frame& f,
                                                 const ModelDomain& d,
                                                 const Point& p, double delta,
                                                 int M) {
  if (M > 8) throw std::invalid_argument("enumerate_components: M > 8");
  int n = d.n;
  auto slots = slot_components(f, d, p, delta, M);

  std::vector<ComponentTuple> tuples;
  std::vector<int> idx(n - 1, 0);
  bool any_empty = false;
  for (auto& s : slots) any_empty |= s.empty();
  while (true) {
    ComponentTuple t;
    t.degenerate = any_empty;
    t.dominance = kInf;
    for (int i = 0; i + 1 < n; ++i) {
      if (slots[i].empty()) {
        PSHComponent zero;
        zero.slot = i;
        zero.phi = make_const(n, 0.0);
        zero.mag2 = make_const(n, 0.0);
        t.f.push_back(zero);
        t.dominance = 0;
        continue;
      }
      const PSHComponent& comp = slots[i][idx[i]];
      t.f.push_back(comp);
      if (!comp.levi) t.I.push_back(i);
      t.dominance = std::min(t.dominance, comp.ratio_p);
    }
    if (!t.degenerate && !std::isfinite(t.dominance)) t.dominance = 0;
    tuples.push_back(std::move(t));
    int i = n - 2;
    for (; i >= 0; --i) {
      if (slots[i].empty()) continue;
      if (++idx[i] < (int)slots[i].size()) break;
      idx[i] = 0;
    }
    if (i < 0) break;
  }
  return tuples;
}

Expr local_H(const Frame& f, const ModelDomain& d, const Point& p,
             double delta, const ComponentTuple& tuple, double lambda,
             double B, double c) {
  if (lambda <= 1.0) throw std::invalid_argument("local_H: lambda <= 1");
  if (c > 0.5) throw std::invalid_argument("local_H: c > 1/2");
  if (tuple.degenerate || tuple.I.empty()) return make_const(d.n, 0.0);
  AdaptedChart chart = adapted_coords(f, d, p, delta, d.M);
  return local_piece(chart, d, tuple, lambda, B, c, delta);
}

PSHAssembly assemble_H(const ModelDomain& d, const Point& p0,
                       const FrameProvider& frames, double delta,
                       const PSHOptions& opt) {
  int n = d.n;
  int M = d.M;
  Point pb = d.boundary_point(p0.head(n - 1), p0[n - 1].imag());
  Frame f0 = frames(d, pb, delta);
  WeightEngine eng0(f0, d, pb, M);
  Eigen::VectorXd F0 = eng0.all_F(delta);

  auto chart0 = std::make_shared<const AdaptedChart>(
      adapted_coords(f0, d, pb, delta, M));
  double c0 = find_c0(chart0, d, 3000, opt.seed);
  if (opt.c > c0)
    throw std::invalid_argument("assemble_H: c exceeds the measured c0");
  double c = opt.c;

  PSHAssembly out;
  out.delta = delta;
  out.p0 = pb;
  out.c = c;
  out.c0 = c0;

  // Greedy maximal packing of the boundary patch by B^{c/2} balls.
  struct Station {
    Point p;
    Frame frame;
    std::shared_ptr<const AdaptedChart> chart;
    PseudoBall half, full;
  };
  auto make_station = [&](const Point& q) {
    Station st;
    st.p = q;
    st.frame = frames(d, q, delta);
    st.chart = std::make_shared<const AdaptedChart>(
        adapted_coords(st.frame, d, q, delta, M));
    st.half = make_pseudo_ball(st.chart, c / 2);
    st.full = make_pseudo_ball(st.chart, c);
    return st;
  };
  std::vector<Station> stations;
  stations.push_back(make_station(pb));
  {
    Rng rng(opt.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int cand = 0; cand < 200; ++cand) {
      Point zp(n - 1);
      for (int i = 0; i + 1 < n; ++i)
        zp[i] = pb[i] + 0.95 * (c / 2) / std::sqrt(F0[i]) * random_disc(rng);
      Point q = d.boundary_point(zp, pb[n - 1].imag() +
                                         0.95 * (c / 2) * delta * U(rng));
      bool covered = false;
      for (const auto& st : stations)
        if (ball_membership(q, st.half)) {
          covered = true;
          break;
        }
      if (covered) continue;
      if ((int)stations.size() >= opt.cover_cap)
        throw std::runtime_error("assemble_H: cover exceeds the size cap");
      stations.push_back(make_station(q));
    }
  }
  for (const auto& st : stations) out.centers.push_back(st.p);

  double C = std::max(1.0, check_eb1(f0, d, pb, delta, M, 100).K_est);

  // Local pieces with the lexicographic (A_f, B_f, eps_f) schedule, clamped.
  std::vector<Expr> pieces;
  for (const auto& st : stations) {
    auto slots = [&] {
      // Split the enumerated tuples back into per-slot component lists.
      auto all = enumerate_components(st.frame, d, st.p, delta, M);
      std::vector<std::vector<PSHComponent>> sl(n - 1);
      std::map<std::pair<int, std::string>, bool> seen;
      for (const auto& t : all)
        for (const auto& comp : t.f) {
          const CPoly* pp = expr_as_poly(comp.phi);
          if (!pp || pp->is_zero()) continue;
          if (seen.emplace(std::make_pair(comp.slot, poly_key(*pp)), true)
                  .second)
            sl[comp.slot].push_back(comp);
        }
      return sl;
    }();

    Rng brng(opt.seed + 77);
    std::vector<Point> ball_pts;
    for (int s = 0; s < 64; ++s) {
      Point w(n);
      for (int i = 0; i < n; ++i)
        w[i] = st.full.radii[i] * random_disc(brng);
      ball_pts.push_back(st.chart->map.apply_inverse(w));
    }
    // Scale-free dominance f/F_i(p) maximized over the ball; keep the Levi
    // component plus the few best list components per slot.
    double D = 1.0;
    for (int i = 0; i + 1 < n; ++i) {
      auto& sl = slots[i];
      std::vector<std::pair<double, int>> rank;
      for (int j = 0; j < (int)sl.size(); ++j) {
        double best = 0;
        for (const auto& q : ball_pts)
          best = std::max(best, std::abs(eval_at(sl[j].mag2, q).real()));
        double dom = std::pow(best / (delta * delta *
                                      std::pow(st.chart->F[i], sl[j].order)),
                              1.0 / sl[j].order);
        rank.push_back({dom, j});
      }
      std::sort(rank.rbegin(), rank.rend());
      if (!rank.empty() && rank[0].first > 0)
        D = std::max(D, 1.0 / rank[0].first);
      std::vector<PSHComponent> kept;
      for (int r = 0; r < (int)rank.size() && (int)kept.size() < 4; ++r) {
        if (rank[r].first < 0.05) break; // can never clear a 1/(2B) cutoff
        kept.push_back(sl[rank[r].second]);
      }
      sl = std::move(kept);
    }
    // Small fixed dominance constant: sharp thresholds make the cutoff's
    // second derivatives scale like B^l, which swamps the calibration.
    double B = std::clamp(1.2 * D, 2.0, 6.0);

    // Tuples over the kept components, lexicographic; amplitudes follow the
    // clamped A_f recursion (largest element first).
    std::vector<ComponentTuple> tuples;
    {
      std::vector<int> idx(n - 1, 0);
      bool any_empty = false;
      for (auto& sl : slots) any_empty |= sl.empty();
      if (!any_empty) {
        while (true) {
          ComponentTuple t;
          t.dominance = kInf;
          for (int i = 0; i + 1 < n; ++i) {
            const PSHComponent& comp = slots[i][idx[i]];
            t.f.push_back(comp);
            if (!comp.levi) t.I.push_back(i);
            t.dominance = std::min(t.dominance, comp.ratio_p);
          }
          tuples.push_back(std::move(t));
          int i = n - 2;
          for (; i >= 0; --i) {
            if (++idx[i] < (int)slots[i].size()) break;
            idx[i] = 0;
          }
          if (i < 0) break;
        }
      }
    }
    out.tuples = (int)tuples.size();
    if ((int)tuples.size() > opt.tuple_cap)
      throw std::runtime_error("assemble_H: schedule exceeds the tuple cap");

    int m = (int)tuples.size();
    std::vector<double> A(std::max(m, 1), 0.0);
    if (m > 0) A[m - 1] = std::min(opt.A_max, C * std::pow(4.0, M * n + 1));
    double sumAp = 0;
    for (int j = m - 1; j >= 0; --j) {
      if (j < m - 1) A[j] = std::min(opt.A_max, 3.0 * C * sumAp);
      double lam = std::min(opt.lambda_max, 1.0 + std::log1p(A[j]));
      sumAp += std::min(opt.A_max, std::sqrt(lam) * std::exp(2 * lam) * A[j]);
    }
    for (int j = 0; j < m; ++j) {
      const ComponentTuple& t = tuples[j];
      if (t.I.empty()) continue;
      double lam = std::min(opt.lambda_max, 1.0 + std::log1p(A[j]));
      pieces.push_back(local_piece(*st.chart, d, t, lam, B, c, delta));
      ++out.local_pieces;
    }
  }
  Expr Hloc = pieces.empty() ? make_const(n, 0.0)
                             : make_sum(std::move(pieces));

  // Calibration probes: measure the local and exponential negativity
  // relative to the weight F(L,q,delta) itself. The compensating quadratic
  // below is F-scaled, so weight-normalized constants stay delta-stable.
  auto probes = make_probes(d, pb, F0, c, delta, 2.0, opt.probe_samples,
                            n + 3, opt.seed + 5);
  Expr erho = make_exp(make_poly(d.rho_poly * (1.0 / delta)));
  auto hloc = hessian_exprs(Hloc, n);
  auto hexp = hessian_exprs(erho, n);

  double gamma1 = 0, K0 = 0;
  for (const auto& pr : probes) {
    EvalCtx ctx(pr.q);
    Eigen::MatrixXcd Ml = eval_hessian(hloc, ctx);
    Eigen::MatrixXcd Me = eval_hessian(hexp, ctx);
    WeightEngine engq(f0, d, pr.q, M);
    for (const auto& b : pr.dirs) {
      Eigen::VectorXcd v = euclid_coeffs(f0, b, pr.q);
      double Fb = engq.weight(b, delta).value;
      if (Fb <= 0) continue;
      gamma1 = std::max(gamma1, -pairing(Ml, v) / Fb);
      K0 = std::max(K0, -pairing(Me, v) / Fb);
    }
  }
  out.gamma1 = gamma1;
  out.K0 = K0;
  out.A = 1.0;
  out.B_const = 2.0 * (gamma1 + K0 * out.A) + 1.0;

  // F-scaled distance square: Hessian diag(F_1,...,F_{n-1}, delta^{-2}),
  // the same shape as the weight, so B_const * dist2 restores Hessian
  // domination wherever the local pieces dip negative.
  CPoly dist2(n);
  for (int i = 0; i < n; ++i) {
    CPoly w = CPoly::variable(n, i) - CPoly::constant(n, pb[i]);
    dist2 += (w * w.conj()) * F0[i];
  }
  Expr Hpre = Hloc + make_scale(out.A, erho) +
              make_scale(out.B_const, make_poly(dist2));

  // beta-balancing scale: sup|H| grows with t while the Hessian-domination
  // ratio shrinks with it; pick the crossover on a probe subset.
  auto hpre = hessian_exprs(Hpre, n);
  double sup = 0, r2 = 0;
  int nf = 0;
  for (const auto& pr : probes) {
    EvalCtx ctx(pr.q);
    sup = std::max(sup, std::abs(eval(Hpre, ctx)));
    if (nf++ % 4 != 0) continue; // weight engines on a probe subset only
    Eigen::MatrixXcd Mh = eval_hessian(hpre, ctx);
    WeightEngine engq(f0, d, pr.q, M);
    for (const auto& b : pr.dirs) {
      Eigen::VectorXcd v = euclid_coeffs(f0, b, pr.q);
      double pm = pairing(Mh, v);
      double Fb = engq.weight(b, delta).value;
      if (pm > 0 && Fb > 0) r2 = std::max(r2, Fb / pm);
    }
  }
  double t = 1.0;
  if (r2 > 0 && sup > 0)
    t = std::clamp(std::sqrt(r2 / sup), 1e-8, 1e8);
  out.scale = t;
  out.bound = t * sup;
  out.H = make_scale(t, Hpre);
  return out;
}

BetaReport verify_adapted(const PSHAssembly& H, const ModelDomain& d,
                          double delta, const GridSpec& grid,
                          const FrameProvider& frames) {
  int n = d.n;
  int M = d.M;
  Frame f0 = frames(d, H.p0, delta);
  WeightEngine eng0(f0, d, H.p0, M);
  Eigen::VectorXd F0 = eng0.all_F(delta);
  double c = H.c > 0 ? H.c : 0.15;

  auto probes = make_probes(d, H.p0, F0, grid.radius > 0 ? grid.radius : c,
                            delta, grid.strip, grid.points, grid.directions,
                            grid.seed);
  auto hess = hessian_exprs(H.H, n);

  // List expressions: words of length 2 and 3 over {X, Xbar, N, Nbar} for
  // each sampled direction X (N-only words deduplicated globally).
  struct ListExpr {
    Expr e;
    std::vector<int> letters; // 0: X, 1: N  (F value per letter)
    int dir;
  };
  std::vector<ListExpr> lists;
  {
    std::vector<Eigen::VectorXcd> dirs = probes.empty()
                                             ? std::vector<Eigen::VectorXcd>{}
                                             : probes[0].dirs;
    Field Nf = f0.N;
    std::map<std::string, bool> seen; // dedupe N-only words
    for (int di = 0; di < (int)dirs.size(); ++di) {
      Field X = Field::zero(n);
      for (int i = 0; i + 1 < n; ++i) X = X + scale(dirs[di][i], f0.L[i]);
      X = X + scale(dirs[di][n - 1], Nf);
      std::vector<std::pair<Field, int>> alpha = {
          {X, 0}, {conjugate(X), 0}, {Nf, 1}, {conjugate(Nf), 1}};
      for (int len = 2; len <= 3; ++len) {
        int total = 1;
        for (int k = 0; k < len; ++k) total *= 4;
        for (int w = 0; w < total; ++w) {
          std::vector<int> pick(len);
          int ww = w;
          bool nonly = true;
          for (int k = 0; k < len; ++k) {
            pick[k] = ww % 4;
            ww /= 4;
            nonly &= pick[k] >= 2;
          }
          if (nonly) {
            std::string key(pick.begin(), pick.end());
            if (!seen.emplace(key, true).second) continue;
          }
          Expr e = H.H;
          ListExpr le;
          le.dir = di;
          for (int k = len - 1; k >= 0; --k) {
            e = apply_field(alpha[pick[k]].first, e);
            le.letters.push_back(alpha[pick[k]].second);
          }
          le.e = e;
          lists.push_back(std::move(le));
        }
      }
    }
  }

  BetaReport rep;
  rep.grid_points = (int)probes.size();
  rep.directions = probes.empty() ? 0 : (int)probes[0].dirs.size();
  rep.lists = (int)lists.size();
  rep.hess_min_eig = kInf;

  struct Local {
    double sup = 0, r2 = 0, r3 = 0, mineig = kInf;
    bool fail2 = false;
    Point w2, w3;
  };
  int nworkers = 4;
  std::vector<std::future<Local>> futs;
  for (int widx = 0; widx < nworkers; ++widx) {
    futs.push_back(std::async(std::launch::async, [&, widx]() {
      Local loc;
      for (size_t s = widx; s < probes.size(); s += nworkers) {
        const Probe& pr = probes[s];
        EvalCtx ctx(pr.q);
        loc.sup = std::max(loc.sup, std::abs(eval(H.H, ctx)));
        Eigen::MatrixXcd Mh = eval_hessian(hess, ctx);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Mh);
        loc.mineig = std::min(loc.mineig, es.eigenvalues().minCoeff());
        WeightEngine engq(f0, d, pr.q, M);
        std::vector<double> Fdir(pr.dirs.size());
        for (size_t di = 0; di < pr.dirs.size(); ++di) {
          const Eigen::VectorXcd& b = pr.dirs[di];
          Fdir[di] = engq.weight(b, delta).value;
          Eigen::VectorXcd v = euclid_coeffs(f0, b, pr.q);
          double pm = pairing(Mh, v);
          if (Fdir[di] <= 0) continue;
          if (pm <= 0) {
            loc.fail2 = true;
            loc.r2 = kInf;
            loc.w2 = pr.q;
          } else if (Fdir[di] / pm > loc.r2) {
            loc.r2 = Fdir[di] / pm;
            loc.w2 = pr.q;
          }
        }
        double Fn = 1.0 / (delta * delta);
        for (const auto& le : lists) {
          double denom = 1.0;
          for (int letter : le.letters)
            denom *= std::sqrt(letter == 1 ? Fn : Fdir[le.dir]);
          if (denom <= 0) continue;
          double r = std::abs(eval(le.e, ctx)) / denom;
          if (r > loc.r3) {
            loc.r3 = r;
            loc.w3 = pr.q;
          }
        }
      }
      return loc;
    }));
  }
  for (auto& fu : futs) {
    Local loc = fu.get();
    rep.sup_H = std::max(rep.sup_H, loc.sup);
    rep.hess_min_eig = std::min(rep.hess_min_eig, loc.mineig);
    rep.cond2_failed |= loc.fail2;
    if (loc.r2 > rep.worst_hess_ratio) {
      rep.worst_hess_ratio = loc.r2;
      rep.witness_hess = loc.w2;
    }
    if (loc.r3 > rep.worst_list_ratio) {
      rep.worst_list_ratio = loc.r3;
      rep.witness_list = loc.w3;
    }
  }
  rep.beta = std::max({rep.sup_H, rep.worst_hess_ratio, rep.worst_list_ratio});
  return rep;
}

} // namespace ftl
