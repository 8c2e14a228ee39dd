#include "ftl/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ftl/weights.hpp"

namespace ftl {

namespace {

// |z - O|^2 as an exact polynomial node.
Expr center_square(int n, const Point& O) {
  CPoly s(n);
  for (int i = 0; i < n; ++i) {
    CPoly w = CPoly::variable(n, i) - CPoly::constant(n, O[i]);
    s += w * w.conj();
  }
  return make_poly(s.pruned(0.0));
}

std::vector<Expr> holo_gradient(const Expr& f, int n) {
  std::vector<Expr> g(n);
  for (int i = 0; i < n; ++i) g[i] = derive(f, i, false);
  return g;
}

Point grad_at(const std::vector<Expr>& g, const Point& z) {
  Point v(g.size());
  EvalCtx ctx(z);
  for (int i = 0; i < (int)g.size(); ++i) v[i] = eval(g[i], ctx);
  return v;
}

// Unit direction of the real gradient of rho in z-representation,
// grad rho <-> 2 conj(d rho / d z).
Point unit_normal_dir(const std::vector<Expr>& grho, const Point& z) {
  Point v = 2.0 * grad_at(grho, z).conjugate();
  double nv = v.norm();
  if (nv < 1e-14)
    throw std::runtime_error("normal flow: vanishing gradient of rho");
  return v / nv;
}

Point rk4_step(const std::vector<Expr>& grho, const Point& z, double t) {
  Point k1 = unit_normal_dir(grho, z);
  Point k2 = unit_normal_dir(grho, z + (0.5 * t) * k1);
  Point k3 = unit_normal_dir(grho, z + (0.5 * t) * k2);
  Point k4 = unit_normal_dir(grho, z + t * k3);
  return z + (t / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Follow the rho-gradient curve through z until target = 0. Each iteration
// takes a Newton-sized RK4 step in flow time (capped), so convergence is
// quadratic near the boundary and the iterate never leaves the curve.
Point flow_to_zero(const Expr& target, const std::vector<Expr>& gtarget,
                   const std::vector<Expr>& grho, Point z) {
  for (int it = 0; it < 500; ++it) {
    double val = eval_at(target, z).real();
    if (std::abs(val) <= 1e-12) return z;
    Point u = unit_normal_dir(grho, z);
    Cplx d10 = grad_at(gtarget, z).cwiseProduct(u).sum();
    double dd = 2.0 * d10.real(); // d(target)/dt for real-valued target
    if (std::abs(dd) < 1e-14)
      throw std::runtime_error("boundary projection: flow is tangent");
    double t = std::clamp(-val / dd, -0.01, 0.01);
    z = rk4_step(grho, z, t);
  }
  throw std::runtime_error("boundary projection did not converge");
}

// Hermitian form of the Levi matrix of f at z in the quadratic-form
// convention value = w^H A w for w in C^n.
Eigen::MatrixXcd levi_form_at(const std::vector<std::vector<Expr>>& hess,
                              const Point& z) {
  int n = (int)hess.size();
  Eigen::MatrixXcd A(n, n);
  EvalCtx ctx(z);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(j, i) = eval(hess[i][j], ctx);
  return 0.5 * (A + A.adjoint()); // symmetrize away evaluation noise
}

// Orthonormal basis of the Hermitian-orthogonal complement of span(C).
Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& C) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(C);
  qr.setThreshold(1e-10);
  int rank = (int)qr.rank();
  Eigen::MatrixXcd Q = qr.householderQ();
  return Q.rightCols(C.rows() - rank);
}

Cplx hermitian_pairing(const Eigen::VectorXcd& a, const Eigen::VectorXcd& w) {
  // <a, w> = sum a_i conj(w_i) (the paper's <L, z> convention).
  return a.cwiseProduct(w.conjugate()).sum();
}

// Canonical representative of a subspace given by an orthonormal basis Q:
// the normalized projection of the first coordinate vector that meets the
// subspace, with the leading nonzero entry made real positive.
Eigen::VectorXcd canonical_unit(const Eigen::MatrixXcd& Q) {
  int m = (int)Q.rows();
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXcd proj = Q * Q.adjoint().col(j);
    double nrm = proj.norm();
    if (nrm > 1e-8) {
      proj /= nrm;
      for (int i = 0; i < m; ++i)
        if (std::abs(proj[i]) > 1e-10) {
          proj *= std::conj(proj[i]) / std::abs(proj[i]);
          break;
        }
      return proj;
    }
  }
  throw std::runtime_error("canonical_unit: empty subspace");
}

// Constant-coefficient (1,0) field z -> b - <b, grad r> conj(grad r)/|grad r|^2,
// exactly tangent to r everywhere the gradient does not vanish.
Field tangent_projection_field(const Eigen::VectorXcd& b,
                               const std::vector<Expr>& gr, const Expr& inv_n2,
                               int n) {
  std::vector<Expr> pair_terms;
  for (int j = 0; j < n; ++j) pair_terms.push_back(make_scale(b[j], gr[j]));
  Expr pairing = make_sum(pair_terms);
  Field L = Field::zero(n);
  for (int i = 0; i < n; ++i)
    L.holo[i] = make_const(n, b[i]) -
                make_prod({pairing, conjugate(gr[i]), inv_n2});
  return L;
}

} // namespace

double LocalizedDomain::s_at(const Point& z) const {
  return (z - O).squaredNorm();
}

ModelDomain LocalizedDomain::as_domain() const {
  ModelDomain d = base;
  d.name = base.name + "+bump";
  d.rho = r;
  return d;
}

double bump_derivative(double mu, double K0, int k, double x) {
  if (k < 0 || k > 4)
    throw std::invalid_argument("bump_derivative: order must be in 0..4");
  return bump_phi_deriv(mu, K0, k, x);
}

LocalizedDomain make_localized(const ModelDomain& base, double d, int samples,
                               uint64_t seed) {
  if (d <= 0) throw std::invalid_argument("make_localized: d must be > 0");
  const int n = base.n;
  LocalizedDomain ld;
  ld.base = base;
  ld.d = d;
  ld.mu = 1.5 * d;
  ld.O = Point::Zero(n);
  ld.O[n - 1] = Cplx(-d, 0.0);
  ld.s = center_square(n, ld.O);

  const double mu2 = ld.mu * ld.mu;
  for (double K0 = 1.0; K0 <= std::ldexp(1.0, 40); K0 *= 2.0) {
    Expr phi = make_bump(ld.mu, K0, 0, ld.s);
    Expr r = base.rho + phi;

    // Containment: r > 0 on the sphere |z - O| = 2 mu, so D stays inside
    // the ball where the bump calculus is valid.
    Rng rng(seed);
    bool contained = true;
    for (int i = 0; i < std::max(64, samples) && contained; ++i) {
      Point z = ld.O + (2.0 * ld.mu) * random_unit_vector(rng, n);
      contained = eval_at(r, z).real() > 0.0;
    }
    if (!contained) continue;

    // Strict pseudoconvexity on dD \ dOmega: tangential Levi minimum
    // eigenvalue of r at boundary points found by radial bisection with
    // |z - O| > mu (where the bump is active).
    std::vector<Expr> gr = holo_gradient(r, n);
    std::vector<std::vector<Expr>> hess(n, std::vector<Expr>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) hess[i][j] = derive(gr[i], j, true);

    double min_eig = std::numeric_limits<double>::infinity();
    int found = 0;
    bool strict = true;
    for (int tries = 0; found < samples && tries < 40 * samples && strict;
         ++tries) {
      Point u = random_unit_vector(rng, n);
      double lo = 0.0, hi = 2.0 * ld.mu;
      if (eval_at(r, Point(ld.O + hi * u)).real() <= 0.0) {
        strict = false; // containment violated along this ray
        break;
      }
      for (int b = 0; b < 80; ++b) {
        double mid = 0.5 * (lo + hi);
        (eval_at(r, Point(ld.O + mid * u)).real() < 0.0 ? lo : hi) = mid;
      }
      double t = 0.5 * (lo + hi);
      if (t * t <= mu2 * (1.0 + 1e-9)) continue; // on dOmega, bump inactive
      Point z = ld.O + t * u;
      Point g = grad_at(gr, z);
      if (g.norm() < 1e-12) {
        strict = false;
        break;
      }
      Eigen::MatrixXcd A = levi_form_at(hess, z);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(g.conjugate());
      Eigen::MatrixXcd T =
          Eigen::MatrixXcd(qr.householderQ()).rightCols(n - 1);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T.adjoint() * A * T);
      double mn = es.eigenvalues().minCoeff();
      min_eig = std::min(min_eig, mn);
      if (mn <= 0.0) strict = false;
      ++found;
    }
    if (!strict || found < samples) continue;

    ld.K0 = K0;
    ld.phi = phi;
    ld.r = r;
    ld.strict_min_eig = min_eig;
    ld.strict_samples = found;
    return ld;
  }
  throw std::runtime_error("make_localized: no admissible K0 up to 2^40");
}

Point flow_along_normal(const LocalizedDomain& ld, const Point& q, double t) {
  std::vector<Expr> grho = holo_gradient(ld.base.rho, ld.base.n);
  int steps = std::max(1, (int)std::ceil(std::abs(t) / 0.01));
  Point z = q;
  for (int i = 0; i < steps; ++i) z = rk4_step(grho, z, t / steps);
  return z;
}

Point project_to_boundary(const LocalizedDomain& ld, const Point& q) {
  std::vector<Expr> grho = holo_gradient(ld.base.rho, ld.base.n);
  return flow_to_zero(ld.base.rho, grho, grho, q);
}

Point project_to_local_boundary(const LocalizedDomain& ld, const Point& q) {
  std::vector<Expr> grho = holo_gradient(ld.base.rho, ld.base.n);
  std::vector<Expr> gr = holo_gradient(ld.r, ld.base.n);
  return flow_to_zero(ld.r, gr, grho, q);
}

ProjectedField project_field(const LocalizedDomain& ld, const Point& p,
                             const Eigen::VectorXcd& a) {
  const int n = ld.base.n;
  Point q = project_to_boundary(ld, p);
  Point g = grad_at(holo_gradient(ld.base.rho, n), q);
  Point Nq = field_at(tangent_frame(ld.base).N, q);
  // beta = a(rho)/N(rho): a - beta N is then exactly tangent to rho at q.
  Cplx beta = a.cwiseProduct(g).sum() / Nq.cwiseProduct(g).sum();
  return {a - beta * Nq, q, beta};
}

ProjectedField unproject_field(const LocalizedDomain& ld, const Point& q,
                               const Eigen::VectorXcd& b) {
  const int n = ld.base.n;
  Point p = project_to_local_boundary(ld, q);
  Point gr = grad_at(holo_gradient(ld.r, n), p);
  // N o pi: the normal is carried over from q, which makes the forward map
  // reproduce b exactly (project_field subtracts the same multiple of N(q)).
  Point Nq = field_at(tangent_frame(ld.base).N, q);
  Cplx gamma = -b.cwiseProduct(gr).sum() / Nq.cwiseProduct(gr).sum();
  return {b + gamma * Nq, p, gamma};
}

Cplx beta_formula(const LocalizedDomain& ld, const Point& z,
                  const Eigen::VectorXcd& b) {
  const int n = ld.base.n;
  Point w = z - ld.O;
  double p1 = bump_phi_deriv(ld.mu, ld.K0, 1, w.squaredNorm());
  Point q = project_to_boundary(ld, z);
  Point g = grad_at(holo_gradient(ld.base.rho, n), q);
  Point Nq = field_at(tangent_frame(ld.base).N, q);
  Cplx num = -hermitian_pairing(b, w) * p1;
  Cplx den = Nq.cwiseProduct(g).sum() + hermitian_pairing(Nq, w) * p1;
  return num / den;
}

double fphi_weight(const LocalizedDomain& ld, const Point& z,
                   const Eigen::VectorXcd& b, double delta, int M) {
  Point w = z - ld.O;
  double x = w.squaredNorm();
  double inner2 = std::norm(hermitian_pairing(b, w));
  return bump_phi_deriv(ld.mu, ld.K0, 1, x) / delta +
         inner2 * bump_phi_deriv(ld.mu, ld.K0, 2, x) / delta +
         std::pow(delta, -1.0 / M);
}

double fphi_weight_full(const LocalizedDomain& ld, const Point& z,
                        const Eigen::VectorXcd& b, double delta, int M) {
  Point w = z - ld.O;
  double x = w.squaredNorm();
  double inner2 = std::norm(hermitian_pairing(b, w));
  double out = std::pow(delta, -1.0 / M);
  for (int k = 1; 2 * k <= M; ++k)
    out += std::pow(std::abs(bump_phi_deriv(ld.mu, ld.K0, k, x)) / delta,
                    1.0 / k);
  for (int k = 2; k <= M; ++k)
    out += inner2 * std::pow(std::abs(bump_phi_deriv(ld.mu, ld.K0, k, x)) /
                                 delta,
                             2.0 / k);
  return out;
}

LocalFrame build_local_frame(const LocalizedDomain& ld, const Point& p,
                             double delta, const Frame& omega_frame) {
  const ModelDomain& dom = ld.base;
  const int n = dom.n, m = n - 1;
  LocalFrame lf;
  lf.p = p;
  lf.q = project_to_boundary(ld, p);

  {
    std::vector<Point> vals(m);
    for (int i = 0; i < m; ++i) vals[i] = field_at(omega_frame.L[i], lf.q);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) {
        Cplx g = vals[j].dot(vals[i]); // Eigen: conj(v_j) . v_i
        if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-8)
          throw std::invalid_argument(
              "build_local_frame: omega frame is not orthonormal at pi(p)");
      }
  }

  // Consume the frame in decreasing weight order; Gram-Schmidt recombination
  // can perturb the input ordering by a few percent, so re-sort here.
  lf.omega = omega_frame;
  {
    WeightEngine e0(omega_frame, dom, lf.q, dom.M);
    Eigen::VectorXd F0 = e0.all_F(delta);
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return F0[a] > F0[b]; });
    for (int i = 0; i < m; ++i) lf.omega.L[i] = omega_frame.L[order[i]];
  }
  WeightEngine eng(lf.omega, dom, lf.q, dom.M);
  Eigen::VectorXd F = eng.all_F(delta);
  std::vector<Point> v(m);
  for (int i = 0; i < m; ++i) v[i] = field_at(lf.omega.L[i], lf.q);

  Point wp = p - ld.O;
  double xp = wp.squaredNorm();
  double p1 = bump_phi_deriv(ld.mu, ld.K0, 1, xp);
  double p2 = bump_phi_deriv(ld.mu, ld.K0, 2, xp);

  // <W(q), p> = sum_i a_i c_i = <a, conj(c)>: one Hermitian constraint.
  Eigen::VectorXcd c(m);
  for (int i = 0; i < m; ++i) c[i] = hermitian_pairing(v[i], wp);
  Eigen::VectorXcd h = c.conjugate();

  std::vector<Eigen::VectorXcd> chosen; // construction order L_{n-1} .. L_1
  std::vector<bool> chose_T;
  for (int k = 1; k <= m; ++k) {
    // H_{n-k}: unit coefficient vectors with <a, h> = 0, orthogonal to the
    // previously chosen fields at q.
    Eigen::MatrixXcd C(m, 1 + (int)chosen.size());
    C.col(0) = h;
    for (int j = 0; j < (int)chosen.size(); ++j) C.col(1 + j) = chosen[j];
    Eigen::MatrixXcd HB = null_space(C);

    double wval = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd W;
    if (HB.cols() > 0) {
      Eigen::VectorXd D = Eigen::VectorXd::Zero(m);
      for (int i = 0; i < m - k; ++i) D[i] = F[i];
      Eigen::MatrixXcd R = HB.adjoint() * D.asDiagonal() * HB;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
          0.5 * (R + R.adjoint()));
      Eigen::Index arg = 0;
      es.eigenvalues().minCoeff(&arg);
      W = HB * es.eigenvectors().col(arg);
      wval = es.eigenvalues()[arg];
    }

    // G_{n-k} = span(e_{m-k}..e_{m-1}) orthogonal to the chosen fields.
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(m, m);
    for (const auto& u : chosen) P -= u * u.adjoint();
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(m, k);
    for (int t = 0; t < k; ++t) S(m - k + t, t) = 1.0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(P * S);
    qr.setThreshold(1e-10);
    int rank = (int)qr.rank();
    if (rank == 0)
      throw std::runtime_error("build_local_frame: empty G subspace");
    Eigen::MatrixXcd QG =
        Eigen::MatrixXcd(qr.householderQ()).leftCols(rank);
    Eigen::VectorXcd T = canonical_unit(QG);

    double thr = (p2 / delta) * std::norm(T.cwiseProduct(c).sum());
    bool take_T = wval >= thr;
    chosen.push_back(take_T ? T : W);
    chose_T.push_back(take_T);
  }

  lf.omega_coeffs.resize(m);
  lf.chose_T.resize(m);
  lf.vectors.resize(m);
  lf.Frhophi.resize(m);

  std::vector<Expr> gr = holo_gradient(ld.r, n);
  Point grp = grad_at(gr, p);
  Point Nq = field_at(omega_frame.N, lf.q); // N o pi, as in the unprojection
  Cplx Nr = Nq.cwiseProduct(grp).sum();

  for (int i = 0; i < m; ++i) {
    Eigen::VectorXcd A = chosen[m - 1 - i]; // L_{i+1}^rho
    lf.omega_coeffs[i] = A;
    lf.chose_T[i] = chose_T[m - 1 - i];

    Cplx inner = A.cwiseProduct(c).sum(); // <L_i^rho(q), p>
    lf.Frhophi[i] = eng.weight(A, delta).value + p1 / delta +
                    std::norm(inner) * p2 / delta;

    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < m; ++j) b += A[j] * v[j];
    Cplx gamma = -b.cwiseProduct(grp).sum() / Nr;
    Eigen::VectorXcd tb = b + gamma * Nq;
    lf.vectors[i] = tb / tb.norm();
  }

  lf.Kprime = 1.0;
  for (int i = 0; i + 1 < m; ++i)
    lf.Kprime = std::max(lf.Kprime, lf.Frhophi[i + 1] / lf.Frhophi[i]);
  return lf;
}

RatioReport localized_weight_check(const LocalizedDomain& ld, const Point& p,
                                   double delta, const LocalFrame& lf,
                                   int max_len) {
  const ModelDomain& dom = ld.base;
  const int n = dom.n, m = n - 1;
  const int M = max_len > 0 ? max_len : std::min(dom.M, 4);

  std::vector<Point> v(m);
  for (int i = 0; i < m; ++i) v[i] = field_at(lf.omega.L[i], lf.q);

  std::vector<Expr> gr = holo_gradient(ld.r, n);
  std::vector<Expr> n2_terms;
  for (int i = 0; i < n; ++i) n2_terms.push_back(gr[i] * conjugate(gr[i]));
  Expr inv_n2 = make_pow(make_sum(n2_terms), -1.0);

  // Alphabet: the unnormalized correspondents of the L_i^rho, globally
  // tangent to r; constant-coefficient combinations stay tangent and their
  // localized weights follow from one tensor by multilinearity.
  std::vector<Eigen::VectorXcd> amb(m);
  std::vector<Field> alphabet;
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < m; ++j) b += lf.omega_coeffs[i][j] * v[j];
    amb[i] = b;
    alphabet.push_back(tangent_projection_field(b, gr, inv_n2, n));
  }
  ListTensor lt(alphabet, ld.r, p, M);
  WeightEngine eng(lf.omega, dom, lf.q, M);

  std::vector<Eigen::VectorXcd> dirs;
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(m);
    e[i] = 1.0;
    dirs.push_back(e);
  }
  const double is2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (Cplx s : {Cplx(1, 0), Cplx(-1, 0), Cplx(0, 1), Cplx(0, -1)}) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(m);
        e[i] = is2;
        e[j] = s * is2;
        dirs.push_back(e);
      }

  RatioReport rep;
  rep.p = p;
  rep.delta = delta;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& a : dirs) {
    double lhs = lt.weight(a, delta).value;
    Eigen::VectorXcd Ac = Eigen::VectorXcd::Zero(m);
    Eigen::VectorXcd bc = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < m; ++i) {
      Ac += a[i] * lf.omega_coeffs[i];
      bc += a[i] * amb[i];
    }
    double rhs =
        eng.weight(Ac, delta).value + fphi_weight(ld, p, bc, delta, M);
    double ratio = lhs / rhs;
    rep.max_ratio = std::max({rep.max_ratio, ratio, 1.0 / ratio});
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    ++rep.directions;
  }
  return rep;
}

Frame localized_frame(const LocalizedDomain& ld, const LocalFrame& lf) {
  const int n = ld.base.n;
  std::vector<Expr> gr = holo_gradient(ld.r, n);
  std::vector<Expr> n2_terms;
  for (int i = 0; i < n; ++i) n2_terms.push_back(gr[i] * conjugate(gr[i]));
  Expr norm2 = make_sum(n2_terms);
  Expr inv_n2 = make_pow(norm2, -1.0);

  Frame f;
  f.prov = Provenance::localized;
  for (const auto& b : lf.vectors)
    f.L.push_back(tangent_projection_field(b, gr, inv_n2, n));
  f.N = Field::zero(n);
  Expr rs = make_pow(norm2, -0.5);
  for (int i = 0; i < n; ++i) f.N.holo[i] = conjugate(gr[i]) * rs;
  return f;
}

} // namespace ftl
