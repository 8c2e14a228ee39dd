#include "ftl/domain.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <stdexcept>

namespace ftl {

double ModelDomain::delta_of(const Point& p) const {
  return std::abs(rho_poly.eval(p).real());
}

Point ModelDomain::boundary_point(const Point& zprime, double im_n) const {
  Point p(n);
  for (int i = 0; i + 1 < n; ++i) p[i] = zprime[i];
  p[n - 1] = Cplx(0.0, im_n);
  // P only involves tangential slots, so this evaluation is well-defined.
  p[n - 1] = Cplx(-P.eval(p).real(), im_n);
  return p;
}

ModelDomain make_domain(const DomainSpec& spec) {
  if (spec.n < 2) throw std::runtime_error("domain dimension must be >= 2");
  if (spec.normal_slot < 1 || spec.normal_slot > spec.n)
    throw std::runtime_error("normal_slot out of range");
  AstPtr ast = parse_expr(spec.P_text, spec.n);
  CPoly praw = ast_to_poly(ast, spec.n);

  // Permute the declared normal slot to the last coordinate.
  int n = spec.n;
  int ns = spec.normal_slot - 1;
  std::vector<CPoly> perm(n);
  for (int i = 0, j = 0; i < n; ++i) {
    if (i == ns) {
      perm[i] = CPoly::variable(n, n - 1);
    } else {
      perm[i] = CPoly::variable(n, j++);
    }
  }
  CPoly P = praw.compose(perm).pruned(0.0);

  if (!P.is_real_valued(1e-12))
    throw std::runtime_error("P is not real-valued");
  for (const auto& [k, c] : P.terms()) {
    (void)c;
    if (k[n - 1] != 0 || k[2 * n - 1] != 0)
      throw std::runtime_error("P must not involve the normal variable");
  }
  Point origin = Point::Zero(n);
  if (std::abs(P.eval(origin)) > 1e-14)
    throw std::runtime_error("P(0) != 0");
  for (int i = 0; i + 1 < n; ++i) {
    if (std::abs(P.deriv(i, false).eval(origin)) > 1e-14)
      throw std::runtime_error("grad P(0) != 0");
  }

  ModelDomain d;
  d.name = spec.name;
  d.n = n;
  d.M = spec.M;
  d.window = spec.window;
  d.P = P;
  CPoly zn = CPoly::variable(n, n - 1);
  d.rho_poly = (zn + zn.conj()) * Cplx(0.5) + P;
  d.rho = make_poly(d.rho_poly);

  // Pseudoconvexity spot-check on a small deterministic boundary grid.
  Frame fr = tangent_frame(d);
  double worst = 0.0;
  bool ok = true;
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int s = 0; s < 200; ++s) {
    Point zp(n - 1);
    for (int i = 0; i + 1 < n; ++i)
      zp[i] = 0.5 * d.window * Cplx(U(rng), U(rng));
    Point p = d.boundary_point(zp, 0.2 * d.window * U(rng));
    Eigen::MatrixXcd c = levi_matrix(fr, d, p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
    double mn = es.eigenvalues().minCoeff();
    worst = std::min(worst, mn);
    if (mn < -1e-10) ok = false;
  }
  d.levi_psd_ok = ok;
  d.levi_min_eig = worst;
  return d;
}

DomainSpec load_domain_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open domain file: " + path);
  nlohmann::json j;
  in >> j;
  DomainSpec s;
  s.name = j.at("name").get<std::string>();
  s.n = j.at("n").get<int>();
  s.normal_slot = j.at("normal_slot").get<int>();
  s.P_text = j.at("P").get<std::string>();
  s.M = j.value("M", 4);
  s.window = j.value("window", 1.0);
  return s;
}

ModelDomain load_domain(const std::string& path) {
  return make_domain(load_domain_spec(path));
}

std::vector<Field> Frame::all_fields() const {
  std::vector<Field> fs = L;
  fs.push_back(N);
  return fs;
}

Frame tangent_frame(const ModelDomain& d) {
  int n = d.n;
  Frame f;
  for (int i = 0; i + 1 < n; ++i) {
    Field Li = Field::zero(n);
    Li.holo[i] = make_const(n, 1.0);
    Li.holo[n - 1] = make_poly(d.P.deriv(i, false) * Cplx(-2.0));
    f.L.push_back(Li);
  }
  // q = sum_k |drho/dz_k|^2 = 1/4 + sum_i (dP/dz_i)(dP/dconj z_i)
  CPoly q = CPoly::constant(n, 0.25);
  for (int i = 0; i + 1 < n; ++i)
    q += d.P.deriv(i, false) * d.P.deriv(i, true);
  Expr rs = make_pow(make_poly(q), -0.5);
  Field N = Field::zero(n);
  for (int k = 0; k < n; ++k) {
    CPoly rk_bar = d.rho_poly.deriv(k, true); // conj of drho/dz_k (rho real)
    N.holo[k] = make_prod({rs, make_poly(rk_bar)});
  }
  f.N = N;
  f.prov = Provenance::canonical;
  return f;
}

Eigen::MatrixXcd levi_matrix(const Frame& f, const ModelDomain& d,
                             const Point& p) {
  int m = (int)f.L.size();
  Eigen::MatrixXcd c(m, m);
  EvalCtx ctx(p);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Expr e = pair_drho(bracket(f.L[i], conjugate(f.L[j])), d.rho);
      c(i, j) = eval(e, ctx);
    }
  // Symmetrize away roundoff; the matrix is Hermitian by construction.
  return 0.5 * (c + c.adjoint().eval());
}

Frame levi_eigen_frame(const ModelDomain& d, const Point& p,
                       Eigen::VectorXd* eigenvalues) {
  Frame base = tangent_frame(d);
  int m = (int)base.L.size();
  Eigen::MatrixXcd c = levi_matrix(base, d, p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
  // Ascending from Eigen; we want descending.
  Eigen::VectorXd ev = es.eigenvalues().reverse();
  Eigen::MatrixXcd V = es.eigenvectors().rowwise().reverse();

  // Determinism: fix each eigenvector's phase so its largest-modulus entry is
  // real positive; break exact ties by lexicographic order of components.
  for (int j = 0; j < m; ++j) {
    int arg = 0;
    double best = -1;
    for (int i = 0; i < m; ++i)
      if (std::abs(V(i, j)) > best + 1e-12) {
        best = std::abs(V(i, j));
        arg = i;
      }
    Cplx ph = V(arg, j) / std::abs(V(arg, j));
    V.col(j) /= ph;
  }

  Frame f;
  f.prov = Provenance::levi_eigen;
  f.degenerate = (ev.cwiseAbs().maxCoeff() < 1e-12);
  for (int a = 0; a < m; ++a) {
    Field La = Field::zero(d.n);
    for (int j = 0; j < m; ++j)
      La = La + scale(std::conj(V(j, a)), base.L[j]);
    f.L.push_back(La);
  }
  f.N = base.N;
  if (eigenvalues) *eigenvalues = ev;
  return f;
}

} // namespace ftl
