#include "ftl/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ftl {

namespace {

std::vector<Field> letter_fields(const std::vector<Field>& alphabet) {
  std::vector<Field> lf;
  lf.reserve(2 * alphabet.size());
  for (const Field& X : alphabet) {
    lf.push_back(X);
    lf.push_back(conjugate(X));
  }
  return lf;
}

size_t ipow(size_t b, int e) {
  size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

} // namespace

ListTensor::ListTensor(std::vector<Field> alphabet, Expr rho, const Point& p,
                       int M)
    : na_((int)alphabet.size()), M_(M), p_(p) {
  if (M_ < 2) throw std::invalid_argument("list tensor needs M >= 2");
  if (M_ > 8) throw std::invalid_argument("list enumeration capped at M = 8");
  std::vector<Field> lf = letter_fields(alphabet);
  int A = 2 * na_;
  vals_.assign(M_ + 1, {});
  EvalCtx ctx(p_);

  std::vector<Expr> prev(ipow(A, 2));
  for (int l1 = 0; l1 < A; ++l1)
    for (int l2 = 0; l2 < A; ++l2)
      prev[(size_t)l1 * A + l2] = pair_drho(bracket(lf[l1], lf[l2]), rho);
  vals_[2].resize(prev.size());
  for (size_t w = 0; w < prev.size(); ++w) vals_[2][w] = eval(prev[w], ctx);

  for (int k = 3; k <= M_; ++k) {
    std::vector<Expr> cur(ipow(A, k));
    size_t stride = prev.size();
    for (int l = 0; l < A; ++l)
      for (size_t w = 0; w < stride; ++w)
        cur[(size_t)l * stride + w] = apply_field(lf[l], prev[w]);
    vals_[k].resize(cur.size());
    for (size_t w = 0; w < cur.size(); ++w) vals_[k][w] = eval(cur[w], ctx);
    prev = std::move(cur);
  }
}

Cplx ListTensor::value(const std::vector<int>& word) const {
  int k = (int)word.size();
  if (k < 2 || k > M_) throw std::invalid_argument("word length out of range");
  size_t id = 0;
  int A = 2 * na_;
  for (int l : word) {
    if (l < 0 || l >= A) throw std::invalid_argument("bad letter");
    id = id * A + l;
  }
  return vals_[k][id];
}

WeightReport ListTensor::weight(const Eigen::VectorXcd& a,
                                double delta) const {
  if ((int)a.size() != na_)
    throw std::invalid_argument("coefficient vector size mismatch");
  WeightReport rep;
  rep.p = p_;
  rep.delta = delta;
  rep.M = M_;

  // Pattern letters name the sampled direction; for a pure basis direction
  // keep its slot index, otherwise report slot 0 as the generic direction.
  int rep_slot = -1;
  for (int i = 0; i < na_; ++i)
    if (std::abs(a[i]) > 1e-14) {
      if (rep_slot < 0) {
        rep_slot = i;
      } else { // mixed direction: generic label
        rep_slot = 0;
        break;
      }
    }
  if (rep_slot < 0) rep_slot = 0;

  int A = 2 * na_;
  double best = -1;
  for (int k = 2; k <= M_; ++k) {
    std::vector<Cplx> bucket(size_t(1) << k, Cplx(0));
    size_t size = vals_[k].size();
    for (size_t id = 0; id < size; ++id) {
      size_t tmp = id;
      Cplx coef(1.0);
      unsigned pat = 0;
      for (int j = k - 1; j >= 0; --j) {
        int l = (int)(tmp % A);
        tmp /= A;
        Cplx c = (l & 1) ? std::conj(a[l >> 1]) : a[l >> 1];
        if (std::abs(c) < 1e-300) {
          coef = Cplx(0);
          break;
        }
        coef *= c;
        if (l & 1) pat |= 1u << j;
      }
      if (coef != Cplx(0)) bucket[pat] += coef * vals_[k][id];
    }
    for (unsigned pat = 0; pat < bucket.size(); ++pat) {
      double m = std::abs(bucket[pat]);
      if (m == 0.0) continue;
      WeightTerm t;
      for (int j = 0; j < k; ++j)
        t.spec.word.push_back(Letter{rep_slot, ((pat >> j) & 1u) != 0});
      t.list_value = m;
      t.contribution = weight_norm(k) * std::pow(m / delta, 2.0 / k);
      rep.value += t.contribution;
      if (t.contribution > best) {
        best = t.contribution;
        rep.dominant = t.spec;
      }
      rep.terms.push_back(std::move(t));
    }
  }
  return rep;
}

WeightEngine::WeightEngine(const Frame& f, const ModelDomain& d,
                           const Point& p, int M)
    : frame_(f), p_(p), n_(d.n), M_(M), tensor_(f.L, d.rho, p, M) {}

WeightReport WeightEngine::weight(const Eigen::VectorXcd& a,
                                  double delta) const {
  int m = n_ - 1;
  if ((int)a.size() != m && (int)a.size() != n_)
    throw std::invalid_argument("coefficient vector size mismatch");
  Eigen::VectorXcd at = a.head(m);
  Cplx an = ((int)a.size() == n_) ? a[n_ - 1] : Cplx(0);
  WeightReport rep = tensor_.weight(at, delta);
  if (std::abs(an) > 0) {
    // Normal component: F(N) = delta^{-2} by definition, added as its own
    // term with the (N, conj N) word as the label.
    WeightTerm t;
    t.spec.word = {Letter{n_ - 1, false}, Letter{n_ - 1, true}};
    t.list_value = std::norm(an);
    t.contribution = std::norm(an) / (delta * delta);
    rep.value += t.contribution;
    if (rep.terms.empty() || t.contribution > rep.terms.front().contribution)
      rep.dominant = t.spec;
    rep.terms.push_back(std::move(t));
  }
  return rep;
}

double WeightEngine::F(int slot, double delta) const {
  if (slot == n_ - 1) return 1.0 / (delta * delta);
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n_ - 1);
  a[slot] = 1.0;
  return tensor_.weight(a, delta).value;
}

Eigen::VectorXd WeightEngine::all_F(double delta) const {
  Eigen::VectorXd F(n_);
  for (int i = 0; i < n_; ++i) F[i] = this->F(i, delta);
  return F;
}

double mixed_weight(const ListSpec& spec, const Eigen::VectorXd& F) {
  int nslots = (int)F.size();
  std::vector<int> l = spec.counters(nslots);
  double prod = 1.0;
  for (int i = 0; i < nslots; ++i)
    if (l[i] > 0) prod *= std::pow(F[i], l[i] / 2.0);
  return prod;
}

namespace {

struct Direction {
  Eigen::VectorXcd a;
  std::string name;
};

std::vector<Direction> structured_directions(int m) {
  std::vector<Direction> dirs;
  auto unit = [m](int i) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(m);
    v[i] = 1.0;
    return v;
  };
  for (int i = 0; i < m; ++i)
    dirs.push_back({unit(i), "e" + std::to_string(i + 1)});
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      std::string ei = "e" + std::to_string(i + 1);
      std::string ej = "e" + std::to_string(j + 1);
      dirs.push_back({r * (unit(i) + unit(j)), "(" + ei + "+" + ej + ")/sqrt2"});
      dirs.push_back({r * (unit(i) - unit(j)), "(" + ei + "-" + ej + ")/sqrt2"});
      dirs.push_back({r * (unit(i) + Cplx(0, 1) * unit(j)),
                      "(" + ei + "+i" + ej + ")/sqrt2"});
      dirs.push_back({r * (unit(i) - Cplx(0, 1) * unit(j)),
                      "(" + ei + "-i" + ej + ")/sqrt2"});
    }
  return dirs;
}

} // namespace

ExtremalityCertificate check_eb1(const Frame& f, const ModelDomain& d,
                                 const Point& p, double delta, int M,
                                 int samples, uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("check_eb1: samples >= 1");
  WeightEngine eng(f, d, p, M);
  int m = d.n - 1;
  Eigen::VectorXd F(m);
  std::vector<bool> flat(m, false);
  bool degenerate = false;
  for (int i = 0; i < m; ++i) {
    F[i] = eng.F(i, delta);
    if (F[i] <= 0) {
      flat[i] = true;
      degenerate = true;
    }
  }

  std::vector<Direction> dirs = structured_directions(m);
  Rng rng(seed);
  for (int s = 0; s < samples; ++s)
    dirs.push_back({random_unit_vector(rng, m), "sample#" + std::to_string(s)});

  ExtremalityCertificate cert;
  cert.kind = ExtremalityCertificate::Kind::EB1;
  cert.p = p;
  cert.delta = delta;
  cert.degenerate = degenerate;
  cert.K_est = 1.0;
  int used = 0;
  for (const Direction& dir : dirs) {
    bool skip = false;
    double den = 0;
    for (int i = 0; i < m; ++i) {
      double w = std::norm(dir.a[i]);
      if (w > 1e-24 && flat[i]) skip = true;
      den += w * F[i];
    }
    if (skip || den <= 0) continue;
    double num = eng.weight(dir.a, delta).value;
    if (num <= 0) continue;
    double r = num / den;
    double worst = std::max(r, 1.0 / r);
    ++used;
    if (worst > cert.K_est) {
      cert.K_est = worst;
      cert.witness = dir.name;
    }
  }
  cert.sample_size = used;
  if (cert.witness.empty() && !dirs.empty()) cert.witness = dirs.front().name;
  return cert;
}

namespace {

/// DFS over derivative words of bounded length applied to a target function;
/// reports max over words of factor * |L g(p)| / F^{L/2}.
struct ListScan {
  const std::vector<Field>& fields; // one per slot, normal last
  const Eigen::VectorXd& F;
  EvalCtx& ctx;
  int max_len;
  double best = 0;
  ListSpec best_word;
  double best_raw = 0;

  void visit(const Expr& g, ListSpec& w, double factor) {
    double raw = std::abs(eval(g, ctx));
    if (raw > 0) {
      double ratio = factor * raw / mixed_weight(w, F);
      if (ratio > best) {
        best = ratio;
        best_word = w;
        best_raw = raw;
      }
    }
    if ((int)w.word.size() >= max_len) return;
    for (int s = 0; s < (int)fields.size(); ++s)
      for (int bar = 0; bar < 2; ++bar) {
        Field X = bar ? conjugate(fields[s]) : fields[s];
        w.word.push_back(Letter{s, bar != 0});
        visit(apply_field(X, g), w, factor);
        w.word.pop_back();
      }
  }
};

/// Closed-form decomposition of a (1,0) field with holomorphic coefficients w
/// over the canonical-style frame basis: b_N = <drho, X> q^{-1/2},
/// a_k = w_k - b_N N_k.
std::vector<Expr> decompose10(const std::vector<Expr>& w, const Frame& fr,
                              const ModelDomain& d, const Expr& q_rsqrt) {
  int n = d.n;
  Field X;
  X.holo = w;
  X.anti.assign(n, Expr());
  for (int k = 0; k < n; ++k) X.anti[k] = make_const(n, 0.0);
  Expr b = make_prod({pair_drho(X, d.rho), q_rsqrt});
  std::vector<Expr> coeff(n);
  for (int k = 0; k + 1 < n; ++k)
    coeff[k] = w[k] - make_prod({b, fr.N.holo[k]});
  coeff[n - 1] = b;
  return coeff;
}

Expr q_recip_sqrt(const ModelDomain& d) {
  int n = d.n;
  CPoly q = CPoly::constant(n, 0.25);
  for (int i = 0; i + 1 < n; ++i)
    q += d.P.deriv(i, false) * d.P.deriv(i, true);
  return make_pow(make_poly(q), -0.5);
}

} // namespace

ExtremalityCertificate check_eb2(const Frame& f, const ModelDomain& d,
                                 const Point& p, double delta, int M,
                                 int max_len) {
  int n = d.n, m = n - 1;
  if (max_len < 0) max_len = std::min(M, 4);
  WeightEngine eng(f, d, p, M);
  Eigen::VectorXd F = eng.all_F(delta);
  for (int i = 0; i < m; ++i)
    if (F[i] <= 0) throw std::runtime_error("check_eb2: degenerate frame weight");
  Expr qr = q_recip_sqrt(d);
  std::vector<Field> all = f.all_fields();

  ExtremalityCertificate cert;
  cert.kind = ExtremalityCertificate::Kind::EB2;
  cert.p = p;
  cert.delta = delta;
  EvalCtx ctx(p);

  auto scan_pair = [&](int i, int j, const Field& X, const Field& Y,
                       const std::string& tag) {
    Field W = bracket(X, Y);
    double fij = std::sqrt(F[i] * F[j]);
    // (1,0) part in the frame basis, then the conjugate part symmetrically.
    for (int part = 0; part < 2; ++part) {
      std::vector<Expr> w(n);
      for (int k = 0; k < n; ++k)
        w[k] = part == 0 ? W.holo[k] : conjugate(W.anti[k]);
      bool zero = true;
      for (int k = 0; k < n; ++k)
        if (!expr_is_zero(w[k])) zero = false;
      if (zero) continue;
      std::vector<Expr> coeff = decompose10(w, f, d, qr);
      for (int k = 0; k < n; ++k) {
        if (expr_is_zero(coeff[k])) continue;
        ListScan scan{all, F, ctx, max_len};
        ListSpec word;
        scan.visit(coeff[k], word, std::sqrt(F[k]) / fij);
        if (scan.best > cert.K_est) {
          cert.K_est = scan.best;
          std::ostringstream os;
          os << tag << " coeff a^" << (k + 1) << (part ? " (conj part)" : "")
             << " list [" << scan.best_word.str() << "]";
          cert.witness = os.str();
        }
        cert.sample_size++;
      }
    }
  };

  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      scan_pair(i, j, f.L[i], f.L[j],
                "[L" + std::to_string(i + 1) + ",L" + std::to_string(j + 1) + "]");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      scan_pair(i, j, f.L[i], conjugate(f.L[j]),
                "[L" + std::to_string(i + 1) + ",conj L" + std::to_string(j + 1) +
                    "]");
  return cert;
}

ExtremalityCertificate check_balpha(const Frame& f, const ModelDomain& d,
                                    const Point& p, double delta, int M,
                                    int max_len) {
  int n = d.n, m = n - 1;
  if (max_len < 0) max_len = std::min(M - 2, 4);
  WeightEngine eng(f, d, p, M);
  Eigen::VectorXd F = eng.all_F(delta);
  std::vector<Field> all = f.all_fields();

  ExtremalityCertificate cert;
  cert.kind = ExtremalityCertificate::Kind::Balpha;
  cert.p = p;
  cert.delta = delta;
  EvalCtx ctx(p);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      if (F[i] <= 0 || F[j] <= 0) {
        cert.degenerate = true;
        continue;
      }
      Expr cij = pair_drho(bracket(f.L[i], conjugate(f.L[j])), d.rho);
      ListScan scan{all, F, ctx, max_len};
      ListSpec word;
      scan.visit(cij, word, 1.0 / (delta * std::sqrt(F[i] * F[j])));
      if (scan.best > cert.K_est) {
        cert.K_est = scan.best;
        std::ostringstream os;
        os << "c_" << (i + 1) << (j + 1) << " list [" << scan.best_word.str()
           << "]";
        cert.witness = os.str();
      }
      cert.sample_size++;
    }
  return cert;
}

Frame orthonormalize(const Frame& f, const ModelDomain& d, const Point& p,
                     double delta, int M) {
  WeightEngine eng(f, d, p, M);
  int m = (int)f.L.size();
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::vector<double> F(m);
  for (int i = 0; i < m; ++i) F[i] = eng.F(i, delta);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return F[a] > F[b]; });

  std::vector<Field> fields(m);
  std::vector<Point> vals(m);
  for (int i = 0; i < m; ++i) {
    fields[i] = f.L[order[i]];
    vals[i] = field_at(fields[i], p);
  }
  auto hdot = [](const Point& a, const Point& b) { return b.dot(a); };

  // Decreasing induction: L'_i is a combination of L_j, j >= i.
  for (int i = m - 1; i >= 0; --i) {
    for (int j = i + 1; j < m; ++j) {
      Cplx c = hdot(vals[i], vals[j]);
      fields[i] = fields[i] + scale(-c, fields[j]);
      vals[i] -= c * vals[j];
    }
    double nrm = vals[i].norm();
    if (nrm < 1e-14) throw std::runtime_error("orthonormalize: singular frame");
    fields[i] = scale(1.0 / nrm, fields[i]);
    vals[i] /= nrm;
  }
  Frame out;
  out.L = fields;
  out.N = f.N;
  out.prov = f.prov;
  out.degenerate = f.degenerate;
  return out;
}

Eigen::VectorXd weight_lower_bound_diag(const Frame& f, const ModelDomain& d,
                                        const Point& p, double delta, int M) {
  int m = (int)f.L.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    Expr g = pair_drho(bracket(f.L[i], conjugate(f.L[i])), d.rho);
    Field Lbar = conjugate(f.L[i]);
    for (int k = 0; 2 * k + 1 <= M; ++k) {
      double v = eval_at(g, p).real();
      if (v > 0) out[i] += std::pow(v / delta, 2.0 / (2 * k + 2));
      g = apply_field(f.L[i], apply_field(Lbar, g));
    }
  }
  return out;
}

SeparationReport separation_certificate(const ModelDomain& d, const Point& p,
                                        const std::vector<double>& delta_grid,
                                        double K) {
  if (d.n != 3)
    throw std::invalid_argument("separation certificate requires n = 3");
  Frame f = tangent_frame(d);
  WeightEngine eng(f, d, p, d.M);
  SeparationReport rep;
  rep.K = K;
  Eigen::VectorXcd mix(2);
  mix << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  for (double delta : delta_grid) {
    double F2 = eng.F(0, delta);
    double F3 = eng.F(1, delta);
    double Fs = eng.weight(mix, delta).value;
    rep.deltas.push_back(delta);
    rep.F2.push_back(F2);
    rep.F3.push_back(F3);
    rep.Fsum.push_back(Fs);
    rep.s.push_back(Fs / std::max(F2, F3));
  }
  rep.s_fit = fit_loglog(rep.deltas, rep.s);
  double threshold = rep.C * K * K * K;
  double smax = *std::max_element(rep.s.begin(), rep.s.end());
  if (rep.s_fit.b <= -0.05 && rep.s_fit.r2 >= 0.9) {
    rep.verdict = "not separable at constant K";
    // Extrapolated depth where the fitted power law crosses C K^3.
    rep.delta_K = std::exp((std::log(threshold) - rep.s_fit.a) / rep.s_fit.b);
  } else if (smax > threshold) {
    rep.verdict = "not separable at constant K";
    rep.delta_K =
        rep.deltas[std::max_element(rep.s.begin(), rep.s.end()) -
                   rep.s.begin()];
  } else {
    rep.verdict = "no obstruction found";
  }
  return rep;
}

} // namespace ftl
