#include "ftl/smooth.hpp"

#include <cassert>
#include <cmath>
#include <functional>

namespace ftl {

static Expr node(EKind k) {
  auto p = std::make_shared<SmoothNode>();
  p->kind = k;
  return p;
}

Expr make_poly(const CPoly& p) {
  auto e = node(EKind::Poly);
  const_cast<SmoothNode*>(e.get())->poly = p;
  const_cast<SmoothNode*>(e.get())->n = p.n();
  return e;
}

Expr make_const(int n, Cplx c) { return make_poly(CPoly::constant(n, c)); }

bool expr_is_zero(const Expr& e) {
  return e->kind == EKind::Poly && e->poly.is_zero();
}

const CPoly* expr_as_poly(const Expr& e) {
  return e->kind == EKind::Poly ? &e->poly : nullptr;
}

Expr make_exp(const Expr& u) {
  auto e = node(EKind::Exp);
  auto* m = const_cast<SmoothNode*>(e.get());
  m->ch = {u};
  m->n = u->n;
  return e;
}

Expr make_bump(double mu, double K0, int k, const Expr& u) {
  auto e = node(EKind::Bump);
  auto* m = const_cast<SmoothNode*>(e.get());
  m->mu = mu;
  m->K0 = K0;
  m->bump_k = k;
  m->ch = {u};
  m->n = u->n;
  return e;
}

Expr make_pow(const Expr& u, double r) {
  if (r == 1.0) return u;
  if (r == 0.0) return make_const(u->n, 1.0);
  if (const CPoly* p = expr_as_poly(u); p && r >= 0 && r == std::floor(r) && r <= 16)
    return make_poly(p->pow((int)r));
  auto e = node(EKind::Pow);
  auto* m = const_cast<SmoothNode*>(e.get());
  m->pw = r;
  m->ch = {u};
  m->n = u->n;
  return e;
}

Expr make_sum(std::vector<Expr> xs) {
  std::vector<Expr> flat;
  CPoly acc;
  bool have_poly = false;
  int n = 0;
  std::function<void(const Expr&)> push = [&](const Expr& x) {
    n = std::max(n, x->n);
    if (x->kind == EKind::Sum) {
      for (const auto& c : x->ch) push(c);
    } else if (const CPoly* p = expr_as_poly(x)) {
      if (!have_poly) {
        acc = *p;
        have_poly = true;
      } else {
        acc += *p;
      }
    } else {
      flat.push_back(x);
    }
  };
  for (const auto& x : xs) push(x);
  if (have_poly && !acc.is_zero()) flat.push_back(make_poly(acc));
  if (flat.empty()) return make_const(n, 0.0);
  if (flat.size() == 1) return flat[0];
  auto e = node(EKind::Sum);
  auto* m = const_cast<SmoothNode*>(e.get());
  m->ch = std::move(flat);
  m->n = n;
  return e;
}

Expr make_prod(std::vector<Expr> xs) {
  std::vector<Expr> flat;
  CPoly acc;
  bool have_poly = false, zero = false;
  int n = 0;
  std::function<void(const Expr&)> push = [&](const Expr& x) {
    n = std::max(n, x->n);
    if (expr_is_zero(x)) {
      zero = true;
    } else if (x->kind == EKind::Prod) {
      for (const auto& c : x->ch) push(c);
    } else if (const CPoly* p = expr_as_poly(x)) {
      if (!have_poly) {
        acc = *p;
        have_poly = true;
      } else {
        acc = acc * *p;
      }
    } else {
      flat.push_back(x);
    }
  };
  for (const auto& x : xs) push(x);
  if (zero) return make_const(n, 0.0);
  bool poly_is_one = have_poly && acc.degree() == 0 &&
                     acc.coeff(CPoly::Key(2 * acc.n(), 0)) == Cplx(1.0);
  if (have_poly && !poly_is_one) flat.push_back(make_poly(acc));
  if (flat.empty()) return make_const(n, 1.0);
  if (flat.size() == 1) return flat[0];
  auto e = node(EKind::Prod);
  auto* m = const_cast<SmoothNode*>(e.get());
  m->ch = std::move(flat);
  m->n = n;
  return e;
}

Expr make_scale(Cplx c, const Expr& u) {
  if (c == Cplx(1.0)) return u;
  return make_prod({make_const(u->n, c), u});
}

Expr derive(const Expr& e, int slot, bool conjugated) {
  {
    std::lock_guard<std::mutex> lk(e->mx);
    auto it = e->dcache.find({slot, conjugated ? 1 : 0});
    if (it != e->dcache.end()) return it->second;
  }
  Expr d;
  switch (e->kind) {
    case EKind::Poly:
      d = make_poly(e->poly.deriv(slot, conjugated));
      break;
    case EKind::Exp:
      d = make_prod({derive(e->ch[0], slot, conjugated), e});
      break;
    case EKind::Bump:
      d = make_prod({make_bump(e->mu, e->K0, e->bump_k + 1, e->ch[0]),
                     derive(e->ch[0], slot, conjugated)});
      break;
    case EKind::Pow:
      d = make_scale(e->pw, make_prod({make_pow(e->ch[0], e->pw - 1.0),
                                       derive(e->ch[0], slot, conjugated)}));
      break;
    case EKind::Sum: {
      std::vector<Expr> ds;
      ds.reserve(e->ch.size());
      for (const auto& c : e->ch) ds.push_back(derive(c, slot, conjugated));
      d = make_sum(std::move(ds));
      break;
    }
    case EKind::Prod: {
      std::vector<Expr> terms;
      for (size_t i = 0; i < e->ch.size(); ++i) {
        std::vector<Expr> fac = e->ch;
        fac[i] = derive(e->ch[i], slot, conjugated);
        terms.push_back(make_prod(std::move(fac)));
      }
      d = make_sum(std::move(terms));
      break;
    }
  }
  std::lock_guard<std::mutex> lk(e->mx);
  e->dcache.emplace(std::make_pair(slot, conjugated ? 1 : 0), d);
  return d;
}

static Expr conj_impl(const Expr& e,
                      std::unordered_map<const SmoothNode*, Expr>& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  Expr r;
  switch (e->kind) {
    case EKind::Poly:
      r = make_poly(e->poly.conj());
      break;
    case EKind::Exp:
      r = make_exp(conj_impl(e->ch[0], memo));
      break;
    case EKind::Bump: // argument is real-valued by construction
      r = make_bump(e->mu, e->K0, e->bump_k, conj_impl(e->ch[0], memo));
      break;
    case EKind::Pow:
      r = make_pow(conj_impl(e->ch[0], memo), e->pw);
      break;
    case EKind::Sum: {
      std::vector<Expr> cs;
      for (const auto& c : e->ch) cs.push_back(conj_impl(c, memo));
      r = make_sum(std::move(cs));
      break;
    }
    case EKind::Prod: {
      std::vector<Expr> cs;
      for (const auto& c : e->ch) cs.push_back(conj_impl(c, memo));
      r = make_prod(std::move(cs));
      break;
    }
  }
  memo[e.get()] = r;
  return r;
}

Expr conjugate(const Expr& e) {
  std::unordered_map<const SmoothNode*, Expr> memo;
  return conj_impl(e, memo);
}

// ---- Bump profile: phi^{(k)}(x) = K0 * exp(-1/s) * R_k(1/s), s = x - mu^2,
// with R_0 = 1 and R_{k+1}(t) = t^2 (R_k(t) - R_k'(t)).
static const std::vector<double>& bump_rk(int k) {
  static std::mutex mx;
  static std::vector<std::vector<double>> table = {{1.0}};
  std::lock_guard<std::mutex> lk(mx);
  while ((int)table.size() <= k) {
    const auto& r = table.back();
    std::vector<double> nr(r.size() + 2, 0.0);
    for (size_t i = 0; i < r.size(); ++i) {
      nr[i + 2] += r[i];                         // t^2 * R_k
      if (i >= 1) nr[i + 1] -= double(i) * r[i]; // -t^2 * R_k'
    }
    table.push_back(std::move(nr));
  }
  return table[k];
}

double bump_phi_deriv(double mu, double K0, int k, double x) {
  double s = x - mu * mu;
  if (s <= 0) return 0.0;
  double t = 1.0 / s;
  const auto& r = bump_rk(k);
  double acc = 0.0;
  for (int i = (int)r.size() - 1; i >= 0; --i) acc = acc * t + r[i];
  return K0 * std::exp(-t) * acc;
}

Cplx eval(const Expr& e, EvalCtx& ctx) {
  auto it = ctx.memo.find(e);
  if (it != ctx.memo.end()) return it->second;
  Cplx v;
  switch (e->kind) {
    case EKind::Poly:
      v = e->poly.eval(ctx.z);
      break;
    case EKind::Exp:
      v = std::exp(eval(e->ch[0], ctx));
      break;
    case EKind::Bump:
      v = bump_phi_deriv(e->mu, e->K0, e->bump_k,
                         eval(e->ch[0], ctx).real());
      break;
    case EKind::Pow: {
      Cplx b = eval(e->ch[0], ctx);
      if (std::abs(b.imag()) < 1e-14 * (1.0 + std::abs(b.real())))
        v = std::pow(b.real(), e->pw);
      else
        v = std::pow(b, Cplx(e->pw));
      break;
    }
    case EKind::Sum: {
      v = 0.0;
      for (const auto& c : e->ch) v += eval(c, ctx);
      break;
    }
    case EKind::Prod: {
      v = 1.0;
      for (const auto& c : e->ch) {
        v *= eval(c, ctx);
        if (v == Cplx(0.0)) break;
      }
      break;
    }
  }
  ctx.memo[e] = v;
  return v;
}

} // namespace ftl
