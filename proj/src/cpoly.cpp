#include "ftl/cpoly.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace ftl {

static const double kDropTol = 0.0; // exact: keep everything nonzero

CPoly CPoly::constant(int n, Cplx c) {
  CPoly p(n);
  if (c != Cplx(0.0)) p.t_[Key(2 * n, 0)] = c;
  return p;
}

CPoly CPoly::variable(int n, int slot, bool conjugated) {
  assert(slot >= 0 && slot < n);
  CPoly p(n);
  Key k(2 * n, 0);
  k[conjugated ? n + slot : slot] = 1;
  p.t_[k] = Cplx(1.0);
  return p;
}

void CPoly::add_term(const Key& k, Cplx c) {
  assert((int)k.size() == 2 * n_);
  auto it = t_.find(k);
  if (it == t_.end()) {
    if (c != Cplx(0.0)) t_[k] = c;
  } else {
    it->second += c;
    if (it->second == Cplx(0.0)) t_.erase(it);
  }
}

CPoly CPoly::operator+(const CPoly& o) const {
  CPoly r = *this;
  r += o;
  return r;
}

CPoly& CPoly::operator+=(const CPoly& o) {
  if (n_ == 0 && !o.t_.empty()) n_ = o.n_;
  for (const auto& [k, c] : o.t_) add_term(k, c);
  return *this;
}

CPoly CPoly::operator-(const CPoly& o) const { return *this + o * Cplx(-1.0); }

CPoly CPoly::operator*(const CPoly& o) const {
  CPoly r(std::max(n_, o.n_));
  for (const auto& [ka, ca] : t_)
    for (const auto& [kb, cb] : o.t_) {
      Key k(ka);
      for (size_t i = 0; i < k.size(); ++i) k[i] += kb[i];
      r.add_term(k, ca * cb);
    }
  return r;
}

CPoly CPoly::operator*(Cplx c) const {
  CPoly r(n_);
  if (c == Cplx(0.0)) return r;
  for (const auto& [k, v] : t_) r.t_[k] = v * c;
  return r;
}

CPoly CPoly::conj() const {
  CPoly r(n_);
  for (const auto& [k, v] : t_) {
    Key kk(2 * n_);
    for (int i = 0; i < n_; ++i) {
      kk[i] = k[n_ + i];
      kk[n_ + i] = k[i];
    }
    r.t_[kk] = std::conj(v);
  }
  return r;
}

CPoly CPoly::deriv(int slot, bool conjugated) const {
  int idx = conjugated ? n_ + slot : slot;
  CPoly r(n_);
  for (const auto& [k, v] : t_) {
    if (k[idx] == 0) continue;
    Key kk = k;
    kk[idx] -= 1;
    r.add_term(kk, v * double(k[idx]));
  }
  return r;
}

CPoly CPoly::pow(int k) const {
  assert(k >= 0);
  CPoly r = CPoly::constant(n_, 1.0);
  CPoly base = *this;
  while (k > 0) {
    if (k & 1) r = r * base;
    base = base * base;
    k >>= 1;
  }
  return r;
}

Cplx CPoly::eval(const Point& z) const {
  assert((int)z.size() == n_ || t_.empty());
  Cplx s = 0.0;
  for (const auto& [k, v] : t_) {
    Cplx m = v;
    for (int i = 0; i < n_; ++i) {
      for (int e = 0; e < k[i]; ++e) m *= z[i];
      for (int e = 0; e < k[n_ + i]; ++e) m *= std::conj(z[i]);
    }
    s += m;
  }
  return s;
}

Cplx CPoly::coeff(const Key& k) const {
  auto it = t_.find(k);
  return it == t_.end() ? Cplx(0.0) : it->second;
}

int CPoly::degree() const {
  int d = 0;
  for (const auto& [k, v] : t_) {
    (void)v;
    int s = 0;
    for (int e : k) s += e;
    d = std::max(d, s);
  }
  return d;
}

bool CPoly::is_real_valued(double tol) const {
  for (const auto& [k, v] : t_) {
    Key kk(2 * n_);
    for (int i = 0; i < n_; ++i) {
      kk[i] = k[n_ + i];
      kk[n_ + i] = k[i];
    }
    if (std::abs(v - std::conj(coeff(kk))) > tol) return false;
  }
  return true;
}

CPoly CPoly::compose(const std::vector<CPoly>& map) const {
  if ((int)map.size() != n_) throw std::invalid_argument("compose: arity");
  int m = map.empty() ? 0 : map[0].n();
  CPoly r(m);
  // Cache powers of map components and their conjugates.
  std::vector<std::vector<CPoly>> pw(n_), pwc(n_);
  auto power = [&](std::vector<CPoly>& cache, const CPoly& base, int e) -> const CPoly& {
    if (cache.empty()) cache.push_back(CPoly::constant(m, 1.0));
    while ((int)cache.size() <= e) cache.push_back(cache.back() * base);
    return cache[e];
  };
  std::vector<CPoly> mapc(n_);
  for (int i = 0; i < n_; ++i) mapc[i] = map[i].conj();
  for (const auto& [k, v] : t_) {
    CPoly term = CPoly::constant(m, v);
    for (int i = 0; i < n_; ++i) {
      if (k[i]) term = term * power(pw[i], map[i], k[i]);
      if (k[n_ + i]) term = term * power(pwc[i], mapc[i], k[n_ + i]);
    }
    r += term;
  }
  (void)kDropTol;
  return r;
}

CPoly CPoly::pruned(double tol) const {
  CPoly r(n_);
  for (const auto& [k, v] : t_)
    if (std::abs(v) > tol) r.t_[k] = v;
  return r;
}

} // namespace ftl
