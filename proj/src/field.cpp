#include "ftl/field.hpp"

#include <sstream>
#include <stdexcept>

namespace ftl {

bool Field::type10() const {
  for (const auto& a : anti)
    if (!expr_is_zero(a)) return false;
  return true;
}

Field Field::zero(int n) {
  Field f;
  f.holo.assign(n, make_const(n, 0.0));
  f.anti.assign(n, make_const(n, 0.0));
  return f;
}

Field Field::coordinate(int n, int slot, bool conjugated) {
  Field f = zero(n);
  (conjugated ? f.anti : f.holo)[slot] = make_const(n, 1.0);
  return f;
}

Field conjugate(const Field& X) {
  Field r;
  r.holo.reserve(X.n());
  r.anti.reserve(X.n());
  for (const auto& a : X.anti) r.holo.push_back(conjugate(a));
  for (const auto& h : X.holo) r.anti.push_back(conjugate(h));
  return r;
}

Field operator+(const Field& X, const Field& Y) {
  if (X.n() != Y.n()) throw std::invalid_argument("field dim mismatch");
  Field r;
  for (int j = 0; j < X.n(); ++j) {
    r.holo.push_back(X.holo[j] + Y.holo[j]);
    r.anti.push_back(X.anti[j] + Y.anti[j]);
  }
  return r;
}

Field scale(Cplx c, const Field& X) {
  Field r;
  for (int j = 0; j < X.n(); ++j) {
    r.holo.push_back(make_scale(c, X.holo[j]));
    r.anti.push_back(make_scale(c, X.anti[j]));
  }
  return r;
}

Expr apply_field(const Field& X, const Expr& f) {
  std::vector<Expr> terms;
  for (int j = 0; j < X.n(); ++j) {
    if (!expr_is_zero(X.holo[j]))
      terms.push_back(make_prod({X.holo[j], derive(f, j, false)}));
    if (!expr_is_zero(X.anti[j]))
      terms.push_back(make_prod({X.anti[j], derive(f, j, true)}));
  }
  return make_sum(std::move(terms));
}

Field bracket(const Field& X, const Field& Y) {
  if (X.n() != Y.n()) throw std::invalid_argument("field dim mismatch");
  Field r;
  for (int j = 0; j < X.n(); ++j) {
    r.holo.push_back(apply_field(X, Y.holo[j]) - apply_field(Y, X.holo[j]));
    r.anti.push_back(apply_field(X, Y.anti[j]) - apply_field(Y, X.anti[j]));
  }
  return r;
}

Expr pair_drho(const Field& X, const Expr& rho) {
  std::vector<Expr> terms;
  for (int j = 0; j < X.n(); ++j)
    if (!expr_is_zero(X.holo[j]))
      terms.push_back(make_prod({X.holo[j], derive(rho, j, false)}));
  return make_sum(std::move(terms));
}

Point field_at(const Field& X, const Point& p) {
  Point v(X.n());
  EvalCtx ctx(p);
  for (int j = 0; j < X.n(); ++j) v[j] = eval(X.holo[j], ctx);
  return v;
}

std::vector<int> ListSpec::counters(int nslots) const {
  std::vector<int> c(nslots, 0);
  for (const auto& l : word) c[l.slot]++;
  return c;
}
std::vector<int> ListSpec::counters_unbarred(int nslots) const {
  std::vector<int> c(nslots, 0);
  for (const auto& l : word)
    if (!l.bar) c[l.slot]++;
  return c;
}
std::vector<int> ListSpec::counters_barred(int nslots) const {
  std::vector<int> c(nslots, 0);
  for (const auto& l : word)
    if (l.bar) c[l.slot]++;
  return c;
}
std::string ListSpec::str() const {
  std::ostringstream os;
  for (const auto& l : word) {
    os << (l.bar ? "~L" : "L") << (l.slot + 1) << " ";
  }
  return os.str();
}

Expr list_apply(const ListSpec& spec, const std::vector<Field>& frame_fields,
                const Expr& rho) {
  if (spec.size() < 2) throw std::invalid_argument("list shorter than 2");
  auto get = [&](const Letter& l) -> Field {
    const Field& f = frame_fields.at(l.slot);
    return l.bar ? conjugate(f) : f;
  };
  int k = spec.size();
  Expr g = pair_drho(bracket(get(spec.word[k - 2]), get(spec.word[k - 1])), rho);
  for (int i = k - 3; i >= 0; --i) g = apply_field(get(spec.word[i]), g);
  return g;
}

} // namespace ftl
