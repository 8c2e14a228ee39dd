#include "ftl/appendix.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace ftl {

namespace {

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

int order(const std::vector<int>& m) {
  int s = 0;
  for (int v : m) s += v;
  return s;
}

// All a in N^j with |a| <= budget, lexicographic.
void enumerate(int j, int budget, std::vector<int>& a,
               const std::function<void(const std::vector<int>&)>& visit) {
  if (j == (int)a.size()) {
    visit(a);
    return;
  }
  for (int v = 0; v <= budget; ++v) {
    a.push_back(v);
    enumerate(j, budget - v, a, visit);
    a.pop_back();
  }
}

// Uniform point in the unit ball of C^j.
Point ball_point(Rng& rng, int j) {
  Point u = random_unit_vector(rng, j);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  return std::pow(U(rng), 1.0 / (2.0 * j)) * u;
}

} // namespace

Cplx derivative_at_zero(const CPoly& g, const std::vector<int>& alpha,
                        const std::vector<int>& beta) {
  CPoly::Key k(alpha);
  k.insert(k.end(), beta.begin(), beta.end());
  double fac = 1;
  for (int v : alpha) fac *= factorial(v);
  for (int v : beta) fac *= factorial(v);
  return fac * g.coeff(k);
}

DominationResult laplacian_domination(const CPoly& g,
                                      const std::vector<int>& alpha0,
                                      const std::vector<int>& beta0,
                                      double K1) {
  const int j = g.n();
  if ((int)alpha0.size() != j || (int)beta0.size() != j)
    throw std::invalid_argument("laplacian_domination: multi-index size");
  if (!(K1 > 0))
    throw std::invalid_argument("laplacian_domination: K1 must be positive");

  // Precondition spot check: g >= 0 (and |g| <= K1) on a fixed sample grid.
  Rng rng(0x5eedf00dULL);
  for (int i = 0; i < 256; ++i) {
    double v = g.eval(ball_point(rng, j)).real();
    if (v < -1e-9 * std::max(1.0, K1))
      throw std::invalid_argument("laplacian_domination: g negative at a "
                                  "sample point of the unit ball");
    if (v > K1 * (1.0 + 1e-9))
      throw std::invalid_argument("laplacian_domination: sampled sup exceeds "
                                  "the stated K1 bound");
  }

  DominationResult res;
  res.alpha0 = alpha0;
  res.beta0 = beta0;
  const int p = order(alpha0) + order(beta0);
  res.target = std::pow(std::abs(derivative_at_zero(g, alpha0, beta0)),
                        std::pow(2.0, p));

  // (prod Delta_i^{a_i}) g(0) = D^{aa} g(0) = a!^2 coeff(a|a), exhaustively
  // maximized over the admissible set 2|a| <= p.
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> scratch;
  enumerate(j, p / 2, scratch, [&](const std::vector<int>& a) {
    double v = derivative_at_zero(g, a, a).real();
    if (v > best) {
      best = v;
      res.a = a;
    }
  });
  res.value = best;
  res.first_case = 2 * order(res.a) == p;
  if (res.target == 0)
    res.constant = 0;
  else
    res.constant = res.value > 0
                       ? res.target / res.value
                       : std::numeric_limits<double>::infinity();
  return res;
}

GeneratedPoly random_nonneg_poly(uint64_t seed, int degree, int j) {
  if (degree % 2 != 0)
    throw std::invalid_argument("random_nonneg_poly: degree must be even");
  if (j < 1) throw std::invalid_argument("random_nonneg_poly: j >= 1");

  std::vector<CPoly> hs;
  if (seed == 0) {
    // Reserved deterministic case: one term h = z_1.
    hs.push_back(CPoly::variable(j, 0));
  } else {
    Rng rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int nh = 1 + (int)(rng() % 3);
    // All mixed monomial exponents of total degree <= degree / 2.
    std::vector<CPoly::Key> keys;
    std::vector<int> scratch;
    enumerate(2 * j, degree / 2, scratch,
              [&](const std::vector<int>& k) { keys.push_back(k); });
    for (int t = 0; t < nh; ++t) {
      CPoly h(j);
      for (const CPoly::Key& k : keys)
        if (U(rng) < 0.35) h.add_term(k, random_disc(rng));
      if (h.is_zero()) h.add_term(keys[rng() % keys.size()], 1.0);
      hs.push_back(h);
    }
  }

  GeneratedPoly out;
  out.g = CPoly(j);
  for (const CPoly& h : hs) out.g += h * h.conj();
  out.g = out.g.pruned(0.0);

  // Uniform derivative majorant on |z| <= 1: each term c z^gamma conj(z)^delta
  // contributes at most |c| gamma! delta! to any D^{alpha beta}.
  for (const auto& [key, c] : out.g.terms()) {
    double fac = 1;
    for (int v : key) fac *= factorial(v);
    out.K1 += std::abs(c) * fac;
  }
  return out;
}

} // namespace ftl
