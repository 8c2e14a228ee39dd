#ifndef FTL_SMOOTH_HPP
#define FTL_SMOOTH_HPP

#include <memory>
#include <mutex>
#include <unordered_map>

#include "ftl/cpoly.hpp"

namespace ftl {

/// Closed-form smooth expression DAG over (z, conj z). Immutable nodes,
/// shared subexpressions, exact derivative rules (closure under d/dz_j and
/// d/dconj(z_j)). Sums/products of polynomial nodes collapse back to a single
/// polynomial node, so purely polynomial pipelines stay in exact CPoly
/// arithmetic.
class SmoothNode;
using Expr = std::shared_ptr<const SmoothNode>;

enum class EKind {
  Poly,  // CPoly leaf
  Exp,   // exp(child)
  Bump,  // k-th derivative of x -> K0*exp(-1/(x-mu^2)) for x>mu^2, else 0;
         // evaluated at child (child must be real-valued)
  Pow,   // child^r, real exponent r (child real positive where evaluated)
  Sum,   // sum of children
  Prod,  // product of children
};

class SmoothNode {
public:
  EKind kind;
  int n = 0; // ambient complex dimension
  CPoly poly;
  double mu = 0, K0 = 0; // Bump parameters
  int bump_k = 0;        // Bump derivative order
  double pw = 0;         // Pow exponent
  std::vector<Expr> ch;

  mutable std::map<std::pair<int, int>, Expr> dcache; // (slot, conj) -> d/d
  mutable std::mutex mx;
};

// --- constructors (with simplification) ---
Expr make_poly(const CPoly& p);
Expr make_const(int n, Cplx c);
Expr make_exp(const Expr& u);
Expr make_bump(double mu, double K0, int k, const Expr& u);
Expr make_pow(const Expr& u, double r); // RecipSqrt(u) = make_pow(u, -0.5)
Expr make_sum(std::vector<Expr> xs);
Expr make_prod(std::vector<Expr> xs);
Expr make_scale(Cplx c, const Expr& u);

inline Expr operator+(const Expr& a, const Expr& b) { return make_sum({a, b}); }
inline Expr operator*(const Expr& a, const Expr& b) { return make_prod({a, b}); }
inline Expr operator-(const Expr& a, const Expr& b) {
  return make_sum({a, make_scale(-1.0, b)});
}

bool expr_is_zero(const Expr& e);
const CPoly* expr_as_poly(const Expr& e); // nullptr unless Poly node

/// Exact partial derivative, cached per node.
Expr derive(const Expr& e, int slot, bool conjugated);

/// Structural conjugate: evaluates to conj(e) everywhere.
Expr conjugate(const Expr& e);

/// Per-point evaluation context with node-level memoization; not thread-safe,
/// use one per worker. Keys own their nodes so a cached address can never be
/// recycled by a later allocation while the context is alive.
struct EvalCtx {
  Point z;
  std::unordered_map<Expr, Cplx> memo;
  explicit EvalCtx(const Point& p) : z(p) {}
};

Cplx eval(const Expr& e, EvalCtx& ctx);
inline Cplx eval_at(const Expr& e, const Point& p) {
  EvalCtx c(p);
  return eval(e, c);
}

/// Bump profile helpers: value of the k-th derivative of
/// phi(x) = K0*exp(-1/(x-mu^2)) (x>mu^2; 0 otherwise).
double bump_phi_deriv(double mu, double K0, int k, double x);

} // namespace ftl

#endif
