#ifndef FTL_APPENDIX_HPP
#define FTL_APPENDIX_HPP

#include <vector>

#include "ftl/util.hpp"

namespace ftl {

/// Outcome of the iterated-Laplacian search for one target derivative:
/// some a with 2|a| <= |alpha0 + beta0| satisfies
///   (prod_i Delta_i^{a_i}) g(0) >= target / C,
/// target = |D^{alpha0 beta0} g(0)|^{2^{|alpha0+beta0|}}.
struct DominationResult {
  std::vector<int> alpha0, beta0;
  std::vector<int> a;      // maximizing multi-index
  double value = 0;        // (prod Delta_i^{a_i}) g(0)
  double target = 0;       // |D^{alpha0 beta0} g(0)|^{2^p}
  double constant = 0;     // target / value; +inf when value <= 0 < target
  bool first_case = false; // 2|a| == p (the proof's First-case label)
};

/// Exhaustive search over {a : 2|a| <= |alpha0+beta0|} for the largest
/// iterated-Laplacian value at 0. g must be nonnegative on the unit ball
/// (spot-checked on a fixed sample grid; throws std::invalid_argument on a
/// negative sample or K1 <= 0).
DominationResult laplacian_domination(const CPoly& g,
                                      const std::vector<int>& alpha0,
                                      const std::vector<int>& beta0,
                                      double K1);

/// Nonnegative test polynomial Sum_k |h_k|^2 with mixed random terms, plus
/// a derivative sup-norm majorant over the unit ball.
struct GeneratedPoly {
  CPoly g;       // nonnegative by construction
  double K1 = 0; // sup_{|z|<=1} |D^{alpha beta} g| <= K1 for all orders
};

/// Random h_k of degree <= degree/2 in j variables (degree even); seed 0 is
/// the reserved deterministic case h = z_1, g = |z_1|^2.
GeneratedPoly random_nonneg_poly(uint64_t seed, int degree, int j);

/// D^{alpha beta} g(0) = alpha! beta! * coeff(z^alpha conj(z)^beta).
Cplx derivative_at_zero(const CPoly& g, const std::vector<int>& alpha,
                        const std::vector<int>& beta);

} // namespace ftl

#endif
