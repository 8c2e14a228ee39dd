#ifndef FTL_CPOLY_HPP
#define FTL_CPOLY_HPP

#include <complex>
#include <map>
#include <vector>
#include <Eigen/Dense>

namespace ftl {

using Cplx = std::complex<double>;
using Point = Eigen::VectorXcd;

/// Exact polynomial in (z_1..z_n, conj(z_1)..conj(z_n)) with complex
/// coefficients. The exponent key stores (alpha | beta): first n entries are
/// powers of z_i, last n entries powers of conj(z_i).
class CPoly {
public:
  using Key = std::vector<int>;

  CPoly() : n_(0) {}
  explicit CPoly(int n) : n_(n) {}

  static CPoly constant(int n, Cplx c);
  static CPoly variable(int n, int slot, bool conjugated = false);

  int n() const { return n_; }
  const std::map<Key, Cplx>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  /// Add c * z^alpha * conj(z)^beta (alpha, beta packed in key).
  void add_term(const Key& k, Cplx c);

  CPoly operator+(const CPoly& o) const;
  CPoly operator-(const CPoly& o) const;
  CPoly operator*(const CPoly& o) const;
  CPoly operator*(Cplx c) const;
  CPoly& operator+=(const CPoly& o);

  CPoly conj() const;
  /// d/dz_slot (conjugated=false) or d/dconj(z_slot) (conjugated=true).
  CPoly deriv(int slot, bool conjugated) const;
  CPoly pow(int k) const;

  Cplx eval(const Point& z) const;
  /// Coefficient of z^alpha conj(z)^beta; zero if absent.
  Cplx coeff(const Key& k) const;

  int degree() const;
  /// True when coeff(alpha,beta) == conj(coeff(beta,alpha)) for all terms.
  bool is_real_valued(double tol = 1e-12) const;

  /// Substitute z_k -> map[k] (holomorphic polynomials in the new variables),
  /// conj(z_k) -> conj(map[k]). All map entries must share a dimension.
  CPoly compose(const std::vector<CPoly>& map) const;

  /// Drop terms with |coeff| <= tol (cleanup after float cancellation).
  CPoly pruned(double tol = 0.0) const;

private:
  int n_;
  std::map<Key, Cplx> t_;
};

inline CPoly operator*(Cplx c, const CPoly& p) { return p * c; }

} // namespace ftl

#endif
