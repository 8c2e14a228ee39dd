#ifndef FTL_WEIGHTS_HPP
#define FTL_WEIGHTS_HPP

#include "ftl/domain.hpp"
#include "ftl/util.hpp"

namespace ftl {

/// Per-length normalization of the weight sum: the length-k stratum of
/// F_M(L,p,delta) is 2^{1-k} * sum over the 2^k ordered words of that length.
/// This order-averaged convention leaves homogeneity, the delta-sandwich and
/// every slope/ratio statement unchanged and makes F(L_1) = |c_11|/delta
/// exactly on the Siegel model.
inline double weight_norm(int k) { return std::ldexp(1.0, 1 - k); }

/// One aggregated term of a weight report: a bar-pattern word of length k in
/// the direction L, the modulus of its list value at p, and its normalized
/// contribution 2^{1-k} |value/delta|^{2/k}.
struct WeightTerm {
  ListSpec spec;
  double list_value = 0;
  double contribution = 0;
};

struct WeightReport {
  double value = 0;
  std::vector<WeightTerm> terms; // nonzero terms, grouped by pattern word
  ListSpec dominant;             // pattern attaining the max contribution
  Point p;
  double delta = 0;
  int M = 0;
};

/// All list values at p for words over a field alphabet and its conjugates,
/// lengths 2..M. The values are delta-independent, so one tensor serves every
/// delta in a sweep; weights of constant-coefficient combinations of the
/// alphabet follow by multilinearity without further symbolic work.
class ListTensor {
public:
  ListTensor(std::vector<Field> alphabet, Expr rho, const Point& p, int M);

  int alphabet_size() const { return na_; }
  int max_length() const { return M_; }

  /// Value of a word given as letter digits (letter l: slot l/2, bar l%2).
  Cplx value(const std::vector<int>& word) const;

  /// F_M of sum_i a_i * alphabet[i] at the tensor's base point.
  WeightReport weight(const Eigen::VectorXcd& a, double delta) const;

private:
  int na_ = 0, M_ = 0;
  Point p_;
  std::vector<std::vector<Cplx>> vals_; // [k] -> (2 na)^k values, k >= 2
};

/// Weight computations for one (frame, point, M) triple. Coefficient vectors
/// may have n-1 entries (tangential) or n entries, the last being the N
/// component; the normal direction carries F(N) = delta^{-2} exactly and a
/// mixed combination gets F(tangential part) + |a_n|^2 delta^{-2}.
class WeightEngine {
public:
  WeightEngine(const Frame& f, const ModelDomain& d, const Point& p, int M);

  WeightReport weight(const Eigen::VectorXcd& a, double delta) const;
  /// F of a single frame slot (0..n-2 tangential, n-1 normal).
  double F(int slot, double delta) const;
  /// All n slot weights, normal slot last.
  Eigen::VectorXd all_F(double delta) const;

  const Frame& frame() const { return frame_; }
  const Point& p() const { return p_; }
  int M() const { return M_; }
  const ListTensor& tensor() const { return tensor_; }

private:
  Frame frame_;
  Point p_;
  int n_ = 0, M_ = 0;
  ListTensor tensor_;
};

/// F(p,delta)^{L/2} = prod_i F_i^{l_i/2} over the list's slot counters; the
/// caller supplies per-slot F values with the normal slot (delta^{-2}) last.
double mixed_weight(const ListSpec& spec, const Eigen::VectorXd& F);

struct ExtremalityCertificate {
  enum class Kind { EB1, EB2, Balpha };
  Kind kind = Kind::EB1;
  double K_est = 0; // alpha_est for Balpha
  std::string witness;
  int sample_size = 0;
  Point p;
  double delta = 0;
  bool degenerate = false; // some F_i = 0: ratios with that slot skipped
};

/// EB1: over structured directions (basis vectors, (e_i +- e_j)/sqrt2,
/// (e_i +- i e_j)/sqrt2) plus `samples` seeded sphere points, the extreme of
/// r(a) = F(sum a_i L_i) / sum |a_i|^2 F_i and its reciprocal. K_est is a
/// lower bound for the true extremality constant.
ExtremalityCertificate check_eb1(const Frame& f, const ModelDomain& d,
                                 const Point& p, double delta, int M,
                                 int samples, uint64_t seed = 20240901);

/// EB2: brackets of frame fields decomposed on frame+conjugates+{N, conj N}
/// in closed form; K_est = max of F_k^{1/2} |L a^k_{ij}(p)| /
/// (F^{L/2} F_i^{1/2} F_j^{1/2}) over lists up to length max_len
/// (default min(M, 4); enumeration cap, see module design decisions).
ExtremalityCertificate check_eb2(const Frame& f, const ModelDomain& d,
                                 const Point& p, double delta, int M,
                                 int max_len = -1);

/// B(alpha): alpha_est = max over i != j and lists in L_{M-2} (capped as in
/// check_eb2) of |L c_ij(p)| / (delta F^{L/2} F_i^{1/2} F_j^{1/2}).
ExtremalityCertificate check_balpha(const Frame& f, const ModelDomain& d,
                                    const Point& p, double delta, int M,
                                    int max_len = -1);

/// Reorder by decreasing F_i and Gram-Schmidt by decreasing induction
/// (L'_i = sum_{j>=i} alpha_j L_j), orthonormal at p in the coefficient
/// inner product.
Frame orthonormalize(const Frame& f, const ModelDomain& d, const Point& p,
                     double delta, int M);

/// Per tangent field: sum over k >= 0 with 2k+1 <= M and
/// v_k = Re((L_i conj L_i)^k c_ii)(p) > 0 of (v_k/delta)^{2/(2k+2)}.
Eigen::VectorXd weight_lower_bound_diag(const Frame& f, const ModelDomain& d,
                                        const Point& p, double delta, int M);

/// Non-separation certificate for the two-direction argument at the origin
/// of an n = 3 domain: the statistic s(delta) = F((L_2+L_3)/sqrt2) /
/// max(F(L_2), F(L_3)) on a delta grid, its fitted power law, and a verdict
/// for the given extremality constant K (threshold C K^3, C = 1; growth is
/// certified through the fit and extrapolated to the depth delta_K where the
/// threshold is crossed).
struct SeparationReport {
  std::vector<double> deltas, F2, F3, Fsum, s;
  LineFit s_fit;
  double C = 1.0;
  double K = 0;
  std::string verdict;
  double delta_K = 0; // extrapolated crossing depth (0 if none)
};

SeparationReport separation_certificate(const ModelDomain& d, const Point& p,
                                        const std::vector<double>& delta_grid,
                                        double K);

} // namespace ftl

#endif
