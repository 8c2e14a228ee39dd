#ifndef FTL_LOCALIZATION_HPP
#define FTL_LOCALIZATION_HPP

#include "ftl/psh.hpp"

namespace ftl {

/// Localized domain D = {r < 0}, r = rho + phi(|z - O|^2), with O on the
/// real normal at distance d inside the base domain and the flat bump
/// phi(x) = K0 exp(-1/(x - mu^2)) for x > mu^2 (exactly 0 otherwise).
struct LocalizedDomain {
  ModelDomain base;
  Point O;                   // origin of the localized coordinates
  double d = 0;              // |O - P0|
  double mu = 0;             // bump radius (1.5 d by default)
  double K0 = 0;             // bump amplitude from the doubling search
  Expr s;                    // |z - O|^2
  Expr phi;                  // phi(|z - O|^2)
  Expr r;                    // rho + phi
  double strict_min_eig = 0; // measured tangential Levi min eig on dD \ dOmega
  int strict_samples = 0;

  /// phi-centered square radius at a point.
  double s_at(const Point& z) const;
  /// Domain view with rho replaced by r: weights/extremality checks on D.
  ModelDomain as_domain() const;
};

/// phi^{(k)}(x) in closed form; exactly zero for x <= mu^2. k <= 4.
double bump_derivative(double mu, double K0, int k, double x);

/// Construct the localized domain: mu = 1.5 d, K0 doubled until (a) r > 0 on
/// the sphere |z - O| = 2 mu (containment) and (b) the Levi form of r on the
/// complex tangent space is strictly positive at `samples` points of
/// dD \ dOmega. Throws std::runtime_error if no K0 <= 2^40 works.
LocalizedDomain make_localized(const ModelDomain& base, double d,
                               int samples = 200, uint64_t seed = 20240901);

/// Integrate the normalized real-gradient flow of rho from q for time t
/// (t < 0 moves inward); used to walk along the normal curves.
Point flow_along_normal(const LocalizedDomain& ld, const Point& q, double t);

/// Flow q along the normalized real gradient of rho to {rho = 0};
/// residual |rho| <= 1e-10.
Point project_to_boundary(const LocalizedDomain& ld, const Point& q);

/// Flow q inward along the real gradient of rho to {r = 0} (the inverse
/// boundary correspondence pi^{-1} for points of dOmega near P0).
Point project_to_local_boundary(const LocalizedDomain& ld, const Point& q);

struct ProjectedField {
  Eigen::VectorXcd coeffs; // holomorphic coefficients at `at`
  Point at;                // image point on the target boundary
  Cplx beta = 0;           // normal component removed/added
};

/// L^rho = L o pi^{-1} - beta N for a (1,0) vector a tangent to r at
/// p in dD: transports the coefficients to q = pi(p) and removes the exact
/// rho-normal component (beta = a(rho)/N(rho)).
ProjectedField project_field(const LocalizedDomain& ld, const Point& p,
                             const Eigen::VectorXcd& a);

/// Inverse map: from b tangent to rho at q in dOmega to the field tangent
/// to r at p = pi^{-1}(q), adding the exact multiple of the rho-normal.
ProjectedField unproject_field(const LocalizedDomain& ld, const Point& q,
                               const Eigen::VectorXcd& b);

/// Main term of the closed-form beta at z in dD for the projected field
/// with coefficients b at q = pi(z):
///   -<b, z> phi'(|z|^2) / (N(rho) + <N, z> phi'(|z|^2)),
/// coordinates centered at O, <L, z> = sum a_i conj(z_i).
Cplx beta_formula(const LocalizedDomain& ld, const Point& z,
                  const Eigen::VectorXcd& b);

/// Three-term weight F^phi(L, z, delta) = phi'(|z|^2)/delta +
/// |<L^rho o pi, z>|^2 phi''(|z|^2)/delta + delta^{-1/M} for z in dD and
/// the projected coefficients b at pi(z).
double fphi_weight(const LocalizedDomain& ld, const Point& z,
                   const Eigen::VectorXcd& b, double delta, int M);

/// Full sum F~^phi (all derivative orders) for the equivalence check of the
/// three-term formula.
double fphi_weight_full(const LocalizedDomain& ld, const Point& z,
                        const Eigen::VectorXcd& b, double delta, int M);

/// Descending minimizing construction at p in dD: each L_i^rho is either the
/// threshold field T or the weighted minimizer W over the constrained
/// subspace H; the output frame on dD follows by unprojection.
struct LocalFrame {
  Point p, q;                               // p in dD, q = pi(p)
  Frame omega;                              // orthonormalized input frame
  std::vector<Eigen::VectorXcd> omega_coeffs; // L_i^rho over the omega frame
  std::vector<Eigen::VectorXcd> vectors;    // unit tangent-to-r vectors at p
  std::vector<bool> chose_T;                // threshold outcome per step
  std::vector<double> Frhophi;              // F^{rho phi}(L_i^rho), i = 1..n-1
  double Kprime = 1;                        // max F^{rho phi}_{i+1}/F^{rho phi}_i
};

/// omega_frame must be orthonormal at q = pi(p) (apply orthonormalize
/// first); the fields are re-sorted internally so the weights are consumed
/// in decreasing order. Throws std::runtime_error if some G_{n-k} is empty.
LocalFrame build_local_frame(const LocalizedDomain& ld, const Point& p,
                             double delta, const Frame& omega_frame);

/// Comparability check: F(L~, z, delta) on r against
/// F(L^rho, pi(z), delta) + F^phi(L~, z, delta) for the frame fields and
/// unit pair combinations; two-sided ratio statistics. Both sides use list
/// length max_len (default min(M, 4): the symbolic lists over the tangent
/// fields on r grow too fast beyond that, same cap as check_eb2).
struct RatioReport {
  double max_ratio = 0;  // max of ratio and its reciprocal
  double min_ratio = 0;  // smallest left/right ratio seen
  int directions = 0;
  Point p;
  double delta = 0;
};

RatioReport localized_weight_check(const LocalizedDomain& ld, const Point& p,
                                   double delta, const LocalFrame& lf,
                                   int max_len = -1);

/// Globally tangent frame on dD from the local-frame vectors: field i has
/// holomorphic coefficients v_i - <v_i, grad r> conj(grad r)/|grad r|^2 (the
/// tangential projection, which evaluates to v_i exactly at p), and N is the
/// normalized gradient of r. Suitable for weight/extremality checks on the
/// as_domain() view.
Frame localized_frame(const LocalizedDomain& ld, const LocalFrame& lf);

} // namespace ftl

#endif
