#ifndef FTL_COORDS_HPP
#define FTL_COORDS_HPP

#include <memory>

#include "ftl/weights.hpp"

namespace ftl {

/// Polynomial coordinate change w = forward(z) with exact polynomial inverse.
/// Both directions are holomorphic; forward(p) = 0 and inverse(0) = p.
struct PolyMap {
  std::vector<CPoly> forward; // n components in z
  std::vector<CPoly> inverse; // n components in w
  Point p;
  int degree = 0;
  double coeff_bound = 0;        // largest coefficient modulus, both directions
  double roundtrip_residual = 0; // sampled max |forward(inverse(w)) - w|

  Point apply(const Point& z) const;
  Point apply_inverse(const Point& w) const;
  /// Holomorphic Jacobian determinant of the inverse at w; the real-variable
  /// volume factor is its squared modulus.
  Cplx inverse_jacobian(const Point& w) const;
};

/// Adapted chart at a boundary point: translation to p, linear change taking
/// the frame at p to the coordinate fields, then the holomorphic shear
/// z_n <- z_n + h(z') (graded Newton in exact polynomial arithmetic) killing
/// every pure tangential derivative of rho in the chart up to order 2M.
struct AdaptedChart {
  PolyMap map;
  CPoly rho_chart;     // rho o inverse, truncated to total degree 2M
  Eigen::VectorXd F;   // slot weights at (p, delta), normal slot last
  double delta = 0;
  int M = 0;
  double max_pure = 0; // largest pure tangential derivative left, |alpha|<=2M
  double K_prime = 0;  // measured mixed-derivative constant, |alpha+beta|<=M
  /// Largest triangular coefficient derivative |d^alpha a_i^j(0)| (j < i < n,
  /// alpha supported in slots j+1..i, |alpha| <= M) of the pushed-forward
  /// frame; NaN when a frame coefficient is not polynomial.
  double cond3_max = 0;
};

/// Throws std::runtime_error if the frame is singular at p.
AdaptedChart adapted_coords(const Frame& f, const ModelDomain& d,
                            const Point& p, double delta, int M);

enum class BallKind { polydisc_pullback, exp };

/// Pseudo-ball of scale c: the pullback through the adapted chart of the
/// polydisc with radii r_i = c F_i^{-1/2} (normal slot r_n = c delta).
struct PseudoBall {
  BallKind kind = BallKind::polydisc_pullback;
  std::shared_ptr<const AdaptedChart> chart;
  Point p;
  double delta = 0;
  double c = 0;
  Eigen::VectorXd radii;
};

PseudoBall make_pseudo_ball(std::shared_ptr<const AdaptedChart> chart,
                            double c);

/// Strict polydisc membership |forward(q)_i| < r_i for all i.
bool ball_membership(const Point& q, const PseudoBall& b);

/// Exponential-map options. `frozen` replaces the frame coefficients by their
/// values at the base point, making the flow exactly linear.
struct ExpOptions {
  int steps = 64;
  bool frozen = false;
};

/// Endpoint at unit time of the flow dz/dt = sum_i c_i X_i(z) with
/// c_i = u_i + i u_{n+i} and X_i the holomorphic coefficient vector of the
/// i-th frame field (normal slot last), integrated by RK4. For a frozen frame
/// the endpoint is exactly p + sum_i c_i X_i(p). Throws when the flow leaves
/// twice the domain window.
Point exp_ball_point(const Frame& f, const ModelDomain& d, const Point& p,
                     double delta, const Eigen::VectorXd& u,
                     const ExpOptions& opt = {});

/// Empirical two-sided comparison of the exp-ball and polydisc-pullback
/// families at scale c: alpha is the largest scale (bisection) whose sampled
/// exp points stay in B^c, beta the smallest scale whose exp coordinates
/// reach sampled B^c points (exp inverted by shooting).
struct BallEquivalence {
  double alpha = 0;
  double beta = 0;
  int samples = 0;
  int shooting_failures = 0;
};

BallEquivalence ball_equivalence_check(const Frame& f, const ModelDomain& d,
                                       const Point& p, double delta, double c,
                                       int samples, uint64_t seed = 20240901,
                                       const ExpOptions& opt = {});

struct VolumeEstimate {
  double value = 0;
  double std_error = 0;
  int samples = 0;
};

/// Monte-Carlo volume of the pullback ball: uniform samples of the polydisc
/// pushed through the inverse with the squared-modulus Jacobian weight;
/// points outside |z_i| <= window are clipped (window <= 0 disables the clip).
VolumeEstimate ball_volume(const PseudoBall& b, int mc_samples,
                           uint64_t seed = 20240901, double window = 0);

/// Largest c <= 0.5 (bisection on a fixed sample of the unit polydisc) with
/// |rho| <= delta/2 on the sampled ball; 0 when even tiny balls fail.
double find_c0(const std::shared_ptr<const AdaptedChart>& chart,
               const ModelDomain& d, int samples = 10000,
               uint64_t seed = 20240901);

} // namespace ftl

#endif
