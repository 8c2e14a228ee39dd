#ifndef FTL_PSH_HPP
#define FTL_PSH_HPP

#include "ftl/bergman.hpp"

namespace ftl {

/// One component of the weight F_i: either the Levi term |c_ii|/delta
/// (order 2) or |L_i phi / delta|^{2/l} for phi = Re/Im of a list value of
/// order l = |list| + 1 in the single direction L_i.
struct PSHComponent {
  int slot = 0;
  int order = 2;
  bool levi = true;
  bool im_part = false;
  ListSpec spec;    // generating list (empty for the Levi component)
  Expr phi;         // real-valued generating function (c_ii for Levi)
  Expr mag2;        // smooth |L_i phi|^2 (Levi: c_ii^2); f = (mag2)^{1/l}/delta^{2/l}
  double value_p = 0; // f(p)
  double ratio_p = 0; // f(p) / F_i(p,delta)
};

/// An (n-1)-tuple of components, one per tangential slot, in the
/// lexicographic schedule order.
struct ComponentTuple {
  std::vector<PSHComponent> f;
  std::vector<int> I;      // slots with a non-Levi component
  bool degenerate = false; // some slot has no nonzero component
  double dominance = 0;    // min_i ratio_p
};

/// All component tuples at (p, delta), lexicographically ordered by
/// (order, list word, Re/Im) per slot. Components whose generating
/// derivative L_i phi vanishes identically are dropped; a slot with no
/// nonzero component at all yields degenerate tuples.
std::vector<ComponentTuple> enumerate_components(const Frame& f,
                                                 const ModelDomain& d,
                                                 const Point& p, double delta,
                                                 int M);

/// Local almost-PSH piece H(f,lambda,B) = sum_{i in I} lambda^{-3/2}
/// e^{lambda psi_i} chi_{f,B} with psi_i = phi_i/delta *
/// F_i(p,delta)^{(1-l)/2} and chi_{f,B} the smooth dominance cutoff times
/// the radial chart bump supported in Q^c(p,delta). Throws for lambda <= 1
/// or c > 1/2 (assemble_H performs the measured c <= c0 validation).
Expr local_H(const Frame& f, const ModelDomain& d, const Point& p,
             double delta, const ComponentTuple& tuple, double lambda,
             double B, double c);

struct PSHOptions {
  double c = 0.15;          // pseudo-ball scale for cover and supports
  double patch_radius = 0;  // boundary patch around p0; 0 => adaptive
  int cover_cap = 48;       // error if the greedy cover exceeds this
  int tuple_cap = 512;      // error if the schedule exceeds this
  double lambda_max = 3.0;  // clamp on the schedule's lambda(f)
  double A_max = 1e4;       // clamp on the schedule's A_f recursion
  int probe_samples = 48;   // calibration probes for gamma1 / K0
  uint64_t seed = 20240901;
};

struct PSHAssembly {
  Expr H;  // calibrated global function (two exact derivatives via derive())
  double delta = 0;
  Point p0;
  std::vector<Point> centers; // greedy maximal B^{c/2} packing
  int tuples = 0;             // schedule length per center
  int local_pieces = 0;       // nonzero local functions summed
  double A = 1, B_const = 0;  // e^{rho/delta} and F-scaled quadratic weights
  double gamma1 = 0, K0 = 0;  // measured weight-normalized negativity
  double scale = 1;           // final beta-balancing factor
  double bound = 0;           // measured sup |H| on the strip probes
  double c = 0, c0 = 0;       // ball scale used and the measured c0
};

/// Build H = scale * (sum_k sum_f H_{p_k}(f, lambda_f, B_f) + A e^{rho/delta}
/// + B sum_i F_i(p0,delta) |z_i - p0_i|^2) near the boundary point p0, with
/// the lexicographic (A_f, B_f, eps_f) schedule (clamped) and B calibrated
/// from weight-normalized negativity measured on probe points.
PSHAssembly assemble_H(const ModelDomain& d, const Point& p0,
                       const FrameProvider& frames, double delta,
                       const PSHOptions& opt = {});

struct GridSpec {
  int points = 100;     // strip grid size
  int directions = 6;   // sampled fields L in E (frame, N, random combos)
  double strip = 2.0;   // rho(q) in [-strip*delta, 0)
  double radius = 0;    // tangential patch radius; 0 => adaptive
  uint64_t seed = 20240901;
};

struct BetaReport {
  double beta = 0;              // max of the three condition statistics
  double sup_H = 0;             // condition (1)
  double worst_hess_ratio = 0;  // condition (2): max F(L,q)/<ddbar H;L,Lbar>
  double worst_list_ratio = 0;  // condition (3): max |LH| / prod F^{1/2}
  double hess_min_eig = 0;      // min Hessian eigenvalue over the grid
  bool cond2_failed = false;    // some pairing <= 0 with F > 0
  int grid_points = 0, directions = 0, lists = 0;
  Point witness_hess, witness_list;
};

/// Check the three adapted-PSH conditions for H on a strip grid: sup |H|,
/// Hessian domination <ddbar H;L,Lbar> >= F(L,q,delta)/beta over sampled
/// L in E, and list bounds |L H| <= beta prod F^{1/2} for words of length
/// 2 and 3 over each sampled direction and the normal.
BetaReport verify_adapted(const PSHAssembly& H, const ModelDomain& d,
                          double delta, const GridSpec& grid,
                          const FrameProvider& frames);

} // namespace ftl

#endif
