#ifndef FTL_HOMOG_HPP
#define FTL_HOMOG_HPP

#include <functional>

#include "ftl/coords.hpp"

namespace ftl {

/// Frame used at a given base point and scale. Both built-in providers
/// recombine the canonical frame with constant coefficients (and happen to be
/// scale-independent), which is what geometric separation requires.
using FrameProvider =
    std::function<Frame(const ModelDomain&, const Point&, double)>;

FrameProvider canonical_provider();
FrameProvider levi_eigen_provider();

struct HomogOptions {
  double c = 0.25;         // pseudo-ball scale
  double delta0 = 0.1;     // upper end of the gamma search
  double delta_floor = 1e-12;
  int probes = 48;         // decreasing log-spaced scan before bisection
  double rel_tol = 1e-3;   // relative bisection tolerance
  int M = -1;              // list order; default the domain's M
};

/// Pseudo-distance gamma(p,q) = inf { delta : q in B^c(p,delta) } computed by
/// a decreasing scan refined by bisection on the first membership sign
/// change. Returns 0 when q = p, +infinity when q is outside the ball at
/// delta0, and the floor value when q is still inside at the floor.
double gamma(const ModelDomain& d, const Point& p, const Point& q,
             const FrameProvider& frames, const HomogOptions& opt = {});

/// Smallest C on the grid 2^{k/4} <= 64 with B(q,delta) contained in
/// B(p,C delta) for all sampled boundary points q of B(p,delta); max over q.
/// +infinity when some sampled ball escapes even C = 64.
double engulfing_constant(const ModelDomain& d, const Point& p, double delta,
                          int samples, const FrameProvider& frames,
                          const HomogOptions& opt = {},
                          uint64_t seed = 20240901);

/// Vol(B(p,2 delta)) / Vol(B(p,delta)) via Monte-Carlo ball volumes.
double doubling_constant(const ModelDomain& d, const Point& p, double delta,
                         int mc_samples, const FrameProvider& frames,
                         const HomogOptions& opt = {},
                         uint64_t seed = 20240901);

struct HomogReport {
  double engulfing = 0;
  double doubling = 0;
  double quasi_triangle = 0; // max gamma(a,c)/(gamma(a,b)+gamma(b,c))
  double quasi_symmetry = 0; // max gamma(a,b)/gamma(b,a)
  int point_samples = 0;
  int ball_samples = 0;
  double delta_lo = 0, delta_hi = 0;
  std::string domain;
  std::string frame; // provider provenance
  bool diverged = false; // some gamma hit the +infinity sentinel
};

/// Aggregate diagnostics over a delta range and a sample of nearby boundary
/// points.
HomogReport homog_report(const ModelDomain& d, const Point& p,
                         const std::vector<double>& deltas,
                         const FrameProvider& frames,
                         const HomogOptions& opt = {}, int point_samples = 5,
                         int ball_samples = 200, uint64_t seed = 20240901);

} // namespace ftl

#endif
