#ifndef FTL_BERGMAN_HPP
#define FTL_BERGMAN_HPP

#include "ftl/homog.hpp"

namespace ftl {

/// Weight-product estimate prod_{i=1..n} F(L_i, p, |rho(p)|) for the Bergman
/// diagonal at an interior point (normal factor delta^{-2} included).
double bergman_estimate(const ModelDomain& d, const Point& p,
                        const FrameProvider& frames);

struct QuadratureOptions {
  double rel_tol = 1e-4;
  int max_level = 4; // step-halving refinements of the base mesh
};

/// Independent Bergman diagonal oracle at p_delta = (0,...,0,-delta) for
/// Reinhardt weights P = Q(|z_1|^2,...,|z_{n-1}|^2):
///   K = (1/2pi) int_0^inf t e^{-2 t delta} / c0(t) dt,
///   c0(t) = pi^{n-1} int_{R_+^{n-1}} e^{-2 t Q(u)} du,
/// by nested exp-sinh quadrature with step-halving to rel_tol. Throws
/// std::invalid_argument for non-Reinhardt P.
double bergman_oracle_reinhardt(const ModelDomain& d, double delta,
                                const QuadratureOptions& opt = {});

/// Volume of the star ball D(p,delta) = union over unit Z of the discs of
/// radius c F(L_Z,p,delta)^{-1/2}: (1/2n) int_{S^{2n-1}} r(Z)^{2n} dsigma.
/// The modulus of the normal component is integrated exactly (F is |a_n|^2
/// homogeneous there), so only the tangential sphere is Monte-Carlo sampled.
VolumeEstimate star_ball_volume(const Frame& f, const ModelDomain& d,
                                const Point& p, double delta, double c,
                                int sphere_samples, uint64_t seed = 20240901);

/// Invariant-metric estimate F(L_tau, q, delta) + |a_n|/delta for
/// L = L_tau + a_n N given by its frame coefficients (normal last).
double metric_estimate(const ModelDomain& d, const Point& q,
                       const Eigen::VectorXcd& L, const FrameProvider& frames);

struct KernelSweep {
  std::vector<double> deltas;
  std::vector<double> estimate, oracle, star_volume;
  LineFit estimate_fit, oracle_fit, star_fit; // log-log in delta
  bool has_oracle = false;
  /// When the oracle slope sits in the delta^{-3} family: fit of
  /// log(K delta^3) against log log(1/delta), deciding the log-factor side.
  LineFit log_correction_fit;
  std::string verdict;
};

/// Diagonal sweep along p_delta = (0,...,0,-delta).
KernelSweep kernel_sweep(const ModelDomain& d,
                         const std::vector<double>& deltas,
                         const FrameProvider& frames, double c = 0.25,
                         int sphere_samples = 400, uint64_t seed = 20240901);

} // namespace ftl

#endif
