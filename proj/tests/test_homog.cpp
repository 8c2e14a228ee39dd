#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ftl/homog.hpp"
#include "ftl/util.hpp"

using namespace ftl;

namespace {

std::string dom(const char* name) {
  return std::string(FTL_DOMAIN_DIR) + "/" + name;
}

} // namespace

TEST_CASE("gamma basics and siegel scaling laws") {
  ModelDomain d = load_domain(dom("siegel.json"));
  FrameProvider fp = canonical_provider();
  Point o = Point::Zero(3);

  CHECK(gamma(d, o, o, fp) == 0.0);

  // Tangential separation: gamma ~ t^2 (F_1 = 1/delta).
  std::vector<double> ts = log_grid(1e-4, 1e-2, 9), gs;
  for (double t : ts) {
    Point q = d.boundary_point((Point(2) << Cplx(t), Cplx(0)).finished());
    double g = gamma(d, o, q, fp);
    CHECK(g > 0);
    CHECK(std::isfinite(g));
    gs.push_back(g);
  }
  LineFit tan = fit_loglog(ts, gs);
  CHECK(std::abs(tan.b - 2.0) < 0.1);
  CHECK(tan.r2 > 0.99);

  // Normal separation along Im z_n: gamma ~ s (F_n = delta^{-2}).
  std::vector<double> ss = log_grid(1e-5, 1e-3, 9), gn;
  for (double s : ss) {
    Point q = d.boundary_point(Point::Zero(2), s);
    gn.push_back(gamma(d, o, q, fp));
  }
  LineFit nor = fit_loglog(ss, gn);
  CHECK(std::abs(nor.b - 1.0) < 0.1);
  CHECK(nor.r2 > 0.99);

  // Points outside the delta0 ball hit the sentinel.
  Point far = d.boundary_point((Point(2) << Cplx(0.9), Cplx(0)).finished());
  CHECK(std::isinf(gamma(d, o, far, fp)));
}

TEST_CASE("engulfing stays small on the siegel model") {
  ModelDomain d = load_domain(dom("siegel.json"));
  FrameProvider fp = canonical_provider();
  Point o = Point::Zero(3);
  for (double delta : {1e-4, 1e-3, 1e-2, 1e-1}) {
    double C = engulfing_constant(d, o, delta, 8, fp);
    CAPTURE(delta);
    CHECK(C >= 1.0);
    CHECK(C <= 8.0);
  }
}

TEST_CASE("engulfing is finite on the decoupled model") {
  ModelDomain d = load_domain(dom("decoupled.json"));
  double C = engulfing_constant(d, Point::Zero(3), 1e-3, 5,
                                canonical_provider());
  CHECK(C >= 1.0);
  CHECK(std::isfinite(C));
}

TEST_CASE("volume doubling matches the weight exponents") {
  FrameProvider fp = canonical_provider();
  Point o = Point::Zero(3);
  {
    ModelDomain d = load_domain(dom("siegel.json"));
    double r = doubling_constant(d, o, 1e-3, 4000, fp);
    CHECK(r == doctest::Approx(16.0).epsilon(0.15));
  }
  {
    // F exponents (1/2, 1/3, 2) sum to 17/6.
    ModelDomain d = load_domain(dom("decoupled.json"));
    double r = doubling_constant(d, o, 1e-3, 4000, fp);
    CHECK(r == doctest::Approx(std::pow(2.0, 17.0 / 6.0)).epsilon(0.15));
  }
  {
    // Both tangential weights scale like delta^{-1/3} at the origin.
    ModelDomain d = load_domain(dom("herbort.json"));
    double r = doubling_constant(d, o, 1e-3, 4000, fp);
    CHECK(r == doctest::Approx(std::pow(2.0, 8.0 / 3.0)).epsilon(0.15));
  }
  {
    ModelDomain d = load_domain(dom("mixed.json"));
    double r = doubling_constant(d, o, 1e-3, 4000, fp);
    CHECK(r >= 1.0);
    CHECK(r == doctest::Approx(16.0).epsilon(0.15));
  }
}

TEST_CASE("homogeneous-space report") {
  ModelDomain d = load_domain(dom("siegel.json"));
  HomogReport rep = homog_report(d, Point::Zero(3), {1e-3, 1e-2},
                                 canonical_provider(), {}, 5, 200);
  CHECK(rep.engulfing >= 1.0);
  CHECK(rep.engulfing <= 8.0);
  CHECK(rep.doubling >= 1.0);
  CHECK(std::isfinite(rep.doubling));
  CHECK_FALSE(rep.diverged);
  CHECK(rep.quasi_symmetry >= 1.0 - 1e-9);
  CHECK(std::isfinite(rep.quasi_symmetry));
  CHECK(rep.quasi_triangle > 0);
  CHECK(std::isfinite(rep.quasi_triangle));

  // Levi-eigen provider on the mixed domain (nondegenerate at the origin).
  ModelDomain dm = load_domain(dom("mixed.json"));
  HomogReport rm = homog_report(dm, Point::Zero(3), {1e-2},
                                levi_eigen_provider(), {}, 4, 100);
  CHECK(rm.engulfing >= 1.0);
  CHECK(std::isfinite(rm.engulfing));
  CHECK(rm.doubling >= 1.0);
}
