#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ftl/coords.hpp"
#include "ftl/util.hpp"

using namespace ftl;

namespace {

std::string dom(const char* name) {
  return std::string(FTL_DOMAIN_DIR) + "/" + name;
}

Point rand_boundary(const ModelDomain& d, Rng& rng, double scale) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Point zp(d.n - 1);
  for (int i = 0; i + 1 < d.n; ++i) zp[i] = scale * Cplx(U(rng), U(rng));
  return d.boundary_point(zp, scale * U(rng));
}

} // namespace

TEST_CASE("siegel chart at the origin is the identity") {
  ModelDomain d = load_domain(dom("siegel.json"));
  Point o = Point::Zero(3);
  AdaptedChart ch = adapted_coords(tangent_frame(d), d, o, 0.01, d.M);
  // Reinhardt P has no pure tangential terms: the shear is trivial and the
  // linear part is the identity, so forward_i = z_i.
  for (int i = 0; i < 3; ++i) {
    CHECK(ch.map.forward[i].terms().size() == 1);
    CHECK(std::abs(ch.map.forward[i].coeff(CPoly::Key{(i == 0), (i == 1),
                                                      (i == 2), 0, 0, 0}) -
                   Cplx(1.0)) < 1e-13);
  }
  CHECK(ch.max_pure < 1e-12);
  CHECK(ch.map.roundtrip_residual < 1e-12);
  // rho is unchanged in the chart.
  CHECK(std::abs(ch.rho_chart.coeff(CPoly::Key{1, 0, 0, 1, 0, 0}) - Cplx(1.0)) <
        1e-13);
  // Condition (4): |z_i|^2 terms meet delta * F_i = 1 exactly, Re z_3 meets
  // min{delta F_3^{1/2}, 1} = 1 with value 1/2.
  CHECK(ch.K_prime == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ch.K_prime <= 4.0);
  CHECK(ch.cond3_max == 0.0);
}

TEST_CASE("shear kills injected pure terms") {
  DomainSpec s;
  s.name = "pure-test";
  s.n = 3;
  s.normal_slot = 3;
  s.M = 4;
  s.P_text = "|z1|^2 + |z2|^2 + Re(z1^2) + Re(z1^2 * z2)";
  ModelDomain d = make_domain(s);
  Frame f = tangent_frame(d);
  Rng rng(5);
  for (int t = 0; t < 4; ++t) {
    Point p = t == 0 ? Point(Point::Zero(3)) : rand_boundary(d, rng, 0.2);
    AdaptedChart ch = adapted_coords(f, d, p, 1e-2, d.M);
    CHECK(ch.max_pure <= 1e-10);
    CHECK(std::abs(ch.rho_chart.coeff(CPoly::Key{2, 0, 0, 0, 0, 0})) < 1e-12);
    CHECK(std::abs(ch.rho_chart.coeff(CPoly::Key{2, 1, 0, 0, 0, 0})) < 1e-12);
    CHECK(ch.map.roundtrip_residual <= 1e-9);
  }
}

TEST_CASE("adapted charts across the catalog") {
  Rng rng(7);
  for (const char* name :
       {"siegel.json", "herbort.json", "decoupled.json", "mixed.json"}) {
    ModelDomain d = load_domain(dom(name));
    Frame f = tangent_frame(d);
    for (int t = 0; t < 4; ++t) {
      Point p = t == 0 ? Point(Point::Zero(3)) : rand_boundary(d, rng, 0.25);
      AdaptedChart ch = adapted_coords(f, d, p, 1e-3, d.M);
      CHECK(ch.max_pure <= 1e-10);
      CHECK(ch.map.roundtrip_residual <= 1e-9);
      CHECK(ch.map.apply(p).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((ch.map.apply_inverse(Point::Zero(3)) - p).cwiseAbs().maxCoeff() <
            1e-12);
      CHECK(std::abs(ch.map.inverse_jacobian(Point::Zero(3))) > 1e-8);
      CHECK(std::isfinite(ch.K_prime));
      CHECK(std::isfinite(ch.cond3_max)); // canonical frames are polynomial
    }
  }
}

TEST_CASE("weights stay large in the chart scale (finite type bound)") {
  // Prop 3.5 flavor: min_i F_i * delta^{2/M} stays bounded below on a grid.
  for (const char* name :
       {"siegel.json", "herbort.json", "decoupled.json", "mixed.json"}) {
    ModelDomain d = load_domain(dom(name));
    Frame f = tangent_frame(d);
    Point p = Point::Zero(3);
    WeightEngine eng(f, d, p, d.M);
    double lower = 1e300;
    for (double delta : log_grid(1e-6, 1e-2, 9)) {
      Eigen::VectorXd F = eng.all_F(delta);
      for (int i = 0; i + 1 < d.n; ++i)
        lower = std::min(lower, F[i] * std::pow(delta, 2.0 / d.M));
    }
    CAPTURE(name);
    CHECK(lower > 0.01);
  }
}

TEST_CASE("polydisc membership") {
  ModelDomain d = load_domain(dom("siegel.json"));
  Point o = Point::Zero(3);
  auto chart = std::make_shared<const AdaptedChart>(
      adapted_coords(tangent_frame(d), d, o, 0.01, d.M));
  PseudoBall b = make_pseudo_ball(chart, 0.1);
  // radii: (c delta^{1/2}, c delta^{1/2}, c delta)
  CHECK(b.radii[0] == doctest::Approx(0.01));
  CHECK(b.radii[2] == doctest::Approx(1e-3));
  CHECK(ball_membership(o, b));

  Point edge = chart->map.apply_inverse(
      (Point(3) << Cplx(b.radii[0]), Cplx(0), Cplx(0)).finished());
  CHECK_FALSE(ball_membership(edge, b)); // boundary is excluded

  Point far = o;
  far[0] = 0.05; // r_1 = 0.1 * F_1^{-1/2} = 0.01
  CHECK_FALSE(ball_membership(far, b));
  Point near = o;
  near[0] = 0.005;
  CHECK(ball_membership(near, b));

  // Membership depends only on the moduli of the chart coordinates.
  Rng rng(11);
  std::uniform_real_distribution<double> TH(0.0, 2 * M_PI);
  for (int t = 0; t < 25; ++t) {
    Point v(3);
    for (int i = 0; i < 3; ++i) v[i] = 1.4 * b.radii[i] * random_disc(rng);
    Point vrot = v;
    for (int i = 0; i < 3; ++i) vrot[i] *= std::polar(1.0, TH(rng));
    CHECK(ball_membership(chart->map.apply_inverse(v), b) ==
          ball_membership(chart->map.apply_inverse(vrot), b));
  }
}

TEST_CASE("exp map basics") {
  ModelDomain d = load_domain(dom("siegel.json"));
  Frame f = tangent_frame(d);
  Rng rng(13);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Point p = rand_boundary(d, rng, 0.2);

  CHECK((exp_ball_point(f, d, p, 0.01, Eigen::VectorXd::Zero(6)) - p).norm() ==
        0.0);

  Eigen::VectorXd u(6);
  for (int i = 0; i < 6; ++i) u[i] = 0.02 * U(rng);
  // Frozen flow is the exact linear exponential.
  Point frozen = exp_ball_point(f, d, p, 0.01, u, {.steps = 1, .frozen = true});
  Point lin = p;
  std::vector<Field> fs = f.all_fields();
  for (int i = 0; i < 3; ++i)
    lin += Cplx(u[i], u[3 + i]) * field_at(fs[i], p);
  CHECK((frozen - lin).norm() < 1e-14);

  // RK4 endpoint matches the linear one to second order in |u|.
  double d1 = (exp_ball_point(f, d, p, 0.01, u) -
               exp_ball_point(f, d, p, 0.01, u, {.frozen = true}))
                  .norm();
  double d2 = (exp_ball_point(f, d, p, 0.01, 0.1 * u) -
               exp_ball_point(f, d, p, 0.01, (0.1 * u).eval(),
                              {.frozen = true}))
                  .norm();
  CHECK(d2 < 0.02 * d1 + 1e-12);

  // Reversibility and step-halving stability.
  Point q = exp_ball_point(f, d, p, 0.01, u);
  CHECK((exp_ball_point(f, d, q, 0.01, (-u).eval()) - p).norm() < 1e-6);
  CHECK((exp_ball_point(f, d, p, 0.01, u, {.steps = 128}) - q).norm() < 1e-10);
}

TEST_CASE("ball equivalence constants") {
  ModelDomain d = load_domain(dom("siegel.json"));
  Frame f = tangent_frame(d);
  Point o = Point::Zero(3);

  // Frozen frame: both ball constructions coincide.
  BallEquivalence fz = ball_equivalence_check(f, d, o, 0.01, 0.1, 40, 20240901,
                                              {.steps = 1, .frozen = true});
  CHECK(fz.alpha == doctest::Approx(1.0).epsilon(0.05));
  CHECK(fz.beta == doctest::Approx(1.0).epsilon(0.05));
  CHECK(fz.shooting_failures == 0);

  BallEquivalence sg =
      ball_equivalence_check(f, d, o, 0.01, 0.1, 40, 20240901, {.steps = 32});
  CHECK(sg.alpha >= 0.25);
  CHECK(sg.alpha <= 4.0);
  CHECK(sg.beta >= 0.25);
  CHECK(sg.beta <= 4.0);
  CHECK(sg.shooting_failures == 0);

  ModelDomain dd = load_domain(dom("decoupled.json"));
  for (double delta : {1e-2, 1e-3}) {
    BallEquivalence eq = ball_equivalence_check(
        tangent_frame(dd), dd, o, delta, 0.1, 30, 20240901, {.steps = 32});
    CAPTURE(delta);
    CHECK(eq.alpha > 0.01);
    CHECK(eq.beta < 100.0);
    CHECK(eq.shooting_failures == 0);
  }
}

TEST_CASE("ball volumes") {
  ModelDomain d = load_domain(dom("siegel.json"));
  Point o = Point::Zero(3);
  auto chart = std::make_shared<const AdaptedChart>(
      adapted_coords(tangent_frame(d), d, o, 0.01, d.M));
  PseudoBall b = make_pseudo_ball(chart, 0.1);
  double exact = 1.0;
  for (int i = 0; i < 3; ++i) exact *= M_PI * b.radii[i] * b.radii[i];
  VolumeEstimate est = ball_volume(b, 20000);
  CHECK(std::abs(est.value - exact) <= 3 * est.std_error + 1e-18 * exact);

  // Fabricated linear chart: volume scales by |det|^2 exactly (constant MC
  // weight, zero variance).
  Eigen::Vector3cd diag(Cplx(2.0), Cplx(1.0, 1.0), Cplx(0.5));
  auto lin = std::make_shared<AdaptedChart>();
  lin->delta = 0.01;
  lin->F = Eigen::Vector3d(1.0, 4.0, 25.0);
  lin->map.p = o;
  lin->map.forward.resize(3);
  lin->map.inverse.resize(3);
  for (int i = 0; i < 3; ++i) {
    lin->map.forward[i] = CPoly::variable(3, i) * diag[i];
    lin->map.inverse[i] = CPoly::variable(3, i) * (1.0 / diag[i]);
  }
  PseudoBall lb = make_pseudo_ball(lin, 0.2);
  double lexact = std::norm(1.0 / (diag[0] * diag[1] * diag[2]));
  for (int i = 0; i < 3; ++i) lexact *= M_PI * lb.radii[i] * lb.radii[i];
  VolumeEstimate lest = ball_volume(lb, 4000);
  CHECK(lest.value == doctest::Approx(lexact).epsilon(1e-10));
  CHECK(lest.std_error < 1e-12 * lexact);

  // Halving delta scales the Siegel volume by prod F_i(delta/2)/F_i(delta).
  auto ch2 = std::make_shared<const AdaptedChart>(
      adapted_coords(tangent_frame(d), d, o, 0.005, d.M));
  VolumeEstimate half = ball_volume(make_pseudo_ball(ch2, 0.1), 20000);
  CHECK(est.value / half.value == doctest::Approx(16.0).epsilon(0.10));

  // The window clip strictly removes mass for a desk-scale ball.
  PseudoBall big = make_pseudo_ball(lin, 4.0);
  VolumeEstimate clipped = ball_volume(big, 20000, 20240901, 0.5);
  VolumeEstimate full = ball_volume(big, 20000);
  CHECK(clipped.value < full.value);
  CHECK(clipped.std_error > 0);
}

TEST_CASE("c0 discovery keeps rho within half delta") {
  Rng rng(17);
  for (const char* name :
       {"siegel.json", "herbort.json", "decoupled.json", "mixed.json"}) {
    ModelDomain d = load_domain(dom(name));
    auto chart = std::make_shared<const AdaptedChart>(
        adapted_coords(tangent_frame(d), d, Point::Zero(3), 1e-2, d.M));
    double c0 = find_c0(chart, d, 2000);
    CAPTURE(name);
    CHECK(c0 > 0.0);
    CHECK(c0 <= 0.5);
    // Fresh samples at 0.95 c0 respect the bound.
    for (int t = 0; t < 500; ++t) {
      Point v(3);
      for (int i = 0; i < 3; ++i)
        v[i] = 0.95 * c0 / std::sqrt(chart->F[i]) * random_disc(rng);
      Point q = chart->map.apply_inverse(v);
      CHECK(std::abs(d.rho_poly.eval(q).real()) <= 0.5 * 1e-2 + 1e-12);
    }
  }
  // Siegel at the origin admits the closed-form bound c + 2c^2 <= 1/2.
  ModelDomain d = load_domain(dom("siegel.json"));
  auto chart = std::make_shared<const AdaptedChart>(
      adapted_coords(tangent_frame(d), d, Point::Zero(3), 1e-2, d.M));
  double c0 = find_c0(chart, d, 4000);
  CHECK(c0 > 0.25);
  CHECK(c0 < 0.45);
}
