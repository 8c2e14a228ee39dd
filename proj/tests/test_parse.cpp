#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ftl/parse.hpp"
#include "ftl/util.hpp"

using namespace ftl;

namespace {

Point rand_point(Rng& rng, int n) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Point p(n);
  for (int i = 0; i < n; ++i) p[i] = 0.7 * Cplx(U(rng), U(rng));
  return p;
}

} // namespace

TEST_CASE("grammar basics lower to the right polynomial") {
  Rng rng(1);
  auto check_eval = [&](const std::string& text, int n, auto ref) {
    CPoly p = ast_to_poly(parse_expr(text, n), n);
    for (int t = 0; t < 25; ++t) {
      Point z = rand_point(rng, n);
      Cplx got = p.eval(z), want = ref(z);
      CHECK(std::abs(got - want) <= 1e-13 * (1.0 + std::abs(want)));
    }
  };

  check_eval("|z1|^2 + |z2|^2", 2,
             [](const Point& z) { return std::norm(z[0]) + std::norm(z[1]); });
  check_eval("|z1 + z2|^2", 2,
             [](const Point& z) { return Cplx(std::norm(z[0] + z[1])); });
  check_eval("Re(z1) + Im(z2)", 2,
             [](const Point& z) { return Cplx(z[0].real() + z[1].imag()); });
  check_eval("conj(z1) * z1^2", 1,
             [](const Point& z) { return std::conj(z[0]) * z[0] * z[0]; });
  check_eval("1/2 * z1 - 0.25", 1,
             [](const Point& z) { return 0.5 * z[0] - 0.25; });
  check_eval("-(z1 - z2)^3", 2, [](const Point& z) {
    Cplx d = z[0] - z[1];
    return -d * d * d;
  });
  check_eval("|z2|^6 + |z3|^6 + |z2|^2 * |z3|^2", 3, [](const Point& z) {
    double a = std::norm(z[1]), b = std::norm(z[2]);
    return Cplx(a * a * a + b * b * b + a * b);
  });
}

TEST_CASE("pretty print round trip is structurally exact") {
  for (const char* text :
       {"Re(z3) + |z1|^2 + |z2|^2", "|z1 + z2|^2 + |z1|^4",
        "conj(z1)*z2 - Im(z1*z2)", "1/3 * z1^4 - (z2 - 0.5)^2",
        "-(|z1|^2)", "|z1 - conj(z2)|^4"}) {
    AstPtr a = parse_expr(text, 3);
    AstPtr b = parse_expr(pretty_print(a), 3);
    CHECK(ast_equal(a, b));
    CHECK(pretty_print(a) == pretty_print(b));
  }
}

TEST_CASE("diagnostics carry position and reason") {
  CHECK_THROWS_WITH_AS(parse_expr("|z1|^3", 2), doctest::Contains("odd"),
                       ParseError);
  CHECK_THROWS_AS(parse_expr("|z1|", 2), ParseError);      // power required
  CHECK_THROWS_AS(parse_expr("z4 + 1", 3), ParseError);    // out of range
  CHECK_THROWS_AS(parse_expr("z1 + ", 2), ParseError);     // truncated
  CHECK_THROWS_AS(parse_expr("z1 ) ", 2), ParseError);     // trailing input
  CHECK_THROWS_AS(parse_expr("foo(z1)", 2), ParseError);   // unknown name
  CHECK_THROWS_AS(parse_expr("zx", 2), ParseError);        // bad identifier

  try {
    parse_expr("z1 +\n  |z2|^5", 2);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col > 1);
  }
}

TEST_CASE("real-valuedness detection after lowering") {
  CHECK(ast_to_poly(parse_expr("|z1|^4 + Re(z2)", 2), 2).is_real_valued());
  CHECK(ast_to_poly(parse_expr("Im(z1^2)", 1), 1).is_real_valued());
  CHECK_FALSE(ast_to_poly(parse_expr("z1", 1), 1).is_real_valued());
  CHECK_FALSE(ast_to_poly(parse_expr("z1^2 + |z1|^2", 1), 1).is_real_valued());
}
