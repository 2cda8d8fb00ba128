#include <doctest.h>

#include <cmath>

#include "spherekit/expr.hpp"

using namespace spherekit;

TEST_CASE("expression parsing matches hand-written formulas") {
    const Expr e = Expr::parse("cos(1+2*pi*(x+y)+5*sin(pi*z))");
    CHECK(e.vars() == VarSet::cart);
    for (double x : {-0.3, 0.2, 0.9})
        for (double y : {-0.6, 0.4})
            for (double z : {-0.8, 0.1, 0.7}) {
                const double ref = std::cos(1 + 2 * kPi * (x + y) + 5 * std::sin(kPi * z));
                CHECK(e.eval_cart(x, y, z) == doctest::Approx(ref).epsilon(1e-14));
            }
}

TEST_CASE("operator precedence and associativity") {
    CHECK(Expr::parse("2^3^2").eval_cart(0, 0, 0) == 512.0);     // right-assoc
    CHECK(Expr::parse("-2^2").eval_cart(0, 0, 0) == -4.0);       // ^ binds tighter
    CHECK(Expr::parse("2-3-4").eval_cart(0, 0, 0) == -5.0);
    CHECK(Expr::parse("12/3/2").eval_cart(0, 0, 0) == 2.0);
    CHECK(Expr::parse("1+2*3").eval_cart(0, 0, 0) == 7.0);
    CHECK(Expr::parse("2^-1").eval_cart(0, 0, 0) == 0.5);
    CHECK(Expr::parse("1.5e2").eval_cart(0, 0, 0) == 150.0);
    CHECK(Expr::parse("e").eval_cart(0, 0, 0) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("spherical variables evaluate directly") {
    const Expr e = Expr::parse("cos(th)+sin(lam)");
    CHECK(e.vars() == VarSet::sph);
    CHECK(e.eval_sph(0.3, 1.1) == doctest::Approx(std::cos(1.1) + std::sin(0.3)));
    const sphere_fn f = e.as_sphere_fn();
    CHECK(f(0.3, 1.1).real() == doctest::Approx(std::cos(1.1) + std::sin(0.3)));
}

TEST_CASE("cartesian expressions compose with the coordinate map") {
    const Expr e = Expr::parse("z");
    const sphere_fn f = e.as_sphere_fn();
    CHECK(f(1.0, 0.5).real() == doctest::Approx(std::cos(0.5)));
}

TEST_CASE("syntax errors carry byte offsets") {
    try {
        Expr::parse("x+");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.offset == 2);
    }
    try {
        Expr::parse("sin(lam)*x");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.offset == 9);  // the mixed-variable token
    }
    CHECK_THROWS_AS(Expr::parse("foo(x)"), parse_error);
    CHECK_THROWS_AS(Expr::parse("1+*2"), parse_error);
    CHECK_THROWS_AS(Expr::parse("sin(x"), parse_error);
    CHECK_THROWS_AS(Expr::parse("x y"), parse_error);
    CHECK_THROWS_AS(Expr::parse(""), parse_error);
}

TEST_CASE("all unary functions parse and evaluate") {
    const Expr e = Expr::parse("sin(x)+cos(x)+tan(x)+exp(x)+log(2+x)+sqrt(1+x)+abs(x)+sinh(x)+cosh(x)");
    const double x = 0.37;
    const double ref = std::sin(x) + std::cos(x) + std::tan(x) + std::exp(x) + std::log(2 + x) +
                       std::sqrt(1 + x) + std::abs(x) + std::sinh(x) + std::cosh(x);
    CHECK(e.eval_cart(x, 0, 0) == doctest::Approx(ref).epsilon(1e-14));
}
