#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcap/expr.hpp"

using namespace hcap;

TEST_CASE("parse and print round-trip") {
    const std::string text = "(add 2 (sqrt (sub 1 (add (mul x1 x1) (mul x2 x2)))))";
    ExprPtr e = Expr::parse(text);
    CHECK(e->str() == text);
    const std::vector<double> origin{0.0, 0.0};
    CHECK(e->eval(origin) == doctest::Approx(3.0));
    ExprPtr again = Expr::parse(e->str());
    const std::vector<double> pt{0.3, 0.1};
    CHECK(again->eval(pt) == doctest::Approx(e->eval(pt)));
}

TEST_CASE("n-ary add and mul fold left") {
    ExprPtr e = Expr::parse("(add 1 2 3 x1)");
    const std::vector<double> pt{4.0};
    CHECK(e->eval(pt) == doctest::Approx(10.0));
    ExprPtr m = Expr::parse("(mul 2 3 x1)");
    CHECK(m->eval(pt) == doctest::Approx(24.0));
}

TEST_CASE("pow takes integer literal exponents only") {
    ExprPtr e = Expr::parse("(pow x1 3)");
    const std::vector<double> pt{2.0};
    CHECK(e->eval(pt) == doctest::Approx(8.0));
    CHECK_THROWS_AS(Expr::parse("(pow x1 x2)"), ParseError);
    CHECK_THROWS_AS(Expr::parse("(pow x1 0.5)"), ParseError);
}

TEST_CASE("malformed input raises parse errors") {
    CHECK_THROWS_AS(Expr::parse("(add 1"), ParseError);
    CHECK_THROWS_AS(Expr::parse("(frob 1 2)"), ParseError);
    CHECK_THROWS_AS(Expr::parse("x9"), ParseError);
    CHECK_THROWS_AS(Expr::parse("(sqrt 1 2)"), ParseError);
    CHECK_THROWS_AS(Expr::parse("(add 1 2) junk"), ParseError);
}

TEST_CASE("domain violations name the offending node") {
    ExprPtr e = Expr::parse("(sqrt (sub 1 (mul x1 x1)))");
    const std::vector<double> bad{2.0};
    try {
        e->eval(bad);
        FAIL("expected EvalError");
    } catch (const EvalError& err) {
        CHECK(std::string(err.what()).find("sqrt") != std::string::npos);
    }
    ExprPtr d = Expr::parse("(div 1 x1)");
    const std::vector<double> zero{0.0};
    CHECK_THROWS_AS((void)d->eval(zero), EvalError);
    CHECK_THROWS_AS((void)d->lift(zero, 2), EvalError);
}

TEST_CASE("substitution composes trees") {
    ExprPtr e = Expr::parse("(add (mul x1 x1) x2)");
    std::vector<ExprPtr> subs{Expr::variable(1), Expr::constant(5.0)};
    ExprPtr g = e->substituted(subs);
    const std::vector<double> pt{0.0, 3.0};
    CHECK(g->eval(pt) == doctest::Approx(14.0));
}

TEST_CASE("affine composition rotates coordinates") {
    // u(x) = x1^2; rotate by 90 degrees: u(Rx) = x2^2
    ExprPtr e = Expr::parse("(mul x1 x1)");
    const double A[4] = {0.0, -1.0, 1.0, 0.0};
    const double b[2] = {0.0, 0.0};
    ExprPtr r = compose_affine(e, A, b, 2);
    const std::vector<double> pt{3.0, 2.0};
    CHECK(r->eval(pt) == doctest::Approx(4.0));
}

TEST_CASE("lift agrees with eval at order zero") {
    ExprPtr e = Expr::parse("(exp (mul 0.5 (log (add 1 (mul x1 x1)))))");
    const std::vector<double> pt{0.7};
    CHECK(e->lift(pt, 0).value() == doctest::Approx(e->eval(pt)));
}
