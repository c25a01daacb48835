#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hcap/expr.hpp"
#include "hcap/jet.hpp"
#include "hcap/rng.hpp"
#include "test_util.hpp"

using namespace hcap;
using hcap::testutil::fd_partial;
using hcap::testutil::rel_err;

namespace {

Jet lift_at(const ExprPtr& e, std::initializer_list<double> pt, int order) {
    std::vector<double> p(pt);
    return e->lift(p, order);
}

}  // namespace

TEST_CASE("layout enumerates exactly the multi-indices of degree <= order") {
    const JetLayout& L = JetLayout::get(2, 5);
    CHECK(L.size() == 21);  // C(7,2)
    const JetLayout& L3 = JetLayout::get(3, 5);
    CHECK(L3.size() == 56);  // C(8,3)
    for (int p = 0; p < L3.size(); ++p) {
        CHECK(mi_degree(L3.index(p)) <= 5);
        CHECK(L3.pos(L3.index(p)) == p);
    }
}

TEST_CASE("partial beyond the truncation order is an error") {
    Jet j = Jet::constant(2, 2, 7.0);
    CHECK(j.partial(mi(0, 0)) == 7.0);
    CHECK(j.partial(mi(1, 1)) == 0.0);
    CHECK_THROWS_AS((void)j.partial(mi(2, 1)), JetError);
    Jet sq = Expr::parse("(mul x1 x1)")->lift(std::vector<double>{1.5}, 3);
    CHECK(sq.partial(mi(2)) == doctest::Approx(2.0));
    CHECK(sq.partial(mi(3)) == doctest::Approx(0.0));
}

TEST_CASE("product jet of x1*x2 at (1,2)") {
    ExprPtr e = Expr::variable(0) * Expr::variable(1);
    Jet j = lift_at(e, {1.0, 2.0}, 2);
    CHECK(j.value() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(j.partial(mi(1, 0)) == doctest::Approx(2.0));
    CHECK(j.partial(mi(0, 1)) == doctest::Approx(1.0));
    CHECK(j.partial(mi(1, 1)) == doctest::Approx(1.0));
    CHECK(j.partial(mi(2, 0)) == doctest::Approx(0.0));
    CHECK(j.partial(mi(0, 2)) == doctest::Approx(0.0));
}

TEST_CASE("hemisphere jet at the pole: value 1, flat gradient, Hessian -I") {
    ExprPtr e = Expr::sqrt(1.0 - Expr::variable(0) * Expr::variable(0) -
                           Expr::variable(1) * Expr::variable(1));
    Jet j = lift_at(e, {0.0, 0.0}, 2);
    CHECK(j.value() == doctest::Approx(1.0));
    CHECK(j.partial(mi(1, 0)) == doctest::Approx(0.0));
    CHECK(j.partial(mi(0, 1)) == doctest::Approx(0.0));
    CHECK(j.partial(mi(2, 0)) == doctest::Approx(-1.0));
    CHECK(j.partial(mi(0, 2)) == doctest::Approx(-1.0));
    CHECK(j.partial(mi(1, 1)) == doctest::Approx(0.0));
}

TEST_CASE("order-5 coefficients of the sphere-cap height match finite differences") {
    ExprPtr e = 2.0 + Expr::sqrt(1.0 - Expr::variable(0) * Expr::variable(0) -
                                 Expr::variable(1) * Expr::variable(1));
    const std::vector<double> pt{0.3, 0.1};
    Jet j = e->lift(pt, 5);
    // independent long-double oracle: same closed form, never touches Expr
    auto f = [](const std::vector<long double>& x) -> long double {
        return 2.0L + std::sqrt(1.0L - x[0] * x[0] - x[1] * x[1]);
    };
    const std::vector<long double> ptl{0.3L, 0.1L};
    const JetLayout& L = JetLayout::get(2, 5);
    for (int p = 0; p < L.size(); ++p) {
        const MultiIndex a = L.index(p);
        const double fd =
            static_cast<double>(hcap::testutil::fd_partial_t<long double>(f, ptl, a, 0.1L));
        CHECK_MESSAGE(rel_err(j.partial(a), fd) < 1e-6,
                      "alpha=(", a[0], ",", a[1], ") jet=", j.partial(a), " fd=", fd);
    }
}

TEST_CASE("derivatives of exp at 0 are all 1") {
    ExprPtr e = Expr::exp(Expr::variable(0));
    Jet j = lift_at(e, {0.0}, 5);
    for (int k = 0; k <= 5; ++k) CHECK(j.partial(mi(k)) == doctest::Approx(1.0));
}

TEST_CASE("derivatives of log(1+x) at 0 alternate factorials") {
    ExprPtr e = Expr::log(1.0 + Expr::variable(0));
    Jet j = lift_at(e, {0.0}, 5);
    const double want[6] = {0.0, 1.0, -1.0, 2.0, -6.0, 24.0};
    for (int k = 0; k <= 5; ++k) CHECK(j.partial(mi(k)) == doctest::Approx(want[k]));
}

TEST_CASE("geometric series: 1/(1-x1) has k! derivatives") {
    Jet one = Jet::constant(1, 3, 1.0);
    Jet den = 1.0 - Jet::variable(1, 3, 0, 0.0);
    Jet q = one / den;
    CHECK(q.partial(mi(0)) == doctest::Approx(1.0));
    CHECK(q.partial(mi(1)) == doctest::Approx(1.0));
    CHECK(q.partial(mi(2)) == doctest::Approx(2.0));
    CHECK(q.partial(mi(3)) == doctest::Approx(6.0));
}

TEST_CASE("sqrt of a perfect square is exact") {
    ExprPtr base = 1.0 + Expr::variable(0);
    ExprPtr e = Expr::sqrt(base * base);
    Jet j = lift_at(e, {0.0}, 4);
    CHECK(j.value() == doctest::Approx(1.0));
    CHECK(j.partial(mi(1)) == doctest::Approx(1.0));
    for (int k = 2; k <= 4; ++k) CHECK(std::abs(j.partial(mi(k))) < 1e-13);
}

TEST_CASE("division by a jet with zero constant term is an error") {
    Jet num = Jet::constant(1, 2, 1.0);
    Jet den = Jet::variable(1, 2, 0, 0.0);
    CHECK_THROWS_AS(num / den, JetError);
    CHECK_THROWS_AS(sqrt(Jet::constant(1, 2, -1.0)), JetError);
    CHECK_THROWS_AS(log(Jet::constant(1, 2, 0.0)), JetError);
}

TEST_CASE("Leibniz convolution identity on random polynomial pairs") {
    Rng rng(20250801);
    const JetLayout& L4 = JetLayout::get(2, 4);
    const ExprPtr x = Expr::variable(0), y = Expr::variable(1);
    for (int trial = 0; trial < 20; ++trial) {
        // random cubics
        auto rnd = [&] { return Expr::constant(rng.uniform(-2.0, 2.0)); };
        ExprPtr p = rnd() + rnd() * x + rnd() * y + rnd() * x * y + rnd() * x * x +
                    rnd() * y * y + rnd() * x * x * y;
        ExprPtr q = rnd() + rnd() * x + rnd() * y + rnd() * x * y + rnd() * y * y * x;
        const std::vector<double> pt{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        Jet jp = p->lift(pt, 4), jq = q->lift(pt, 4), jpq = (p * q)->lift(pt, 4);
        for (int ip = 0; ip < L4.size(); ++ip) {
            const MultiIndex a = L4.index(ip);
            double conv = 0.0;
            for (int b0 = 0; b0 <= a[0]; ++b0)
                for (int b1 = 0; b1 <= a[1]; ++b1) {
                    double binom = 1.0;
                    for (int t = 0; t < b0; ++t) binom *= double(a[0] - t) / (t + 1);
                    for (int t = 0; t < b1; ++t) binom *= double(a[1] - t) / (t + 1);
                    conv += binom * jp.partial(mi(b0, b1)) * jq.partial(mi(a[0] - b0, a[1] - b1));
                }
            CHECK(rel_err(jpq.partial(a), conv) < 1e-10);
        }
    }
}

TEST_CASE("chain consistency: sqrt(f)^2 rebuilds f") {
    Rng rng(7);
    ExprPtr f = 2.0 + Expr::variable(0) * Expr::variable(1) +
                Expr::exp(Expr::variable(0) * 0.3);
    for (int trial = 0; trial < 10; ++trial) {
        const std::vector<double> pt{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
        Jet root = Expr::sqrt(f)->lift(pt, 5);
        Jet rebuilt = root * root;
        Jet orig = f->lift(pt, 5);
        const JetLayout& L = JetLayout::get(2, 5);
        for (int p = 0; p < L.size(); ++p)
            CHECK(rel_err(rebuilt.partial(L.index(p)), orig.partial(L.index(p))) < 1e-12);
    }
}

TEST_CASE("derivative() shifts indices down one order") {
    ExprPtr e = Expr::variable(0) * Expr::variable(0) * Expr::variable(1);
    Jet j = lift_at(e, {1.5, -0.5}, 4);
    Jet d0 = j.derivative(0);
    CHECK(d0.order() == 3);
    CHECK(d0.value() == doctest::Approx(j.partial(mi(1, 0))));
    CHECK(d0.partial(mi(1, 1)) == doctest::Approx(j.partial(mi(2, 1))));
}

TEST_CASE("powi matches repeated multiplication and handles negatives") {
    Jet v = Jet::variable(1, 4, 0, 1.3);
    Jet p3 = powi(v, 3);
    CHECK(p3.value() == doctest::Approx(1.3 * 1.3 * 1.3));
    CHECK(p3.partial(mi(1)) == doctest::Approx(3 * 1.3 * 1.3));
    Jet pm2 = powi(v, -2);
    CHECK(pm2.value() == doctest::Approx(std::pow(1.3, -2.0)));
    CHECK(pm2.partial(mi(1)) == doctest::Approx(-2.0 * std::pow(1.3, -3.0)));
}

TEST_CASE("mixed-order operands truncate to the smaller order") {
    Jet a = Jet::variable(2, 4, 0, 2.0);
    Jet b = Jet::variable(2, 2, 1, 3.0);
    Jet c = a * b;
    CHECK(c.order() == 2);
    CHECK(c.value() == doctest::Approx(6.0));
    CHECK(c.partial(mi(1, 1)) == doctest::Approx(1.0));
}
