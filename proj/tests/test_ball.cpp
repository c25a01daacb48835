#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hcap/ball.hpp"
#include "hcap/families.hpp"
#include "hcap/rng.hpp"

using namespace hcap;

TEST_CASE("round sphere a = 1/2: K = 9/16, H = 5/4, isothermal chart") {
    BallPatch p = ball_sphere(0.5);
    Rng rng(20250801);
    for (int k = 0; k < 10; ++k) {
        const double s = rng.uniform(-0.7, 0.7), t = rng.uniform(-0.7, 0.7);
        BallForms f = ball_forms(p, s, t);
        CHECK(f.K_intrinsic == doctest::Approx(9.0 / 16.0).epsilon(1e-10));
        CHECK(f.H_mean == doctest::Approx(1.25).epsilon(1e-10));
        // stereographic chart composed with the conformal ambient metric
        CHECK(std::abs(f.E - f.G) < 1e-12 * f.E);
        CHECK(std::abs(f.F) < 1e-12 * f.E);
        CHECK(f.E * f.G - f.F * f.F > 0.0);
    }
}

TEST_CASE("sphere curvature identities across radii") {
    for (double a : {0.2, 0.4, 0.5, 0.7}) {
        BallPatch p = ball_sphere(a);
        BallForms f = ball_forms(p, 0.13, -0.21);
        CHECK(f.H_mean == doctest::Approx(ball_sphere_H(a)).epsilon(1e-10));
        CHECK(f.K_intrinsic == doctest::Approx(ball_sphere_K_intrinsic(a)).epsilon(1e-10));
        // closed forms against the hyperbolic radius
        const double R = ball_sphere_hyp_radius(a);
        CHECK(ball_sphere_H(a) == doctest::Approx(1.0 / std::tanh(R)));
        CHECK(ball_sphere_K_intrinsic(a) == doctest::Approx(1.0 / std::pow(std::sinh(R), 2)));
    }
}

TEST_CASE("rho is constant on origin-centered spheres") {
    BallPatch p = ball_sphere(0.5);
    BallForms f = ball_forms(p, 0.3, 0.2);
    CHECK(f.rho == doctest::Approx(2.0 / (1.0 - 0.25)));
    CHECK(std::abs(f.rho_u) < 1e-12);
    CHECK(std::abs(f.rho_v) < 1e-12);
}

TEST_CASE("Codazzi residuals vanish on analytic patches") {
    Rng rng(7);
    for (auto& [name, p] : builtin_ball_families()) {
        CAPTURE(name);
        for (int k = 0; k < 10; ++k) {
            const double s = rng.uniform(p.s_range[0] * 0.9, p.s_range[1] * 0.9);
            const double t = rng.uniform(p.t_range[0] * 0.9, p.t_range[1] * 0.9);
            auto [r1, r2] = codazzi_residual(p, s, t);
            CHECK(std::abs(r1) < 1e-8);
            CHECK(std::abs(r2) < 1e-8);
        }
    }
}

TEST_CASE("perturbing L is detected by the Codazzi residual") {
    BallPatch p = ball_sphere(0.5);
    const double s = 0.3, t = 0.2;
    detail::BallJets b = detail::ball_jets(p, s, t, 3);
    auto gam = detail::induced_christoffels(b.E, b.F, b.G);
    auto [r1, r2] = codazzi_residual(p, s, t);
    CHECK(std::abs(r1) < 1e-10);
    CHECK(std::abs(r2) < 1e-10);
    // inject L -> L + 0.1: residual picks up -0.1 * Gamma^1_12 in the first
    // equation and -0.1 * Gamma^1_22 in the second
    const double r1_bad = r1 - 0.1 * gam[0][0][1];
    const double r2_bad = r2 - 0.1 * gam[0][1][1];
    CHECK(std::max(std::abs(r1_bad), std::abs(r2_bad)) > 1e-3);
}

TEST_CASE("ellipsoid-like saddle patch satisfies Codazzi") {
    BallPatch p = ball_saddle_patch();
    auto [r1, r2] = codazzi_residual(p, 0.25, -0.3);
    CHECK(std::abs(r1) < 1e-8);
    CHECK(std::abs(r2) < 1e-8);
}

TEST_CASE("conformal identities on the round sphere") {
    BallPatch p = ball_sphere(0.5);
    Rng rng(3);
    for (int k = 0; k < 5; ++k) {
        const double s = rng.uniform(-0.6, 0.6), t = rng.uniform(-0.6, 0.6);
        auto res = conformal_check(p, s, t);
        for (auto& [key, val] : res) {
            CAPTURE(key);
            CAPTURE(s);
            CAPTURE(t);
            CHECK(val < 1e-8);
        }
    }
}

TEST_CASE("horosphere patch is intrinsically flat") {
    BallPatch p = ball_horosphere_patch(0.5);
    auto res = conformal_check(p, 0.2, -0.4);
    CHECK(res["conformal_laplacian"] < 1e-8);
    BallForms f = ball_forms(p, 0.2, -0.4);
    CHECK(std::abs(f.K_intrinsic) < 1e-9);
    CHECK(std::abs(std::abs(f.H_mean) - 1.0) < 1e-9);
}

TEST_CASE("non-isothermal chart is rejected by the conformal check") {
    BallPatch p = ball_sphere_nonisothermal(0.5);
    CHECK_THROWS_AS(conformal_check(p, 0.05, 0.08), PreconditionError);
    // but the chart itself is a perfectly good sphere patch
    BallForms f = ball_forms(p, 0.05, 0.08);
    CHECK(f.K_intrinsic == doctest::Approx(ball_sphere_K_intrinsic(0.5)).epsilon(1e-9));
    CHECK(std::abs(f.H_mean) == doctest::Approx(ball_sphere_H(0.5)).epsilon(1e-9));
}

TEST_CASE("support quantities: both routes agree") {
    Rng rng(13);
    for (auto& [name, p] : builtin_ball_families()) {
        CAPTURE(name);
        for (int k = 0; k < 8; ++k) {
            const double s = rng.uniform(p.s_range[0] * 0.9, p.s_range[1] * 0.9);
            const double t = rng.uniform(p.t_range[0] * 0.9, p.t_range[1] * 0.9);
            auto res = support_quantities(p, s, t);
            CHECK(res["rho_u"] < 1e-8);
            CHECK(res["rho_v"] < 1e-8);
            CHECK(res["rho_uu"] < 1e-8);
            CHECK(res["rho_uv"] < 1e-8);
            CHECK(res["rho_vv"] < 1e-8);
            CHECK(res["cauchy_schwarz_slack"] > -1e-10);
        }
    }
}

TEST_CASE("support derivatives vanish on origin-centered spheres") {
    BallPatch p = ball_sphere(0.3);
    auto res = support_quantities(p, 0.4, -0.2);
    CHECK(res["rho_u"] < 1e-12);
    CHECK(res["rho_v"] < 1e-12);
}

TEST_CASE("radial-field projection bound holds at 100 points off center") {
    BallPatch p = ball_sphere(0.3, {0.2, 0.0, 0.1}, 0.8);
    Rng rng(20250801);
    for (int k = 0; k < 100; ++k) {
        const double s = rng.uniform(-0.7, 0.7), t = rng.uniform(-0.7, 0.7);
        auto res = support_quantities(p, s, t);
        CHECK(res["cauchy_schwarz_slack"] > -1e-10);
    }
}

TEST_CASE("degenerate chart raises an immersion error") {
    BallPatch p;
    ExprPtr s = Expr::variable(0), t = Expr::variable(1);
    p.chart[0] = s * s;
    p.chart[1] = t;
    p.chart[2] = Expr::constant(0.5);
    p.s_range = {-0.2, 0.2};
    p.t_range = {-0.2, 0.2};
    CHECK_THROWS_AS(ball_forms(p, 0.0, 0.0), GeometryError);
}

TEST_CASE("chart leaving the unit ball is rejected") {
    BallPatch p;
    ExprPtr s = Expr::variable(0), t = Expr::variable(1);
    p.chart[0] = s + 0.9;
    p.chart[1] = t;
    p.chart[2] = Expr::constant(0.3);
    p.s_range = {-0.5, 0.5};
    p.t_range = {-0.5, 0.5};
    CHECK_THROWS_AS(ball_forms(p, 0.4, 0.0), GeometryError);
    CHECK_THROWS_AS(ball_sphere(0.5, {0.6, 0.0, 0.0}), GeometryError);
}

TEST_CASE("Laplace-Beltrami of rho on a sphere vanishes; of K is zero too") {
    // On an origin-centered sphere both rho and K are constant.
    BallPatch p = ball_sphere(0.5);
    detail::BallJets b = detail::ball_jets(p, 0.2, 0.1, 4);
    const double lap_rho = detail::laplace_beltrami(b.lambda.truncated(2), b.E, b.F, b.G);
    CHECK(std::abs(lap_rho) < 1e-9);
    const double lap_K = detail::laplace_beltrami(b.K_intrinsic, b.E, b.F, b.G);
    CHECK(std::abs(lap_K) < 1e-7);
}
