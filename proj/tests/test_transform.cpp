#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hcap/families.hpp"
#include "hcap/rng.hpp"
#include "hcap/transform.hpp"

using namespace hcap;

namespace {

std::array<double, 3> rand_ball_point(Rng& rng, double rmax = 0.85) {
    for (;;) {
        std::array<double, 3> p{rng.uniform(-rmax, rmax), rng.uniform(-rmax, rmax),
                                rng.uniform(-rmax, rmax)};
        if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] < rmax * rmax) return p;
    }
}

Eigen::Vector2d ball_kappas(const BallPatch& p, double s, double t) {
    BallForms f = ball_forms(p, s, t);
    Eigen::Matrix2d h2, g2;
    h2 << f.L, f.M, f.M, f.N;
    g2 << f.E, f.F, f.F, f.G;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(h2, g2);
    return es.eigenvalues();
}

}  // namespace

TEST_CASE("ball origin maps to (0,0,1); (0,0,0.5) to (0,0,1/3)") {
    CayleyMap m = CayleyMap::ball_to_halfspace();
    auto q0 = m.map_point({0.0, 0.0, 0.0});
    CHECK(q0[0] == doctest::Approx(0.0));
    CHECK(q0[1] == doctest::Approx(0.0));
    CHECK(q0[2] == doctest::Approx(1.0));
    auto q1 = m.map_point({0.0, 0.0, 0.5});
    CHECK(q1[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("distances agree across models: log 3 both sides") {
    const double db = ball_distance({0, 0, 0}, {0, 0, 0.5});
    CHECK(db == doctest::Approx(std::log(3.0)).epsilon(1e-13));
    const double dh = halfspace_distance({0, 0, 1}, {0, 0, 1.0 / 3.0});
    CHECK(std::abs(db - dh) < 1e-12);
}

TEST_CASE("round trip on 1000 random points") {
    CayleyMap b2h = CayleyMap::ball_to_halfspace();
    CayleyMap h2b = CayleyMap::halfspace_to_ball();
    Rng rng(20250801);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const std::array<double, 3> p = rand_ball_point(rng);
        const std::array<double, 3> q = b2h.map_point(p);
        CHECK(q[2] > 0.0);
        const std::array<double, 3> back = h2b.map_point(q);
        for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(back[i] - p[i]));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("hyperbolic distances are preserved by the model map") {
    CayleyMap m = CayleyMap::ball_to_halfspace();
    Rng rng(17);
    for (int k = 0; k < 50; ++k) {
        const auto p = rand_ball_point(rng), q = rand_ball_point(rng);
        const double db = ball_distance(p, q);
        const double dh = halfspace_distance(m.map_point(p), m.map_point(q));
        CHECK(std::abs(db - dh) < 1e-10 * std::max(1.0, db));
    }
}

TEST_CASE("domain and pole errors") {
    CayleyMap b2h = CayleyMap::ball_to_halfspace();
    CHECK_THROWS_AS(b2h.map_point({1.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(b2h.map_point({0.0, 0.0, -1.0}), DomainError);
    CayleyMap h2b = CayleyMap::halfspace_to_ball();
    CHECK_THROWS_AS(h2b.map_point({0.2, 0.1, 0.0}), DomainError);
    CHECK_THROWS_AS(h2b.map_point({0.2, 0.1, -0.5}), DomainError);
}

TEST_CASE("isometry residual vanishes on the axis and at random draws") {
    CayleyMap m = CayleyMap::ball_to_halfspace();
    const double r0 = isometry_residual(m, {0, 0, 0}, {0, 0, 1}, {0, 0, 1});
    CHECK(r0 < 1e-13);
    Rng rng(23);
    for (int k = 0; k < 100; ++k) {
        const auto p = rand_ball_point(rng);
        const std::array<double, 3> v1{rng.uniform(-1, 1), rng.uniform(-1, 1),
                                       rng.uniform(-1, 1)};
        const std::array<double, 3> v2{rng.uniform(-1, 1), rng.uniform(-1, 1),
                                       rng.uniform(-1, 1)};
        CHECK(isometry_residual(m, p, v1, v2) < 1e-10);
    }
}

TEST_CASE("a horizontally scaled map is not an isometry (negative control)") {
    // scale only the horizontal image components; a full dilation would
    // still be a hyperbolic isometry of the half-space
    const std::array<double, 3> p{0.2, -0.1, 0.3};
    std::array<Jet, 3> seeds{Jet::variable(3, 1, 0, p[0]), Jet::variable(3, 1, 1, p[1]),
                             Jet::variable(3, 1, 2, p[2])};
    std::array<Jet, 3> img = cayley_involution<Jet>(seeds);
    img[0] = 1.1 * img[0];
    img[1] = 1.1 * img[1];
    Eigen::Matrix3d J;
    for (int i = 0; i < 3; ++i) {
        J(i, 0) = img[i].partial(mi(1, 0, 0));
        J(i, 1) = img[i].partial(mi(0, 1, 0));
        J(i, 2) = img[i].partial(mi(0, 0, 1));
    }
    const Eigen::Vector3d v(0.3, 0.5, -0.2);
    const Eigen::Vector3d w = J * v;
    const double lam = 2.0 / (1.0 - (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
    const double src = lam * lam * v.dot(v);
    const double z = img[2].value();
    const double dst = w.dot(w) / (z * z);
    CHECK(std::abs(dst - src) > 1e-3);
}

TEST_CASE("radial geodesic reaches (0,0,0.5) at t = log 3") {
    const auto g = geodesic({0, 0, 0}, {0, 0, 1}, std::log(3.0));
    CHECK(g[0] == doctest::Approx(0.0));
    CHECK(g[2] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("geodesics are unit speed, reversible and additive") {
    Rng rng(41);
    for (int k = 0; k < 20; ++k) {
        const auto p = rand_ball_point(rng, 0.6);
        const std::array<double, 3> dir{rng.uniform(-1, 1), rng.uniform(-1, 1),
                                        rng.uniform(-1, 1)};
        const double a = rng.uniform(0.1, 0.8), b = rng.uniform(0.1, 0.8);
        const auto ga = geodesic(p, dir, a);
        CHECK(std::abs(ball_distance(p, ga) - a) < 1e-10);
        // reversal: continue backwards and return
        const auto back = geodesic(p, dir, 0.0);
        CHECK(std::abs(back[0] - p[0]) + std::abs(back[1] - p[1]) + std::abs(back[2] - p[2]) <
              1e-12);
        const auto gab = geodesic(p, dir, a + b);
        CHECK(std::abs(ball_distance(ga, gab) - b) < 1e-10);
        CHECK(std::abs(ball_distance(p, gab) - (a + b)) < 1e-10);
    }
}

TEST_CASE("normalization motion is a hyperbolic isometry") {
    BallPatch patch = ball_sphere(0.5);
    auto [motion, graph] = normalize_neighborhood(patch, 0.2, -0.3, 2.0);
    Rng rng(53);
    for (int k = 0; k < 30; ++k) {
        const auto p = rand_ball_point(rng, 0.7), q = rand_ball_point(rng, 0.7);
        const double before = ball_distance(p, q);
        const double after = halfspace_distance(motion.apply(p), motion.apply(q));
        CHECK(std::abs(before - after) < 1e-10 * std::max(1.0, before));
    }
    (void)graph;
}

TEST_CASE("normalized sphere cap: height 2, flat gradient, kappa preserved") {
    BallPatch patch = ball_sphere(0.5);
    auto [motion, graph] = normalize_neighborhood(patch, 0.1, 0.25, 2.0);
    const std::vector<double> origin{0.0, 0.0};
    Jet u = graph.height_jet(origin, 2);
    CHECK(u.value() == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(u.partial(mi(1, 0))) < 1e-8);
    CHECK(std::abs(u.partial(mi(0, 1))) < 1e-8);
    CurvatureReport r = curvature_report(graph, origin);
    CHECK(std::abs(r.kappa[0] - 1.25) < 1e-7);
    CHECK(std::abs(r.kappa[1] - 1.25) < 1e-7);
    CHECK(r.u == doctest::Approx(2.0));
}

TEST_CASE("curvature transport across normalization on every ball family") {
    Rng rng(67);
    for (auto& [name, patch] : builtin_ball_families()) {
        CAPTURE(name);
        for (int k = 0; k < 3; ++k) {
            const double s = rng.uniform(0.25 * patch.s_range[0], 0.25 * patch.s_range[1]);
            const double t = rng.uniform(0.25 * patch.t_range[0], 0.25 * patch.t_range[1]);
            Eigen::Vector2d want = ball_kappas(patch, s, t);
            auto [motion, graph] = normalize_neighborhood(patch, s, t, 2.0);
            const std::vector<double> origin{0.0, 0.0};
            CurvatureReport r = curvature_report(graph, origin);
            CHECK(std::abs(r.kappa[0] - want[0]) < 1e-7);
            CHECK(std::abs(r.kappa[1] - want[1]) < 1e-7);
            (void)motion;
        }
    }
}

TEST_CASE("horosphere patch keeps |kappa| = 1 across normalization") {
    BallPatch patch = ball_horosphere_patch(0.5);
    Eigen::Vector2d want = ball_kappas(patch, 0.1, -0.2);
    CHECK(std::abs(std::abs(want[0]) - 1.0) < 1e-9);
    auto [motion, graph] = normalize_neighborhood(patch, 0.1, -0.2, 2.0);
    const std::vector<double> origin{0.0, 0.0};
    CurvatureReport r = curvature_report(graph, origin);
    CHECK(std::abs(r.kappa[0] - want[0]) < 1e-7);
    CHECK(std::abs(r.kappa[1] - want[1]) < 1e-7);
    (void)motion;
}

TEST_CASE("immersion-degenerate patch raises the non-graphical error") {
    BallPatch p;
    ExprPtr s = Expr::variable(0), t = Expr::variable(1);
    p.chart[0] = s * s;
    p.chart[1] = t;
    p.chart[2] = Expr::constant(0.5);
    p.s_range = {-0.2, 0.2};
    p.t_range = {-0.2, 0.2};
    CHECK_THROWS_AS(normalize_neighborhood(p, 0.0, 0.0, 2.0), NonGraphicalError);
}

TEST_CASE("transferred height jets agree with divided differences") {
    BallPatch patch = ball_sphere(0.4, {0.1, 0.0, 0.05});
    auto [motion, graph] = normalize_neighborhood(patch, 0.15, -0.1, 2.0);
    const std::vector<double> x{0.01, -0.015};
    Jet j = graph.height_jet(x, 3);
    const double h = 1e-4;
    auto eval = [&](double a, double b) {
        const std::vector<double> q{a, b};
        return graph.height_jet(q, 0).value();
    };
    const double fd_x = (eval(x[0] + h, x[1]) - eval(x[0] - h, x[1])) / (2 * h);
    const double fd_xx =
        (eval(x[0] + h, x[1]) - 2 * eval(x[0], x[1]) + eval(x[0] - h, x[1])) / (h * h);
    CHECK(std::abs(j.partial(mi(1, 0)) - fd_x) < 1e-7);
    CHECK(std::abs(j.partial(mi(2, 0)) - fd_xx) < 1e-4);
    (void)motion;
}
