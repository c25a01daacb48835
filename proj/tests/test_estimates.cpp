#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hcap/estimates.hpp"
#include "hcap/families.hpp"
#include "hcap/rng.hpp"
#include "test_util.hpp"

using namespace hcap;
using hcap::testutil::fd_partial;
using hcap::testutil::rel_err;

namespace {

const std::vector<double> origin{0.0, 0.0};

std::vector<SamplePoint> disc_grid(double radius, int n) {
    std::vector<SamplePoint> pts;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double x = -radius + 2.0 * radius * i / (n - 1);
            const double y = -radius + 2.0 * radius * j / (n - 1);
            if (x * x + y * y <= radius * radius) pts.push_back({x, y});
        }
    return pts;
}

}  // namespace

TEST_CASE("sigma vanishes on flat families and at symmetry points") {
    HalfspaceGraph horo = horosphere(2.0, 0.8);
    CHECK(std::abs(sigma(horo, origin)) < 1e-14);
    HalfspaceGraph pl = plane(0.5, 0.0, 2.0, 0.7);
    const std::vector<double> off{0.2, -0.3};
    CHECK(std::abs(sigma(pl, off)) < 1e-13);
    HalfspaceGraph cap = sphere_cap(2.0, 1.0, 0.6);
    CHECK(std::abs(sigma(cap, origin)) < 1e-13);
}

TEST_CASE("sigma matches the brute-force index-loop oracle off center") {
    HalfspaceGraph cap = sphere_cap(2.0, 1.0, 0.6);
    const std::vector<double> pt{0.3, 0.1};
    const double got = sigma(cap, pt);

    // independent oracle: rho by closed form, derivatives by Romberg FD,
    // contraction by a raw 64-term loop
    auto rho = [](std::span<const double> x) {
        const double u = 2.0 + std::sqrt(1.0 - x[0] * x[0] - x[1] * x[1]);
        return -0.5 * (x[0] * x[0] + x[1] * x[1] + u * u);
    };
    double r2[2][2], r3[2][2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            MultiIndex a{0, 0, 0};
            ++a[i];
            ++a[j];
            r2[i][j] = fd_partial(rho, pt, a, 0.05);
            for (int k = 0; k < 2; ++k) {
                MultiIndex b = a;
                ++b[k];
                r3[i][j][k] = fd_partial(rho, pt, b, 0.05);
            }
        }
    const double det = r2[0][0] * r2[1][1] - r2[0][1] * r2[1][0];
    double inv[2][2] = {{r2[1][1] / det, -r2[0][1] / det}, {-r2[1][0] / det, r2[0][0] / det}};
    double want = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    for (int r = 0; r < 2; ++r)
                        for (int s = 0; s < 2; ++s)
                            want += inv[k][l] * inv[p][q] * inv[r][s] * r3[k][p][r] * r3[l][q][s];
    CHECK(rel_err(got, want) < 1e-6);
    CHECK(got >= 0.0);
}

TEST_CASE("sigma is invariant under rotations of the chart") {
    Rng rng(29);
    HalfspaceGraph cap = perturbed_cap(2.0, 1.0, 0.02, 0.6);
    ExprPtr u = std::dynamic_pointer_cast<const AnalyticHeight>(cap.height)->expr();
    for (int trial = 0; trial < 6; ++trial) {
        const double th = rng.uniform(0.0, 6.28);
        const double c = std::cos(th), s = std::sin(th);
        const double A[4] = {c, -s, s, c};
        const double b[2] = {0.0, 0.0};
        HalfspaceGraph rotated(compose_affine(u, A, b, 2), Domain::disc(0.5), cap.orientation);
        auto [px, py] = rng.in_disc(0.4);
        const std::vector<double> p{px, py};
        // u'(x) = u(Rx): the surface is rotated by R^T, so compare at R^T p
        const std::vector<double> prot{c * px + s * py, -s * px + c * py};
        CHECK(std::abs(sigma(rotated, prot) - sigma(cap, p)) <
              1e-9 * std::max(1.0, std::abs(sigma(cap, p))));
    }
}

TEST_CASE("L sigma vanishes on flat families") {
    HalfspaceGraph horo = horosphere(2.0, 0.8);
    CHECK(std::abs(L_sigma(horo, origin)) < 1e-13);
}

TEST_CASE("L sigma matches finite differences of sigma") {
    std::vector<std::pair<HalfspaceGraph, SamplePoint>> cases;
    cases.emplace_back(sphere_cap(2.0, 1.0, 0.75), SamplePoint{0.0, 0.0});
    cases.emplace_back(sphere_cap(2.0, 1.0, 0.75), SamplePoint{0.2, 0.2});
    cases.emplace_back(perturbed_cap(2.0, 1.0, 0.02, 0.75), SamplePoint{0.15, -0.2});
    for (auto& [cap, pt] : cases) {
        const std::vector<double> x{pt[0], pt[1]};
        const double got = L_sigma(cap, x);

        auto sig = [&, &cap = cap](std::span<const double> q) {
            const std::vector<double> qq(q.begin(), q.end());
            return sigma(cap, qq);
        };
        double s1[2], s2[2][2];
        for (int i = 0; i < 2; ++i) {
            MultiIndex a{0, 0, 0};
            ++a[i];
            s1[i] = fd_partial(sig, x, a, 0.04);
            for (int j = i; j < 2; ++j) {
                MultiIndex b = a;
                ++b[j];
                s2[i][j] = s2[j][i] = fd_partial(sig, x, b, 0.04);
            }
        }
        RhoHessian rh = rho_hessian(cap, x);
        const Eigen::Matrix2d inv = rh.hess.inverse();
        Jet uj = cap.height_jet(x, 1);
        const double u = uj.value();
        const double ux = uj.partial(mi(1, 0)), uy = uj.partial(mi(0, 1));
        const double w2 = 1.0 + ux * ux + uy * uy;
        const double want = inv(0, 0) * s2[0][0] + 2 * inv(0, 1) * s2[0][1] +
                            inv(1, 1) * s2[1][1] + 4.0 * (ux * s1[0] + uy * s1[1]) / (w2 * u);
        CHECK(rel_err(got, want) < 1e-5);
    }
}

TEST_CASE("calabi margin: flat family gives zero, caps are stable") {
    std::vector<SamplePoint> flat_pts = disc_grid(0.5, 7);
    HalfspaceGraph horo = horosphere(2.0, 0.8);
    CHECK(calabi_margin(horo, flat_pts) <= 1e-12);

    HalfspaceGraph cap = sphere_cap(2.0, 1.0, 0.6);
    std::vector<SamplePoint> coarse = disc_grid(0.55, 14);
    std::vector<SamplePoint> fine = disc_grid(0.55, 29);
    const double a = calabi_margin(cap, coarse);
    const double b = calabi_margin(cap, fine);
    CHECK(std::abs(a - b) < 0.05 * std::max(std::abs(a), std::abs(b)));
}

TEST_CASE("vicinity preconditions are enforced") {
    // height below 1 violates u >= 1
    HalfspaceGraph low = horosphere(0.5, 0.5);
    std::vector<SamplePoint> pts{{0.0, 0.0}};
    CHECK_THROWS_AS(calabi_margin(low, pts), PreconditionError);
    // steep plane violates |grad u| < 1
    HalfspaceGraph steep = plane(1.2, 0.0, 3.0, 0.5);
    CHECK_THROWS_AS(pogorelov_quantities(steep, pts), PreconditionError);
}

TEST_CASE("pogorelov quantities: umbilic caps have K grad H = 0") {
    HalfspaceGraph cap = sphere_cap(2.0, 1.0, 0.6);
    std::vector<SamplePoint> pts = disc_grid(0.5, 9);
    auto [k2s, kgh] = pogorelov_quantities(cap, pts);
    CHECK(kgh < 1e-9);
    CHECK(k2s >= 0.0);
    CHECK(std::isfinite(k2s));
    HalfspaceGraph horo = horosphere(2.0, 0.8);
    auto [fk2s, fkgh] = pogorelov_quantities(horo, pts);
    CHECK(std::abs(fk2s) < 1e-13);
    CHECK(std::abs(fkgh) < 1e-13);
}

TEST_CASE("kappa1 gradient: umbilic inputs raise the degeneracy error") {
    HalfspaceGraph cap = sphere_cap(2.0, 1.0, 0.6);
    CHECK_THROWS_AS(kappa1_gradient(cap, origin, 1e-10), DegeneracyError);
    HalfspaceGraph pl = plane(1.0, 0.0, 2.0, 0.7);
    CHECK_THROWS_AS(kappa1_gradient(pl, origin, 1e-10), DegeneracyError);
}

TEST_CASE("kappa1 gradient: formula and jet routes agree off umbilic") {
    Rng rng(20250801);
    HalfspaceGraph cap = perturbed_cap(2.0, 1.0, 0.02, 0.6);
    int checked = 0;
    for (int k = 0; k < 80 && checked < 50; ++k) {
        auto [x, y] = rng.in_disc(0.5);
        if (std::hypot(x, y) < 0.05) continue;  // stay away from the symmetry point
        const std::vector<double> pt{x, y};
        try {
            Kappa1Gradient kg = kappa1_gradient(cap, pt, 1e-12);
            CHECK(rel_err(kg.grad_norm, kg.grad_norm_direct) < 1e-7);
            CurvatureReport r = curvature_report(cap, pt);
            CHECK(kg.kappa1 == doctest::Approx(r.kappa[0]).epsilon(1e-9));
            ++checked;
        } catch (const DegeneracyError&) {
            // perturbation vanishes on the axes; skip those draws
        }
    }
    CHECK(checked >= 50);
}

TEST_CASE("mean bound margin on small spheres") {
    // coefficient arithmetic from the displayed formula
    const double c = 1.0 - 2.0 * 1.01 / 0.99 + 24.0 * 0.01 / (0.99 * 0.99);
    CHECK(4.0 * c == doctest::Approx(-3.18).epsilon(0.002));
    CHECK(small_diameter_threshold(2.0) == doctest::Approx(0.04).epsilon(1e-14));

    BallPatch small = ball_sphere(0.05);
    MeanBoundReport rep = mean_bound_margin(small, 2.0);
    CHECK_FALSE(rep.boundary_max);
    CHECK(rep.x_norm2 < 0.01);
    CHECK(rep.coefficient_ok);
    CHECK(rep.margin <= 1e-8);
    // H is constant on the sphere: f is flat, margin strictly negative
    CHECK(rep.H_mean == doctest::Approx(ball_sphere_H(0.05)).epsilon(1e-8));
    CHECK(rep.margin < -1.0);
}

TEST_CASE("mean bound margin finds interior maxima of varying f") {
    // sphere below the origin: rho peaks at the chart center
    BallPatch p = ball_sphere(0.04, {0.0, 0.0, -0.05});
    MeanBoundReport rep = mean_bound_margin(p, 2.0);
    CHECK_FALSE(rep.boundary_max);
    CHECK(rep.x_norm2 == doctest::Approx(0.0081).epsilon(1e-3));
    CHECK(std::abs(rep.param[0]) < 1e-4);
    CHECK(std::abs(rep.param[1]) < 1e-4);
    CHECK(rep.coefficient_ok);
    CHECK(rep.margin < 0.0);
}

TEST_CASE("mean bound margin reports boundary maxima instead of asserting") {
    // off-center sphere, chart restricted so the far side is cut off: the
    // maximum of rho (hence of f) sits on the parameter boundary
    BallPatch off = ball_sphere(0.04, {0.05, 0.0, 0.0}, 0.35);
    MeanBoundReport rep = mean_bound_margin(off, 2.0);
    CHECK(rep.boundary_max);
}

TEST_CASE("trace-bound margin closed forms: cap -56, horosphere -2") {
    HalfspaceGraph cap = sphere_cap(2.0, 1.0, 0.6);
    std::vector<SamplePoint> pts = disc_grid(0.5, 9);
    const double m_cap = ndim_margin(cap, pts, 1.0, 1.0);
    CHECK(m_cap == doctest::Approx(-56.0).epsilon(1e-8));
    HalfspaceGraph horo = horosphere(2.0, 0.8);
    const double m_horo = ndim_margin(horo, pts, 1.0, 1.0);
    CHECK(m_horo == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(ndim_min_C2(cap, pts, 1.0) == doctest::Approx(16.0 / 72.0).epsilon(1e-8));
}

TEST_CASE("identity suite on caps: exact at the apex, tiny off center") {
    HalfspaceGraph cap = sphere_cap(2.0, 1.0, 0.6);
    auto at0 = identity_suite(cap, origin);
    CHECK(at0["log_derivative_1"] < 1e-13);
    CHECK(at0["log_derivative_2"] < 1e-13);
    const std::vector<double> pt{0.4, 0.2};
    auto off = identity_suite(cap, pt);
    CHECK(off["log_derivative_1"] < 1e-9);
    CHECK(off["log_derivative_2"] < 1e-9);
    CHECK(off["form_scaling"] < 1e-9);
    CHECK(off["eigen_product"] < 1e-9);
    CHECK(off["slack_trace_upper"] > -1e-10);
    CHECK(off["slack_trace_lower"] > -1e-10);
    CHECK(off["slack_eigen_bound"] > -1e-10);
    CHECK(off["slack_eigen_chain"] > -1e-10);
    CHECK(off["slack_inverse_bound"] > -1e-10);
}

TEST_CASE("identity suite slack chain on perturbed caps at random points") {
    Rng rng(37);
    HalfspaceGraph cap = perturbed_cap(2.0, 1.0, 0.02, 0.6);
    for (int k = 0; k < 20; ++k) {
        auto [x, y] = rng.in_disc(0.5);
        const std::vector<double> pt{x, y};
        auto res = identity_suite(cap, pt);
        for (auto& [key, val] : res) {
            CAPTURE(key);
            if (key.rfind("slack", 0) == 0) CHECK(val > -1e-10);
            else CHECK(val < 1e-8);
        }
    }
}

TEST_CASE("identity suite rejects the flat branch") {
    HalfspaceGraph horo = horosphere(2.0, 0.8);
    CHECK_THROWS_AS(identity_suite(horo, origin), BranchError);
}

TEST_CASE("rho residual identities hold on the negative-definite branch too") {
    HalfspaceGraph horo = horosphere(2.0, 0.8);
    auto flat = rho_identity_residuals(horo, origin);
    CHECK(flat["form_scaling"] < 1e-14);
    CHECK(flat["log_derivative_1"] < 1e-14);
    CHECK(flat["eigen_product"] < 1e-14);
    HalfspaceGraph pl = plane(1.0, 0.0, 2.0, 0.7);
    const std::vector<double> off{0.2, -0.1};
    auto tilted = rho_identity_residuals(pl, off);
    for (auto& [key, val] : tilted) {
        CAPTURE(key);
        CHECK(val < 1e-12);
    }
}

TEST_CASE("estimate report rows carry NaN kappa columns at umbilic points") {
    HalfspaceGraph cap = sphere_cap(2.0, 1.0, 0.6);
    std::vector<SamplePoint> pts{{0.0, 0.0}, {0.2, 0.1}};
    EstimateReport rep = estimate_report(cap, "cap", pts);
    REQUIRE(rep.rows.size() == 2);
    CHECK(std::isnan(rep.rows[0].kappa1));  // exact umbilic
    CHECK(rep.rows[0].K_ext == doctest::Approx(4.0));
    CHECK(rep.rows[0].R_scalar == doctest::Approx(8.0));
    CHECK(rep.sup_H_mean == doctest::Approx(2.0));
    CHECK(std::abs(rep.rows[1].lap_R) < 1e-8);  // R constant on the cap
}
