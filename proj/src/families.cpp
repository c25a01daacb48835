#include "hcap/families.hpp"

#include <cmath>

#include "hcap/errors.hpp"

namespace hcap {

namespace {

ExprPtr sq_radius() {
    ExprPtr x = Expr::variable(0), y = Expr::variable(1);
    return x * x + y * y;
}

}  // namespace

HalfspaceGraph sphere_cap(double h, double r, double domain_radius, Orientation o) {
    if (!(h > r && r > 0.0))
        throw GeometryError("sphere_cap requires h > r > 0 (geodesic sphere above the plane)");
    if (!(domain_radius > 0.0 && domain_radius < r))
        throw GeometryError("sphere_cap domain radius must lie strictly inside the rim");
    ExprPtr u = Expr::constant(h) + Expr::sqrt(Expr::constant(r * r) - sq_radius());
    return HalfspaceGraph(u, Domain::disc(domain_radius), o);
}

HalfspaceGraph horosphere(double c, double domain_radius, Orientation o) {
    if (c <= 0.0) throw GeometryError("horosphere height must be positive");
    return HalfspaceGraph(Expr::constant(c), Domain::disc(domain_radius), o);
}

HalfspaceGraph plane(double m1, double m2, double c, double domain_radius, Orientation o) {
    const double slope = std::sqrt(m1 * m1 + m2 * m2);
    if (c - slope * domain_radius <= 0.0)
        throw GeometryError("plane dips below the ideal boundary inside the domain");
    ExprPtr u = Expr::constant(m1) * Expr::variable(0) + Expr::constant(m2) * Expr::variable(1) +
                Expr::constant(c);
    return HalfspaceGraph(u, Domain::disc(domain_radius), o);
}

HalfspaceGraph perturbed_cap(double h, double r, double amp, double domain_radius,
                             Orientation o) {
    if (!(h > r && r > 0.0)) throw GeometryError("perturbed_cap requires h > r > 0");
    if (!(domain_radius > 0.0 && domain_radius < r))
        throw GeometryError("perturbed_cap domain radius must lie strictly inside the rim");
    ExprPtr x = Expr::variable(0), y = Expr::variable(1);
    ExprPtr u = Expr::constant(h) + Expr::sqrt(Expr::constant(r * r) - sq_radius()) +
                Expr::constant(amp) * x * x * y * y;
    return HalfspaceGraph(u, Domain::disc(domain_radius), o);
}

BallPatch ball_sphere(double a, std::array<double, 3> center, double param_halfwidth) {
    const double cnorm =
        std::sqrt(center[0] * center[0] + center[1] * center[1] + center[2] * center[2]);
    if (!(a > 0.0 && cnorm + a < 1.0))
        throw GeometryError("ball sphere must stay inside the open unit ball");
    // inverse stereographic chart of the unit sphere, scaled and shifted
    ExprPtr s = Expr::variable(0), t = Expr::variable(1);
    ExprPtr q = 1.0 + s * s + t * t;
    BallPatch p;
    p.chart[0] = Expr::constant(center[0]) + Expr::constant(a) * (2.0 * s) / q;
    p.chart[1] = Expr::constant(center[1]) + Expr::constant(a) * (2.0 * t) / q;
    p.chart[2] = Expr::constant(center[2]) + Expr::constant(a) * (s * s + t * t - 1.0) / q;
    p.s_range = {-param_halfwidth, param_halfwidth};
    p.t_range = {-param_halfwidth, param_halfwidth};
    return p;
}

BallPatch ball_horosphere_patch(double a, double param_halfwidth) {
    if (!(a > 0.0 && a < 1.0)) throw GeometryError("horosphere patch needs 0 < a < 1");
    return ball_sphere(a, {0.0, 0.0, 1.0 - a - 1e-12}, param_halfwidth);
}

BallPatch ball_saddle_patch() {
    ExprPtr s = Expr::variable(0), t = Expr::variable(1);
    BallPatch p;
    p.chart[0] = 0.3 * s;
    p.chart[1] = 0.2 * t;
    p.chart[2] = Expr::constant(0.1) + 0.05 * (s * s - t * t);
    p.s_range = {-0.5, 0.5};
    p.t_range = {-0.5, 0.5};
    return p;
}

BallPatch ball_sphere_nonisothermal(double a) {
    if (!(a > 0.0 && a < 1.0)) throw GeometryError("sphere radius must be in (0,1)");
    // graph chart of the upper part: X = (s, t, sqrt(a^2 - s^2 - t^2))
    ExprPtr s = Expr::variable(0), t = Expr::variable(1);
    BallPatch p;
    p.chart[0] = s;
    p.chart[1] = t;
    p.chart[2] = Expr::sqrt(Expr::constant(a * a) - s * s - t * t);
    p.s_range = {-0.4 * a, 0.4 * a};
    p.t_range = {-0.4 * a, 0.4 * a};
    return p;
}

std::vector<std::pair<std::string, HalfspaceGraph>> builtin_halfspace_families() {
    std::vector<std::pair<std::string, HalfspaceGraph>> out;
    out.emplace_back("sphere_cap_2_1", sphere_cap(2.0, 1.0, 0.6));
    out.emplace_back("sphere_cap_3_1", sphere_cap(3.0, 1.0, 0.6));
    out.emplace_back("horosphere_2", horosphere(2.0, 0.8));
    out.emplace_back("plane_05_0_2", plane(0.5, 0.0, 2.0, 0.8));
    out.emplace_back("plane_1_05_3", plane(1.0, 0.5, 3.0, 0.8));
    out.emplace_back("perturbed_cap_2_1", perturbed_cap(2.0, 1.0, 0.02, 0.6));
    return out;
}

std::vector<std::pair<std::string, BallPatch>> builtin_ball_families() {
    std::vector<std::pair<std::string, BallPatch>> out;
    out.emplace_back("ball_sphere_05", ball_sphere(0.5));
    out.emplace_back("ball_sphere_offcenter", ball_sphere(0.3, {0.2, 0.0, 0.1}, 0.8));
    out.emplace_back("ball_horosphere_05", ball_horosphere_patch(0.5));
    out.emplace_back("ball_saddle", ball_saddle_patch());
    return out;
}

}  // namespace hcap
