#pragma once

#include <array>
#include <string>
#include <vector>

#include "hcap/ball.hpp"
#include "hcap/halfspace.hpp"

namespace hcap {

/// Closed-form surface families used across the identity and estimate
/// checks. Half-space families are graphs u(x1,x2); ball families are chart
/// patches. Parameter validation enforces the geometric constraints
/// (geodesic spheres need center height above the radius, patches must stay
/// inside the unit ball).

/// u = h + sqrt(r^2 - |x|^2); geodesic sphere piece with kappa = h/r.
HalfspaceGraph sphere_cap(double h, double r, double domain_radius,
                          Orientation o = Orientation::Downward);

/// u = c; horosphere with kappa = -1 under the downward normal.
HalfspaceGraph horosphere(double c, double domain_radius,
                          Orientation o = Orientation::Downward);

/// u = m1 x1 + m2 x2 + c; equidistant plane, kappa = -1/w.
HalfspaceGraph plane(double m1, double m2, double c, double domain_radius,
                     Orientation o = Orientation::Downward);

/// Sphere cap with a non-umbilic polynomial perturbation amp * x1^2 x2^2.
HalfspaceGraph perturbed_cap(double h, double r, double amp, double domain_radius,
                             Orientation o = Orientation::Downward);

/// Stereographic chart of the Euclidean sphere |X - center| = a inside the
/// ball, oriented so the normal points toward the center (spheres around the
/// origin get positive mean curvature). Isothermal.
BallPatch ball_sphere(double a, std::array<double, 3> center = {0, 0, 0},
                      double param_halfwidth = 0.8);

/// Sphere tangent to the ideal boundary at (0,0,1), truncated to a chart
/// rectangle: a horosphere patch, intrinsically flat.
BallPatch ball_horosphere_patch(double a, double param_halfwidth = 0.7);

/// Non-umbilic graph-style patch used as a generic analytic surface.
BallPatch ball_saddle_patch();

/// Round sphere under a graph-style (non-isothermal) chart; negative control
/// for the conformal checks.
BallPatch ball_sphere_nonisothermal(double a);

/// Exact curvature values of the closed-form families.
inline double cap_kappa(double h, double r) { return h / r; }
inline double plane_kappa(double m1, double m2) {
    return -1.0 / std::sqrt(1.0 + m1 * m1 + m2 * m2);
}
/// Hyperbolic radius of the ball sphere of Euclidean radius a about the
/// origin, and its curvatures.
inline double ball_sphere_hyp_radius(double a) { return std::log((1.0 + a) / (1.0 - a)); }
inline double ball_sphere_H(double a) { return (1.0 + a * a) / (2.0 * a); }
inline double ball_sphere_K_intrinsic(double a) {
    const double s = (1.0 - a * a) / (2.0 * a);  // 1/sinh(R)
    return s * s;
}

/// All named half-space families at canonical parameters, for the sweep
/// style checks. Pairs of (label, graph).
std::vector<std::pair<std::string, HalfspaceGraph>> builtin_halfspace_families();

/// All named ball families: (label, patch).
std::vector<std::pair<std::string, BallPatch>> builtin_ball_families();

}  // namespace hcap
