#pragma once

#include <array>
#include <map>
#include <string>

#include "hcap/expr.hpp"
#include "hcap/jet.hpp"

namespace hcap {

/// Parametrized surface patch inside the Poincare ball model: a chart
/// X(s,t) = (x1,x2,x3) over a parameter rectangle, required to stay in the
/// open unit ball and to be an immersion wherever it is evaluated.
struct BallPatch {
    std::array<ExprPtr, 3> chart;
    std::array<double, 2> s_range{-0.5, 0.5};
    std::array<double, 2> t_range{-0.5, 0.5};

    bool contains(double s, double t) const {
        return s >= s_range[0] - 1e-14 && s <= s_range[1] + 1e-14 && t >= t_range[0] - 1e-14 &&
               t <= t_range[1] + 1e-14;
    }
};

/// Fundamental-form coefficients of a ball patch at a parameter point, with
/// the conformal support function rho = 2/(1-|x|^2) and its derivatives.
struct BallForms {
    double E = 0, F = 0, G = 0;  // hyperbolic first fundamental form
    double L = 0, M = 0, N = 0;  // hyperbolic second fundamental form
    double K_intrinsic = 0;      // -1 + (LN - M^2)/(EG - F^2)
    double H_mean = 0;           // (GL - 2FM + EN) / (2(EG - F^2))
    double rho = 0;              // 2/(1-|x|^2)
    double rho_u = 0, rho_v = 0;
    double rho_uu = 0, rho_uv = 0, rho_vv = 0;
    std::array<double, 3> position{};
    std::array<double, 3> normal_euc{};  // Euclidean unit normal of the chart
};

BallForms ball_forms(const BallPatch& patch, double s, double t);

/// Residuals of the two Mainardi-Codazzi equations at a parameter point;
/// both vanish for any genuine surface.
std::pair<double, double> codazzi_residual(const BallPatch& patch, double s, double t);

/// Conformal-coordinate identities for isothermal charts (E = G, F = 0):
/// curvature via e^{2h}, the metric Laplacian form of K, and the conformal
/// Codazzi pair. Raises PreconditionError on non-isothermal charts.
std::map<std::string, double> conformal_check(const BallPatch& patch, double s, double t);

/// Two-route evaluation of rho_u, rho_v and the second derivatives through
/// the Gauss decomposition, plus the Cauchy-Schwarz slack of the radial
/// field against an orthonormal tangent frame.
std::map<std::string, double> support_quantities(const BallPatch& patch, double s, double t);

namespace detail {

/// Jets of the chart and derived surface quantities at one parameter point.
struct BallJets {
    std::array<Jet, 3> X;        // order m
    Jet x_norm2;                 // |X|^2, order m
    Jet lambda;                  // conformal factor 2/(1-|X|^2), order m
    std::array<Jet, 3> Xs, Xt;   // order m-1
    std::array<Jet, 3> normal;   // Euclidean unit normal, order m-2
    Jet E, F, G;                 // order m-1
    Jet L, M, N;                 // order m-2
    Jet K_intrinsic, H_mean;     // order m-2
};

BallJets ball_jets(const BallPatch& patch, double s, double t, int order);

/// Laplace-Beltrami of a scalar jet in the metric (E,F,G), all jets in the
/// chart coordinates: (1/sqrt(det g)) d_i(sqrt(det g) g^{ij} d_j f).
double laplace_beltrami(const Jet& f, const Jet& E, const Jet& F, const Jet& G);

/// Christoffel symbols of the metric (E,F,G) at the point; gamma[k][i][j]
/// with parameter indices 0 = u, 1 = v. The jets carry the needed first
/// derivatives.
std::array<std::array<std::array<double, 2>, 2>, 2> induced_christoffels(const Jet& E,
                                                                         const Jet& F,
                                                                         const Jet& G);

}  // namespace detail

}  // namespace hcap
