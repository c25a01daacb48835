#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hcap/ball.hpp"
#include "hcap/halfspace.hpp"

namespace hcap {

using SamplePoint = std::array<double, 2>;

/// sigma = rho^{kl} rho^{pq} rho^{rs} rho_{kpr} rho_{lqs} for
/// rho = -(|x|^2 + u^2)/2; the third-derivative control quantity. Requires
/// jets to order 3 and a definite Hess rho (positive definite on the convex
/// branch; flat families with vanishing third derivatives give 0).
double sigma(const HalfspaceGraph& graph, std::span<const double> x);

/// L sigma = rho^{ij} sigma_ij + 4 u_i sigma_i / ((1+|grad u|^2) u), the
/// linearized operator applied to sigma; needs jets to order 5.
double L_sigma(const HalfspaceGraph& graph, std::span<const double> x);

/// sup over the samples of K_ext^4 (sigma^2/2 - L sigma). The lemma bounds
/// this above by a constant built from curvature suprema; callers check
/// stability across families. Vicinity preconditions u >= 1 and
/// |grad u| < 1 are enforced at every sample.
double calabi_margin(const HalfspaceGraph& graph, std::span<const SamplePoint> samples);

/// (sup K_ext^2 sigma, sup K_ext |grad H_mean|_g) over the samples, with the
/// gradient norm in the induced hyperbolic metric. Same vicinity
/// preconditions.
std::pair<double, double> pogorelov_quantities(const HalfspaceGraph& graph,
                                               std::span<const SamplePoint> samples);

struct Kappa1Gradient {
    double kappa1 = 0.0;
    double grad_norm = 0.0;       // from the closed-form gradient formula
    double grad_norm_direct = 0.0;  // from jet differentiation of kappa1
};

/// kappa1 = H - sqrt(H^2 - K) and |grad kappa1|_g by the closed-form
/// quotient formula, cross-checked against direct jet differentiation.
/// Raises DegeneracyError when H^2 - K < c0 (umbilic degeneracy).
Kappa1Gradient kappa1_gradient(const HalfspaceGraph& graph, std::span<const double> x, double c0);

struct MeanBoundReport {
    bool boundary_max = false;     // max sits on the sample-set boundary
    SamplePoint param{0, 0};       // located maximum Q in chart coordinates
    double x_norm2 = 0.0;          // |X(Q)|^2
    double f_max = 0.0;            // e^{alpha rho} H at Q
    double coefficient_c = 0.0;    // 1 - a(1+|x|^2)/(1-|x|^2) + 6a^2|x|^2/(1-|x|^2)^2
    bool coefficient_ok = false;   // 4c <= -1
    double H_mean = 0.0, K_intrinsic = 0.0, lap_K = 0.0;
    double margin = 0.0;           // lap K + H^2 - 4K(K+1)
};

/// Locate the maximum of e^{alpha rho} H over a parameter grid with local
/// quadratic refinement, then evaluate the maximum-principle margin there.
/// The |X|^2 < 1/100 smallness hypothesis is checked at the located point.
MeanBoundReport mean_bound_margin(const BallPatch& patch, double alpha, int grid_n = 41);

/// Diameter threshold (alpha-1)/(6 alpha^2 + alpha - 1) under which the
/// coefficient condition holds; 1/25 at alpha = 2.
double small_diameter_threshold(double alpha);

/// sup over the samples of H_trace^2 - C1 |lap_g R| - C2 (R^2 + R) with R
/// the extrinsic scalar curvature and the Laplacian in the induced metric.
double ndim_margin(const HalfspaceGraph& graph, std::span<const SamplePoint> samples, double C1,
                   double C2);

/// Smallest C2 (with the given C1) making the margin nonpositive over the
/// samples; clamped below at 0.
double ndim_min_C2(const HalfspaceGraph& graph, std::span<const SamplePoint> samples, double C1);

/// Residual subset of the rho identities that holds on either definite
/// branch of Hess rho: the proportionality rho_ij = u^2 w h_ij, the
/// log-derivative identity (both components), and the eigenvalue product.
/// Keys: "form_scaling", "log_derivative_1", "log_derivative_2",
/// "eigen_product". Flat families (negative-definite branch) enter here.
std::map<std::string, double> rho_identity_residuals(const HalfspaceGraph& graph,
                                                     std::span<const double> x);

/// Residuals and slacks of the pointwise identities tying rho to the forms:
/// the residual subset above plus the eigenvalue bound chain (slacks
/// nonnegative), which needs the positive-definite branch. Keys add
/// "slack_trace_upper", "slack_trace_lower", "slack_eigen_bound",
/// "slack_eigen_chain", "slack_inverse_bound".
std::map<std::string, double> identity_suite(const HalfspaceGraph& graph,
                                             std::span<const double> x);

struct EstimatePoint {
    SamplePoint x{0, 0};
    double K_ext = 0, H_mean = 0, H_trace = 0;
    double sigma = 0, L_sigma = 0;
    double K2_sigma = 0, K_gradH = 0;
    double kappa1 = 0, grad_kappa1 = 0;  // NaN at umbilic points
    double R_scalar = 0, lap_R = 0;
};

struct EstimateReport {
    std::string family;
    std::vector<EstimatePoint> rows;
    double sup_K2_sigma = 0, sup_K_gradH = 0;
    double sup_calabi = 0;  // sup K^4 (sigma^2/2 - L sigma)
    double sup_H_mean = 0, sup_H_trace = 0;
};

/// Per-point table of every estimate quantity over the samples, with patch
/// aggregates. Umbilic points record NaN kappa1 columns instead of raising.
EstimateReport estimate_report(const HalfspaceGraph& graph, const std::string& family,
                               std::span<const SamplePoint> samples, double c0 = 1e-10);

}  // namespace hcap
