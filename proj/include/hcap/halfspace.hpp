#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hcap/expr.hpp"
#include "hcap/jet.hpp"

namespace hcap {

/// Unit-normal choice for a graph in the upper half-space model. Downward is
/// the default: horospheres get kappa = -1 and convex upper caps get
/// kappa > 0 with Hess rho positive definite.
enum class Orientation { Downward, Upward };

inline double orientation_sign(Orientation o) { return o == Orientation::Downward ? 1.0 : -1.0; }

/// Planar domain of a graph: axis-aligned box or origin-centered disc.
struct Domain {
    enum class Shape { Box, Disc };
    Shape shape = Shape::Disc;
    double radius = 1.0;
    std::vector<double> lo, hi;

    static Domain disc(double r);
    static Domain box(std::vector<double> lo, std::vector<double> hi);
    bool contains(std::span<const double> x) const;
    int dim() const;
};

/// A height function that can produce exact jets at interior points. The
/// analytic backing wraps an expression; grid- and chart-backed heights are
/// provided by the solver and the model transform.
class HeightField {
  public:
    virtual ~HeightField() = default;
    virtual int dim() const = 0;
    virtual int max_order() const = 0;
    virtual Jet jet(std::span<const double> x, int order) const = 0;
    double eval(std::span<const double> x) const { return jet(x, 0).value(); }
};

class AnalyticHeight final : public HeightField {
  public:
    AnalyticHeight(ExprPtr expr, int dim) : expr_(std::move(expr)), dim_(dim) {}
    int dim() const override { return dim_; }
    int max_order() const override { return kMaxJetOrder; }
    Jet jet(std::span<const double> x, int order) const override;
    const ExprPtr& expr() const { return expr_; }

  private:
    ExprPtr expr_;
    int dim_;
};

/// Hypersurface given as a height u(x) over a planar domain in the upper
/// half-space model, with a chosen normal orientation.
struct HalfspaceGraph {
    int dim = 2;
    std::shared_ptr<const HeightField> height;
    Domain domain;
    Orientation orientation = Orientation::Downward;

    HalfspaceGraph() = default;
    HalfspaceGraph(ExprPtr u, Domain d, Orientation o = Orientation::Downward);
    HalfspaceGraph(std::shared_ptr<const HeightField> h, Domain d,
                   Orientation o = Orientation::Downward);

    /// Jet of u at x; throws GeometryError when x is outside the domain or
    /// u(x) <= 0.
    Jet height_jet(std::span<const double> x, int order) const;

    HalfspaceGraph flipped() const;
};

/// First/second fundamental forms of the graph at a point, hyperbolic and
/// Euclidean, plus the eq. relating them.
struct FundamentalForms {
    double u = 0, w = 1, nu_vertical = 0;
    Eigen::MatrixXd g, h, g_euc, h_euc;
    double relation_residual = 0;  // h_ij - (h~_ij/u + nu^{n+1} g~_ij/u^2), max abs
};

/// Every first/second-order geometric quantity at a point, both models, both
/// curvature conventions (H_mean averages, H_trace sums).
struct CurvatureReport {
    std::vector<double> point;
    double u = 0, w = 1, nu_vertical = 0;
    Eigen::MatrixXd g, h, g_euc, h_euc;
    Eigen::VectorXd kappa;      // hyperbolic principal curvatures, ascending
    Eigen::VectorXd kappa_euc;  // Euclidean counterparts, ascending
    double K_ext = 0;           // product of kappa_i
    double H_trace = 0;         // sum of kappa_i
    double H_mean = 0;          // H_trace / n
    double R_scalar = 0;        // H_trace^2 - sum kappa_i^2
    double K_intrinsic = 0;     // -1 + K_ext, n = 2 only (NaN otherwise)
};

FundamentalForms fundamental_forms(const HalfspaceGraph& graph, std::span<const double> x);

CurvatureReport curvature_report(const HalfspaceGraph& graph, std::span<const double> x);

/// Same report from a bare order-2 height jet (the finite-difference path
/// and the solver's a-posteriori checks enter here).
CurvatureReport curvature_from_jet(const Jet& u_jet, std::span<const double> x,
                                   Orientation orientation = Orientation::Downward);

/// Residuals of the hyperbolic/Euclidean comparison identities at x for a
/// scalar v given as an expression in the chart coordinates. Keys follow the
/// identities relating surface Hessians, the height, 1/u and the normal
/// component.
std::map<std::string, double> comparison_residuals(const HalfspaceGraph& graph,
                                                   std::span<const double> x, const ExprPtr& v);

/// Same residual set with v supplied as an order-2 jet at x (for heights
/// that are not expression-backed).
std::map<std::string, double> comparison_residuals(const HalfspaceGraph& graph,
                                                   std::span<const double> x, const Jet& v_jet);

struct RhoHessian {
    Eigen::Vector2d grad;
    Eigen::Matrix2d hess;
    double det = 0;
    double det_identity_residual = 0;  // |det rho_ij - K_ext (1+|grad u|^2)^2|
};

/// rho = -(|x|^2 + u^2)/2 and the determinant identity det rho_ij = K w^4
/// (n = 2 only).
RhoHessian rho_hessian(const HalfspaceGraph& graph, std::span<const double> x);

/// Order-2 jet at (x,y) assembled from centered second-order differences of
/// a sampled height; the finite-difference path of the curvature pipeline.
Jet sampled_height_jet(const std::function<double(double, double)>& sample, double x, double y,
                       double dx);

/// Richardson extrapolation of the sampled jet over spacings dx and dx/2;
/// kills the leading dx^2 stencil error, which small-radius caps need to
/// stay inside the 4 dx^2 curvature envelope.
Jet sampled_height_jet_richardson(const std::function<double(double, double)>& sample, double x,
                                  double y, double dx);

namespace detail {

/// Symmetric 2x2 with jet entries; the building block of the n = 2 jet path.
struct SymJet2 {
    Jet a11, a12, a22;
    Jet det() const { return a11 * a22 - a12 * a12; }
};

/// Jets of every quantity the estimate operations consume, all at one point
/// of an n = 2 graph. Orders drop with each differentiation of u.
struct GraphJets {
    Jet u;            // order m
    Jet u1, u2;       // order m-1
    Jet w2, w;        // order m-1
    Jet nu_vertical;  // order m-1, sign from orientation
    SymJet2 g, h;     // order m-1 / m-2
    SymJet2 g_euc;    // order m-1
    SymJet2 rho;      // Hess rho, order m-2
    Jet rho_fn;       // rho itself, order m
    Jet K_ext;        // order m-2
    Jet H_mean;       // order m-2
};

GraphJets graph_jets(const HalfspaceGraph& graph, std::span<const double> x, int order);

SymJet2 inverse(const SymJet2& s);

}  // namespace detail

}  // namespace hcap
