#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "hcap/expr.hpp"
#include "hcap/halfspace.hpp"

namespace hcap {

/// Dirichlet problem for the prescribed extrinsic Gauss curvature equation
///   det rho_ij(u) = K (1 + |grad u|^2)^2,   rho_ij = -(u u_ij + u_i u_j + d_ij)
/// on a disc, solved on the positive-definite branch of Hess rho.
struct MAProblem {
    double domain_radius = 0.6;
    ExprPtr K_field;                           // prescribed curvature, >= 0
    std::variant<double, ExprPtr> boundary;    // constant height or trace
    ExprPtr reference_solution;                // optional, for error studies

    double boundary_at(double x, double y) const;
};

enum class NodeRole : std::uint8_t { Outside = 0, Boundary = 1, Interior = 2 };

/// Uniform tensor grid over the bounding box of the disc; nodes whose full
/// 9-point stencil stays inside the disc are interior, remaining in-disc
/// nodes carry Dirichlet rows.
struct MAGrid {
    double radius = 0.0;
    double dx = 0.0;
    int n = 0;  // nodes per side = n + 1

    std::vector<NodeRole> role;
    std::vector<int> active_index;  // node -> position among active nodes, or -1
    std::vector<int> active_nodes;  // active position -> node
    int interior_count = 0;

    static MAGrid build(double radius, double dx);

    int side() const { return n + 1; }
    int node(int i, int j) const { return j * side() + i; }
    double x_of(int i) const { return -radius + i * dx; }
    double y_of(int j) const { return -radius + j * dx; }
};

struct NewtonStats {
    int iterations = 0;
    double final_residual = 0.0;
    std::vector<double> damping;  // accepted step lengths
};

/// Converged (or best) iterate of one continuation stage.
struct GridSolution {
    MAGrid grid;
    Eigen::VectorXd u;  // active-node values
    double shift = 0.0;
    NewtonStats newton_stats;

    double value(int i, int j) const;
    /// Order-2 jet at an interior node from centered differences.
    Jet node_jet(int i, int j) const;
    /// Curvature report of the discrete surface at an interior node.
    CurvatureReport node_curvature(int i, int j) const;
};

/// Hess rho loses positive definiteness at a node; recoverable during line
/// search.
struct DefinitenessError : SolveError {
    int node_i, node_j;
    DefinitenessError(const std::string& what, int i, int j)
        : SolveError(what), node_i(i), node_j(j) {}
};

struct NonconvergenceError : SolveError {
    GridSolution best;
    NonconvergenceError(const std::string& what, GridSolution b)
        : SolveError(what), best(std::move(b)) {}
};

/// Residual of the log-determinant form: interior rows
///   log det rho_ij - log((K + shift) w^4),
/// boundary rows u - g. Throws DefinitenessError at the first node whose
/// Hess rho is not positive definite.
Eigen::VectorXd ma_residual(const MAGrid& grid, const Eigen::VectorXd& u, const MAProblem& prob,
                            double shift);

/// Damped Newton with sparse LU solves; every accepted iterate keeps
/// Hess rho positive definite at the interior nodes and u positive. When u0
/// is absent or unusable the initializer chain runs boundary-extension,
/// one implicit smoothing pass, then a coarse cap fit.
GridSolution newton_solve(const MAProblem& prob, double shift,
                          const std::optional<Eigen::VectorXd>& u0, double tol, double dx);

struct StageReport {
    double shift = 0.0;
    bool converged = false;
    NewtonStats stats;
    double max_H_mean = 0.0, max_H_trace = 0.0;
    double min_K_ext = 0.0, max_K_ext = 0.0;
};

struct ContinuationResult {
    std::vector<GridSolution> stages;
    std::vector<StageReport> reports;
    bool all_converged = false;
    int failed_stage = -1;  // index of the first nonconvergent stage
};

/// Solve with K_eff = K + shifts[k], warm-starting each stage from the
/// previous one. A nonconvergent stage stops the sweep; earlier stages are
/// still returned.
ContinuationResult continuation(const MAProblem& prob, const std::vector<double>& shifts,
                                double tol, double dx);

/// Lift a solved surface vertically by eps and recompute its curvature
/// summary; the geometric regularization of a degenerate cap, provided for
/// fidelity next to the curvature-shift continuation knob.
StageReport lifted_report(const GridSolution& sol, double eps);

/// Height field over the solution grid: windowed tensor-product quintic
/// least-squares fit, giving order <= 5 jets plus the fit residual against
/// the window samples.
class GridHeight final : public HeightField {
  public:
    GridHeight(GridSolution sol, int window = 8);

    int dim() const override { return 2; }
    int max_order() const override { return kMaxJetOrder; }
    Jet jet(std::span<const double> x, int order) const override;

    /// Max |fit - sample| over the window used for the last constructed fit
    /// at x; reported alongside fifth-order quantities.
    double fit_residual(std::span<const double> x) const;

    /// Largest disc radius on which windows stay inside the active grid.
    double usable_radius() const;

  private:
    struct Fit {
        Eigen::VectorXd coeff;  // tensor monomial coefficients
        double x0, y0, scale, residual;
    };
    Fit fit_at(double x, double y) const;
    GridSolution sol_;
    int window_;
};

}  // namespace hcap
