#include "hcap/ma_solver.hpp"

#include <Eigen/Sparse>
#include <cmath>

namespace hcap {

double MAProblem::boundary_at(double x, double y) const {
    if (std::holds_alternative<double>(boundary)) return std::get<double>(boundary);
    const std::vector<double> pt{x, y};
    return std::get<ExprPtr>(boundary)->eval(pt);
}

MAGrid MAGrid::build(double radius, double dx_req) {
    if (radius <= 0.0 || dx_req <= 0.0) throw SolveError("grid needs positive radius and spacing");
    MAGrid g;
    g.radius = radius;
    g.n = std::max(4, static_cast<int>(std::lround(2.0 * radius / dx_req)));
    g.dx = 2.0 * radius / g.n;
    const int side = g.n + 1;
    g.role.assign(side * side, NodeRole::Outside);
    g.active_index.assign(side * side, -1);

    const double r2 = radius * radius * (1.0 + 1e-12);
    auto inside = [&](int i, int j) {
        if (i < 0 || j < 0 || i > g.n || j > g.n) return false;
        const double x = g.x_of(i), y = g.y_of(j);
        return x * x + y * y <= r2;
    };
    for (int j = 0; j <= g.n; ++j)
        for (int i = 0; i <= g.n; ++i) {
            if (!inside(i, j)) continue;
            bool full_stencil = true;
            for (int dj = -1; dj <= 1 && full_stencil; ++dj)
                for (int di = -1; di <= 1; ++di)
                    if (!inside(i + di, j + dj)) {
                        full_stencil = false;
                        break;
                    }
            g.role[g.node(i, j)] = full_stencil ? NodeRole::Interior : NodeRole::Boundary;
        }
    for (int j = 0; j <= g.n; ++j)
        for (int i = 0; i <= g.n; ++i) {
            const int nd = g.node(i, j);
            if (g.role[nd] == NodeRole::Outside) continue;
            g.active_index[nd] = static_cast<int>(g.active_nodes.size());
            g.active_nodes.push_back(nd);
            if (g.role[nd] == NodeRole::Interior) ++g.interior_count;
        }
    if (g.interior_count == 0) throw SolveError("grid too coarse: no interior nodes");
    return g;
}

namespace {

using VecLD = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

struct NodeDerivs {
    double u, ux, uy, uxx, uxy, uyy;
    double w2;
    double r11, r12, r22, det;
    long double log_det_ratio;  // log det rho - log w^4, extended precision
};

/// Centered second-order differences at an interior node. The stencil
/// combinations run in long double, and the solver keeps its iterate in
/// long double as well: reaching residual tolerances near 1e-14 needs the
/// root representable beyond the u/dx^2 double-precision sensitivity floor.
template <class Vec>
NodeDerivs node_derivs(const MAGrid& g, const Vec& u, int i, int j) {
    auto at = [&](int ii, int jj) {
        return static_cast<long double>(u[g.active_index[g.node(ii, jj)]]);
    };
    NodeDerivs d;
    const long double dx = g.dx;
    const long double u0 = at(i, j);
    const long double ux = (at(i + 1, j) - at(i - 1, j)) / (2 * dx);
    const long double uy = (at(i, j + 1) - at(i, j - 1)) / (2 * dx);
    const long double uxx = (at(i + 1, j) - 2 * u0 + at(i - 1, j)) / (dx * dx);
    const long double uyy = (at(i, j + 1) - 2 * u0 + at(i, j - 1)) / (dx * dx);
    const long double uxy =
        (at(i + 1, j + 1) + at(i - 1, j - 1) - at(i + 1, j - 1) - at(i - 1, j + 1)) /
        (4 * dx * dx);
    const long double w2 = 1.0L + ux * ux + uy * uy;
    const long double r11 = -(u0 * uxx + ux * ux + 1.0L);
    const long double r12 = -(u0 * uxy + ux * uy);
    const long double r22 = -(u0 * uyy + uy * uy + 1.0L);
    const long double det = r11 * r22 - r12 * r12;
    d.u = static_cast<double>(u0);
    d.ux = static_cast<double>(ux);
    d.uy = static_cast<double>(uy);
    d.uxx = static_cast<double>(uxx);
    d.uyy = static_cast<double>(uyy);
    d.uxy = static_cast<double>(uxy);
    d.w2 = static_cast<double>(w2);
    d.r11 = static_cast<double>(r11);
    d.r12 = static_cast<double>(r12);
    d.r22 = static_cast<double>(r22);
    d.det = static_cast<double>(det);
    d.log_det_ratio = (det > 0.0L && r11 > 0.0L)
                          ? std::log(det) - 2.0L * std::log(w2)
                          : 0.0L;
    return d;
}

double keff_at(const MAGrid& g, const MAProblem& prob, double shift, int i, int j) {
    const std::vector<double> pt{g.x_of(i), g.y_of(j)};
    return prob.K_field->eval(pt) + shift;
}

}  // namespace

namespace {

template <class Vec>
VecLD residual_core(const MAGrid& grid, const Vec& u, const MAProblem& prob, double shift) {
    VecLD F(grid.active_nodes.size());
    const int side = grid.side();
    for (size_t a = 0; a < grid.active_nodes.size(); ++a) {
        const int nd = grid.active_nodes[a];
        const int i = nd % side, j = nd / side;
        if (grid.role[nd] == NodeRole::Boundary) {
            F[a] = static_cast<long double>(u[a]) -
                   static_cast<long double>(prob.boundary_at(grid.x_of(i), grid.y_of(j)));
            continue;
        }
        if (u[a] <= 0.0)
            throw DefinitenessError("height nonpositive at node", i, j);
        const NodeDerivs d = node_derivs(grid, u, i, j);
        if (d.r11 <= 0.0 || d.det <= 0.0)
            throw DefinitenessError("Hess rho not positive definite at node", i, j);
        const double keff = keff_at(grid, prob, shift, i, j);
        if (keff <= 0.0)
            throw SolveError("effective curvature nonpositive inside the domain");
        F[a] = d.log_det_ratio - std::log(static_cast<long double>(keff));
    }
    return F;
}

double inf_norm(const VecLD& v) {
    long double m = 0.0L;
    for (Eigen::Index k = 0; k < v.size(); ++k) m = std::max(m, std::abs(v[k]));
    return static_cast<double>(m);
}

}  // namespace

Eigen::VectorXd ma_residual(const MAGrid& grid, const Eigen::VectorXd& u, const MAProblem& prob,
                            double shift) {
    return residual_core(grid, u, prob, shift).cast<double>();
}

namespace {

using Trip = Eigen::Triplet<double>;

/// Jacobian of the interior residual rows by the rho^{ij} chain rule.
template <class Vec>
void assemble_jacobian(const MAGrid& g, const Vec& u, std::vector<Trip>& trips) {
    trips.clear();
    const int side = g.side();
    const double dx = g.dx;
    for (size_t a = 0; a < g.active_nodes.size(); ++a) {
        const int nd = g.active_nodes[a];
        const int i = nd % side, j = nd / side;
        if (g.role[nd] == NodeRole::Boundary) {
            trips.emplace_back(static_cast<int>(a), static_cast<int>(a), 1.0);
            continue;
        }
        const NodeDerivs d = node_derivs(g, u, i, j);
        const double i11 = d.r22 / d.det, i12 = -d.r12 / d.det, i22 = d.r11 / d.det;

        // accumulate d a/d(u at offset)
        double coef[3][3] = {};
        auto add = [&](int di, int dj, double c) { coef[dj + 1][di + 1] += c; };

        // d rho terms: rho11 = -(u uxx + ux^2 + 1), etc.
        // du (center) contributions
        add(0, 0, -(i11 * d.uxx + 2 * i12 * d.uxy + i22 * d.uyy));
        // u * d(uxx): centered second difference
        {
            const double c = -i11 * d.u / (dx * dx);
            add(1, 0, c);
            add(-1, 0, c);
            add(0, 0, -2 * c);
        }
        // u * d(uyy)
        {
            const double c = -i22 * d.u / (dx * dx);
            add(0, 1, c);
            add(0, -1, c);
            add(0, 0, -2 * c);
        }
        // 2 rho^{12} * u * d(uxy)
        {
            const double c = -2 * i12 * d.u / (4 * dx * dx);
            add(1, 1, c);
            add(-1, -1, c);
            add(1, -1, -c);
            add(-1, 1, -c);
        }
        // gradient entries: d(ux), d(uy) appear in rho and in log w^4
        const double cux = -(2 * i11 * d.ux + 2 * i12 * d.uy) - 4 * d.ux / d.w2;
        const double cuy = -(2 * i22 * d.uy + 2 * i12 * d.ux) - 4 * d.uy / d.w2;
        add(1, 0, cux / (2 * dx));
        add(-1, 0, -cux / (2 * dx));
        add(0, 1, cuy / (2 * dx));
        add(0, -1, -cuy / (2 * dx));

        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                const double c = coef[dj + 1][di + 1];
                if (c == 0.0) continue;
                const int col = g.active_index[g.node(i + di, j + dj)];
                trips.emplace_back(static_cast<int>(a), col, c);
            }
    }
}

template <class Vec>
bool iterate_usable(const MAGrid& g, const Vec& u, const MAProblem& prob, double shift,
                    VecLD* out) {
    try {
        VecLD F = residual_core(g, u, prob, shift);
        if (out) *out = std::move(F);
        return true;
    } catch (const DefinitenessError&) {
        return false;
    }
}

Eigen::VectorXd boundary_extension(const MAGrid& g, const MAProblem& prob) {
    Eigen::VectorXd u(g.active_nodes.size());
    const int side = g.side();
    const bool trace = std::holds_alternative<ExprPtr>(prob.boundary);
    for (size_t a = 0; a < g.active_nodes.size(); ++a) {
        const int nd = g.active_nodes[a];
        const int i = nd % side, j = nd / side;
        u[a] = trace ? prob.boundary_at(g.x_of(i), g.y_of(j))
                     : std::get<double>(prob.boundary);
    }
    return u;
}

/// One backward-Euler heat step with pinned boundary rows.
Eigen::VectorXd smoothing_pass(const MAGrid& g, const Eigen::VectorXd& u0,
                               const MAProblem& prob) {
    const double tau = g.radius * g.radius / 4.0;
    const int side = g.side();
    const int m = static_cast<int>(g.active_nodes.size());
    std::vector<Trip> trips;
    Eigen::VectorXd rhs(m);
    for (int a = 0; a < m; ++a) {
        const int nd = g.active_nodes[a];
        const int i = nd % side, j = nd / side;
        if (g.role[nd] == NodeRole::Boundary) {
            trips.emplace_back(a, a, 1.0);
            rhs[a] = prob.boundary_at(g.x_of(i), g.y_of(j));
            continue;
        }
        const double lap = tau / (g.dx * g.dx);
        trips.emplace_back(a, a, 1.0 + 4.0 * lap);
        trips.emplace_back(a, g.active_index[g.node(i + 1, j)], -lap);
        trips.emplace_back(a, g.active_index[g.node(i - 1, j)], -lap);
        trips.emplace_back(a, g.active_index[g.node(i, j + 1)], -lap);
        trips.emplace_back(a, g.active_index[g.node(i, j - 1)], -lap);
        rhs[a] = u0[a];
    }
    Eigen::SparseMatrix<double> A(m, m);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    if (lu.info() != Eigen::Success) throw SolveError("smoothing solve failed");
    return lu.solve(rhs);
}

Eigen::VectorXd cap_fit(const MAGrid& g, const MAProblem& prob, double shift) {
    const int side = g.side();
    double cbar = 0.0;
    int nb = 0;
    for (int nd : g.active_nodes) {
        if (g.role[nd] != NodeRole::Boundary) continue;
        const int i = nd % side, j = nd / side;
        cbar += prob.boundary_at(g.x_of(i), g.y_of(j));
        ++nb;
    }
    cbar /= std::max(1, nb);
    for (double ratio : {1.05, 1.2, 1.5, 2.0, 3.0, 5.0}) {
        const double r0 = ratio * g.radius;
        Eigen::VectorXd u(g.active_nodes.size());
        for (size_t a = 0; a < g.active_nodes.size(); ++a) {
            const int nd = g.active_nodes[a];
            const int i = nd % side, j = nd / side;
            const double x = g.x_of(i), y = g.y_of(j);
            // smooth everywhere, including Dirichlet rows: the boundary
            // residual is linear and one Newton step restores it, while a
            // trace/fit mismatch at the rim would wreck definiteness
            u[a] = cbar + std::sqrt(r0 * r0 - x * x - y * y) -
                   std::sqrt(r0 * r0 - g.radius * g.radius);
        }
        if (u.minCoeff() > 0.0 && iterate_usable(g, u, prob, shift, nullptr)) return u;
    }
    throw SolveError("bad initialization: no starting iterate enters the definiteness cone");
}

}  // namespace

GridSolution newton_solve(const MAProblem& prob, double shift,
                          const std::optional<Eigen::VectorXd>& u0, double tol, double dx) {
    if (!prob.K_field) throw SolveError("problem has no curvature field");
    MAGrid grid = MAGrid::build(prob.domain_radius, dx);
    const int m = static_cast<int>(grid.active_nodes.size());

    // initializer chain: given iterate, boundary extension, one smoothing
    // pass, coarse cap fit
    Eigen::VectorXd u;
    {
        bool ready = false;
        if (u0) {
            if (u0->size() != m) throw SolveError("initial iterate has wrong grid size");
            u = *u0;
            ready = u.minCoeff() > 0.0 && iterate_usable(grid, u, prob, shift, nullptr);
        }
        if (!ready) {
            u = u0 ? *u0 : boundary_extension(grid, prob);
            if (u.minCoeff() <= 0.0) u = boundary_extension(grid, prob);
            ready = iterate_usable(grid, u, prob, shift, nullptr);
        }
        if (!ready) {
            u = smoothing_pass(grid, u, prob);
            ready = u.minCoeff() > 0.0 && iterate_usable(grid, u, prob, shift, nullptr);
        }
        if (!ready) u = cap_fit(grid, prob, shift);
    }

    GridSolution sol;
    sol.grid = grid;
    sol.shift = shift;

    VecLD uld = u.cast<long double>();
    VecLD F = residual_core(grid, uld, prob, shift);
    double fnorm = inf_norm(F);
    std::vector<Trip> trips;
    Eigen::SparseMatrix<double> J(m, m);

    const int max_iter = 80;
    int it = 0;
    for (; it < max_iter && fnorm > tol; ++it) {
        assemble_jacobian(grid, uld, trips);
        J.setFromTriplets(trips.begin(), trips.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
        if (lu.info() != Eigen::Success) throw SolveError("Newton linear solve failed");
        const Eigen::VectorXd du = lu.solve(-F.cast<double>());

        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= 1e-10) {
            VecLD trial = uld + lambda * du.cast<long double>();
            VecLD Ftrial;
            bool positive = true;
            for (Eigen::Index k = 0; k < trial.size(); ++k)
                if (trial[k] <= 0.0L) {
                    positive = false;
                    break;
                }
            if (positive && iterate_usable(grid, trial, prob, shift, &Ftrial)) {
                const double tn = inf_norm(Ftrial);
                if (tn <= (1.0 - 1e-4 * lambda) * fnorm || tn <= tol) {
                    uld = std::move(trial);
                    F = std::move(Ftrial);
                    fnorm = tn;
                    sol.newton_stats.damping.push_back(lambda);
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            sol.u = uld.cast<double>();
            sol.newton_stats.iterations = it;
            sol.newton_stats.final_residual = fnorm;
            throw NonconvergenceError("line-search damping underflow", std::move(sol));
        }
    }
    sol.u = uld.cast<double>();
    sol.newton_stats.iterations = it;
    sol.newton_stats.final_residual = fnorm;
    if (fnorm > tol) {
        throw NonconvergenceError("Newton iteration limit reached", std::move(sol));
    }
    return sol;
}

double GridSolution::value(int i, int j) const {
    const int a = grid.active_index[grid.node(i, j)];
    if (a < 0) throw SolveError("value requested at an inactive node");
    return u[a];
}

Jet GridSolution::node_jet(int i, int j) const {
    if (grid.role[grid.node(i, j)] != NodeRole::Interior)
        throw SolveError("jets are defined at interior nodes only");
    auto sample = [&](double x, double y) {
        const int ii = static_cast<int>(std::lround((x + grid.radius) / grid.dx));
        const int jj = static_cast<int>(std::lround((y + grid.radius) / grid.dx));
        return value(ii, jj);
    };
    return sampled_height_jet(sample, grid.x_of(i), grid.y_of(j), grid.dx);
}

CurvatureReport GridSolution::node_curvature(int i, int j) const {
    const std::vector<double> pt{grid.x_of(i), grid.y_of(j)};
    return curvature_from_jet(node_jet(i, j), pt, Orientation::Downward);
}

namespace {

StageReport summarize(const GridSolution& sol, double lift) {
    StageReport rep;
    rep.shift = sol.shift;
    rep.stats = sol.newton_stats;
    rep.converged = true;
    rep.max_H_mean = -1e300;
    rep.max_H_trace = -1e300;
    rep.min_K_ext = 1e300;
    rep.max_K_ext = -1e300;
    const int side = sol.grid.side();
    for (int nd : sol.grid.active_nodes) {
        if (sol.grid.role[nd] != NodeRole::Interior) continue;
        const int i = nd % side, j = nd / side;
        Jet uj = sol.node_jet(i, j);
        if (lift != 0.0) uj = uj + lift;
        const std::vector<double> pt{sol.grid.x_of(i), sol.grid.y_of(j)};
        CurvatureReport r = curvature_from_jet(uj, pt, Orientation::Downward);
        rep.max_H_mean = std::max(rep.max_H_mean, r.H_mean);
        rep.max_H_trace = std::max(rep.max_H_trace, r.H_trace);
        rep.min_K_ext = std::min(rep.min_K_ext, r.K_ext);
        rep.max_K_ext = std::max(rep.max_K_ext, r.K_ext);
    }
    return rep;
}

}  // namespace

ContinuationResult continuation(const MAProblem& prob, const std::vector<double>& shifts,
                                double tol, double dx) {
    for (size_t k = 1; k < shifts.size(); ++k)
        if (!(shifts[k] < shifts[k - 1]))
            throw SolveError("continuation shifts must be strictly decreasing");
    if (!shifts.empty() && shifts.back() < 0.0)
        throw SolveError("continuation shifts must stay nonnegative");

    ContinuationResult out;
    std::optional<Eigen::VectorXd> warm;
    for (size_t k = 0; k < shifts.size(); ++k) {
        try {
            GridSolution sol = newton_solve(prob, shifts[k], warm, tol, dx);
            warm = sol.u;
            out.reports.push_back(summarize(sol, 0.0));
            out.stages.push_back(std::move(sol));
        } catch (const SolveError&) {
            out.all_converged = false;
            out.failed_stage = static_cast<int>(k);
            StageReport rep;
            rep.shift = shifts[k];
            rep.converged = false;
            out.reports.push_back(rep);
            return out;
        }
    }
    out.all_converged = true;
    return out;
}

StageReport lifted_report(const GridSolution& sol, double eps) {
    StageReport rep = summarize(sol, eps);
    rep.shift = eps;
    return rep;
}

GridHeight::GridHeight(GridSolution sol, int window) : sol_(std::move(sol)), window_(window) {
    if (window_ < 6) throw SolveError("quintic window needs at least 6 nodes per side");
}

GridHeight::Fit GridHeight::fit_at(double x, double y) const {
    const MAGrid& g = sol_.grid;
    const int half = window_ / 2;
    int i0 = static_cast<int>(std::floor((x + g.radius) / g.dx)) - half + 1;
    int j0 = static_cast<int>(std::floor((y + g.radius) / g.dx)) - half + 1;
    i0 = std::clamp(i0, 0, g.n + 1 - window_);
    j0 = std::clamp(j0, 0, g.n + 1 - window_);
    for (int dj = 0; dj < window_; ++dj)
        for (int di = 0; di < window_; ++di)
            if (g.role[g.node(i0 + di, j0 + dj)] == NodeRole::Outside)
                throw GeometryError("quintic window leaves the active grid");

    const int nb = 36;  // tensor quintic basis
    const int rows = window_ * window_;
    Fit fit;
    fit.x0 = g.x_of(i0) + 0.5 * (window_ - 1) * g.dx;
    fit.y0 = g.y_of(j0) + 0.5 * (window_ - 1) * g.dx;
    fit.scale = 0.5 * (window_ - 1) * g.dx;
    Eigen::MatrixXd A(rows, nb);
    Eigen::VectorXd b(rows);
    int r = 0;
    for (int dj = 0; dj < window_; ++dj)
        for (int di = 0; di < window_; ++di, ++r) {
            const double xs = (g.x_of(i0 + di) - fit.x0) / fit.scale;
            const double ys = (g.y_of(j0 + dj) - fit.y0) / fit.scale;
            double xp[6], yp[6];
            xp[0] = yp[0] = 1.0;
            for (int k = 1; k < 6; ++k) {
                xp[k] = xp[k - 1] * xs;
                yp[k] = yp[k - 1] * ys;
            }
            int c = 0;
            for (int ax = 0; ax < 6; ++ax)
                for (int ay = 0; ay < 6; ++ay) A(r, c++) = xp[ax] * yp[ay];
            b[r] = sol_.value(i0 + di, j0 + dj);
        }
    fit.coeff = A.colPivHouseholderQr().solve(b);
    fit.residual = (A * fit.coeff - b).cwiseAbs().maxCoeff();
    return fit;
}

Jet GridHeight::jet(std::span<const double> x, int order) const {
    Fit fit = fit_at(x[0], x[1]);
    // evaluate the fitted tensor polynomial as a jet in the scaled frame
    Jet xs = (Jet::variable(2, order, 0, x[0]) - fit.x0) / fit.scale;
    Jet ys = (Jet::variable(2, order, 1, x[1]) - fit.y0) / fit.scale;
    std::vector<Jet> xp(6, Jet::constant(2, order, 1.0)), yp(6, Jet::constant(2, order, 1.0));
    for (int k = 1; k < 6; ++k) {
        xp[k] = xp[k - 1] * xs;
        yp[k] = yp[k - 1] * ys;
    }
    Jet acc = Jet::constant(2, order, 0.0);
    int c = 0;
    for (int ax = 0; ax < 6; ++ax)
        for (int ay = 0; ay < 6; ++ay) acc += fit.coeff[c++] * (xp[ax] * yp[ay]);
    return acc;
}

double GridHeight::fit_residual(std::span<const double> x) const {
    return fit_at(x[0], x[1]).residual;
}

double GridHeight::usable_radius() const {
    const MAGrid& g = sol_.grid;
    return std::max(0.0, g.radius - 2.0 * (window_ / 2 + 1) * g.dx);
}

}  // namespace hcap
