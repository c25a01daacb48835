#include "hcap/halfspace.hpp"

#include <cmath>
#include <limits>

namespace hcap {

Domain Domain::disc(double r) {
    if (r <= 0.0) throw GeometryError("disc domain needs positive radius");
    Domain d;
    d.shape = Shape::Disc;
    d.radius = r;
    return d;
}

Domain Domain::box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || lo.empty()) throw GeometryError("box domain bounds mismatch");
    for (size_t i = 0; i < lo.size(); ++i)
        if (lo[i] >= hi[i]) throw GeometryError("box domain has empty extent");
    Domain d;
    d.shape = Shape::Box;
    d.lo = std::move(lo);
    d.hi = std::move(hi);
    return d;
}

bool Domain::contains(std::span<const double> x) const {
    if (shape == Shape::Disc) {
        double s = 0.0;
        for (double c : x) s += c * c;
        return s <= radius * radius * (1.0 + 1e-14);
    }
    if (x.size() != lo.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] < lo[i] - 1e-14 || x[i] > hi[i] + 1e-14) return false;
    return true;
}

int Domain::dim() const { return shape == Shape::Disc ? 2 : static_cast<int>(lo.size()); }

Jet AnalyticHeight::jet(std::span<const double> x, int order) const {
    if (static_cast<int>(x.size()) != dim_)
        throw GeometryError("height evaluated with wrong point dimension");
    return expr_->lift(x, order);
}

HalfspaceGraph::HalfspaceGraph(ExprPtr u, Domain d, Orientation o)
    : dim(d.dim()), height(std::make_shared<AnalyticHeight>(std::move(u), d.dim())),
      domain(std::move(d)), orientation(o) {}

HalfspaceGraph::HalfspaceGraph(std::shared_ptr<const HeightField> h, Domain d, Orientation o)
    : dim(d.dim()), height(std::move(h)), domain(std::move(d)), orientation(o) {}

Jet HalfspaceGraph::height_jet(std::span<const double> x, int order) const {
    if (!domain.contains(x)) throw GeometryError("point outside the graph domain");
    Jet j = height->jet(x, order);
    if (j.value() <= 0.0)
        throw GeometryError("graph height is nonpositive: surface leaves the half-space");
    return j;
}

HalfspaceGraph HalfspaceGraph::flipped() const {
    HalfspaceGraph g = *this;
    g.orientation =
        orientation == Orientation::Downward ? Orientation::Upward : Orientation::Downward;
    return g;
}

namespace {

MultiIndex unit(int i) {
    MultiIndex a{0, 0, 0};
    a[i] = 1;
    return a;
}

MultiIndex pair(int i, int j) {
    MultiIndex a{0, 0, 0};
    ++a[i];
    ++a[j];
    return a;
}

struct ScalarForms {
    int n;
    double u, w, w2, sgn, nu_vertical;
    Eigen::VectorXd du;
    Eigen::MatrixXd ddu;
    Eigen::MatrixXd g, h, g_euc, h_euc;
};

ScalarForms forms_from_jet(const Jet& uj, int n, Orientation orientation) {
    ScalarForms f;
    f.n = n;
    f.u = uj.value();
    if (f.u <= 0.0) throw GeometryError("graph height is nonpositive");
    f.du.resize(n);
    f.ddu.resize(n, n);
    for (int i = 0; i < n; ++i) f.du[i] = uj.partial(unit(i));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f.ddu(i, j) = uj.partial(pair(i, j));
    f.w2 = 1.0 + f.du.squaredNorm();
    f.w = std::sqrt(f.w2);
    f.sgn = orientation_sign(orientation);
    f.nu_vertical = -f.sgn / f.w;
    f.g_euc = Eigen::MatrixXd::Identity(n, n) + f.du * f.du.transpose();
    f.g = f.g_euc / (f.u * f.u);
    f.h_euc = -f.sgn * f.ddu / f.w;
    f.h = -f.sgn *
          (Eigen::MatrixXd::Identity(n, n) + f.du * f.du.transpose() + f.u * f.ddu) /
          (f.u * f.u * f.w);
    return f;
}

ScalarForms scalar_forms(const HalfspaceGraph& graph, std::span<const double> x) {
    return forms_from_jet(graph.height_jet(x, 2), graph.dim, graph.orientation);
}

Eigen::VectorXd generalized_kappa(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(h, g);
    if (es.info() != Eigen::Success)
        throw GeometryError("principal-curvature eigensolve failed on a degenerate metric");
    return es.eigenvalues();  // ascending
}

}  // namespace

FundamentalForms fundamental_forms(const HalfspaceGraph& graph, std::span<const double> x) {
    ScalarForms f = scalar_forms(graph, x);
    FundamentalForms out;
    out.u = f.u;
    out.w = f.w;
    out.nu_vertical = f.nu_vertical;
    out.g = f.g;
    out.h = f.h;
    out.g_euc = f.g_euc;
    out.h_euc = f.h_euc;
    const Eigen::MatrixXd rhs = f.h_euc / f.u + f.nu_vertical * f.g_euc / (f.u * f.u);
    out.relation_residual = (f.h - rhs).cwiseAbs().maxCoeff();
    return out;
}

namespace {

CurvatureReport report_from_forms(const ScalarForms& f, std::span<const double> x) {
    CurvatureReport r;
    r.point.assign(x.begin(), x.end());
    r.u = f.u;
    r.w = f.w;
    r.nu_vertical = f.nu_vertical;
    r.g = f.g;
    r.h = f.h;
    r.g_euc = f.g_euc;
    r.h_euc = f.h_euc;
    r.kappa = generalized_kappa(f.h, f.g);
    r.kappa_euc = generalized_kappa(f.h_euc, f.g_euc);
    r.K_ext = r.kappa.prod();
    r.H_trace = r.kappa.sum();
    r.H_mean = r.H_trace / f.n;
    r.R_scalar = r.H_trace * r.H_trace - r.kappa.squaredNorm();
    r.K_intrinsic =
        f.n == 2 ? -1.0 + r.K_ext : std::numeric_limits<double>::quiet_NaN();
    return r;
}

}  // namespace

CurvatureReport curvature_report(const HalfspaceGraph& graph, std::span<const double> x) {
    return report_from_forms(scalar_forms(graph, x), x);
}

CurvatureReport curvature_from_jet(const Jet& u_jet, std::span<const double> x,
                                   Orientation orientation) {
    return report_from_forms(forms_from_jet(u_jet, u_jet.dim(), orientation), x);
}

std::map<std::string, double> comparison_residuals(const HalfspaceGraph& graph,
                                                   std::span<const double> x, const ExprPtr& v) {
    return comparison_residuals(graph, x, v->lift(x, 2));
}

std::map<std::string, double> comparison_residuals(const HalfspaceGraph& graph,
                                                   std::span<const double> x, const Jet& v_jet) {
    const int n = graph.dim;
    ScalarForms f = scalar_forms(graph, x);
    Jet uj = graph.height_jet(x, 2);
    Jet vj = v_jet;
    if (vj.dim() < n) throw GeometryError("comparison function has wrong dimension");

    Eigen::VectorXd dv(n);
    Eigen::MatrixXd ddv(n, n);
    for (int i = 0; i < n; ++i) dv[i] = vj.partial(unit(i));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ddv(i, j) = vj.partial(pair(i, j));

    // Christoffels: Euclidean graph metric, then the hyperbolic correction.
    auto gamma_euc = [&](int k, int i, int j) { return f.du[k] * f.ddu(i, j) / f.w2; };
    auto gamma_hyp = [&](int k, int i, int j) {
        const double kron_ik = (i == k) ? 1.0 : 0.0;
        const double kron_jk = (j == k) ? 1.0 : 0.0;
        return gamma_euc(k, i, j) -
               (f.du[i] * kron_jk + f.du[j] * kron_ik - f.du[k] / f.w2 * f.g_euc(i, j)) / f.u;
    };

    auto hess_euc = [&](const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess) {
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = hess(i, j);
                for (int k = 0; k < n; ++k) s -= gamma_euc(k, i, j) * grad[k];
                m(i, j) = s;
            }
        return m;
    };
    auto hess_hyp = [&](const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess) {
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = hess(i, j);
                for (int k = 0; k < n; ++k) s -= gamma_hyp(k, i, j) * grad[k];
                m(i, j) = s;
            }
        return m;
    };

    std::map<std::string, double> res;
    const double u = f.u, u2 = u * u, u3 = u2 * u;
    const double grad_pair_uu = f.du.squaredNorm() / f.w2;  // g~^{kl} u_k u_l
    const double grad_pair_uv = f.du.dot(dv) / f.w2;        // g~^{kl} u_k v_l

    // relation between the two second fundamental forms
    {
        const Eigen::MatrixXd rhs = f.h_euc / u + f.nu_vertical * f.g_euc / u2;
        res["form_relation"] = (f.h - rhs).cwiseAbs().maxCoeff();
    }
    // kappa_i = u kappa~_i + nu^{n+1}
    {
        Eigen::VectorXd kh = generalized_kappa(f.h, f.g);
        Eigen::VectorXd ke = generalized_kappa(f.h_euc, f.g_euc);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(kh[i] - (u * ke[i] + f.nu_vertical)));
        res["kappa_relation"] = worst;
    }
    // surface Hessian comparison for v
    {
        const Eigen::MatrixXd lhs = hess_hyp(dv, ddv);
        const Eigen::MatrixXd rhs =
            hess_euc(dv, ddv) +
            (f.du * dv.transpose() + dv * f.du.transpose() - grad_pair_uv * f.g_euc) / u;
        res["hessian_comparison"] = (lhs - rhs).cwiseAbs().maxCoeff();
    }
    // v = u specialization
    {
        const Eigen::MatrixXd lhs = hess_hyp(f.du, f.ddu);
        const Eigen::MatrixXd rhs = hess_euc(f.du, f.ddu) +
                                    2.0 * f.du * f.du.transpose() / u -
                                    grad_pair_uu * f.g_euc / u;
        res["height_hessian"] = (lhs - rhs).cwiseAbs().maxCoeff();
    }
    // v = 1/u: gradient and Hessian of the reciprocal height
    Eigen::VectorXd dinv(n);
    Eigen::MatrixXd ddinv(n, n);
    for (int i = 0; i < n; ++i) dinv[i] = -f.du[i] / u2;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            ddinv(i, j) = -f.ddu(i, j) / u2 + 2.0 * f.du[i] * f.du[j] / u3;
    const Eigen::MatrixXd hyp_inv = hess_hyp(dinv, ddinv);
    {
        const Eigen::MatrixXd rhs = -hess_euc(f.du, f.ddu) / u2 + grad_pair_uu * f.g_euc / u3;
        res["reciprocal_hessian"] = (hyp_inv - rhs).cwiseAbs().maxCoeff();
    }
    // product form for v/u
    {
        Jet q = vj.truncated(2) / uj;
        Eigen::VectorXd dq(n);
        Eigen::MatrixXd ddq(n, n);
        for (int i = 0; i < n; ++i) dq[i] = q.partial(unit(i));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) ddq(i, j) = q.partial(pair(i, j));
        const double vv = vj.value();
        const Eigen::MatrixXd lhs = hess_hyp(dq, ddq);
        const Eigen::MatrixXd rhs =
            vv * hyp_inv + hess_euc(dv, ddv) / u - grad_pair_uv * f.g_euc / u2;
        res["quotient_hessian"] = (lhs - rhs).cwiseAbs().maxCoeff();
    }
    // ambient facts: |grad~ u|^2 = 1 - (nu^{n+1})^2 and grad~_ij u = h~_ij nu^{n+1}
    {
        res["normal_gradient_split"] = std::abs(grad_pair_uu - (1.0 - f.nu_vertical * f.nu_vertical));
        const Eigen::MatrixXd rhs = f.h_euc * f.nu_vertical;
        res["normal_hessian_split"] = (hess_euc(f.du, f.ddu) - rhs).cwiseAbs().maxCoeff();
    }
    // frame-free form of the reciprocal-height Hessian
    {
        const Eigen::MatrixXd rhs = (f.g - f.nu_vertical * f.h) / u;
        res["reciprocal_frame_form"] = (hyp_inv - rhs).cwiseAbs().maxCoeff();
    }
    return res;
}

RhoHessian rho_hessian(const HalfspaceGraph& graph, std::span<const double> x) {
    if (graph.dim != 2)
        throw GeometryError("rho-Hessian identities are two-dimensional");
    ScalarForms f = scalar_forms(graph, x);
    RhoHessian r;
    r.grad = Eigen::Vector2d(-(x[0] + f.u * f.du[0]), -(x[1] + f.u * f.du[1]));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.hess(i, j) = -(f.u * f.ddu(i, j) + f.du[i] * f.du[j] + (i == j ? 1.0 : 0.0));
    r.det = r.hess.determinant();
    const double K_ext = f.h.determinant() / f.g.determinant();
    r.det_identity_residual = std::abs(r.det - K_ext * f.w2 * f.w2);
    return r;
}

Jet sampled_height_jet(const std::function<double(double, double)>& sample, double x, double y,
                       double dx) {
    Jet j(2, 2);
    const double f00 = sample(x, y);
    const double fp0 = sample(x + dx, y), fm0 = sample(x - dx, y);
    const double f0p = sample(x, y + dx), f0m = sample(x, y - dx);
    const double fpp = sample(x + dx, y + dx), fmm = sample(x - dx, y - dx);
    const double fpm = sample(x + dx, y - dx), fmp = sample(x - dx, y + dx);
    j.at(mi(0, 0)) = f00;
    j.at(mi(1, 0)) = (fp0 - fm0) / (2.0 * dx);
    j.at(mi(0, 1)) = (f0p - f0m) / (2.0 * dx);
    j.at(mi(2, 0)) = (fp0 - 2.0 * f00 + fm0) / (dx * dx);
    j.at(mi(0, 2)) = (f0p - 2.0 * f00 + f0m) / (dx * dx);
    j.at(mi(1, 1)) = (fpp + fmm - fpm - fmp) / (4.0 * dx * dx);
    return j;
}

Jet sampled_height_jet_richardson(const std::function<double(double, double)>& sample, double x,
                                  double y, double dx) {
    Jet coarse = sampled_height_jet(sample, x, y, dx);
    Jet fine = sampled_height_jet(sample, x, y, dx / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

namespace detail {

SymJet2 inverse(const SymJet2& s) {
    Jet d = s.det();
    return SymJet2{s.a22 / d, -1.0 * (s.a12 / d), s.a11 / d};
}

GraphJets graph_jets(const HalfspaceGraph& graph, std::span<const double> x, int order) {
    if (graph.dim != 2) throw GeometryError("jet-valued graph quantities are two-dimensional");
    GraphJets gj;
    gj.u = graph.height_jet(x, order);
    gj.u1 = gj.u.derivative(0);
    gj.u2 = gj.u.derivative(1);
    gj.w2 = 1.0 + gj.u1 * gj.u1 + gj.u2 * gj.u2;
    gj.w = sqrt(gj.w2);
    const double sgn = orientation_sign(graph.orientation);
    gj.nu_vertical = -sgn / gj.w;
    Jet u11 = gj.u1.derivative(0), u12 = gj.u1.derivative(1), u22 = gj.u2.derivative(1);
    Jet uu = gj.u * gj.u;
    gj.g_euc = SymJet2{1.0 + gj.u1 * gj.u1, gj.u1 * gj.u2, 1.0 + gj.u2 * gj.u2};
    gj.g = SymJet2{gj.g_euc.a11 / uu, gj.g_euc.a12 / uu, gj.g_euc.a22 / uu};
    Jet denom = uu * gj.w;
    gj.h = SymJet2{-sgn * ((gj.g_euc.a11 + gj.u * u11) / denom),
                   -sgn * ((gj.g_euc.a12 + gj.u * u12) / denom),
                   -sgn * ((gj.g_euc.a22 + gj.u * u22) / denom)};
    gj.rho = SymJet2{-1.0 * (gj.u * u11 + gj.u1 * gj.u1 + 1.0),
                     -1.0 * (gj.u * u12 + gj.u1 * gj.u2),
                     -1.0 * (gj.u * u22 + gj.u2 * gj.u2 + 1.0)};
    Jet xj1 = Jet::variable(2, order, 0, x[0]);
    Jet xj2 = Jet::variable(2, order, 1, x[1]);
    gj.rho_fn = -0.5 * (xj1 * xj1 + xj2 * xj2 + gj.u * gj.u);
    gj.K_ext = gj.h.det() / gj.g.det();
    SymJet2 ginv = inverse(gj.g);
    gj.H_mean =
        0.5 * (ginv.a11 * gj.h.a11 + 2.0 * (ginv.a12 * gj.h.a12) + ginv.a22 * gj.h.a22);
    return gj;
}

}  // namespace detail

}  // namespace hcap
