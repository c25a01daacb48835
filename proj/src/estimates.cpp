#include "hcap/estimates.hpp"

#include <cmath>
#include <limits>

namespace hcap {

using detail::GraphJets;
using detail::SymJet2;

namespace {

struct RhoPack {
    SymJet2 hess;                       // jets of rho_ij
    std::array<std::array<std::array<Jet, 2>, 2>, 2> third;  // rho_ijk jets
    double det = 0.0;
};

RhoPack rho_pack(const GraphJets& gj) {
    RhoPack rp;
    Jet r1 = gj.rho_fn.derivative(0), r2 = gj.rho_fn.derivative(1);
    std::array<Jet, 2> first{r1, r2};
    for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) {
            Jet rij = first[i].derivative(j);
            if (i == 0 && j == 0) rp.hess.a11 = rij;
            else if (i == 0 && j == 1) rp.hess.a12 = rij;
            else rp.hess.a22 = rij;
        }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const Jet& rij = (i == 0 ? (j == 0 ? rp.hess.a11 : rp.hess.a12)
                                     : (j == 0 ? rp.hess.a12 : rp.hess.a22));
            for (int k = 0; k < 2; ++k) rp.third[i][j][k] = rij.derivative(k);
        }
    rp.det = rp.hess.det().value();
    return rp;
}

const Jet& hess_entry(const SymJet2& s, int i, int j) {
    if (i == 0 && j == 0) return s.a11;
    if (i == 1 && j == 1) return s.a22;
    return s.a12;
}

/// The full triple contraction as a jet; order drops to that of the third
/// derivatives.
Jet sigma_jet(const GraphJets& gj) {
    RhoPack rp = rho_pack(gj);
    if (rp.det <= 0.0)
        throw BranchError("Hess rho is indefinite: sigma lives on a definite branch");
    SymJet2 inv = detail::inverse(rp.hess);
    const int ord = rp.third[0][0][0].order();
    Jet acc = Jet::constant(2, ord, 0.0);
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    for (int r = 0; r < 2; ++r)
                        for (int s = 0; s < 2; ++s)
                            acc += hess_entry(inv, k, l) * hess_entry(inv, p, q) *
                                   hess_entry(inv, r, s) * rp.third[k][p][r] * rp.third[l][q][s];
    return acc;
}

void check_vicinity(const GraphJets& gj, const SamplePoint& x) {
    const double gn = std::hypot(gj.u1.value(), gj.u2.value());
    if (gj.u.value() < 1.0)
        throw PreconditionError("vicinity bound u >= 1 fails at (" + std::to_string(x[0]) + ", " +
                                std::to_string(x[1]) + "): u = " + std::to_string(gj.u.value()));
    if (gn >= 1.0)
        throw PreconditionError("vicinity bound |grad u| < 1 fails at (" + std::to_string(x[0]) +
                                ", " + std::to_string(x[1]) +
                                "): |grad u| = " + std::to_string(gn));
}

/// |grad f|_g in the induced hyperbolic metric from chart components.
double grad_norm_induced(const GraphJets& gj, double f1, double f2) {
    const double g11 = gj.g.a11.value(), g12 = gj.g.a12.value(), g22 = gj.g.a22.value();
    const double det = g11 * g22 - g12 * g12;
    const double i11 = g22 / det, i12 = -g12 / det, i22 = g11 / det;
    return std::sqrt(std::max(0.0, i11 * f1 * f1 + 2 * i12 * f1 * f2 + i22 * f2 * f2));
}

double lap_induced(const GraphJets& gj, const Jet& f) {
    return detail::laplace_beltrami(f, gj.g.a11, gj.g.a12, gj.g.a22);
}

}  // namespace

double sigma(const HalfspaceGraph& graph, std::span<const double> x) {
    GraphJets gj = detail::graph_jets(graph, x, 3);
    return sigma_jet(gj).value();
}

double L_sigma(const HalfspaceGraph& graph, std::span<const double> x) {
    GraphJets gj = detail::graph_jets(graph, x, 5);
    Jet sj = sigma_jet(gj);  // order 2
    RhoPack rp = rho_pack(gj);
    SymJet2 inv = detail::inverse(rp.hess);
    const double s1 = sj.partial(mi(1, 0)), s2 = sj.partial(mi(0, 1));
    const double s11 = sj.partial(mi(2, 0)), s12 = sj.partial(mi(1, 1)),
                 s22 = sj.partial(mi(0, 2));
    const double second = inv.a11.value() * s11 + 2.0 * inv.a12.value() * s12 +
                          inv.a22.value() * s22;
    const double first = 4.0 *
                         (gj.u1.value() * s1 + gj.u2.value() * s2) /
                         (gj.w2.value() * gj.u.value());
    return second + first;
}

double calabi_margin(const HalfspaceGraph& graph, std::span<const SamplePoint> samples) {
    double sup = -std::numeric_limits<double>::infinity();
    for (const SamplePoint& x : samples) {
        GraphJets gj = detail::graph_jets(graph, x, 5);
        check_vicinity(gj, x);
        Jet sj = sigma_jet(gj);
        const double sig = sj.value();
        const double lsig = L_sigma(graph, x);
        const double K = gj.K_ext.value();
        sup = std::max(sup, K * K * K * K * (0.5 * sig * sig - lsig));
    }
    return sup;
}

std::pair<double, double> pogorelov_quantities(const HalfspaceGraph& graph,
                                               std::span<const SamplePoint> samples) {
    double sup_k2s = -std::numeric_limits<double>::infinity();
    double sup_kgh = -std::numeric_limits<double>::infinity();
    for (const SamplePoint& x : samples) {
        GraphJets gj = detail::graph_jets(graph, x, 3);
        check_vicinity(gj, x);
        const double sig = sigma_jet(gj).value();
        const double K = gj.K_ext.value();
        const double H1 = gj.H_mean.partial(mi(1, 0)), H2 = gj.H_mean.partial(mi(0, 1));
        sup_k2s = std::max(sup_k2s, K * K * sig);
        sup_kgh = std::max(sup_kgh, K * grad_norm_induced(gj, H1, H2));
    }
    return {sup_k2s, sup_kgh};
}

Kappa1Gradient kappa1_gradient(const HalfspaceGraph& graph, std::span<const double> x,
                               double c0) {
    GraphJets gj = detail::graph_jets(graph, x, 3);
    Jet H = gj.H_mean, K = gj.K_ext;
    Jet disc = H * H - K;
    if (disc.value() < c0)
        throw DegeneracyError("umbilic degeneracy: H^2 - K = " + std::to_string(disc.value()) +
                              " below the floor " + std::to_string(c0));
    Kappa1Gradient out;
    const double s = std::sqrt(disc.value());
    out.kappa1 = H.value() - s;
    // closed-form gradient of the smaller principal curvature
    const double denom = s * (H.value() + s);
    double comp[2];
    for (int i = 0; i < 2; ++i) {
        const MultiIndex a = i == 0 ? mi(1, 0) : mi(0, 1);
        comp[i] = -K.value() * H.partial(a) / denom + K.partial(a) / (2.0 * s);
    }
    out.grad_norm = grad_norm_induced(gj, comp[0], comp[1]);
    // direct route through jets of the same expression
    Jet k1 = H - sqrt(disc);
    out.grad_norm_direct = grad_norm_induced(gj, k1.partial(mi(1, 0)), k1.partial(mi(0, 1)));
    return out;
}

namespace {

double mean_bound_f(const BallPatch& patch, double s, double t, double alpha) {
    detail::BallJets b = detail::ball_jets(patch, s, t, 2);
    return std::exp(alpha * b.lambda.value()) * b.H_mean.value();
}

}  // namespace

MeanBoundReport mean_bound_margin(const BallPatch& patch, double alpha, int grid_n) {
    if (grid_n < 5) throw PreconditionError("maximum search needs a denser grid");
    const double s0 = patch.s_range[0], s1 = patch.s_range[1];
    const double t0 = patch.t_range[0], t1 = patch.t_range[1];
    const double hs = (s1 - s0) / (grid_n - 1), ht = (t1 - t0) / (grid_n - 1);

    // dense scan; on plateaus prefer the sample nearest the rectangle center
    double best = -std::numeric_limits<double>::infinity();
    int bi = 0, bj = 0;
    const double cs = 0.5 * (s0 + s1), ct = 0.5 * (t0 + t1);
    for (int j = 0; j < grid_n; ++j)
        for (int i = 0; i < grid_n; ++i) {
            const double s = s0 + i * hs, t = t0 + j * ht;
            const double f = mean_bound_f(patch, s, t, alpha);
            const bool better =
                f > best + 1e-12 * std::abs(best) ||
                (std::abs(f - best) <= 1e-12 * std::abs(best) &&
                 std::hypot(s - cs, t - ct) <
                     std::hypot(s0 + bi * hs - cs, t0 + bj * ht - ct));
            if (better) {
                best = f;
                bi = i;
                bj = j;
            }
        }

    MeanBoundReport rep;
    rep.f_max = best;
    if (bi == 0 || bj == 0 || bi == grid_n - 1 || bj == grid_n - 1) {
        rep.boundary_max = true;
        rep.param = {s0 + bi * hs, t0 + bj * ht};
        return rep;
    }

    // local quadratic refinement of the interior maximum
    double s = s0 + bi * hs, t = t0 + bj * ht;
    const double fd = std::min(hs, ht) / 10.0;
    for (int it = 0; it < 8; ++it) {
        auto f = [&](double a, double b) { return mean_bound_f(patch, a, b, alpha); };
        const double fs = (f(s + fd, t) - f(s - fd, t)) / (2 * fd);
        const double ft = (f(s, t + fd) - f(s, t - fd)) / (2 * fd);
        const double fss = (f(s + fd, t) - 2 * f(s, t) + f(s - fd, t)) / (fd * fd);
        const double ftt = (f(s, t + fd) - 2 * f(s, t) + f(s, t - fd)) / (fd * fd);
        const double fst =
            (f(s + fd, t + fd) + f(s - fd, t - fd) - f(s + fd, t - fd) - f(s - fd, t + fd)) /
            (4 * fd * fd);
        const double det = fss * ftt - fst * fst;
        if (std::abs(det) < 1e-14) break;
        const double ds = (-ftt * fs + fst * ft) / det;
        const double dt = (fst * fs - fss * ft) / det;
        s = std::clamp(s + ds, s0, s1);
        t = std::clamp(t + dt, t0, t1);
        if (std::abs(ds) + std::abs(dt) < 1e-6) break;
    }
    rep.param = {s, t};
    rep.f_max = mean_bound_f(patch, s, t, alpha);

    detail::BallJets b = detail::ball_jets(patch, s, t, 4);
    rep.x_norm2 = b.x_norm2.value();
    if (rep.x_norm2 >= 0.01)
        throw PreconditionError("smallness hypothesis |X|^2 < 1/100 fails at the maximum: " +
                                std::to_string(rep.x_norm2));
    rep.H_mean = b.H_mean.value();
    rep.K_intrinsic = b.K_intrinsic.value();
    rep.lap_K = detail::laplace_beltrami(b.K_intrinsic, b.E, b.F, b.G);
    const double r2 = rep.x_norm2;
    rep.coefficient_c = 1.0 - alpha * (1.0 + r2) / (1.0 - r2) +
                        6.0 * alpha * alpha * r2 / ((1.0 - r2) * (1.0 - r2));
    rep.coefficient_ok = 4.0 * rep.coefficient_c <= -1.0;
    rep.margin = rep.lap_K + rep.H_mean * rep.H_mean -
                 4.0 * rep.K_intrinsic * (rep.K_intrinsic + 1.0);
    return rep;
}

double small_diameter_threshold(double alpha) {
    return (alpha - 1.0) / (6.0 * alpha * alpha + alpha - 1.0);
}

namespace {

struct NdimPoint {
    double H_trace, R, lapR;
};

NdimPoint ndim_point(const HalfspaceGraph& graph, const SamplePoint& x) {
    GraphJets gj = detail::graph_jets(graph, x, 4);
    NdimPoint p;
    p.H_trace = 2.0 * gj.H_mean.value();
    Jet R = 2.0 * gj.K_ext;  // two-dimensional extrinsic scalar curvature
    p.R = R.value();
    p.lapR = lap_induced(gj, R.truncated(2));
    return p;
}

}  // namespace

double ndim_margin(const HalfspaceGraph& graph, std::span<const SamplePoint> samples, double C1,
                   double C2) {
    double sup = -std::numeric_limits<double>::infinity();
    for (const SamplePoint& x : samples) {
        const NdimPoint p = ndim_point(graph, x);
        sup = std::max(sup, p.H_trace * p.H_trace - C1 * std::abs(p.lapR) -
                                C2 * (p.R * p.R + p.R));
    }
    return sup;
}

double ndim_min_C2(const HalfspaceGraph& graph, std::span<const SamplePoint> samples, double C1) {
    double c2 = 0.0;
    for (const SamplePoint& x : samples) {
        const NdimPoint p = ndim_point(graph, x);
        const double num = p.H_trace * p.H_trace - C1 * std::abs(p.lapR);
        const double den = p.R * p.R + p.R;
        if (den > 1e-12) c2 = std::max(c2, num / den);
    }
    return c2;
}

std::map<std::string, double> rho_identity_residuals(const HalfspaceGraph& graph,
                                                     std::span<const double> x) {
    GraphJets gj = detail::graph_jets(graph, x, 3);
    RhoPack rp = rho_pack(gj);
    const double r11 = rp.hess.a11.value(), r12 = rp.hess.a12.value(),
                 r22 = rp.hess.a22.value();
    const double det = rp.det;
    if (det <= 0.0)
        throw BranchError("rho identities need a definite Hessian branch");

    std::map<std::string, double> res;
    const double w = gj.w.value(), w2 = gj.w2.value(), u = gj.u.value();
    const double K = gj.K_ext.value();

    // log-derivative identity: rho^{ij} rho_ijk = (log m)_k, m = K w^4
    {
        Jet m_jet = gj.K_ext * (gj.w2 * gj.w2);
        Jet logm = log(m_jet);
        const double i11 = r22 / det, i12 = -r12 / det, i22 = r11 / det;
        for (int k = 0; k < 2; ++k) {
            double lhs = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const double inv = (i == j) ? (i == 0 ? i11 : i22) : i12;
                    lhs += inv * rp.third[i][j][k].value();
                }
            const MultiIndex a = k == 0 ? mi(1, 0) : mi(0, 1);
            res[k == 0 ? "log_derivative_1" : "log_derivative_2"] = std::abs(lhs - logm.partial(a));
        }
    }
    // rho_ij = u^2 w h_ij
    {
        const double scale = u * u * w;
        double worst = 0.0;
        worst = std::max(worst, std::abs(scale * gj.h.a11.value() - r11));
        worst = std::max(worst, std::abs(scale * gj.h.a12.value() - r12));
        worst = std::max(worst, std::abs(scale * gj.h.a22.value() - r22));
        res["form_scaling"] = worst;
    }
    // eigenvalue product against the determinant identity
    {
        const double tr = r11 + r22;
        const double gap = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        res["eigen_product"] = std::abs((tr / 2.0 - gap) * (tr / 2.0 + gap) - w2 * w2 * K);
    }
    return res;
}

std::map<std::string, double> identity_suite(const HalfspaceGraph& graph,
                                             std::span<const double> x) {
    GraphJets gj = detail::graph_jets(graph, x, 3);
    RhoPack rp = rho_pack(gj);
    const double r11 = rp.hess.a11.value(), r22 = rp.hess.a22.value();
    const double det = rp.det;
    if (det <= 0.0 || r11 <= 0.0)
        throw BranchError("identity suite requires the positive-definite branch of Hess rho");

    std::map<std::string, double> res = rho_identity_residuals(graph, x);
    const double w = gj.w.value(), w2 = gj.w2.value();
    const double K = gj.K_ext.value(), H = gj.H_mean.value();
    const double tr = r11 + r22;
    const double gap = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    const double lam_min = tr / 2.0 - gap, lam_max = tr / 2.0 + gap;
    const double Htilde = tr / (2.0 * w);
    res["slack_trace_upper"] = 2.0 * Htilde - 2.0 * H;
    res["slack_trace_lower"] = 2.0 * H - 2.0 * Htilde / w2;
    res["slack_eigen_bound"] = 2.0 * w * Htilde - lam_max;
    res["slack_eigen_chain"] = 2.0 * w2 * w * H - 2.0 * w * Htilde;
    const double bound = 2.0 * H / (K * w);
    res["slack_inverse_bound"] = std::min(bound - 1.0 / lam_min, bound - 1.0 / lam_max);
    return res;
}

EstimateReport estimate_report(const HalfspaceGraph& graph, const std::string& family,
                               std::span<const SamplePoint> samples, double c0) {
    EstimateReport rep;
    rep.family = family;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    rep.sup_K2_sigma = rep.sup_K_gradH = rep.sup_calabi = neg_inf;
    rep.sup_H_mean = rep.sup_H_trace = neg_inf;
    for (const SamplePoint& x : samples) {
        GraphJets gj = detail::graph_jets(graph, x, 5);
        EstimatePoint row;
        row.x = x;
        row.K_ext = gj.K_ext.value();
        row.H_mean = gj.H_mean.value();
        row.H_trace = 2.0 * row.H_mean;
        Jet sj = sigma_jet(gj);
        row.sigma = sj.value();
        row.L_sigma = L_sigma(graph, x);
        row.K2_sigma = row.K_ext * row.K_ext * row.sigma;
        row.K_gradH = row.K_ext * grad_norm_induced(gj, gj.H_mean.partial(mi(1, 0)),
                                                    gj.H_mean.partial(mi(0, 1)));
        try {
            Kappa1Gradient kg = kappa1_gradient(graph, x, c0);
            row.kappa1 = kg.kappa1;
            row.grad_kappa1 = kg.grad_norm;
        } catch (const DegeneracyError&) {
            row.kappa1 = std::numeric_limits<double>::quiet_NaN();
            row.grad_kappa1 = std::numeric_limits<double>::quiet_NaN();
        }
        Jet R = 2.0 * gj.K_ext;
        row.R_scalar = R.value();
        row.lap_R = lap_induced(gj, R.truncated(2));
        rep.sup_K2_sigma = std::max(rep.sup_K2_sigma, row.K2_sigma);
        rep.sup_K_gradH = std::max(rep.sup_K_gradH, row.K_gradH);
        rep.sup_calabi = std::max(rep.sup_calabi,
                                  std::pow(row.K_ext, 4) * (0.5 * row.sigma * row.sigma -
                                                            row.L_sigma));
        rep.sup_H_mean = std::max(rep.sup_H_mean, row.H_mean);
        rep.sup_H_trace = std::max(rep.sup_H_trace, row.H_trace);
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace hcap
