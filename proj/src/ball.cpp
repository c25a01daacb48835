#include "hcap/ball.hpp"

#include <cmath>

#include "hcap/errors.hpp"

namespace hcap {

namespace detail {

namespace {

using Vec3J = std::array<Jet, 3>;

Jet dot(const Vec3J& a, const Vec3J& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3J cross(const Vec3J& a, const Vec3J& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Ambient Christoffel contraction of the ball metric, in closed form from
/// the conformal factor: Gamma(a,b)^k = lambda (a^k <x,b> + b^k <x,a> - x^k <a,b>).
Vec3J ambient_gamma(const Jet& lambda, const Vec3J& x, const Vec3J& a, const Vec3J& b) {
    Jet xa = dot(x, a), xb = dot(x, b), ab = dot(a, b);
    Vec3J out;
    for (int k = 0; k < 3; ++k) out[k] = lambda * (a[k] * xb + b[k] * xa - x[k] * ab);
    return out;
}

}  // namespace

BallJets ball_jets(const BallPatch& patch, double s, double t, int order) {
    if (!patch.contains(s, t)) throw GeometryError("parameter point outside the patch rectangle");
    const std::vector<double> p{s, t};
    BallJets b;
    for (int i = 0; i < 3; ++i) b.X[i] = patch.chart[i]->lift(p, order);
    b.x_norm2 = dot(b.X, b.X);
    if (b.x_norm2.value() >= 1.0)
        throw GeometryError("chart leaves the open unit ball: |X|^2 = " +
                            std::to_string(b.x_norm2.value()));
    b.lambda = 2.0 / (1.0 - b.x_norm2);

    for (int i = 0; i < 3; ++i) {
        b.Xs[i] = b.X[i].derivative(0);
        b.Xt[i] = b.X[i].derivative(1);
    }
    Jet lam2 = b.lambda * b.lambda;
    b.E = lam2 * dot(b.Xs, b.Xs);
    b.F = lam2 * dot(b.Xs, b.Xt);
    b.G = lam2 * dot(b.Xt, b.Xt);

    Vec3J cr = cross(b.Xs, b.Xt);
    Jet cr2 = dot(cr, cr);
    if (cr2.value() <= 1e-28)
        throw GeometryError("degenerate chart: X_s x X_t vanishes (immersion failure)");
    Jet crn = sqrt(cr2);
    for (int i = 0; i < 3; ++i) b.normal[i] = cr[i] / crn;

    // hyperbolic unit normal is normal_euc / lambda; pairing any ambient
    // vector v against it in the ball metric gives lambda * <v, normal_euc>.
    Vec3J Xss, Xst, Xtt;
    for (int i = 0; i < 3; ++i) {
        Xss[i] = b.Xs[i].derivative(0);
        Xst[i] = b.Xs[i].derivative(1);
        Xtt[i] = b.Xt[i].derivative(1);
    }
    Vec3J cov_ss = Xss, cov_st = Xst, cov_tt = Xtt;
    {
        Vec3J gss = ambient_gamma(b.lambda, b.X, b.Xs, b.Xs);
        Vec3J gst = ambient_gamma(b.lambda, b.X, b.Xs, b.Xt);
        Vec3J gtt = ambient_gamma(b.lambda, b.X, b.Xt, b.Xt);
        for (int i = 0; i < 3; ++i) {
            cov_ss[i] += gss[i];
            cov_st[i] += gst[i];
            cov_tt[i] += gtt[i];
        }
    }
    b.L = b.lambda * dot(cov_ss, b.normal);
    b.M = b.lambda * dot(cov_st, b.normal);
    b.N = b.lambda * dot(cov_tt, b.normal);

    Jet disc = b.E * b.G - b.F * b.F;
    b.K_intrinsic = (b.L * b.N - b.M * b.M) / disc - 1.0;
    b.H_mean = (b.G * b.L - 2.0 * (b.F * b.M) + b.E * b.N) / (2.0 * disc);
    return b;
}

double laplace_beltrami(const Jet& f, const Jet& E, const Jet& F, const Jet& G) {
    Jet det = E * G - F * F;
    Jet W = sqrt(det);
    Jet f1 = f.derivative(0), f2 = f.derivative(1);
    Jet A = W * ((G * f1 - F * f2) / det);
    Jet B = W * ((E * f2 - F * f1) / det);
    return (A.derivative(0).value() + B.derivative(1).value()) / W.value();
}

std::array<std::array<std::array<double, 2>, 2>, 2> induced_christoffels(const Jet& E,
                                                                         const Jet& F,
                                                                         const Jet& G) {
    double gmat[2][2] = {{E.value(), F.value()}, {F.value(), G.value()}};
    double dg[2][2][2];  // dg[l][i][j] = d_l g_ij
    dg[0][0][0] = E.partial(mi(1, 0));
    dg[1][0][0] = E.partial(mi(0, 1));
    dg[0][0][1] = dg[0][1][0] = F.partial(mi(1, 0));
    dg[1][0][1] = dg[1][1][0] = F.partial(mi(0, 1));
    dg[0][1][1] = G.partial(mi(1, 0));
    dg[1][1][1] = G.partial(mi(0, 1));
    const double det = gmat[0][0] * gmat[1][1] - gmat[0][1] * gmat[1][0];
    double ginv[2][2] = {{gmat[1][1] / det, -gmat[0][1] / det},
                         {-gmat[1][0] / det, gmat[0][0] / det}};
    std::array<std::array<std::array<double, 2>, 2>, 2> gam{};
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double s = 0.0;
                for (int l = 0; l < 2; ++l)
                    s += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                gam[k][i][j] = 0.5 * s;
            }
    return gam;
}

}  // namespace detail

using detail::induced_christoffels;

BallForms ball_forms(const BallPatch& patch, double s, double t) {
    detail::BallJets b = detail::ball_jets(patch, s, t, 3);
    BallForms f;
    f.E = b.E.value();
    f.F = b.F.value();
    f.G = b.G.value();
    f.L = b.L.value();
    f.M = b.M.value();
    f.N = b.N.value();
    f.K_intrinsic = b.K_intrinsic.value();
    f.H_mean = b.H_mean.value();
    f.rho = b.lambda.value();
    f.rho_u = b.lambda.partial(mi(1, 0));
    f.rho_v = b.lambda.partial(mi(0, 1));
    f.rho_uu = b.lambda.partial(mi(2, 0));
    f.rho_uv = b.lambda.partial(mi(1, 1));
    f.rho_vv = b.lambda.partial(mi(0, 2));
    for (int i = 0; i < 3; ++i) {
        f.position[i] = b.X[i].value();
        f.normal_euc[i] = b.normal[i].value();
    }
    if (f.E * f.G - f.F * f.F <= 0.0)
        throw GeometryError("induced metric is not positive definite");
    return f;
}

std::pair<double, double> codazzi_residual(const BallPatch& patch, double s, double t) {
    detail::BallJets b = detail::ball_jets(patch, s, t, 3);
    auto gam = induced_christoffels(b.E, b.F, b.G);
    const double L = b.L.value(), M = b.M.value(), N = b.N.value();
    const double Lv = b.L.partial(mi(0, 1));
    const double Mu = b.M.partial(mi(1, 0));
    const double Mv = b.M.partial(mi(0, 1));
    const double Nu = b.N.partial(mi(1, 0));
    const double r1 =
        Lv - Mu - (L * gam[0][0][1] + M * (gam[1][0][1] - gam[0][0][0]) - N * gam[1][0][0]);
    const double r2 =
        Mv - Nu - (L * gam[0][1][1] + M * (gam[1][1][1] - gam[0][0][1]) - N * gam[1][0][1]);
    return {r1, r2};
}

std::map<std::string, double> conformal_check(const BallPatch& patch, double s, double t) {
    detail::BallJets b = detail::ball_jets(patch, s, t, 3);
    const double E = b.E.value(), F = b.F.value(), G = b.G.value();
    const double scale = std::max({std::abs(E), std::abs(G), 1e-300});
    if (std::abs(E - G) > 1e-10 * scale || std::abs(F) > 1e-10 * scale)
        throw PreconditionError("conformal identities need an isothermal chart (E = G, F = 0); "
                                "got E-G = " + std::to_string(E - G) +
                                ", F = " + std::to_string(F));
    Jet h = 0.5 * log(b.E);
    const double e2h = std::exp(2.0 * h.value());
    const double e4h = e2h * e2h;
    const double L = b.L.value(), M = b.M.value(), N = b.N.value();
    const double K = b.K_intrinsic.value(), H = b.H_mean.value();

    std::map<std::string, double> res;
    res["conformal_gauss"] = std::abs(K - (-1.0 + (L * N - M * M) / e4h));
    res["conformal_mean"] = std::abs(H - (L + N) / (2.0 * e2h));
    const double lap_h = h.partial(mi(2, 0)) + h.partial(mi(0, 2));
    res["conformal_laplacian"] = std::abs(K - (-lap_h / e2h));
    const double h1 = h.partial(mi(1, 0)), h2 = h.partial(mi(0, 1));
    res["conformal_codazzi_1"] = std::abs((b.L.partial(mi(0, 1)) - b.M.partial(mi(1, 0))) -
                            2.0 * H * e2h * h2);
    res["conformal_codazzi_2"] = std::abs((b.M.partial(mi(0, 1)) - b.N.partial(mi(1, 0))) +
                            2.0 * H * e2h * h1);
    return res;
}

std::map<std::string, double> support_quantities(const BallPatch& patch, double s, double t) {
    detail::BallJets b = detail::ball_jets(patch, s, t, 3);
    Jet lam2 = b.lambda * b.lambda;

    // direct derivatives of rho composed with the chart
    const double rho_u = b.lambda.partial(mi(1, 0));
    const double rho_v = b.lambda.partial(mi(0, 1));
    const double rho_uu = b.lambda.partial(mi(2, 0));
    const double rho_uv = b.lambda.partial(mi(1, 1));
    const double rho_vv = b.lambda.partial(mi(0, 2));

    // inner products of the radial field against the frame
    auto hdot = [&](const std::array<Jet, 3>& a, const std::array<Jet, 3>& c) {
        return (lam2 * (a[0] * c[0] + a[1] * c[1] + a[2] * c[2])).value();
    };
    const double r_Xu = hdot(b.X, b.Xs);
    const double r_Xv = hdot(b.X, b.Xt);
    // hyperbolic pairing against the unit normal: lambda <r, n_euc>
    const double r_nrm =
        (b.lambda * (b.X[0] * b.normal[0] + b.X[1] * b.normal[1] + b.X[2] * b.normal[2])).value();
    const double r_r = hdot(b.X, b.X);

    auto gam = induced_christoffels(b.E, b.F, b.G);
    const double radial_coef = (1.0 + b.x_norm2.value()) / (1.0 - b.x_norm2.value());
    const double E = b.E.value(), F = b.F.value(), G = b.G.value();
    const double L = b.L.value(), M = b.M.value(), N = b.N.value();

    std::map<std::string, double> res;
    res["rho_u"] = std::abs(rho_u - r_Xu);
    res["rho_v"] = std::abs(rho_v - r_Xv);
    res["rho_uu"] = std::abs(rho_uu - (radial_coef * E + gam[0][0][0] * rho_u +
                                       gam[1][0][0] * rho_v + L * r_nrm));
    res["rho_uv"] = std::abs(rho_uv - (radial_coef * F + gam[0][0][1] * rho_u +
                                       gam[1][0][1] * rho_v + M * r_nrm));
    res["rho_vv"] = std::abs(rho_vv - (radial_coef * G + gam[0][1][1] * rho_u +
                                       gam[1][1][1] * rho_v + N * r_nrm));

    // Cauchy-Schwarz slack in an orthonormal tangent frame: the projection of
    // the radial field cannot exceed its full length.
    const double c1 = r_Xu / std::sqrt(E);
    // Gram-Schmidt second leg: X_t - (F/E) X_s, hyperbolic norm sqrt(G - F^2/E)
    const double n2 = std::sqrt(G - F * F / E);
    const double c2 = (r_Xv - (F / E) * r_Xu) / n2;
    res["cauchy_schwarz_slack"] = r_r - c1 * c1 - c2 * c2;
    return res;
}

}  // namespace hcap
