#include "hcap/report_io.hpp"

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>

#include "hcap/rng.hpp"

namespace hcap::report {

namespace {

void append_row(std::string& out, const std::vector<double>& vals) {
    for (size_t k = 0; k < vals.size(); ++k) {
        if (k) out += ',';
        out += fmt_double(vals[k]);
    }
    out += '\n';
}

}  // namespace

std::string curvature_csv(const HalfspaceGraph& graph, std::span<const SamplePoint> points) {
    std::string out =
        "x1,x2,u,w,nu_vertical,kappa1,kappa2,kappa_euc1,kappa_euc2,K_ext,H_trace,H_mean,"
        "R_scalar,K_intrinsic\n";
    for (const SamplePoint& p : points) {
        const std::vector<double> x{p[0], p[1]};
        CurvatureReport r = curvature_report(graph, x);
        append_row(out, {p[0], p[1], r.u, r.w, r.nu_vertical, r.kappa[0], r.kappa[1],
                         r.kappa_euc[0], r.kappa_euc[1], r.K_ext, r.H_trace, r.H_mean,
                         r.R_scalar, r.K_intrinsic});
    }
    return out;
}

std::string ball_forms_csv(const BallPatch& patch, std::span<const SamplePoint> points) {
    std::string out = "s,t,E,F,G,L,M,N,K_intrinsic,H_mean,rho,rho_u,rho_v,rho_uu,rho_uv,rho_vv\n";
    for (const SamplePoint& p : points) {
        BallForms f = ball_forms(patch, p[0], p[1]);
        append_row(out, {p[0], p[1], f.E, f.F, f.G, f.L, f.M, f.N, f.K_intrinsic, f.H_mean,
                         f.rho, f.rho_u, f.rho_v, f.rho_uu, f.rho_uv, f.rho_vv});
    }
    return out;
}

namespace {

void identity_rows(std::string& out, const std::string& family, const SamplePoint& p,
                   const std::map<std::string, double>& res, double* worst) {
    for (const auto& [key, val] : res) {
        out += family + ',' + fmt_double(p[0]) + ',' + fmt_double(p[1]) + ',' + key + ',' +
               fmt_double(val) + '\n';
        const bool slack = key.rfind("slack", 0) == 0 || key == "cauchy_schwarz_slack";
        const double excess = slack ? -1e-10 - val : val - 1e-8;
        if (worst) *worst = std::max(*worst, excess);
    }
}

}  // namespace

std::string identities_csv(const SurfaceSpec& spec, std::uint64_t seed, int point_count,
                           double* worst_violation) {
    std::string out = "family,p1,p2,key,value\n";
    double worst = -1.0;
    if (spec.model == SurfaceSpec::Model::Halfspace) {
        const HalfspaceGraph& g = spec.graph;
        auto pts = sample_disc(g.domain.radius * 0.9, seed, point_count);
        const auto* analytic = dynamic_cast<const AnalyticHeight*>(g.height.get());
        for (const SamplePoint& p : pts) {
            const std::vector<double> x{p[0], p[1]};
            Jet vj = Jet::constant(2, 2, 1.0) / g.height_jet(x, 2);
            if (analytic)
                vj = Expr::div(Expr::constant(1.0), analytic->expr())->lift(x, 2);
            identity_rows(out, spec.label, p, comparison_residuals(g, x, vj), &worst);
            RhoHessian rh = rho_hessian(g, x);
            identity_rows(out, spec.label, p, {{"determinant_identity", rh.det_identity_residual}}, &worst);
            try {
                identity_rows(out, spec.label, p, identity_suite(g, x), &worst);
            } catch (const BranchError&) {
                // negative-definite branch: residual identities only
                identity_rows(out, spec.label, p, rho_identity_residuals(g, x), &worst);
            }
        }
    } else {
        const BallPatch& patch = spec.patch;
        auto pts = sample_rect({patch.s_range[0] * 0.9, patch.s_range[1] * 0.9},
                               {patch.t_range[0] * 0.9, patch.t_range[1] * 0.9}, seed,
                               point_count);
        for (const SamplePoint& p : pts) {
            auto [r1, r2] = codazzi_residual(patch, p[0], p[1]);
            std::map<std::string, double> res{{"codazzi_1", std::abs(r1)}, {"codazzi_2", std::abs(r2)}};
            // two-route curvature: eigenvalues of (II, I) against the
            // closed-form quotients
            BallForms f = ball_forms(patch, p[0], p[1]);
            Eigen::Matrix2d h2, g2;
            h2 << f.L, f.M, f.M, f.N;
            g2 << f.E, f.F, f.F, f.G;
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(h2, g2);
            res["gauss_two_route"] = std::abs((es.eigenvalues()[0] * es.eigenvalues()[1] - 1.0) -
                                   f.K_intrinsic);
            res["mean_two_route"] = std::abs(0.5 * (es.eigenvalues()[0] + es.eigenvalues()[1]) - f.H_mean);
            for (auto& [k, v] : support_quantities(patch, p[0], p[1])) res[k] = v;
            try {
                for (auto& [k, v] : conformal_check(patch, p[0], p[1])) res[k] = v;
            } catch (const PreconditionError&) {
                // non-isothermal chart: conformal identities not applicable
            }
            identity_rows(out, spec.label, p, res, &worst);
        }
    }
    if (worst_violation) *worst_violation = worst;
    return out;
}

std::string solution_csv(const GridSolution& sol) {
    std::string out = "x1,x2,u\n";
    const int side = sol.grid.side();
    for (size_t a = 0; a < sol.grid.active_nodes.size(); ++a) {
        const int nd = sol.grid.active_nodes[a];
        append_row(out, {sol.grid.x_of(nd % side), sol.grid.y_of(nd / side), sol.u[a]});
    }
    return out;
}

nlohmann::json continuation_json(const ContinuationResult& result) {
    nlohmann::json stages = nlohmann::json::array();
    for (const StageReport& r : result.reports) {
        nlohmann::json s;
        s["shift"] = r.shift;
        s["converged"] = r.converged;
        s["iterations"] = r.stats.iterations;
        s["final_residual"] = r.stats.final_residual;
        s["damping"] = r.stats.damping;
        s["max_H_mean"] = r.max_H_mean;
        s["max_H_trace"] = r.max_H_trace;
        s["min_K_ext"] = r.min_K_ext;
        s["max_K_ext"] = r.max_K_ext;
        stages.push_back(s);
    }
    nlohmann::json j;
    j["all_converged"] = result.all_converged;
    j["failed_stage"] = result.failed_stage;
    j["stages"] = stages;
    return j;
}

nlohmann::json estimate_report_json(const EstimateReport& rep) {
    nlohmann::json j;
    j["family"] = rep.family;
    j["sup_K2_sigma"] = rep.sup_K2_sigma;
    j["sup_K_gradH"] = rep.sup_K_gradH;
    j["sup_calabi"] = rep.sup_calabi;
    j["sup_H_mean"] = rep.sup_H_mean;
    j["sup_H_trace"] = rep.sup_H_trace;
    j["points"] = rep.rows.size();
    return j;
}

std::string estimate_report_csv(const EstimateReport& rep) {
    std::string out =
        "x1,x2,K_ext,H_mean,H_trace,sigma,L_sigma,K2_sigma,K_gradH,kappa1,grad_kappa1,"
        "R_scalar,lap_R\n";
    for (const EstimatePoint& r : rep.rows)
        append_row(out, {r.x[0], r.x[1], r.K_ext, r.H_mean, r.H_trace, r.sigma, r.L_sigma,
                         r.K2_sigma, r.K_gradH, r.kappa1, r.grad_kappa1, r.R_scalar, r.lap_R});
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
    if (content.empty() || content.back() != '\n') out << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<SamplePoint> sample_disc(double radius, std::uint64_t seed, int count) {
    Rng rng(seed);
    std::vector<SamplePoint> pts{{0.0, 0.0}};
    while (static_cast<int>(pts.size()) < count) {
        auto [x, y] = rng.in_disc(radius);
        pts.push_back({x, y});
    }
    return pts;
}

std::vector<SamplePoint> sample_rect(std::array<double, 2> s_range, std::array<double, 2> t_range,
                                     std::uint64_t seed, int count) {
    Rng rng(seed);
    std::vector<SamplePoint> pts;
    pts.push_back({0.5 * (s_range[0] + s_range[1]), 0.5 * (t_range[0] + t_range[1])});
    while (static_cast<int>(pts.size()) < count)
        pts.push_back({rng.uniform(s_range[0], s_range[1]), rng.uniform(t_range[0], t_range[1])});
    return pts;
}

}  // namespace hcap::report
