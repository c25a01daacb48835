#include <cstdio>
#include <fstream>

#include "hcap/acceptance.hpp"
#include "hcap/estimates.hpp"
#include "hcap/report_io.hpp"
#include "hcap/surface_spec.hpp"
#include "hcap/transform.hpp"

namespace hcap {

namespace {

using report::write_file;

int run_curvature(const RunConfig& cfg) {
    SurfaceSpec spec = SurfaceSpec::load(cfg.spec_path);
    if (spec.model == SurfaceSpec::Model::Halfspace) {
        auto pts = report::sample_disc(0.9 * spec.graph.domain.radius, cfg.seed, 21);
        write_file(cfg.out_dir + "/curvature.csv", report::curvature_csv(spec.graph, pts));
    } else {
        auto pts = report::sample_rect({0.9 * spec.patch.s_range[0], 0.9 * spec.patch.s_range[1]},
                                       {0.9 * spec.patch.t_range[0], 0.9 * spec.patch.t_range[1]},
                                       cfg.seed, 21);
        write_file(cfg.out_dir + "/curvature.csv", report::ball_forms_csv(spec.patch, pts));
    }
    std::printf("wrote %s/curvature.csv\n", cfg.out_dir.c_str());
    return 0;
}

void write_failure_manifest(const std::string& out_dir, const std::string& subcommand,
                            const nlohmann::json& detail) {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["status"] = "failed";
    j["detail"] = detail;
    write_file(out_dir + "/failure.json", j.dump(2));
}

int run_identities(const RunConfig& cfg) {
    SurfaceSpec spec = SurfaceSpec::load(cfg.spec_path);
    double worst = 0.0;
    write_file(cfg.out_dir + "/identities.csv", report::identities_csv(spec, cfg.seed, 100, &worst));
    std::printf("wrote %s/identities.csv (worst gate excess %.3g)\n", cfg.out_dir.c_str(), worst);
    if (cfg.check && worst > 0.0) {
        write_failure_manifest(cfg.out_dir, "identities", {{"worst_gate_excess", worst}});
        std::printf("identity gate FAILED\n");
        return 1;
    }
    return 0;
}

int run_transform(const RunConfig& cfg) {
    SurfaceSpec spec = SurfaceSpec::load(cfg.spec_path);
    if (spec.model != SurfaceSpec::Model::Ball) {
        std::fprintf(stderr, "transform needs a ball-model surface spec\n");
        return 2;
    }
    auto [motion, graph] = normalize_neighborhood(spec.patch, cfg.at[0], cfg.at[1],
                                                  cfg.target_height);
    nlohmann::json rec = transform_record(spec.patch, motion, graph.domain.radius,
                                          {cfg.at[0], cfg.at[1]}, cfg.target_height);
    const std::vector<double> origin{0.0, 0.0};
    CurvatureReport r = curvature_report(graph, origin);
    rec["image_check"] = {{"u0", r.u}, {"kappa", {r.kappa[0], r.kappa[1]}}};
    write_file(cfg.out_dir + "/transform.json", rec.dump(2));
    std::printf("wrote %s/transform.json (u0 = %s, kappa = [%s, %s])\n", cfg.out_dir.c_str(),
                fmt_double(r.u).c_str(), fmt_double(r.kappa[0]).c_str(),
                fmt_double(r.kappa[1]).c_str());
    return 0;
}

int run_solve(const RunConfig& cfg) {
    SolveSpec spec = SolveSpec::load(cfg.spec_path);
    if (cfg.dx_override) spec.dx = *cfg.dx_override;
    if (cfg.tol_override) spec.tol = *cfg.tol_override;
    ContinuationResult cr = continuation(spec.problem, spec.shifts, spec.tol, spec.dx);
    write_file(cfg.out_dir + "/stages.json", report::continuation_json(cr).dump(2));
    if (!cr.stages.empty())
        write_file(cfg.out_dir + "/solution.csv", report::solution_csv(cr.stages.back()));
    std::printf("wrote %s/stages.json (%zu/%zu stages converged)\n", cfg.out_dir.c_str(),
                cr.stages.size(), spec.shifts.size());
    if (!cr.all_converged)
        write_failure_manifest(cfg.out_dir, "solve", {{"failed_stage", cr.failed_stage}});
    return cr.all_converged ? 0 : 1;
}

int run_estimates(const RunConfig& cfg) {
    nlohmann::json j;
    {
        std::ifstream in(cfg.spec_path);
        if (!in) {
            std::fprintf(stderr, "cannot open %s\n", cfg.spec_path.c_str());
            return 2;
        }
        in >> j;
    }
    if (j.contains("K")) {
        // continuation mode: per-stage estimate sweeps with the boundedness
        // regression gates
        SolveSpec spec = SolveSpec::from_json(j);
        if (cfg.dx_override) spec.dx = *cfg.dx_override;
        if (cfg.tol_override) spec.tol = *cfg.tol_override;
        ContinuationResult cr = continuation(spec.problem, spec.shifts, spec.tol, spec.dx);
        nlohmann::json out;
        out["stages"] = nlohmann::json::array();
        std::vector<double> k2s, kgh, calabi;
        for (const GridSolution& sol : cr.stages) {
            GridHeight fit(sol);
            const double radius = std::min(0.32, fit.usable_radius());
            if (radius <= 0.0) {
                std::fprintf(stderr,
                             "grid too coarse for quintic windows; decrease --dx\n");
                return 1;
            }
            HalfspaceGraph graph(std::make_shared<GridHeight>(fit), Domain::disc(radius),
                                 Orientation::Downward);
            std::vector<SamplePoint> pts;
            for (int jj = 0; jj < 7; ++jj)
                for (int ii = 0; ii < 7; ++ii) {
                    const double x = -radius + 2.0 * radius * ii / 6.0;
                    const double y = -radius + 2.0 * radius * jj / 6.0;
                    if (x * x + y * y <= radius * radius * 0.98) pts.push_back({x, y});
                }
            auto [a, b] = pogorelov_quantities(graph, pts);
            const double cal = calabi_margin(graph, pts);
            k2s.push_back(a);
            kgh.push_back(b);
            calabi.push_back(cal);
            out["stages"].push_back({{"shift", sol.shift},
                                     {"sup_K2_sigma", a},
                                     {"sup_K_gradH", b},
                                     {"sup_calabi", cal}});
        }
        auto med = [](std::vector<double> v) {
            std::sort(v.begin(), v.end());
            return v.size() % 2 ? v[v.size() / 2]
                                : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
        };
        auto tail = [](const std::vector<double>& v) {
            double m = -1e300;
            for (size_t k = v.size() >= 3 ? v.size() - 3 : 0; k < v.size(); ++k)
                m = std::max(m, v[k]);
            return m;
        };
        bool ok = cr.all_converged;
        for (auto* seq : {&k2s, &kgh, &calabi})
            ok = ok && (tail(*seq) <= 2.0 * med(*seq) || tail(*seq) <= 1e-12);
        out["bounded"] = ok;
        write_file(cfg.out_dir + "/estimates.json", out.dump(2));
        std::printf("wrote %s/estimates.json (bounded = %s)\n", cfg.out_dir.c_str(),
                    ok ? "true" : "false");
        if (cfg.check && !ok) {
            write_failure_manifest(cfg.out_dir, "estimates",
                                   {{"bounded", false}, {"converged", cr.all_converged}});
            return 1;
        }
        return 0;
    }
    SurfaceSpec spec = SurfaceSpec::from_json(j);
    if (spec.model != SurfaceSpec::Model::Halfspace) {
        std::fprintf(stderr, "estimates needs a halfspace surface or a problem spec\n");
        return 2;
    }
    auto pts = report::sample_disc(0.85 * spec.graph.domain.radius, cfg.seed, 30);
    EstimateReport rep = estimate_report(spec.graph, spec.label, pts);
    write_file(cfg.out_dir + "/estimates.csv", report::estimate_report_csv(rep));
    write_file(cfg.out_dir + "/estimates.json", report::estimate_report_json(rep).dump(2));
    std::printf("wrote %s/estimates.{csv,json}\n", cfg.out_dir.c_str());
    return 0;
}

int run_verify_all(const RunConfig& cfg) {
    auto results = run_acceptance(cfg.seed, cfg.out_dir);
    nlohmann::json manifest = nlohmann::json::array();
    bool all = true;
    for (const CriterionResult& r : results) {
        std::printf("%s\n", format_result_line(r).c_str());
        manifest.push_back({{"id", r.id},
                            {"name", r.name},
                            {"pass", r.pass},
                            {"seconds", r.seconds},
                            {"detail", r.detail}});
        all = all && r.pass;
    }
    write_file(cfg.out_dir + "/verify_manifest.json", manifest.dump(2));
    std::printf("%s\n", all ? "all criteria passed" : "FAILURES present");
    return all ? 0 : 1;
}

}  // namespace

int run(const RunConfig& cfg) {
    try {
        if (cfg.subcommand == "curvature") return run_curvature(cfg);
        if (cfg.subcommand == "identities") return run_identities(cfg);
        if (cfg.subcommand == "transform") return run_transform(cfg);
        if (cfg.subcommand == "solve") return run_solve(cfg);
        if (cfg.subcommand == "estimates") return run_estimates(cfg);
        if (cfg.subcommand == "verify-all") return run_verify_all(cfg);
        std::fprintf(stderr, "unknown subcommand '%s'\n", cfg.subcommand.c_str());
        return 2;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "spec error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace hcap
