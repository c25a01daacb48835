#include <CLI11.hpp>

#include "hcap/surface_spec.hpp"

int main(int argc, char** argv) {
    CLI::App app{"hyperbolic graph curvature toolkit"};
    app.require_subcommand(1);

    hcap::RunConfig cfg;

    auto add_common = [&](CLI::App* sub, bool needs_spec) {
        auto* opt = sub->add_option("--spec", cfg.spec_path, "input spec file (JSON)");
        if (needs_spec) opt->required();
        sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "seed for the sampled point sets")
            ->capture_default_str();
    };

    auto* curvature = app.add_subcommand("curvature", "curvature tables for a surface spec");
    add_common(curvature, true);

    auto* identities =
        app.add_subcommand("identities", "identity residual sweep over a surface spec");
    add_common(identities, true);
    identities->add_flag("--check", cfg.check, "exit nonzero when any residual gate fails");

    auto* transform =
        app.add_subcommand("transform", "normalize a ball patch point into a vertical graph");
    add_common(transform, true);
    transform->add_option("--at", cfg.at, "parameter point (s t)");
    transform->add_option("--target-height", cfg.target_height, "image height of the point")
        ->capture_default_str();

    auto* solve = app.add_subcommand("solve", "prescribed-curvature Dirichlet solve");
    add_common(solve, true);
    double dx = 0.0, tol = 0.0;
    solve->add_option("--dx", dx, "grid spacing override");
    solve->add_option("--tol", tol, "Newton tolerance override");

    auto* estimates =
        app.add_subcommand("estimates", "estimate quantities over a surface or problem spec");
    add_common(estimates, true);
    estimates->add_option("--dx", dx, "grid spacing override");
    estimates->add_option("--tol", tol, "Newton tolerance override");
    estimates->add_flag("--check", cfg.check, "exit nonzero when boundedness regressions fail");

    auto* verify = app.add_subcommand("verify-all", "run the full acceptance battery");
    add_common(verify, false);

    CLI11_PARSE(app, argc, argv);

    if (dx > 0.0) cfg.dx_override = dx;
    if (tol > 0.0) cfg.tol_override = tol;
    cfg.subcommand = app.get_subcommands().front()->get_name();
    return hcap::run(cfg);
}
