#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "nsg/cli.hpp"

namespace {

// shared flags live on every subcommand so "nsg orth --space ... x y" works
void add_common(CLI::App* cmd, nsg::cli::RunConfig& cfg, std::string& backend,
                std::string& output) {
    cmd->add_option("--space", cfg.space_path, "space definition file (JSON)")->required();
    cmd->add_option("--output", output, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--seed", cfg.seed, "seed for reproducible sampling order");
    cmd->add_option("--backend", backend, "arithmetic backend: auto, exact, or float")
        ->check(CLI::IsMember({"auto", "exact", "float"}));
    cmd->add_option("--eps-abs", cfg.tol.eps_abs, "absolute tolerance for norm comparisons");
    cmd->add_option("--eps-flat", cfg.tol.eps_flat, "flatness threshold for strictness checks");
    cmd->add_option("--tau-min", cfg.tol.tau_min, "smallest strictness probe step");
    cmd->add_option("--grid-2d", cfg.tol.grid_2d, "2-d direction grid resolution");
    cmd->add_option("--grid-3d", cfg.tol.grid_3d, "3-d direction grid resolution");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"normed-space geometry toolkit: orthogonality, exposedness, and the "
                 "basis/operator constructions built on them"};
    app.require_subcommand(1);

    nsg::cli::RunConfig cfg;
    nsg::cli::apply_env_overrides(cfg.tol);
    std::string backend = "auto";
    std::string output = "text";

    struct Sub {
        CLI::App* app;
        nsg::cli::Command command;
    };
    std::vector<Sub> subs;
    const auto make = [&](const std::string& name, const std::string& help,
                          nsg::cli::Command command) {
        CLI::App* c = app.add_subcommand(name, help);
        add_common(c, cfg, backend, output);
        subs.push_back({c, command});
        return c;
    };

    make("norm", "evaluate the norm of one or more vectors", nsg::cli::Command::norm)
        ->add_option("vectors", cfg.vector_args, "vectors, e.g. 1,0 or 3/4,-2")
        ->expected(-1);
    make("orth", "Birkhoff-James and strong orthogonality of x to y; with three or more "
                 "vectors, the strong-orthogonality check relative to the first",
         nsg::cli::Command::orth)
        ->add_option("vectors", cfg.vector_args, "vectors x y [z ...]")
        ->expected(-1);
    make("classify", "extreme/exposed classification of a unit vector",
         nsg::cli::Command::classify)
        ->add_option("vectors", cfg.vector_args, "the point to classify")
        ->expected(-1);
    make("basis", "strongly orthonormal basis relative to an exposed unit vector",
         nsg::cli::Command::basis)
        ->add_option("vectors", cfg.vector_args, "the distinguished point")
        ->expected(-1);
    make("operator", "norm-one operator fixing the point and halving its complement",
         nsg::cli::Command::op)
        ->add_option("vectors", cfg.vector_args, "the fixed point")
        ->expected(-1);
    make("roundtrip", "run the exposed/basis/operator equivalence end to end",
         nsg::cli::Command::roundtrip)
        ->add_option("vectors", cfg.vector_args, "the point to round-trip")
        ->expected(-1);
    CLI::App* probe = make("probe", "strict-convexity probe of the whole sphere",
                           nsg::cli::Command::probe);
    probe->add_option("--samples", cfg.probe_samples, "sphere resolution for the probe");

    CLI11_PARSE(app, argc, argv);

    for (const auto& s : subs)
        if (s.app->parsed()) cfg.command = s.command;
    if (backend == "exact") cfg.backend = nsg::BackendRequest::exact;
    if (backend == "float") cfg.backend = nsg::BackendRequest::floating;
    cfg.json_output = output == "json";

    const nsg::cli::RunResult result = nsg::cli::run(cfg);
    if (result.exit_code == nsg::cli::kExitComputed)
        std::cout << result.text;
    else
        std::cerr << result.text;
    return result.exit_code;
}
