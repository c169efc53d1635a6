#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "magneu/pipeline.hpp"

namespace {

// exit codes: 0 all verdicts pass, 1 a verdict fails, 2 pipeline error
constexpr int kPass = 0;
constexpr int kVerdictFail = 1;
constexpr int kError = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
}

magneu::ExperimentConfig load(const CommonArgs& args) {
    magneu::ExperimentConfig cfg = magneu::parse_config_file(args.config_path);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"magneu: magnetic Neumann eigenvalues and level-line verification"};
    app.require_subcommand(1);

    CommonArgs fk_args, bs_args, cv_args, mono_args, mesh_args;
    CLI::App* fk = app.add_subcommand(
        "reverse-fk", "run the full eigenvalue comparison chain per domain");
    add_common(fk, fk_args);
    CLI::App* bs = app.add_subcommand(
        "beta-star", "locate the radial/non-radial crossing of the disk ground state");
    add_common(bs, bs_args);
    CLI::App* cv =
        app.add_subcommand("convergence", "mesh and grid refinement studies");
    add_common(cv, cv_args);
    CLI::App* mono = app.add_subcommand(
        "monotonicity", "kappa_1 decrease along increasing-G paths, with derivatives");
    add_common(mono, mono_args);
    CLI::App* mesh =
        app.add_subcommand("mesh-export", "write meshes in the plain-text format");
    add_common(mesh, mesh_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fk->parsed()) {
            const auto cfg = load(fk_args);
            const auto report = magneu::run_reverse_fk(cfg, cfg.out_dir);
            for (const auto& c : report.cases)
                std::printf("%-28s beta=%-6g h=%-6g %s [%s]\n", c.domain.c_str(), c.beta,
                            c.h, c.pass ? "PASS" : "FAIL", c.regime.c_str());
            std::printf("report: %s/report.txt\n", cfg.out_dir.c_str());
            return report.all_pass ? kPass : kVerdictFail;
        }
        if (bs->parsed()) {
            const auto cfg = load(bs_args);
            const auto report = magneu::run_beta_star(cfg, cfg.out_dir);
            std::printf("beta_star = %.6f (reference 3.84754) %s\n", report.beta_star,
                        report.pass ? "PASS" : "FAIL");
            return report.pass ? kPass : kVerdictFail;
        }
        if (cv->parsed()) {
            const auto cfg = load(cv_args);
            const auto report = magneu::run_convergence(cfg, cfg.out_dir);
            std::printf("fem order %.2f, sl order %.2f, G deviation %s -> %s\n",
                        report.fem_order, report.sl_order,
                        report.g_decreasing ? "decreasing" : "NOT decreasing",
                        report.pass ? "PASS" : "FAIL");
            return report.pass ? kPass : kVerdictFail;
        }
        if (mono->parsed()) {
            const auto cfg = load(mono_args);
            const auto report = magneu::run_monotonicity(cfg, cfg.out_dir);
            for (const auto& c : report.cases)
                std::printf("%-28s min decrement %.3e %s\n", c.name.c_str(),
                            c.sweep.min_decrement, c.pass ? "PASS" : "FAIL");
            return report.all_pass ? kPass : kVerdictFail;
        }
        if (mesh->parsed()) {
            const auto cfg = load(mesh_args);
            const auto files = magneu::run_mesh_export(cfg, cfg.out_dir);
            for (const auto& f : files) std::printf("wrote %s/%s\n", cfg.out_dir.c_str(), f.c_str());
            return kPass;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kError;
    }
    return kError;
}
