#include "magneu/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "magneu/fem.hpp"

namespace magneu {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * kPi;

std::string slug(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (c == '.') {
            out.push_back('p');
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / name);
    if (!out) throw PipelineError("output", "cannot create " + dir + "/" + name);
    return out;
}

LinkVerdict make_link(std::string name, double lhs, double rhs, double tol) {
    LinkVerdict v;
    v.name = std::move(name);
    v.lhs = lhs;
    v.rhs = rhs;
    v.slack = rhs - lhs;
    v.tolerance = tol;
    v.holds = lhs <= rhs + tol;
    v.strict = v.slack > tol;
    return v;
}

std::string link_text(const LinkVerdict& v, bool want_equality) {
    std::ostringstream os;
    os << v.name << ": lhs=" << fmt(v.lhs) << " rhs=" << fmt(v.rhs)
       << " slack=" << fmt(v.slack) << " tol=" << fmt(v.tolerance) << " -> ";
    if (want_equality)
        os << (std::abs(v.slack) <= v.tolerance ? "equality within tol" : "NOT an equality");
    else if (!v.holds)
        os << "VIOLATED";
    else
        os << (v.strict ? "holds strictly" : "holds within tol");
    return os.str();
}

struct StageRunner {
    std::string stage;
    template <typename F>
    auto operator()(const std::string& name, F&& f) -> decltype(f()) {
        try {
            return f();
        } catch (const PipelineError&) {
            throw;
        } catch (const std::exception& e) {
            throw PipelineError(stage + "/" + name, e.what());
        }
    }
};

}  // namespace

FKReport run_reverse_fk(const ExperimentConfig& config, const std::string& out_dir) {
    if (config.domains.empty())
        throw ConfigError("reverse-fk needs at least one domain");
    FKReport report;
    report.all_pass = true;
    std::ofstream summary = open_out(out_dir, "report.txt");
    std::ofstream chain = open_out(out_dir, "chain.csv");
    chain << "domain,beta,h,area,within_theorem,lambda_fem,kappa_g,kappa_4pi,"
             "lambda_disk,disk_mode,fem_delta,g_delta,sl_delta,tol_link,"
             "slack_fem_vs_g,slack_g_vs_disk,slack_disk_eq,min_g,max_g,pass\n";

    for (const DomainSpec& domain : config.domains) {
        for (double beta : config.betas) {
            for (double h : config.hs) {
                FKCase c;
                c.domain = domain.describe();
                c.beta = beta;
                c.h = h;
                StageRunner run{c.domain + " beta=" + fmt(beta) + " h=" + fmt(h)};

                c.area = area(domain);
                c.r_star = equivalent_disk(domain);
                c.within_theorem = beta * c.area <= kBetaStarReference * kPi;
                c.regime = c.within_theorem ? "in-theorem" : "conjecture regime";
                // Above the radial threshold even the disk drops below
                // kappa_1(4pi, beta): its ground state is no longer radial,
                // so equalities are expected only inside the hypothesis.
                c.expect_equalities =
                    domain.kind() == DomainSpec::Kind::disk && c.within_theorem;

                const Mesh mesh = run("mesh", [&] { return build_mesh(domain, h); });
                const Mesh fine = run("mesh", [&] { return build_mesh(domain, h / 2.0); });

                const ScalarField psi = run("torsion", [&] { return solve_torsion(mesh); });
                const ScalarField psi_f =
                    run("torsion", [&] { return solve_torsion(fine); });

                const double lambda = run("fem", [&] {
                    return magnetic_eigs(mesh, vector_potential_torsion(psi), beta, 1)
                        .eigenvalues(0);
                });
                const double lambda_f = run("fem", [&] {
                    return magnetic_eigs(fine, vector_potential_torsion(psi_f), beta, 1)
                        .eigenvalues(0);
                });
                c.lambda_fem = lambda;
                c.fem_delta = std::abs(lambda - lambda_f);

                const LevelProfile levels =
                    run("levelset", [&] { return level_profile(psi, config.n_levels); });
                const LevelProfile levels_f = run(
                    "levelset", [&] { return level_profile(psi_f, config.n_levels); });
                const GProfile g = run("levelset", [&] { return g_profile(levels); });
                const GProfile g_f = run("levelset", [&] { return g_profile(levels_f); });
                c.min_g = g.min_value();
                c.max_g = g.max_value();

                const SLProblem slp =
                    run("sturm", [&] { return SLProblem::from_profile(g, beta); });
                c.kappa_g = run("sturm", [&] {
                    return sl_eigs(slp, 1, config.n_grid).eigenvalues(0);
                });
                const double kappa_fine_grid = run("sturm", [&] {
                    return sl_eigs(slp, 1, 2 * config.n_grid).eigenvalues(0);
                });
                c.sl_delta = std::abs(c.kappa_g - kappa_fine_grid);
                const double kappa_gf = run("sturm", [&] {
                    return sl_eigs(SLProblem::from_profile(g_f, beta), 1, config.n_grid)
                        .eigenvalues(0);
                });
                c.g_delta = std::abs(c.kappa_g - kappa_gf);

                c.kappa_disk_g =
                    run("sturm", [&] { return kappa_disk(beta, c.area, config.n_grid); });
                const DiskLambda dl = run("sturm", [&] {
                    return disk_lambda1(beta, c.r_star, config.n_max, config.n_grid);
                });
                c.lambda_disk = dl.lambda;
                c.disk_mode = dl.n_argmin;

                c.tol_link = 2.0 * (c.fem_delta + c.g_delta + c.sl_delta);
                c.link_fem_vs_g =
                    make_link("lambda_1(Omega) <= kappa_1(G_Omega)", c.lambda_fem,
                              c.kappa_g, c.tol_link);
                c.link_g_vs_disk = make_link("kappa_1(G_Omega) <= kappa_1(4pi)",
                                             c.kappa_g, c.kappa_disk_g, c.tol_link);
                const double tol_eq =
                    1e-5 * (1.0 + std::abs(c.kappa_disk_g)) + 2.0 * c.sl_delta;
                c.link_disk_equal = make_link("kappa_1(4pi) = lambda_1(Omega*)",
                                              c.kappa_disk_g, c.lambda_disk, tol_eq);

                if (c.expect_equalities) {
                    c.pass = std::abs(c.link_fem_vs_g.slack) <= c.tol_link &&
                             std::abs(c.link_g_vs_disk.slack) <= c.tol_link;
                } else if (c.within_theorem) {
                    c.pass = c.link_fem_vs_g.holds && c.link_fem_vs_g.strict &&
                             c.link_g_vs_disk.holds && c.link_g_vs_disk.strict;
                } else {
                    // conjecture regime: the chain inequalities still hold,
                    // but no strictness or equality is asserted
                    c.pass = c.link_fem_vs_g.holds && c.link_g_vs_disk.holds;
                }
                if (c.within_theorem)
                    c.pass = c.pass && std::abs(c.link_disk_equal.slack) <= tol_eq;

                // per-case data files
                const std::string base =
                    slug(c.domain) + "_b" + slug(fmt(beta)) + "_h" + slug(fmt(h));
                {
                    auto f1 = open_out(out_dir, base + "_levels.csv");
                    export_level_csv(levels, f1);
                    auto f2 = open_out(out_dir, base + "_g.csv");
                    export_g_csv(g, f2);
                }

                summary << "case " << c.domain << " beta=" << fmt(beta)
                        << " h=" << fmt(h) << " [" << c.regime << "]\n";
                summary << "  area=" << fmt(c.area) << " R*=" << fmt(c.r_star)
                        << " minG/4pi=" << fmt(c.min_g / kFourPi)
                        << " maxG/4pi=" << fmt(c.max_g / kFourPi) << "\n";
                summary << "  lambda_fem=" << fmt(c.lambda_fem)
                        << " kappa_G=" << fmt(c.kappa_g)
                        << " kappa_4pi=" << fmt(c.kappa_disk_g)
                        << " lambda_disk=" << fmt(c.lambda_disk) << " (mode n="
                        << c.disk_mode << ")\n";
                summary << "  deltas: fem=" << fmt(c.fem_delta)
                        << " g=" << fmt(c.g_delta) << " sl=" << fmt(c.sl_delta)
                        << " tol_link=" << fmt(c.tol_link) << "\n";
                summary << "  " << link_text(c.link_fem_vs_g, c.expect_equalities) << "\n";
                summary << "  " << link_text(c.link_g_vs_disk, c.expect_equalities) << "\n";
                if (c.within_theorem) {
                    summary << "  " << link_text(c.link_disk_equal, true) << "\n";
                } else {
                    summary << "  final link skipped (beta |Omega| > beta* pi); observed "
                            << "lambda_disk - kappa_4pi = "
                            << fmt(c.lambda_disk - c.kappa_disk_g) << " [conjecture regime]\n";
                }
                summary << "  verdict: " << (c.pass ? "PASS" : "FAIL") << "\n\n";

                chain << slug(c.domain) << ',' << fmt(beta) << ',' << fmt(h) << ','
                      << fmt(c.area) << ',' << (c.within_theorem ? 1 : 0) << ','
                      << fmt(c.lambda_fem) << ',' << fmt(c.kappa_g) << ','
                      << fmt(c.kappa_disk_g) << ',' << fmt(c.lambda_disk) << ','
                      << c.disk_mode << ',' << fmt(c.fem_delta) << ',' << fmt(c.g_delta)
                      << ',' << fmt(c.sl_delta) << ',' << fmt(c.tol_link) << ','
                      << fmt(c.link_fem_vs_g.slack) << ',' << fmt(c.link_g_vs_disk.slack)
                      << ',' << fmt(c.link_disk_equal.slack) << ',' << fmt(c.min_g) << ','
                      << fmt(c.max_g) << ',' << (c.pass ? 1 : 0) << '\n';

                report.all_pass = report.all_pass && c.pass;
                report.cases.push_back(std::move(c));
            }
        }
    }
    summary << (report.all_pass ? "ALL CASES PASS\n" : "SOME CASES FAIL\n");
    return report;
}

BetaStarReport run_beta_star(const ExperimentConfig& config, const std::string& out_dir) {
    BetaStarReport report;
    report.tolerance = config.beta_star_tol;
    StageRunner run{"beta-star"};
    report.beta_star = run("bisection", [&] {
        return beta_star(config.beta_star_tol, config.beta_star_grid, config.n_max);
    });

    for (double b = 0.5; b <= 5.0 + 1e-12; b += 0.25) {
        report.betas.push_back(b);
        report.kappa_radial.push_back(
            run("table", [&] { return disk_radial_kappa(0, b, 1.0, config.beta_star_grid); }));
        double best = std::numeric_limits<double>::max();
        int best_n = 1;
        for (int n = -config.n_max; n <= config.n_max; ++n) {
            if (n == 0) continue;
            const double k = run("table", [&] {
                return disk_radial_kappa(n, b, 1.0, config.beta_star_grid);
            });
            if (k < best) {
                best = k;
                best_n = n;
            }
        }
        report.kappa_best_n.push_back(best);
        report.argmin_n.push_back(best_n);
    }
    report.pass = std::abs(report.beta_star - kBetaStarReference) <=
                      std::max(config.beta_star_tol, 1e-3) &&
                  report.beta_star >= 1.0;

    std::ofstream csv = open_out(out_dir, "beta_star.csv");
    csv << "beta,kappa_radial,kappa_best_nonzero,argmin_n\n";
    for (std::size_t i = 0; i < report.betas.size(); ++i)
        csv << fmt(report.betas[i]) << ',' << fmt(report.kappa_radial[i]) << ','
            << fmt(report.kappa_best_n[i]) << ',' << report.argmin_n[i] << '\n';

    std::ofstream txt = open_out(out_dir, "beta_star.txt");
    txt << "beta_star = " << fmt(report.beta_star) << " (bisection tol "
        << fmt(report.tolerance) << ", grid " << config.beta_star_grid << ", |n| <= "
        << config.n_max << ")\n";
    txt << "reference 3.84754, deviation " << fmt(report.beta_star - kBetaStarReference)
        << "\n";
    txt << "verdict: " << (report.pass ? "PASS" : "FAIL") << "\n";
    return report;
}

ConvergenceReport run_convergence(const ExperimentConfig& config,
                                  const std::string& out_dir) {
    ConvergenceReport report;
    StageRunner run{"convergence"};
    const DomainSpec disk = DomainSpec::disk(1.0);
    const double beta = 1.0;

    std::vector<double> hs = config.hs;
    if (hs.size() < 3) hs = {0.1, 0.05, 0.025};
    std::sort(hs.rbegin(), hs.rend());
    hs.resize(3);

    for (double h : hs) {
        const Mesh mesh = run("mesh", [&] { return build_mesh(disk, h); });
        const ScalarField psi = run("torsion", [&] { return solve_torsion(mesh); });
        report.fem_h.push_back(h);
        report.fem_lambda.push_back(run("fem", [&] {
            return magnetic_eigs(mesh, vector_potential_torsion(psi), beta, 1)
                .eigenvalues(0);
        }));
        const GProfile g = run("levelset", [&] {
            return g_profile(level_profile(psi, config.n_levels));
        });
        double dev = 0.0;
        for (double v : g.g) dev = std::max(dev, std::abs(v - kFourPi) / kFourPi);
        report.g_h.push_back(h);
        report.g_supdev.push_back(dev);
    }
    report.fem_order = std::log2(std::abs(
        (report.fem_lambda[0] - report.fem_lambda[1]) /
        (report.fem_lambda[1] - report.fem_lambda[2])));
    report.g_decreasing =
        report.g_supdev[1] < report.g_supdev[0] && report.g_supdev[2] < report.g_supdev[1];

    const SLProblem slp = SLProblem::with_constant(kFourPi, kPi, beta);
    for (int n : {1000, 2000, 4000}) {
        report.sl_grid.push_back(n);
        report.sl_kappa.push_back(
            run("sturm", [&] { return sl_eigs(slp, 1, n).eigenvalues(0); }));
    }
    report.sl_order = std::log2(std::abs((report.sl_kappa[0] - report.sl_kappa[1]) /
                                         (report.sl_kappa[1] - report.sl_kappa[2])));

    const auto order_ok = [](double o) { return o >= 1.7 && o <= 2.3; };
    report.pass = order_ok(report.fem_order) && order_ok(report.sl_order) &&
                  report.g_decreasing;

    std::ofstream fem_csv = open_out(out_dir, "convergence_fem.csv");
    fem_csv << "h,lambda_1\n";
    for (std::size_t i = 0; i < report.fem_h.size(); ++i)
        fem_csv << fmt(report.fem_h[i]) << ',' << fmt(report.fem_lambda[i]) << '\n';
    std::ofstream g_csv = open_out(out_dir, "convergence_g.csv");
    g_csv << "h,sup_dev_G\n";
    for (std::size_t i = 0; i < report.g_h.size(); ++i)
        g_csv << fmt(report.g_h[i]) << ',' << fmt(report.g_supdev[i]) << '\n';
    std::ofstream sl_csv = open_out(out_dir, "convergence_sl.csv");
    sl_csv << "n_grid,kappa_1\n";
    for (std::size_t i = 0; i < report.sl_grid.size(); ++i)
        sl_csv << report.sl_grid[i] << ',' << fmt(report.sl_kappa[i]) << '\n';
    std::ofstream txt = open_out(out_dir, "convergence.txt");
    txt << "fem eigenvalue order: " << fmt(report.fem_order) << "\n";
    txt << "sl eigenvalue order: " << fmt(report.sl_order) << "\n";
    txt << "disk G deviation decreasing: " << (report.g_decreasing ? "yes" : "no") << "\n";
    txt << "verdict: " << (report.pass ? "PASS" : "FAIL") << "\n";
    return report;
}

MonotonicityRunReport run_monotonicity(const ExperimentConfig& config,
                                       const std::string& out_dir) {
    MonotonicityRunReport report;
    report.all_pass = true;
    StageRunner run{"monotonicity"};
    const double beta = config.betas.front();
    const double h = config.hs.front();

    std::vector<std::pair<std::string, ConvexPath>> paths;
    paths.emplace_back("const_4pi_to_8pi",
                       ConvexPath::between(GProfile::constant(kFourPi, kPi),
                                           GProfile::constant(8.0 * kPi, kPi), beta));
    for (const DomainSpec& domain : config.domains) {
        if (domain.kind() == DomainSpec::Kind::disk) continue;
        const GProfile g = run(domain.describe(), [&] {
            return g_profile(level_profile(solve_torsion(build_mesh(domain, h)),
                                           config.n_levels));
        });
        // the measured profile may dip below 4pi by the discrete tolerance;
        // the monotone pair needs G0 <= G1 exactly
        GProfile lifted = g;
        for (double& v : lifted.g) v = std::max(v, kFourPi);
        paths.emplace_back(
            slug(domain.describe()),
            ConvexPath::between(GProfile::constant(kFourPi, lifted.a_star), lifted, beta));
    }

    for (auto& [name, path] : paths) {
        MonotonicityCase mc;
        mc.name = name;
        mc.sweep = run(name, [&] { return monotonicity_sweep(path, config.n_grid); });
        const double eps = 1e-4;
        for (double z : path.z_grid) {
            mc.fh.push_back(run(name, [&] {
                               return fh_derivative(path, z, config.n_grid);
                           }).kappa_prime);
            const double zu = std::min(1.0, z + eps), zd = std::max(0.0, z - eps);
            const double up = run(name, [&] {
                return sl_eigs(SLProblem::from_profile(path.at(zu), path.beta), 1,
                               config.n_grid)
                    .eigenvalues(0);
            });
            const double dn = run(name, [&] {
                return sl_eigs(SLProblem::from_profile(path.at(zd), path.beta), 1,
                               config.n_grid)
                    .eigenvalues(0);
            });
            mc.fd.push_back((up - dn) / (zu - zd));
        }
        mc.pass = mc.sweep.verdict == MonotonicityVerdict::strictly_decreasing &&
                  mc.sweep.min_decrement > 10.0 * mc.sweep.solver_tolerance;
        std::ofstream csv = open_out(out_dir, "monotonicity_" + name + ".csv");
        export_sweep_csv(mc.sweep.z, mc.sweep.kappa, mc.fh, mc.fd, csv);
        report.all_pass = report.all_pass && mc.pass;
        report.cases.push_back(std::move(mc));
    }

    std::ofstream txt = open_out(out_dir, "monotonicity.txt");
    for (const auto& mc : report.cases)
        txt << mc.name << ": min decrement " << fmt(mc.sweep.min_decrement)
            << " (solver tol " << fmt(mc.sweep.solver_tolerance) << ") -> "
            << (mc.pass ? "PASS" : "FAIL") << "\n";
    return report;
}

std::vector<std::string> run_mesh_export(const ExperimentConfig& config,
                                         const std::string& out_dir) {
    if (config.domains.empty()) throw ConfigError("mesh-export needs at least one domain");
    std::vector<std::string> files;
    StageRunner run{"mesh-export"};
    for (const DomainSpec& domain : config.domains)
        for (double h : config.hs) {
            const Mesh mesh = run(domain.describe(), [&] { return build_mesh(domain, h); });
            const std::string name =
                slug(domain.describe()) + "_h" + slug(fmt(h)) + ".mesh";
            auto out = open_out(out_dir, name);
            save_mesh(mesh, out);
            files.push_back(name);
        }
    return files;
}

}  // namespace magneu
