// Property-style checks over randomized smooth star domains: the domain
// generator is seeded and the draws are scaled so every sample is a valid
// spec with bounded curvature.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "magneu/fem.hpp"
#include "magneu/levelset.hpp"
#include "magneu/sturm.hpp"
#include "oracles.hpp"

using namespace magneu;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * kPi;

std::vector<DomainSpec> random_stars(int count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> amp(0.08, 0.25);
    std::uniform_int_distribution<int> modes(1, 4);
    std::vector<DomainSpec> out;
    while (static_cast<int>(out.size()) < count) {
        const int k_max = modes(rng);
        std::vector<double> c(k_max), s(k_max);
        double total = 0.0;
        for (int k = 0; k < k_max; ++k) {
            c[k] = unif(rng) / ((k + 1) * (k + 1));  // damp high modes
            s[k] = unif(rng) / ((k + 1) * (k + 1));
            total += std::abs(c[k]) + std::abs(s[k]);
        }
        if (total < 1e-3) continue;
        const double scale = amp(rng) / total;
        for (int k = 0; k < k_max; ++k) {
            c[k] *= scale;
            s[k] *= scale;
        }
        out.push_back(DomainSpec::fourier_star(1.0, c, s));
    }
    return out;
}

}  // namespace

TEST_CASE("disk spectrum is the union of the angular channels") {
    const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.05);
    const EigenResult fem = magnetic_eigs(mesh, vector_potential_standard(mesh), 1.0, 3);
    // channel eigenvalues kappa_1(n, 1, 1), n = -2..2, plus the second
    // radial one; the three smallest must match the FEM spectrum
    std::vector<double> channels;
    for (int n = -2; n <= 2; ++n) channels.push_back(disk_radial_kappa(n, 1.0, 1.0));
    const SLProblem radial = SLProblem::with_constant(kFourPi, kPi, 1.0);
    channels.push_back(sl_eigs(radial, 2, 4000).eigenvalues(1));
    std::sort(channels.begin(), channels.end());
    for (int i = 0; i < 3; ++i) {
        CAPTURE(i);
        CHECK(std::abs(fem.eigenvalues(i) - channels[i]) / channels[i] < 5e-3);
    }
}

TEST_CASE("random star domains satisfy every structural invariant") {
    for (const DomainSpec& dom : random_stars(5, 99)) {
        CAPTURE(dom.describe());
        // closed-form area against the shoelace oracle
        double shoelace = 0.0;
        const int n_poly = 100000;
        for (int i = 0; i < n_poly; ++i) {
            const Vec2 a = dom.boundary_point(2.0 * kPi * i / n_poly);
            const Vec2 b = dom.boundary_point(2.0 * kPi * (i + 1) / n_poly);
            shoelace += cross(a, b);
        }
        shoelace = 0.5 * std::abs(shoelace);
        CHECK(area(dom) == doctest::Approx(shoelace).epsilon(1e-8));

        const Mesh mesh = build_mesh(dom, 0.1);
        CHECK_NOTHROW(mesh.boundary_loop());
        CHECK(mesh.total_area() ==
              doctest::Approx(mesh.boundary_polygon_area()).epsilon(1e-12));
        for (std::size_t t = 0; t < mesh.n_triangles(); ++t)
            CHECK(mesh.triangle_area(t) > 0.0);

        const ScalarField psi = solve_torsion(mesh);
        const auto boundary = mesh.boundary_vertex_mask();
        for (Eigen::Index i = 0; i < psi.values.size(); ++i)
            if (!boundary[i]) CHECK(psi.values(i) > 0.0);

        const GProfile g = g_profile(level_profile(psi, 150));
        CHECK(g.min_value() >= kFourPi * (1.0 - kTolIso));
    }
}

TEST_CASE("the eigenvalue chain holds on random star domains") {
    const double beta = 1.5;
    for (const DomainSpec& dom : random_stars(4, 2718)) {
        CAPTURE(dom.describe());
        const Mesh mesh = build_mesh(dom, 0.1);
        const ScalarField psi = solve_torsion(mesh);
        const double lambda =
            magnetic_eigs(mesh, vector_potential_torsion(psi), beta, 1).eigenvalues(0);
        const GProfile g = g_profile(level_profile(psi, 150));
        const double kappa_g =
            sl_eigs(SLProblem::from_profile(g, beta), 1, 1000).eigenvalues(0);
        const double kappa_flat = kappa_disk(beta, area(dom), 1000);
        const double lambda_star =
            disk_lambda1(beta, equivalent_disk(dom), 8, 1000).lambda;

        // discrete tolerances at h = 0.1 are a few percent
        CHECK(lambda <= kappa_g * 1.03);
        CHECK(kappa_g <= kappa_flat * 1.03);
        CHECK(lambda <= lambda_star * 1.03);
        CHECK(std::abs(kappa_flat - lambda_star) <= 1e-4 * lambda_star);
    }
}

TEST_CASE("kappa_1 is nondecreasing in beta on a measured profile") {
    const Mesh mesh = build_mesh(DomainSpec::fourier_star(1.0, {0.1, 0.1}), 0.1);
    const GProfile g = g_profile(level_profile(solve_torsion(mesh), 150));
    double prev = -1.0;
    for (double beta : {0.0, 0.5, 1.0, 2.0, 3.0}) {
        const double k =
            sl_eigs(SLProblem::from_profile(g, beta), 1, 500).eigenvalues(0);
        CHECK(k >= prev - 1e-12);
        prev = k;
    }
}
