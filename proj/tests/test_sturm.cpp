#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "magneu/sturm.hpp"
#include "oracles.hpp"

using namespace magneu;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * kPi;
}  // namespace

TEST_CASE("graded grid shape") {
    const auto g = graded_grid(0.0, kPi, 2000);
    REQUIRE(g.size() == 2001);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == kPi);
    CHECK(g[1] == doctest::Approx(1e-4 * kPi).epsilon(1e-12));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    // cells nondecreasing: geometric ramp then uniform
    for (std::size_t i = 2; i < g.size(); ++i)
        CHECK(g[i] - g[i - 1] >= (g[i - 1] - g[i - 2]) * (1.0 - 1e-12));
}

TEST_CASE("beta = 0 gives the Neumann kernel") {
    const auto problem = SLProblem::with_constant(kFourPi, 2.0, 0.0);
    const SLSpectrum spec = sl_eigs(problem, 2, 400);
    CHECK(std::abs(spec.eigenvalues(0)) < 1e-10);
    const Eigen::VectorXd& f1 = spec.eigenfunctions[0];
    const double mean = f1.mean();
    for (Eigen::Index i = 0; i < f1.size(); ++i)
        CHECK(f1(i) == doctest::Approx(mean).epsilon(1e-7));
    CHECK(spec.eigenvalues(1) > 1.0);
}

TEST_CASE("kappa_2 at beta = 0 is the first J1 zero squared") {
    // the constant-G problem on [0, pi] is the radial Neumann Laplacian on
    // the unit disk; its first nonzero eigenvalue is j_{1,1}^2
    const double j11 = oracles::bessel_j1_first_zero();
    const double expected = j11 * j11;
    CHECK(expected == doctest::Approx(14.681970642124).epsilon(1e-10));

    const auto problem = SLProblem::with_constant(kFourPi, kPi, 0.0);
    const SLSpectrum spec = sl_eigs(problem, 2, 2000);
    CHECK(spec.eigenvalues(1) == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("exponential trial function bounds kappa_1 below beta") {
    // Rayleigh quotient of f(a) = exp(-beta a / 4pi), computed by quadrature
    const double a_star = kPi;
    for (double beta : {0.5, 1.0, 2.0, 3.8}) {
        CAPTURE(beta);
        const auto f = [&](double a) { return std::exp(-beta * a / kFourPi); };
        const auto fp = [&](double a) { return -beta / kFourPi * f(a); };
        const double rq = oracles::constant_g_rayleigh(f, fp, kFourPi, beta, a_star);
        CHECK(rq < beta - 1e-6);

        const auto problem = SLProblem::with_constant(kFourPi, a_star, beta);
        const SLSpectrum spec = sl_eigs(problem, 1, 2000);
        CHECK(spec.eigenvalues(0) <= rq + 1e-12);
        CHECK(spec.eigenvalues(0) < beta);

        // same trial sampled into the discrete space: Galerkin minimality
        Eigen::VectorXd nodal(spec.grid.size());
        for (std::size_t i = 0; i < spec.grid.size(); ++i) nodal(i) = f(spec.grid[i]);
        const double rq_discrete = rayleigh_quotient(problem, spec.grid, nodal);
        CHECK(rq_discrete >= spec.eigenvalues(0) - 1e-12);
    }
}

TEST_CASE("random trials never beat kappa_1") {
    const auto problem = SLProblem::with_constant(kFourPi, kPi, 1.5);
    const SLSpectrum spec = sl_eigs(problem, 1, 500);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-1.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd f(spec.grid.size());
        for (auto& x : f.reshaped()) x = unif(rng);
        CHECK(rayleigh_quotient(problem, spec.grid, f) >= spec.eigenvalues(0) - 1e-12);
    }
}

TEST_CASE("kappa_disk equals the radial route") {
    CHECK(kappa_disk(0.0, kPi) == doctest::Approx(0.0).epsilon(1e-10));
    const double via_area = kappa_disk(1.0, kPi);
    const double via_radial = disk_radial_kappa(0, 1.0, 1.0);
    CHECK(std::abs(via_area - via_radial) / via_area < 1e-6);
}

TEST_CASE("kappa_1(4pi, beta) < beta") {
    for (double beta : {0.5, 1.0, 2.0, 3.8}) {
        CAPTURE(beta);
        CHECK(kappa_disk(beta, kPi) < beta);
    }
}

TEST_CASE("radial problem basics") {
    CHECK(disk_radial_kappa(0, 0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-10));
    // scaling law: kappa(n, beta, R) = R^-2 kappa(n, R^2 beta, 1)
    const double left = disk_radial_kappa(0, 1.0, 2.0);
    const double right = 0.25 * disk_radial_kappa(0, 4.0, 1.0);
    CHECK(left == doctest::Approx(right).epsilon(1e-6));
}

TEST_CASE("radial mode is minimal for beta <= 1") {
    for (double beta : {0.25, 0.5, 0.75, 1.0}) {
        const double k0 = disk_radial_kappa(0, beta, 1.0, 2000);
        for (int n = 1; n <= 5; ++n) {
            CAPTURE(beta);
            CAPTURE(n);
            CHECK(disk_radial_kappa(n, beta, 1.0, 2000) > k0 + 1e-6);
            CHECK(disk_radial_kappa(-n, beta, 1.0, 2000) > k0 + 1e-6);
        }
    }
}

TEST_CASE("disk_lambda1 picks the right channel") {
    const DiskLambda small = disk_lambda1(0.5, 1.0, 6, 2000);
    CHECK(small.n_argmin == 0);
    CHECK(small.truncation_justified);

    const DiskLambda zero = disk_lambda1(0.0, 1.0, 3, 500);
    CHECK(zero.lambda == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(zero.n_argmin == 0);

    // above beta* a non-radial mode wins
    const DiskLambda big = disk_lambda1(5.0, 1.0, 8, 2000);
    CHECK(big.lambda < disk_radial_kappa(0, 5.0, 1.0, 2000));
    CHECK(big.n_argmin != 0);
}

TEST_CASE("grid refinement converges at second order") {
    const auto problem = SLProblem::with_constant(kFourPi, kPi, 1.0);
    const double k1 = sl_eigs(problem, 1, 1000).eigenvalues(0);
    const double k2 = sl_eigs(problem, 1, 2000).eigenvalues(0);
    const double k3 = sl_eigs(problem, 1, 4000).eigenvalues(0);
    const double order = std::log2(std::abs((k1 - k2) / (k2 - k3)));
    CHECK(order >= 1.7);
    CHECK(order <= 2.3);
}

TEST_CASE("kappa_1 is nondecreasing in beta") {
    const auto profile = GProfile::constant(5.0 * kPi, 2.0);
    double prev = -1.0;
    for (double beta : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        const double k = sl_eigs(SLProblem::from_profile(profile, beta), 1, 400)
                             .eigenvalues(0);
        CHECK(k >= prev - 1e-12);
        prev = k;
    }
}

TEST_CASE("eigenvalues are simple and f1 positive") {
    const auto problem = SLProblem::with_constant(kFourPi, kPi, 2.0);
    const SLSpectrum spec = sl_eigs(problem, 4, 1500);
    for (int i = 1; i < 4; ++i)
        CHECK(spec.eigenvalues(i) - spec.eigenvalues(i - 1) > 1e-10);
    const Eigen::VectorXd& f1 = spec.eigenfunctions[0];
    for (std::size_t i = 1; i + 1 < spec.grid.size(); ++i)
        CHECK(f1(static_cast<Eigen::Index>(i)) > 0.0);
    // L2(da) normalization
    double nrm = 0.0;
    for (std::size_t c = 0; c + 1 < spec.grid.size(); ++c) {
        const double h = spec.grid[c + 1] - spec.grid[c];
        const double fa = f1(static_cast<Eigen::Index>(c));
        const double fb = f1(static_cast<Eigen::Index>(c + 1));
        nrm += h * (fa * fa + fa * fb + fb * fb) / 3.0;
    }
    CHECK(nrm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quasi-derivative vanishes at both endpoints") {
    const auto problem = SLProblem::with_constant(kFourPi, kPi, 1.0);
    const SLSpectrum spec = sl_eigs(problem, 1, 4000);
    const Eigen::VectorXd& f = spec.eigenfunctions[0];
    const auto quasi = [&](std::size_t c) {
        const double h = spec.grid[c + 1] - spec.grid[c];
        const double mid = 0.5 * (spec.grid[c] + spec.grid[c + 1]);
        return problem.P(mid) * (f(static_cast<Eigen::Index>(c + 1)) -
                                 f(static_cast<Eigen::Index>(c))) / h;
    };
    double max_q = 0.0;
    for (std::size_t c = 0; c + 1 < spec.grid.size(); ++c)
        max_q = std::max(max_q, std::abs(quasi(c)));
    CHECK(std::abs(quasi(0)) <= 1e-3 * max_q);
    CHECK(std::abs(quasi(spec.grid.size() - 2)) <= 1e-3 * max_q);
}

TEST_CASE("beta_star matches the reported crossing") {
    const double bs = beta_star(1e-4, 2000, 8);
    CHECK(std::abs(bs - 3.84754) <= 1e-3);
    CHECK(bs >= 1.0);
}

TEST_CASE("invalid inputs rejected") {
    CHECK_THROWS_AS(SLProblem::with_constant(2.0, 1.0, 1.0), SturmError);  // G < 4pi
    CHECK_THROWS_AS(graded_grid(1.0, 1.0, 10), SturmError);
    CHECK_THROWS_AS(disk_radial_kappa(0, 1.0, -1.0), SturmError);
    CHECK_THROWS_AS(beta_star(1e-6), SturmError);  // tol below contract
    const auto problem = SLProblem::with_constant(kFourPi, 1.0, 1.0);
    CHECK_THROWS_AS(sl_eigs(problem, 100, 50), SturmError);
}

TEST_CASE("csv exports") {
    const auto problem = SLProblem::with_constant(kFourPi, 1.0, 1.0);
    const SLSpectrum spec = sl_eigs(problem, 2, 100);
    std::ostringstream spectra, fn;
    export_spectrum_csv(spec, spectra);
    export_eigenfunction_csv(spec, 1, fn);
    CHECK(spectra.str().rfind("k,kappa\n", 0) == 0);
    CHECK(fn.str().rfind("a,f\n", 0) == 0);
    CHECK_THROWS_AS(export_eigenfunction_csv(spec, 3, fn), SturmError);
}
