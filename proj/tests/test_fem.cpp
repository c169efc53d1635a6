#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <algorithm>
#include <sstream>

#include "magneu/fem.hpp"
#include "magneu/sturm.hpp"
#include "oracles.hpp"

using namespace magneu;

namespace {
constexpr double kPi = std::numbers::pi;

double hermiticity_defect(const Eigen::SparseMatrix<std::complex<double>>& s) {
    double defect = 0.0, scale = 0.0;
    const Eigen::MatrixXcd d(s);
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            defect = std::max(defect, std::abs(d(i, j) - std::conj(d(j, i))));
            scale = std::max(scale, std::abs(d(i, j)));
        }
    return defect / scale;
}

}  // namespace

TEST_CASE("torsion function on the disk") {
    const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.05);
    const ScalarField psi = solve_torsion(mesh);
    // radial solution (R^2 - r^2)/4 with max R^2/4
    CHECK(psi.values.maxCoeff() == doctest::Approx(0.25).epsilon(1e-3));
    const auto boundary = mesh.boundary_vertex_mask();
    for (Eigen::Index i = 0; i < psi.values.size(); ++i) {
        if (boundary[i])
            CHECK(psi.values(i) == 0.0);  // exact Dirichlet values
        else
            CHECK(psi.values(i) > 0.0);  // discrete minimum principle
    }
    // pointwise agreement with the closed form
    for (Eigen::Index i = 0; i < psi.values.size(); ++i) {
        const Vec2 p = mesh.vertices[i];
        const double exact = 0.25 * (1.0 - p.x * p.x - p.y * p.y);
        CHECK(std::abs(psi.values(i) - exact) < 2e-3);
    }
}

TEST_CASE("torsion function on the ellipse matches the closed form") {
    // psi = C (1 - x^2/ax^2 - y^2/ay^2) solves the problem; verify the
    // closed form satisfies the PDE: 2C (1/ax^2 + 1/ay^2) = 1
    const double ax = 2.0, ay = 0.5;
    const double c = oracles::ellipse_torsion_constant(ax, ay);
    CHECK(2.0 * c * (1.0 / (ax * ax) + 1.0 / (ay * ay)) == doctest::Approx(1.0).epsilon(1e-15));

    const Mesh mesh = build_mesh(DomainSpec::ellipse(ax, ay), 0.05);
    const ScalarField psi = solve_torsion(mesh);
    CHECK(psi.values.maxCoeff() == doctest::Approx(c).epsilon(2e-3));
}

TEST_CASE("standard vector potential") {
    const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.2);
    const VectorPotentialField a = vector_potential_standard(mesh);
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const Vec2 c = mesh.centroid(t);
        CHECK(a.values[t].x == doctest::Approx(-0.5 * c.y).epsilon(1e-14));
        CHECK(a.values[t].y == doctest::Approx(0.5 * c.x).epsilon(1e-14));
    }
    // discrete curl of A_S is 1 on interior vertex patches
    const auto boundary = mesh.boundary_vertex_mask();
    for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
        if (boundary[v]) continue;
        CHECK(patch_curl(a, static_cast<int>(v)) == doctest::Approx(1.0).epsilon(0.15));
    }
}

TEST_CASE("torsion potential") {
    const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.05);
    const ScalarField psi = solve_torsion(mesh);
    const VectorPotentialField a = vector_potential_torsion(psi);

    // constant field has zero potential
    ScalarField flat = psi;
    flat.values.setConstant(0.7);
    const VectorPotentialField zero = vector_potential_torsion(flat);
    for (const Vec2& v : zero.values) CHECK(norm(v) < 1e-12);

    // A_Omega ~ (-y/2, x/2) for the radial torsion function
    double worst = 0.0;
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const Vec2 c = mesh.centroid(t);
        worst = std::max(worst, norm(a.values[t] - Vec2{-0.5 * c.y, 0.5 * c.x}));
    }
    CHECK(worst < 0.05);

    // circulation oracle: curl A_Omega = Delta psi = 1 on interior patches
    const auto boundary = mesh.boundary_vertex_mask();
    int checked = 0;
    for (std::size_t v = 0; v < mesh.n_vertices() && checked < 500; ++v) {
        if (boundary[v]) continue;
        CHECK(patch_curl(a, static_cast<int>(v)) == doctest::Approx(1.0).epsilon(0.1));
        ++checked;
    }
}

TEST_CASE("magnetic system is Hermitian positive semidefinite") {
    const Mesh mesh = build_mesh(DomainSpec::ellipse(1.3, 0.8), 0.2);
    const VectorPotentialField a = vector_potential_standard(mesh);
    const MagneticSystem sys = assemble_magnetic(mesh, a, 1.7);
    CHECK(hermiticity_defect(sys.stiffness) <= 1e-12);
    const EigenResult r = magnetic_eigs(mesh, a, 1.7, 3);
    for (int i = 0; i < 3; ++i)
        CHECK(r.eigenvalues(i) >= -1e-10 * (1.0 + std::abs(r.eigenvalues(i))));
}

TEST_CASE("beta = 0 reproduces the Neumann kernel") {
    const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.1);
    const VectorPotentialField a = vector_potential_standard(mesh);
    const EigenResult r = magnetic_eigs(mesh, a, 0.0, 2);
    CHECK(std::abs(r.eigenvalues(0)) < 1e-10);
    CHECK(r.eigenvalues(1) > 1.0);
    // first eigenfunction is constant
    const Eigen::VectorXcd& u = r.eigenfunctions[0].values;
    const std::complex<double> mean = u.mean();
    for (Eigen::Index i = 0; i < u.size(); ++i)
        CHECK(std::abs(u(i) - mean) < 1e-7 * std::abs(mean));
}

TEST_CASE("disk eigenvalue matches the radial solver") {
    const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.05);
    const VectorPotentialField a = vector_potential_standard(mesh);
    const EigenResult r = magnetic_eigs(mesh, a, 1.0, 1);
    const double oracle = disk_radial_kappa(0, 1.0, 1.0);
    CHECK(std::abs(r.eigenvalues(0) - oracle) / oracle < 5e-3);
}

TEST_CASE("spectrum is even in beta") {
    const Mesh mesh = build_mesh(DomainSpec::ellipse(2.0, 0.5), 0.1);
    const VectorPotentialField a = vector_potential_standard(mesh);
    const EigenResult plus = magnetic_eigs(mesh, a, 1.3, 3);
    const EigenResult minus = magnetic_eigs(mesh, a, -1.3, 3);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(plus.eigenvalues(i) - minus.eigenvalues(i)) <=
              1e-10 * (1.0 + plus.eigenvalues(i)));
}

TEST_CASE("gauge shift leaves the spectrum nearly unchanged") {
    const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.05);
    const VectorPotentialField a = vector_potential_standard(mesh);

    ScalarField f;
    f.mesh = &mesh;
    f.values.resize(mesh.n_vertices());
    for (std::size_t i = 0; i < mesh.n_vertices(); ++i) {
        const Vec2 p = mesh.vertices[i];
        f.values(i) = 0.4 * p.x - 0.25 * p.y + 0.3 * p.x * p.y;
    }

    // f = 0 acts trivially
    ScalarField zero = f;
    zero.values.setZero();
    const VectorPotentialField same = gauge_shift(a, zero);
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t)
        CHECK(norm(same.values[t] - a.values[t]) == 0.0);

    const VectorPotentialField shifted = gauge_shift(a, f);
    const EigenResult ra = magnetic_eigs(mesh, a, 1.0, 3);
    const EigenResult rb = magnetic_eigs(mesh, shifted, 1.0, 3);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(ra.eigenvalues(i) - rb.eigenvalues(i)) /
                  std::abs(ra.eigenvalues(i)) <=
              5e-2);
}

TEST_CASE("standard and torsion potentials converge to the same spectrum") {
    double prev_gap = 0.0;
    int level = 0;
    for (double h : {0.1, 0.05}) {
        const Mesh mesh = build_mesh(DomainSpec::disk(1.0), h);
        const ScalarField psi = solve_torsion(mesh);
        const double l_s = magnetic_eigs(mesh, vector_potential_standard(mesh), 1.0, 1)
                               .eigenvalues(0);
        const double l_o = magnetic_eigs(mesh, vector_potential_torsion(psi), 1.0, 1)
                               .eigenvalues(0);
        const double gap = std::abs(l_s - l_o) / l_s;
        if (level > 0) CHECK(gap < prev_gap);
        prev_gap = gap;
        ++level;
    }
    CHECK(prev_gap < 1e-3);
}

TEST_CASE("eigenvalue h-convergence at second order") {
    const double oracle = disk_radial_kappa(0, 1.0, 1.0);
    double lambda[3];
    int i = 0;
    for (double h : {0.1, 0.05, 0.025}) {
        const Mesh mesh = build_mesh(DomainSpec::disk(1.0), h);
        lambda[i++] = magnetic_eigs(mesh, vector_potential_standard(mesh), 1.0, 1)
                          .eigenvalues(0);
    }
    const double order = std::log2(std::abs((lambda[0] - lambda[1]) / (lambda[1] - lambda[2])));
    CHECK(order >= 1.7);
    CHECK(order <= 2.3);
    CHECK(std::abs(lambda[2] - oracle) / oracle < 1e-3);
}

TEST_CASE("Rayleigh quotient consistency and normalization") {
    const Mesh mesh = build_mesh(DomainSpec::fourier_star(1.0, {0.0, 0.15}), 0.1);
    const VectorPotentialField a = vector_potential_standard(mesh);
    const EigenResult r = magnetic_eigs(mesh, a, 2.0, 3);
    const MagneticSystem sys = assemble_magnetic(mesh, a, 2.0);
    for (int i = 0; i < 3; ++i) {
        const Eigen::VectorXcd& u = r.eigenfunctions[i].values;
        const std::complex<double> num = u.dot(sys.stiffness * u);
        const std::complex<double> den = u.dot(sys.mass.cast<std::complex<double>>() * u);
        CHECK(std::abs(num / den - r.eigenvalues(i)) <= 1e-8 * (1.0 + r.eigenvalues(i)));
        CHECK(std::abs(den) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(r.residuals(i) < 1e-8);
        // phase convention: largest-modulus entry is real positive
        Eigen::Index imax = 0;
        double best = 0.0;
        for (Eigen::Index j = 0; j < u.size(); ++j)
            if (std::abs(u(j)) > best) {
                best = std::abs(u(j));
                imax = j;
            }
        CHECK(std::abs(std::imag(u(imax))) < 1e-12);
        CHECK(std::real(u(imax)) > 0.0);
    }
}

TEST_CASE("dense and sparse eigensolvers agree") {
    const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.22);
    const VectorPotentialField a = vector_potential_standard(mesh);
    const EigenResult dense = magnetic_eigs(mesh, a, 1.0, 3);
    MagneticEigsOptions opt;
    opt.force_sparse = true;
    const EigenResult sparse = magnetic_eigs(mesh, a, 1.0, 3, opt);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(dense.eigenvalues(i) - sparse.eigenvalues(i)) <=
              1e-9 * (1.0 + dense.eigenvalues(i)));
}

TEST_CASE("error paths") {
    const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.3);
    const VectorPotentialField a = vector_potential_standard(mesh);
    CHECK_THROWS_AS(magnetic_eigs(mesh, a, 1.0, 100000), FemError);
    CHECK_THROWS_AS(magnetic_eigs(mesh, a, 1.0, 0), FemError);

    const Mesh other = build_mesh(DomainSpec::disk(1.0), 0.4);
    ScalarField wrong;
    wrong.mesh = &other;
    wrong.values = Eigen::VectorXd::Zero(other.n_vertices());
    CHECK_THROWS_AS(gauge_shift(a, wrong), FemError);
}

TEST_CASE("eigen result csv export") {
    const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.3);
    const EigenResult r = magnetic_eigs(mesh, vector_potential_standard(mesh), 1.0, 2);
    std::ostringstream os;
    export_eigs_csv(r, os);
    const std::string text = os.str();
    CHECK(text.rfind("k,lambda,residual\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
