#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "magneu/geometry.hpp"

using namespace magneu;

namespace {

constexpr double kPi = std::numbers::pi;

// Shoelace area of an n-gon sampled on the analytic boundary; independent
// oracle for the closed-form Fourier area.
double shoelace_area(const DomainSpec& d, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2 a = d.boundary_point(2.0 * kPi * i / n);
        const Vec2 b = d.boundary_point(2.0 * kPi * (i + 1) / n);
        s += cross(a, b);
    }
    return 0.5 * std::abs(s);
}

}  // namespace

TEST_CASE("area closed forms") {
    CHECK(area(DomainSpec::disk(1.0)) == doctest::Approx(kPi).epsilon(1e-14));
    CHECK(area(DomainSpec::ellipse(2.0, 0.5)) == doctest::Approx(kPi).epsilon(1e-14));

    const auto star = DomainSpec::fourier_star(1.0, {0.1});
    CHECK(area(star) == doctest::Approx(kPi * 1.005).epsilon(1e-14));
    // cross-check against a 1e5-gon shoelace sampling of the boundary
    CHECK(area(star) == doctest::Approx(shoelace_area(star, 100000)).epsilon(1e-8));

    const auto star2 = DomainSpec::fourier_star(1.0, {0.0, 0.15}, {0.05});
    CHECK(area(star2) == doctest::Approx(shoelace_area(star2, 100000)).epsilon(1e-8));
}

TEST_CASE("fourier star with zero coefficients equals disk") {
    const auto star = DomainSpec::fourier_star(2.0, {0.0, 0.0}, {0.0});
    CHECK(area(star) == doctest::Approx(area(DomainSpec::disk(2.0))).epsilon(1e-15));
}

TEST_CASE("equivalent disk radius") {
    CHECK(equivalent_disk(DomainSpec::disk(2.0)) == doctest::Approx(2.0));
    CHECK(equivalent_disk(DomainSpec::ellipse(2.0, 0.5)) == doctest::Approx(1.0));
    CHECK(equivalent_disk(DomainSpec::fourier_star(1.0, {0.1})) ==
          doctest::Approx(std::sqrt(1.005)));
}

TEST_CASE("invalid specs rejected") {
    CHECK_THROWS_AS(DomainSpec::disk(0.0), SpecError);
    CHECK_THROWS_AS(DomainSpec::ellipse(-1.0, 1.0), SpecError);
    CHECK_THROWS_AS(DomainSpec::fourier_star(1.0, {0.6, 0.5}), SpecError);
    CHECK_THROWS_AS(DomainSpec::fourier_star(1.0, {0, 0, 0, 0, 0, 0, 0, 0, 0.1}), SpecError);
}

TEST_CASE("disk mesh area within inscribed polygon deficit") {
    const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.1);
    CHECK(std::abs(mesh.total_area() - kPi) <= 0.05);
    // triangle areas tile the boundary polygon exactly
    CHECK(mesh.total_area() == doctest::Approx(mesh.boundary_polygon_area()).epsilon(1e-12));
}

TEST_CASE("mesh conformity and orientation") {
    for (const auto& dom : {DomainSpec::disk(1.0), DomainSpec::ellipse(2.0, 0.5),
                            DomainSpec::fourier_star(1.0, {0.0, 0.15})}) {
        CAPTURE(dom.describe());
        const Mesh mesh = build_mesh(dom, 0.15);
        for (std::size_t t = 0; t < mesh.n_triangles(); ++t)
            CHECK(mesh.triangle_area(t) > 0.0);
        CHECK(mesh.max_edge_length() <= 3.0 * 0.15);
        CHECK_NOTHROW(mesh.boundary_loop());
        // every boundary vertex lies on the analytic curve
        for (int v : mesh.boundary_loop()) {
            const Vec2 p = mesh.vertices[v];
            const double r = dom.boundary_radius(std::atan2(p.y, p.x));
            CHECK(norm(p) == doctest::Approx(r).epsilon(1e-12));
        }
    }
}

TEST_CASE("mesh area converges at second order") {
    const auto dom = DomainSpec::ellipse(2.0, 0.5);
    const double exact = area(dom);
    double prev_err = 0.0;
    int level = 0;
    for (double h : {0.2, 0.1, 0.05}) {
        const double err = std::abs(build_mesh(dom, h).total_area() - exact);
        if (level > 0) {
            const double ratio = prev_err / err;
            CHECK(ratio >= 3.5);
            CHECK(ratio <= 4.5);
        }
        prev_err = err;
        ++level;
    }
}

TEST_CASE("uniform refinement grows vertices ~4x") {
    const auto dom = DomainSpec::disk(1.0);
    const Mesh mesh = build_mesh(dom, 0.5);
    const Mesh fine = refine_uniform(mesh, &dom);
    const double growth = static_cast<double>(fine.n_vertices()) / mesh.n_vertices();
    CHECK(growth > 3.0);
    CHECK(growth < 4.5);
    CHECK(fine.n_triangles() == 4 * mesh.n_triangles());
    for (std::size_t t = 0; t < fine.n_triangles(); ++t)
        CHECK(fine.triangle_area(t) > 0.0);
    // snapped boundary midpoints are on the circle
    for (int v : fine.boundary_loop())
        CHECK(norm(fine.vertices[v]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mesh text round trip") {
    const Mesh mesh = build_mesh(DomainSpec::ellipse(1.5, 1.0), 0.3);
    std::stringstream ss;
    save_mesh(mesh, ss);
    const Mesh back = load_mesh(ss);
    REQUIRE(back.n_vertices() == mesh.n_vertices());
    REQUIRE(back.n_triangles() == mesh.n_triangles());
    REQUIRE(back.boundary_edges.size() == mesh.boundary_edges.size());
    CHECK(back.total_area() == doctest::Approx(mesh.total_area()).epsilon(1e-15));
}

TEST_CASE("broken meshes are reported distinctly from bad specs") {
    std::stringstream garbage("not a mesh at all");
    CHECK_THROWS_AS(load_mesh(garbage), MeshError);

    Mesh two_islands;
    two_islands.vertices = {{0, 0}, {1, 0}, {0, 1}, {5, 5}, {6, 5}, {5, 6}};
    two_islands.triangles = {{0, 1, 2}, {3, 4, 5}};
    two_islands.boundary_edges = {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}};
    CHECK_THROWS_AS(two_islands.boundary_loop(), MeshError);
}

TEST_CASE("mesh build is deterministic") {
    const auto dom = DomainSpec::fourier_star(1.0, {}, {0.1});
    const Mesh a = build_mesh(dom, 0.2);
    const Mesh b = build_mesh(dom, 0.2);
    REQUIRE(a.n_vertices() == b.n_vertices());
    for (std::size_t i = 0; i < a.n_vertices(); ++i) {
        CHECK(a.vertices[i].x == b.vertices[i].x);
        CHECK(a.vertices[i].y == b.vertices[i].y);
    }
}
