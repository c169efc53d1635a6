#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace magneu {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

/// Invalid domain parameters (non-positive lengths, radius function not
/// strictly positive, too many Fourier modes).
struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Meshing failed on a valid spec (degenerate triangulation, broken
/// boundary loop). Distinct from SpecError by contract.
struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Smooth star-shaped planar domain given by an analytic boundary radius
/// r(theta). Disks and ellipses are special cases; the general form is a
/// trigonometric polynomial
///   r(theta) = r0 + sum_k (c_k cos k theta + s_k sin k theta),  k <= 8.
class DomainSpec {
public:
    enum class Kind { disk, ellipse, fourier_star };

    static DomainSpec disk(double radius);
    static DomainSpec ellipse(double ax, double ay);
    static DomainSpec fourier_star(double r0, std::vector<double> cos_coef,
                                   std::vector<double> sin_coef = {});

    Kind kind() const { return kind_; }
    double radius() const { return radius_; }
    double ax() const { return ax_; }
    double ay() const { return ay_; }
    double r0() const { return r0_; }
    const std::vector<double>& cos_coef() const { return cos_coef_; }
    const std::vector<double>& sin_coef() const { return sin_coef_; }

    /// Boundary radius at polar angle theta; strictly positive.
    double boundary_radius(double theta) const;
    /// d/dtheta of boundary_radius.
    double boundary_radius_deriv(double theta) const;
    /// Point on the boundary curve at angle theta.
    Vec2 boundary_point(double theta) const;

    std::string describe() const;

private:
    DomainSpec() = default;
    Kind kind_ = Kind::disk;
    double radius_ = 1.0;
    double ax_ = 1.0, ay_ = 1.0;
    double r0_ = 1.0;
    std::vector<double> cos_coef_, sin_coef_;
};

/// Conforming triangulation of a DomainSpec. Immutable after construction;
/// safe to share across threads.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;       // CCW, positive area
    std::vector<std::array<int, 2>> boundary_edges;  // single closed loop
    double h = 0.0;                                  // target edge length

    std::size_t n_vertices() const { return vertices.size(); }
    std::size_t n_triangles() const { return triangles.size(); }

    double triangle_area(std::size_t t) const;
    Vec2 centroid(std::size_t t) const;
    /// Sum of triangle areas.
    double total_area() const;
    /// Shoelace area of the boundary loop; equals total_area() for a
    /// conforming mesh up to rounding.
    double boundary_polygon_area() const;
    /// Boundary vertex indices in loop order (first repeated at the end is
    /// omitted). Throws MeshError if the boundary edges do not form a
    /// single closed loop.
    std::vector<int> boundary_loop() const;
    std::vector<bool> boundary_vertex_mask() const;
    double max_edge_length() const;
};

/// Exact area of the domain: pi R^2, pi ax ay, or the closed-form Fourier
/// area pi r0^2 + (pi/2) sum (c_k^2 + s_k^2).
double area(const DomainSpec& domain);

/// Radius R* of the disk with the same area.
double equivalent_disk(const DomainSpec& domain);

/// Isotropic Delaunay triangulation with boundary vertices placed on the
/// analytic curve at arc-length spacing <= h and interior vertices on a
/// jittered hexagonal grid (deterministic seed).
Mesh build_mesh(const DomainSpec& domain, double h);

/// Uniform 1:4 refinement. When `snap` is given, new boundary midpoints are
/// projected onto the analytic curve.
Mesh refine_uniform(const Mesh& mesh, const DomainSpec* snap = nullptr);

/// Plain-text mesh format: header `nv nt nb`, vertex lines `x y`, triangle
/// lines `i j k`, boundary edge lines `i j` (0-based).
void save_mesh(const Mesh& mesh, std::ostream& out);
Mesh load_mesh(std::istream& in);

}  // namespace magneu
