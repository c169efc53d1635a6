#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <iosfwd>
#include <vector>

#include "magneu/geometry.hpp"

namespace magneu {

/// Nodal P1 field, one real value per mesh vertex.
struct ScalarField {
    const Mesh* mesh = nullptr;
    Eigen::VectorXd values;
};

/// Nodal P1 field, one complex value per mesh vertex.
struct ComplexField {
    const Mesh* mesh = nullptr;
    Eigen::VectorXcd values;
};

/// Piecewise-constant vector potential, one 2-vector per triangle.
struct VectorPotentialField {
    const Mesh* mesh = nullptr;
    std::vector<Vec2> values;
};

struct EigenResult {
    Eigen::VectorXd eigenvalues;               // ascending
    std::vector<ComplexField> eigenfunctions;  // M-orthonormal, phase-fixed
    Eigen::VectorXd residuals;                 // ||(S - lambda M)u|| / ||M u||
};

struct FemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Torsion function: P1 Galerkin solution of the Poisson problem with unit
/// source and homogeneous Dirichlet condition (sign convention: the Laplacian
/// is -(d_xx + d_yy), so the weak form is grad psi . grad v = v).
/// Boundary nodal values are exactly zero.
ScalarField solve_torsion(const Mesh& mesh);

/// Per-triangle constant gradient of a P1 field.
std::vector<Vec2> p1_gradient(const ScalarField& field);

/// Standard potential A_S = (-y/2, x/2) sampled at triangle centroids.
VectorPotentialField vector_potential_standard(const Mesh& mesh);

/// Torsion potential: rotated gradient (d_y psi, -d_x psi), constant per
/// triangle since psi is P1. Has unit discrete curl.
VectorPotentialField vector_potential_torsion(const ScalarField& psi);

/// A + grad f for a P1 gauge function f.
VectorPotentialField gauge_shift(const VectorPotentialField& A, const ScalarField& f);

/// Circulation of A around the boundary of the vertex patch (the union of
/// triangles touching the vertex), divided by the patch area. Discretely
/// approximates curl A; used to check curl A_Omega = 1.
double patch_curl(const VectorPotentialField& A, int vertex);

/// Galerkin matrices of the magnetic form int |grad u - i beta A u|^2 with
/// natural (Neumann) boundary conditions. S is Hermitian positive
/// semidefinite, M is the real mass matrix. All per-triangle integrals use
/// the 3-point mid-edge rule, exact for these integrands.
struct MagneticSystem {
    Eigen::SparseMatrix<std::complex<double>> stiffness;
    Eigen::SparseMatrix<double> mass;
};
MagneticSystem assemble_magnetic(const Mesh& mesh, const VectorPotentialField& A,
                                 double beta);

struct MagneticEigsOptions {
    double shift = -1e-8;       // shift-invert target
    int dense_threshold = 500;  // below this, use a dense solver
    int max_iterations = 500;
    double tolerance = 1e-9;    // relative residual target
    bool force_sparse = false;  // for tests
};

/// First k eigenpairs of S(beta A) u = lambda M u. Eigenfunctions are
/// M-normalized with the entry of largest modulus made real positive.
/// beta may be negative; the spectrum is even in beta.
EigenResult magnetic_eigs(const Mesh& mesh, const VectorPotentialField& A, double beta,
                          int k, const MagneticEigsOptions& options = {});

/// CSV export: `k, lambda, residual`.
void export_eigs_csv(const EigenResult& result, std::ostream& out);

}  // namespace magneu
