#include "magneu/fem.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace magneu {

using cd = std::complex<double>;
using SpMatC = Eigen::SparseMatrix<cd>;
using SpMatD = Eigen::SparseMatrix<double>;

namespace {

struct TriGeom {
    double area;
    Vec2 grad[3];  // constant P1 basis gradients
};

TriGeom tri_geometry(const Mesh& mesh, std::size_t t) {
    const auto& tr = mesh.triangles[t];
    const Vec2 p0 = mesh.vertices[tr[0]], p1 = mesh.vertices[tr[1]], p2 = mesh.vertices[tr[2]];
    const double two_a = cross(p1 - p0, p2 - p0);
    if (!(two_a > 0.0)) throw FemError("degenerate triangle in assembly");
    TriGeom g;
    g.area = 0.5 * two_a;
    g.grad[0] = {(p1.y - p2.y) / two_a, (p2.x - p1.x) / two_a};
    g.grad[1] = {(p2.y - p0.y) / two_a, (p0.x - p2.x) / two_a};
    g.grad[2] = {(p0.y - p1.y) / two_a, (p1.x - p0.x) / two_a};
    return g;
}

// Entry of largest modulus made real positive; deterministic tie-break on
// the lowest index.
void fix_phase(Eigen::VectorXcd& u) {
    Eigen::Index best = 0;
    double best_mod = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double m = std::abs(u(i));
        if (m > best_mod * (1.0 + 1e-14)) {
            best_mod = m;
            best = i;
        }
    }
    if (best_mod > 0.0) u *= std::conj(u(best)) / best_mod;
}

void m_orthonormalize(Eigen::MatrixXcd& v, const SpMatD& m) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXcd mv = m * v.col(j);
            for (Eigen::Index i = 0; i < j; ++i) {
                const cd c = v.col(i).dot(mv);
                v.col(j) -= c * v.col(i);
            }
        }
        const double nrm = std::sqrt(std::real(v.col(j).dot(m * v.col(j))));
        if (!(nrm > 0.0)) throw FemError("eigensolver: subspace collapsed");
        v.col(j) /= nrm;
    }
}

}  // namespace

ScalarField solve_torsion(const Mesh& mesh) {
    const int n = static_cast<int>(mesh.n_vertices());
    const std::vector<bool> on_boundary = mesh.boundary_vertex_mask();
    std::vector<int> dof(n, -1);
    int n_int = 0;
    for (int i = 0; i < n; ++i)
        if (!on_boundary[i]) dof[i] = n_int++;

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_int);
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const TriGeom g = tri_geometry(mesh, t);
        const auto& tr = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            const int di = dof[tr[i]];
            if (di < 0) continue;
            rhs(di) += g.area / 3.0;
            for (int j = 0; j < 3; ++j) {
                const int dj = dof[tr[j]];
                if (dj < 0) continue;
                trips.emplace_back(di, dj, g.area * dot(g.grad[i], g.grad[j]));
            }
        }
    }
    ScalarField psi;
    psi.mesh = &mesh;
    psi.values = Eigen::VectorXd::Zero(n);
    if (n_int == 0) return psi;  // all-boundary mesh: psi == 0

    SpMatD stiff(n_int, n_int);
    stiff.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<SpMatD> solver(stiff);
    if (solver.info() != Eigen::Success)
        throw FemError("torsion solve: singular stiffness matrix");
    const Eigen::VectorXd interior = solver.solve(rhs);
    for (int i = 0; i < n; ++i)
        if (dof[i] >= 0) psi.values(i) = interior(dof[i]);
    return psi;
}

std::vector<Vec2> p1_gradient(const ScalarField& field) {
    const Mesh& mesh = *field.mesh;
    std::vector<Vec2> grads(mesh.n_triangles());
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const TriGeom g = tri_geometry(mesh, t);
        const auto& tr = mesh.triangles[t];
        Vec2 v{0.0, 0.0};
        for (int i = 0; i < 3; ++i) v = v + field.values(tr[i]) * g.grad[i];
        grads[t] = v;
    }
    return grads;
}

VectorPotentialField vector_potential_standard(const Mesh& mesh) {
    VectorPotentialField a;
    a.mesh = &mesh;
    a.values.resize(mesh.n_triangles());
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const Vec2 c = mesh.centroid(t);
        a.values[t] = {-0.5 * c.y, 0.5 * c.x};
    }
    return a;
}

VectorPotentialField vector_potential_torsion(const ScalarField& psi) {
    const std::vector<Vec2> grads = p1_gradient(psi);
    VectorPotentialField a;
    a.mesh = psi.mesh;
    a.values.resize(grads.size());
    for (std::size_t t = 0; t < grads.size(); ++t)
        a.values[t] = {grads[t].y, -grads[t].x};
    return a;
}

VectorPotentialField gauge_shift(const VectorPotentialField& A, const ScalarField& f) {
    if (A.mesh != f.mesh) throw FemError("gauge_shift: mismatched meshes");
    const std::vector<Vec2> grads = p1_gradient(f);
    VectorPotentialField out;
    out.mesh = A.mesh;
    out.values.resize(A.values.size());
    for (std::size_t t = 0; t < A.values.size(); ++t)
        out.values[t] = A.values[t] + grads[t];
    return out;
}

double patch_curl(const VectorPotentialField& A, int vertex) {
    const Mesh& mesh = *A.mesh;
    double circulation = 0.0;
    double patch_area = 0.0;
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        int local = -1;
        for (int i = 0; i < 3; ++i)
            if (tr[i] == vertex) local = i;
        if (local < 0) continue;
        // far edge, oriented CCW around the vertex
        const Vec2 q1 = mesh.vertices[tr[(local + 1) % 3]];
        const Vec2 q2 = mesh.vertices[tr[(local + 2) % 3]];
        circulation += dot(A.values[t], q2 - q1);
        patch_area += mesh.triangle_area(t);
    }
    if (!(patch_area > 0.0)) throw FemError("patch_curl: vertex has no triangles");
    // The link-polygon circulation of a per-triangle-constant field picks up
    // exactly 2/3 of the enclosed curl (hat-function weighting); the 3/2
    // factor makes the estimator exact for affine fields.
    return 1.5 * circulation / patch_area;
}

MagneticSystem assemble_magnetic(const Mesh& mesh, const VectorPotentialField& A,
                                 double beta) {
    if (A.mesh != &mesh) throw FemError("assemble_magnetic: mismatched mesh");
    if (A.values.size() != mesh.n_triangles())
        throw FemError("assemble_magnetic: potential size mismatch");
    const int n = static_cast<int>(mesh.n_vertices());
    std::vector<Eigen::Triplet<cd>> s_trips;
    std::vector<Eigen::Triplet<double>> m_trips;
    s_trips.reserve(9 * mesh.n_triangles());
    m_trips.reserve(9 * mesh.n_triangles());

    // mid-edge quadrature: phi values at the midpoint opposite local vertex q
    static const double phi_at_mid[3][3] = {
        {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}};

    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const TriGeom g = tri_geometry(mesh, t);
        const auto& tr = mesh.triangles[t];
        const Vec2 a = A.values[t];
        const double w = g.area / 3.0;
        cd s_loc[3][3] = {};
        double m_loc[3][3] = {};
        for (int q = 0; q < 3; ++q) {
            cd dx[3], dy[3];
            for (int i = 0; i < 3; ++i) {
                const double v = phi_at_mid[q][i];
                dx[i] = cd(g.grad[i].x, -beta * a.x * v);
                dy[i] = cd(g.grad[i].y, -beta * a.y * v);
            }
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    s_loc[i][j] += w * (dx[j] * std::conj(dx[i]) + dy[j] * std::conj(dy[i]));
                    m_loc[i][j] += w * phi_at_mid[q][i] * phi_at_mid[q][j];
                }
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                s_trips.emplace_back(tr[i], tr[j], s_loc[i][j]);
                m_trips.emplace_back(tr[i], tr[j], m_loc[i][j]);
            }
    }
    MagneticSystem sys;
    sys.stiffness.resize(n, n);
    sys.stiffness.setFromTriplets(s_trips.begin(), s_trips.end());
    sys.mass.resize(n, n);
    sys.mass.setFromTriplets(m_trips.begin(), m_trips.end());
    return sys;
}

namespace {

EigenResult finalize(const Mesh& mesh, const SpMatC& s, const SpMatD& m,
                     Eigen::MatrixXcd vectors, Eigen::VectorXd values, int k) {
    EigenResult result;
    result.eigenvalues = values.head(k);
    result.residuals.resize(k);
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXcd u = vectors.col(i);
        const double m_norm = std::sqrt(std::real(u.dot(m * u)));
        u /= m_norm;
        fix_phase(u);
        const Eigen::VectorXcd mu = m * u;
        result.residuals(i) = (s * u - values(i) * mu).norm() / mu.norm();
        ComplexField f;
        f.mesh = &mesh;
        f.values = std::move(u);
        result.eigenfunctions.push_back(std::move(f));
    }
    return result;
}

}  // namespace

EigenResult magnetic_eigs(const Mesh& mesh, const VectorPotentialField& A, double beta,
                          int k, const MagneticEigsOptions& options) {
    const int n = static_cast<int>(mesh.n_vertices());
    if (k < 1) throw FemError("magnetic_eigs: k must be >= 1");
    if (k > n) throw FemError("magnetic_eigs: k exceeds problem dimension");
    MagneticSystem sys = assemble_magnetic(mesh, A, beta);
    const SpMatC& s = sys.stiffness;
    const SpMatD& m = sys.mass;

    if (n < options.dense_threshold && !options.force_sparse) {
        Eigen::MatrixXcd sd(s);
        Eigen::MatrixXcd md(m.cast<cd>());
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(sd, md);
        if (es.info() != Eigen::Success) throw FemError("magnetic_eigs: dense solve failed");
        return finalize(mesh, s, m, es.eigenvectors().leftCols(k),
                        es.eigenvalues(), k);
    }

    // Shift-invert subspace iteration at sigma = options.shift.
    SpMatC shifted = s - cd(options.shift, 0.0) * m.cast<cd>();
    Eigen::SparseLU<SpMatC> lu(shifted);
    if (lu.info() != Eigen::Success)
        throw FemError("magnetic_eigs: factorization at shift failed");

    const int subspace = std::min(n, k + std::max(4, k));
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXcd v(n, subspace);
    for (int j = 0; j < subspace; ++j)
        for (int i = 0; i < n; ++i) v(i, j) = cd(unif(rng), unif(rng));
    m_orthonormalize(v, m);

    Eigen::VectorXd theta;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        Eigen::MatrixXcd z(n, subspace);
        for (int j = 0; j < subspace; ++j) z.col(j) = lu.solve(m * v.col(j).eval());
        m_orthonormalize(z, m);
        Eigen::MatrixXcd sz = s * z;
        Eigen::MatrixXcd h = z.adjoint() * sz;
        Eigen::MatrixXcd g = z.adjoint() * (m * z);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> small(h, g);
        if (small.info() != Eigen::Success)
            throw FemError("magnetic_eigs: Rayleigh-Ritz solve failed");
        v = z * small.eigenvectors();
        theta = small.eigenvalues();

        bool converged = true;
        for (int i = 0; i < k && converged; ++i) {
            const Eigen::VectorXcd u = v.col(i);
            const Eigen::VectorXcd mu = m * u;
            const double res = (s * u - cd(theta(i), 0.0) * mu).norm() / mu.norm();
            converged = res <= options.tolerance * (1.0 + std::abs(theta(i)));
        }
        if (converged) return finalize(mesh, s, m, v.leftCols(k), theta, k);
    }
    throw FemError("magnetic_eigs: shift-invert iteration did not converge");
}

void export_eigs_csv(const EigenResult& result, std::ostream& out) {
    out << "k,lambda,residual\n";
    char buf[128];
    for (Eigen::Index i = 0; i < result.eigenvalues.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g\n", static_cast<long>(i + 1),
                      result.eigenvalues(i), result.residuals(i));
        out << buf;
    }
}

}  // namespace magneu
