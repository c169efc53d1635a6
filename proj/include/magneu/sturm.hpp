#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "magneu/levelset.hpp"

namespace magneu {

struct SturmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Weighted problem -(P f')' + beta^2 Q f = kappa f on [0, a*] with
/// P(a) = a G(a), Q(a) = a / G(a) and natural conditions at both ends.
struct SLProblem {
    GProfile G;
    double beta = 0.0;
    double a_star = 0.0;

    static SLProblem from_profile(GProfile profile, double beta);
    static SLProblem with_constant(double g_value, double a_star, double beta);

    double P(double a) const { return a * G.eval(a); }
    double Q(double a) const { return a / G.eval(a); }
};

/// Eigenpairs on the 1-D grid; eigenfunctions are L2(da)-normalized and
/// real, with f1 positive on the interior.
struct SLSpectrum {
    std::vector<double> grid;  // nodes, ascending, grid.front() = 0
    Eigen::VectorXd eigenvalues;
    std::vector<Eigen::VectorXd> eigenfunctions;
};

/// Radial problem on ]0,R[: -v'' - v'/r + (beta r/2 - n/r)^2 v = kappa v,
/// with lim r v'(r) = 0 at 0 and v'(R) = 0.
struct RadialProblem {
    int n = 0;
    double beta = 0.0;
    double R = 1.0;
};

/// Nodes of a grid on [x0, x1] graded toward x0: first cell about
/// first_frac * (x1 - x0), cells growing geometrically by `ratio` until the
/// uniform fill size is reached.
std::vector<double> graded_grid(double x0, double x1, int n_cells,
                                double first_frac = 1e-4, double ratio = 1.05);

/// First k eigenpairs by P1 Galerkin on a grid graded toward a = 0, with
/// the weights integrated by 2-point Gauss per cell. Eigenvalues are found
/// by bisection on the tridiagonal pencil inertia, eigenvectors by shifted
/// inverse iteration; everything is deterministic.
SLSpectrum sl_eigs(const SLProblem& problem, int k, int n_grid);

/// Rayleigh quotient of nodal values on the sl_eigs grid, with the same
/// quadrature as the solver. Never smaller than the discrete kappa_1.
double rayleigh_quotient(const SLProblem& problem, const std::vector<double>& grid,
                         const Eigen::VectorXd& f);

/// kappa_1(4pi, beta) on [0, a*]; cross-checked internally against the
/// radial solver on the disk of the same area (same problem, different
/// variable).
double kappa_disk(double beta, double a_star, int n_grid = 4000);

/// First eigenvalue kappa_1(n, beta, R) of the radial problem. The grid is
/// graded toward r = 0 with the first node at R * 1e-4, which truncates the
/// n^2/r^2 singularity harmlessly (the eigenfunction vanishes like r^|n|).
double disk_radial_kappa(int n, double beta, double R, int n_grid = 4000);

struct DiskLambda {
    double lambda = 0.0;
    int n_argmin = 0;
    /// The a-priori channel bound |n|(|n|/R^2 - beta) exceeds lambda for all
    /// |n| > n_max, so the truncation at n_max loses nothing.
    bool truncation_justified = false;
};

/// lambda_1^N(B_R, beta) = min over |n| <= n_max of kappa_1(n, beta, R).
DiskLambda disk_lambda1(double beta, double R, int n_max = 12, int n_grid = 4000);

/// The largest field strength for which the disk ground state is radial:
/// bisection on the sign of min_{0<|n|<=n_max} kappa_1(n,beta,1) -
/// kappa_1(0,beta,1), bracketed in [1, 8]. Throws SturmError when the
/// bracket carries no sign change.
double beta_star(double tol, int n_grid = 4000, int n_max = 12);

/// CSV exports: `k, kappa` and `a, f`.
void export_spectrum_csv(const SLSpectrum& spectrum, std::ostream& out);
void export_eigenfunction_csv(const SLSpectrum& spectrum, int k, std::ostream& out);

}  // namespace magneu
