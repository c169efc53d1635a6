#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "magneu/sturm.hpp"

namespace magneu {

struct RiccatiError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Phase-plane data of a first eigenfunction: X = f1, Y = P f1' (the
/// quasi-derivative, per-cell values averaged to nodes), R = Y/X.
struct PhasePath {
    std::vector<double> grid;
    Eigen::VectorXd X;
    Eigen::VectorXd Y;
    Eigen::VectorXd R;
};

/// Builds the phase path from a computed spectrum. Rejects spectra whose
/// first eigenfunction is not positive on the interior (wrong branch).
PhasePath phase_path(const SLSpectrum& spectrum, const SLProblem& problem);

/// Max discrete residual of R' = beta^2 Q - kappa - R^2 / P over the inner
/// 90% of the interval, normalized by beta^2 max Q + |kappa| (absolute when
/// that scale vanishes).
double riccati_residual(const PhasePath& path, const SLProblem& problem, double kappa);

/// Algebraic identity F(a, beta a) = -kappa for the Riccati right-hand
/// side: returns max_i |beta^2 Q(a_i) - (beta a_i)^2 / P(a_i)| over interior
/// nodes; zero up to rounding for P = aG, Q = a/G.
double riccati_supersolution_identity(const SLProblem& problem,
                                      const std::vector<double>& grid);

/// Convex interpolation G_z = (1-z) G0 + z G1 between two profiles on a
/// common interval.
struct ConvexPath {
    GProfile g0, g1;
    double beta = 0.0;
    std::vector<double> z_grid;

    static ConvexPath between(GProfile g0, GProfile g1, double beta, int n_z = 11);
    GProfile at(double z) const;
};

struct FHResult {
    double kappa = 0.0;
    double kappa_prime = 0.0;  // eqn-level derivative from the (X, Y) integral
};

/// kappa(z) and its derivative via the phase-plane integral
///   kappa'(z) = int (Y^2 - beta^2 a^2 X^2) dG(a) / (a G_z(a)^2) da,
/// trapezoid on the solver grid with the integrand set to its limit 0 at
/// a = 0. Rejects near-degenerate kappa_1 (gap below 1e-8).
FHResult fh_derivative(const ConvexPath& path, double z, int n_grid = 2000);

enum class MonotonicityVerdict { strictly_decreasing, degenerate };

struct MonotonicityReport {
    std::vector<double> z;
    std::vector<double> kappa;
    MonotonicityVerdict verdict = MonotonicityVerdict::degenerate;
    double min_decrement = 0.0;   // smallest kappa(z_i) - kappa(z_{i+1})
    double solver_tolerance = 0.0;
};

/// kappa along the z-grid; throws when G0 <= G1 fails beyond tolerance.
MonotonicityReport monotonicity_sweep(const ConvexPath& path, int n_grid = 2000);

struct TruncationReport {
    std::vector<double> caps;   // 4 n pi
    std::vector<double> kappa;  // kappa_1(min(G, 4 n pi), beta)
    bool non_increasing = false;
    int stabilized_at = -1;  // first n whose cap clears max G
};

/// Capped profiles G_n = min(G, 4 n pi) for n = 1..N; kappa_1 is
/// non-increasing in n and settles once the cap clears max G.
TruncationReport truncation_sequence(const GProfile& g, double beta, int N,
                                     int n_grid = 2000);

/// CSV export: `z, kappa, kappa_prime_fh, kappa_prime_fd`.
void export_sweep_csv(const std::vector<double>& z, const std::vector<double>& kappa,
                      const std::vector<double>& fh, const std::vector<double>& fd,
                      std::ostream& out);

}  // namespace magneu
