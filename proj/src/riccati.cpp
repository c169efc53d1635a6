#include "magneu/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace magneu {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kDegeneracyGap = 1e-8;
}  // namespace

PhasePath phase_path(const SLSpectrum& spectrum, const SLProblem& problem) {
    if (spectrum.eigenfunctions.empty())
        throw RiccatiError("phase_path: spectrum carries no eigenfunctions");
    const std::vector<double>& grid = spectrum.grid;
    const Eigen::VectorXd& f = spectrum.eigenfunctions.front();
    const int n = static_cast<int>(grid.size());
    for (int i = 1; i + 1 < n; ++i)
        if (!(f(i) > 0.0))
            throw RiccatiError("phase_path: first eigenfunction not positive");

    Eigen::VectorXd cell_y(n - 1);
    for (int c = 0; c + 1 < n; ++c) {
        const double h = grid[c + 1] - grid[c];
        const double mid = 0.5 * (grid[c] + grid[c + 1]);
        cell_y(c) = problem.P(mid) * (f(c + 1) - f(c)) / h;
    }
    PhasePath path;
    path.grid = grid;
    path.X = f;
    path.Y.resize(n);
    path.Y(0) = cell_y(0);
    path.Y(n - 1) = cell_y(n - 2);
    for (int i = 1; i + 1 < n; ++i) path.Y(i) = 0.5 * (cell_y(i - 1) + cell_y(i));
    path.R.resize(n);
    for (int i = 0; i < n; ++i) path.R(i) = path.Y(i) / path.X(i);
    return path;
}

double riccati_residual(const PhasePath& path, const SLProblem& problem, double kappa) {
    const std::vector<double>& grid = path.grid;
    const int n = static_cast<int>(grid.size());
    const double b2 = problem.beta * problem.beta;
    const double lo = 0.05 * problem.a_star, hi = 0.95 * problem.a_star;
    double max_q = 0.0;
    for (double a : grid)
        if (a > 0.0) max_q = std::max(max_q, problem.Q(a));
    const double scale = b2 * max_q + std::abs(kappa);

    double worst = 0.0;
    for (int c = 0; c + 1 < n; ++c) {
        const double a0 = grid[c], a1 = grid[c + 1];
        if (a0 < lo || a1 > hi) continue;
        const double mid = 0.5 * (a0 + a1);
        const double r_mid = 0.5 * (path.R(c) + path.R(c + 1));
        const double lhs = (path.R(c + 1) - path.R(c)) / (a1 - a0);
        const double rhs = b2 * problem.Q(mid) - kappa - r_mid * r_mid / problem.P(mid);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    // absolute residual when the normalizing scale degenerates (beta = 0,
    // kappa = 0: the equation itself collapses to R' = 0)
    return scale > 1e-12 ? worst / scale : worst;
}

double riccati_supersolution_identity(const SLProblem& problem,
                                      const std::vector<double>& grid) {
    const double b2 = problem.beta * problem.beta;
    double worst = 0.0;
    for (double a : grid) {
        if (!(a > 0.0)) continue;
        const double z = problem.beta * a;
        worst = std::max(worst, std::abs(b2 * problem.Q(a) - z * z / problem.P(a)));
    }
    return worst;
}

ConvexPath ConvexPath::between(GProfile g0, GProfile g1, double beta, int n_z) {
    if (n_z < 2) throw RiccatiError("ConvexPath: need at least 2 z points");
    if (std::abs(g0.a_star - g1.a_star) > 1e-12 * std::max(g0.a_star, g1.a_star))
        throw RiccatiError("ConvexPath: profiles live on different intervals");
    ConvexPath path;
    path.g0 = std::move(g0);
    path.g1 = std::move(g1);
    path.beta = beta;
    path.z_grid.resize(n_z);
    for (int i = 0; i < n_z; ++i) path.z_grid[i] = static_cast<double>(i) / (n_z - 1);
    return path;
}

GProfile ConvexPath::at(double z) const {
    if (z < 0.0 || z > 1.0) throw RiccatiError("ConvexPath: z outside [0, 1]");
    // merge the two grids so no kink of either profile is lost
    std::vector<double> grid = g0.a;
    grid.insert(grid.end(), g1.a.begin(), g1.a.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [&](double x, double y) {
                               return std::abs(x - y) < 1e-14 * std::max(1.0, g0.a_star);
                           }),
               grid.end());
    GProfile out;
    out.a_star = g0.a_star;
    out.a = std::move(grid);
    out.g.resize(out.a.size());
    for (std::size_t i = 0; i < out.a.size(); ++i)
        out.g[i] = (1.0 - z) * g0.eval(out.a[i]) + z * g1.eval(out.a[i]);
    if (g0.is_constant && g1.is_constant) {
        out.is_constant = true;
        out.constant_value = (1.0 - z) * g0.constant_value + z * g1.constant_value;
    }
    return out;
}

FHResult fh_derivative(const ConvexPath& path, double z, int n_grid) {
    const GProfile gz = path.at(z);
    const SLProblem problem = SLProblem::from_profile(gz, path.beta);
    const SLSpectrum spec = sl_eigs(problem, 2, n_grid);
    if (spec.eigenvalues(1) - spec.eigenvalues(0) < kDegeneracyGap)
        throw RiccatiError("fh_derivative: kappa_1 nearly degenerate");
    const PhasePath pp = phase_path(spec, problem);

    const double b2 = path.beta * path.beta;
    const int n = static_cast<int>(pp.grid.size());
    Eigen::VectorXd integrand(n);
    integrand(0) = 0.0;  // Y = O(a), X bounded: the limit at a = 0 vanishes
    for (int i = 1; i < n; ++i) {
        const double a = pp.grid[i];
        const double dg = path.g1.eval(a) - path.g0.eval(a);
        const double g = gz.eval(a);
        const double y2 = pp.Y(i) * pp.Y(i);
        const double x2 = pp.X(i) * pp.X(i);
        integrand(i) = (y2 - b2 * a * a * x2) * dg / (a * g * g);
    }
    FHResult out;
    out.kappa = spec.eigenvalues(0);
    for (int c = 0; c + 1 < n; ++c)
        out.kappa_prime +=
            0.5 * (integrand(c) + integrand(c + 1)) * (pp.grid[c + 1] - pp.grid[c]);
    return out;
}

MonotonicityReport monotonicity_sweep(const ConvexPath& path, int n_grid) {
    // hypothesis: G0 <= G1 on the merged grid, not identical
    const GProfile lo = path.at(0.0);
    double max_violation = 0.0, max_gap = 0.0;
    for (std::size_t i = 0; i < lo.a.size(); ++i) {
        const double d = path.g1.eval(lo.a[i]) - path.g0.eval(lo.a[i]);
        max_violation = std::max(max_violation, -d);
        max_gap = std::max(max_gap, d);
    }
    const double tol = 1e-9 * kFourPi;
    if (max_violation > tol)
        throw RiccatiError("monotonicity_sweep: G0 <= G1 violated");

    MonotonicityReport report;
    report.z = path.z_grid;
    for (double z : path.z_grid) {
        const SLProblem problem = SLProblem::from_profile(path.at(z), path.beta);
        report.kappa.push_back(sl_eigs(problem, 1, n_grid).eigenvalues(0));
    }
    report.solver_tolerance =
        1e-10 * (1.0 + std::abs(report.kappa.front()));
    if (max_gap <= tol) {
        report.verdict = MonotonicityVerdict::degenerate;
        return report;
    }
    report.min_decrement = std::numeric_limits<double>::max();
    for (std::size_t i = 1; i < report.kappa.size(); ++i)
        report.min_decrement =
            std::min(report.min_decrement, report.kappa[i - 1] - report.kappa[i]);
    report.verdict = report.min_decrement > report.solver_tolerance
                         ? MonotonicityVerdict::strictly_decreasing
                         : MonotonicityVerdict::degenerate;
    return report;
}

TruncationReport truncation_sequence(const GProfile& g, double beta, int N,
                                     int n_grid) {
    if (N < 1) throw RiccatiError("truncation_sequence: N must be >= 1");
    TruncationReport report;
    const double g_max = g.max_value();
    for (int n = 1; n <= N; ++n) {
        const double cap = kFourPi * n;
        GProfile capped = g;
        capped.is_constant = false;
        for (double& v : capped.g) v = std::min(v, cap);
        if (g.is_constant) {
            capped.is_constant = true;
            capped.constant_value = std::min(g.constant_value, cap);
        }
        report.caps.push_back(cap);
        report.kappa.push_back(
            sl_eigs(SLProblem::from_profile(capped, beta), 1, n_grid).eigenvalues(0));
        if (report.stabilized_at < 0 && cap >= g_max) report.stabilized_at = n;
    }
    report.non_increasing = true;
    for (std::size_t i = 1; i < report.kappa.size(); ++i)
        if (report.kappa[i] > report.kappa[i - 1] +
                                  1e-10 * (1.0 + std::abs(report.kappa[i - 1])))
            report.non_increasing = false;
    return report;
}

void export_sweep_csv(const std::vector<double>& z, const std::vector<double>& kappa,
                      const std::vector<double>& fh, const std::vector<double>& fd,
                      std::ostream& out) {
    out << "z,kappa,kappa_prime_fh,kappa_prime_fd\n";
    char buf[160];
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double a = i < kappa.size() ? kappa[i] : std::nan("");
        const double b = i < fh.size() ? fh[i] : std::nan("");
        const double c = i < fd.size() ? fd[i] : std::nan("");
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", z[i], a, b, c);
        out << buf;
    }
}

}  // namespace magneu
