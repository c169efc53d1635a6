#include "magneu/sturm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>

namespace magneu {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;

// Symmetric tridiagonal pencil (K, M) from P1 assembly on one grid. The
// per-cell quadrature data is kept so quadratic forms can be evaluated as
// sums of squares (no cancellation for near-constant vectors).
struct Pencil {
    Eigen::VectorXd k_diag, k_off;
    Eigen::VectorXd m_diag, m_off;
    Eigen::VectorXd cell_p;         // sum of p-quadrature per cell, / h^2
    Eigen::VectorXd cell_q[2];      // q-quadrature at each Gauss point
    int n() const { return static_cast<int>(k_diag.size()); }
};

// 2-point Gauss nodes on [-1, 1]; P1 basis values at those points.
constexpr double kGaussNode = 0.5773502691896257;
constexpr double kPhi0[2] = {0.5 * (1.0 + kGaussNode), 0.5 * (1.0 - kGaussNode)};
constexpr double kPhi1[2] = {0.5 * (1.0 - kGaussNode), 0.5 * (1.0 + kGaussNode)};

// Assemble int (p u' v' + q u v) dx and int (w u v) dx on the given nodes.
Pencil assemble(const std::vector<double>& grid,
                const std::function<double(double)>& p,
                const std::function<double(double)>& q,
                const std::function<double(double)>& w) {
    const int n = static_cast<int>(grid.size());
    Pencil pc;
    pc.k_diag = Eigen::VectorXd::Zero(n);
    pc.k_off = Eigen::VectorXd::Zero(n - 1);
    pc.m_diag = Eigen::VectorXd::Zero(n);
    pc.m_off = Eigen::VectorXd::Zero(n - 1);
    pc.cell_p = Eigen::VectorXd::Zero(n - 1);
    pc.cell_q[0] = Eigen::VectorXd::Zero(n - 1);
    pc.cell_q[1] = Eigen::VectorXd::Zero(n - 1);
    for (int c = 0; c < n - 1; ++c) {
        const double x0 = grid[c], x1 = grid[c + 1];
        const double h = x1 - x0;
        const double mid = 0.5 * (x0 + x1);
        const double half = 0.5 * h;
        for (int g = 0; g < 2; ++g) {
            const double x = mid + (g == 0 ? -1.0 : 1.0) * kGaussNode * half;
            const double wt = half;  // Gauss weight 1 on [-1,1], scaled
            const double phi0 = kPhi0[g], phi1 = kPhi1[g];
            const double pv = p(x) * wt / (h * h);
            pc.cell_p(c) += pv;
            pc.k_diag(c) += pv;
            pc.k_diag(c + 1) += pv;
            pc.k_off(c) -= pv;
            const double qv = q(x) * wt;
            pc.cell_q[g](c) = qv;
            pc.k_diag(c) += qv * phi0 * phi0;
            pc.k_diag(c + 1) += qv * phi1 * phi1;
            pc.k_off(c) += qv * phi0 * phi1;
            const double wv = w(x) * wt;
            pc.m_diag(c) += wv * phi0 * phi0;
            pc.m_diag(c + 1) += wv * phi1 * phi1;
            pc.m_off(c) += wv * phi0 * phi1;
        }
    }
    return pc;
}

// Number of pencil eigenvalues strictly below x, via the inertia of
// K - x M (LDL^T sign count on the tridiagonal).
int count_below(const Pencil& pc, double x) {
    const int n = pc.n();
    int count = 0;
    double d_prev = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = pc.k_diag(i) - x * pc.m_diag(i);
        if (i > 0) {
            const double e = pc.k_off(i - 1) - x * pc.m_off(i - 1);
            if (d_prev == 0.0) d_prev = 1e-300;
            d -= e * e / d_prev;
        }
        if (d < 0.0) ++count;
        if (d == 0.0) d = -1e-300;  // treat exact singularity as below
        d_prev = d;
    }
    return count;
}

double upper_bound(const Pencil& pc) {
    const int n = pc.n();
    double hi = 0.0;
    for (int i = 0; i < n; ++i) {
        double k_row = std::abs(pc.k_diag(i));
        double m_row = pc.m_diag(i);
        if (i > 0) {
            k_row += std::abs(pc.k_off(i - 1));
            m_row -= std::abs(pc.m_off(i - 1));
        }
        if (i + 1 < n) {
            k_row += std::abs(pc.k_off(i));
            m_row -= std::abs(pc.m_off(i));
        }
        if (m_row <= 0.0) return 1e18;  // mass lost diagonal dominance
        hi = std::max(hi, k_row / m_row);
    }
    return hi + 1.0;
}

// k_index is 1-based: bisect until the k-th eigenvalue is isolated to
// machine-level relative precision.
double bisect_eigenvalue(const Pencil& pc, int k_index, double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(pc, mid) >= k_index)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-14 * (1.0 + std::abs(lo) + std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

// Solve (K - sigma M) x = b with partial-pivot LU on the tridiagonal.
class ShiftedSolver {
public:
    ShiftedSolver(const Pencil& pc, double sigma) {
        const int n = pc.n();
        dl_.resize(n - 1);
        d_.resize(n);
        du_.resize(n - 1);
        du2_.assign(n, 0.0);
        perm_.assign(n, 0);
        for (int i = 0; i < n; ++i) d_[i] = pc.k_diag(i) - sigma * pc.m_diag(i);
        for (int i = 0; i < n - 1; ++i) {
            dl_[i] = pc.k_off(i) - sigma * pc.m_off(i);
            du_[i] = dl_[i];
        }
        // LU with partial pivoting (LAPACK-style gttrf)
        for (int i = 0; i < n - 1; ++i) {
            if (std::abs(d_[i]) >= std::abs(dl_[i])) {
                perm_[i] = 0;
                if (d_[i] == 0.0) d_[i] = 1e-300;
                const double f = dl_[i] / d_[i];
                dl_[i] = f;
                d_[i + 1] -= f * du_[i];
            } else {
                perm_[i] = 1;
                const double f = d_[i] / dl_[i];
                d_[i] = dl_[i];
                dl_[i] = f;
                const double tmp = du_[i];
                du_[i] = d_[i + 1];
                d_[i + 1] = tmp - f * d_[i + 1];
                if (i + 2 < n) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -f * du_[i + 1];
                }
            }
        }
        if (d_[n - 1] == 0.0) d_[n - 1] = 1e-300;
    }

    Eigen::VectorXd solve(Eigen::VectorXd b) const {
        const int n = static_cast<int>(d_.size());
        for (int i = 0; i < n - 1; ++i) {
            if (perm_[i] == 1) std::swap(b(i), b(i + 1));
            b(i + 1) -= dl_[i] * b(i);
        }
        b(n - 1) /= d_[n - 1];
        if (n >= 2) b(n - 2) = (b(n - 2) - du_[n - 2] * b(n - 1)) / d_[n - 2];
        for (int i = n - 3; i >= 0; --i)
            b(i) = (b(i) - du_[i] * b(i + 1) - du2_[i] * b(i + 2)) / d_[i];
        return b;
    }

private:
    std::vector<double> dl_, d_, du_, du2_;
    std::vector<int> perm_;
};

Eigen::VectorXd mass_apply(const Pencil& pc, const Eigen::VectorXd& x) {
    const int n = pc.n();
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        double v = pc.m_diag(i) * x(i);
        if (i > 0) v += pc.m_off(i - 1) * x(i - 1);
        if (i + 1 < n) v += pc.m_off(i) * x(i + 1);
        y(i) = v;
    }
    return y;
}

double m_inner(const Pencil& pc, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return x.dot(mass_apply(pc, y));
}

// Deterministic inverse iteration near kappa, deflated against previous
// eigenvectors in the M inner product.
Eigen::VectorXd eigenvector_near(const Pencil& pc, double kappa,
                                 const std::vector<Eigen::VectorXd>& previous) {
    const int n = pc.n();
    const double sigma = kappa + 1e-10 * (1.0 + std::abs(kappa));
    const ShiftedSolver solver(pc, sigma);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = 1.0 + 0.3 * std::sin(2.7 * i);
    v /= std::sqrt(m_inner(pc, v, v));
    for (int it = 0; it < 6; ++it) {
        for (const auto& u : previous) v -= m_inner(pc, u, v) * u;
        v = solver.solve(mass_apply(pc, v));
        const double nrm = std::sqrt(m_inner(pc, v, v));
        if (!(nrm > 0.0) || !std::isfinite(nrm))
            throw SturmError("inverse iteration collapsed");
        v /= nrm;
    }
    for (const auto& u : previous) v -= m_inner(pc, u, v) * u;
    v /= std::sqrt(m_inner(pc, v, v));
    // deterministic sign: positive at the node of largest magnitude
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    return v;
}

// Cell-wise evaluation of f^T K f; every term is a square when p, q >= 0.
double stiffness_quadratic(const Pencil& pc, const Eigen::VectorXd& f) {
    double s = 0.0;
    for (int c = 0; c + 1 < pc.n(); ++c) {
        const double df = f(c + 1) - f(c);
        s += pc.cell_p(c) * df * df;
        for (int g = 0; g < 2; ++g) {
            const double v = kPhi0[g] * f(c) + kPhi1[g] * f(c + 1);
            s += pc.cell_q[g](c) * v * v;
        }
    }
    return s;
}

struct PencilEigs {
    Eigen::VectorXd values;
    std::vector<Eigen::VectorXd> vectors;
};

// Bisection isolates each eigenvalue; the Rayleigh quotient of the inverse
// iteration vector then removes the inertia-count noise floor (the residual
// enters the value only quadratically).
PencilEigs pencil_eigs(const Pencil& pc, int k, bool with_vectors) {
    if (k < 1 || k > pc.n()) throw SturmError("pencil_eigs: bad eigenpair count");
    const double hi0 = upper_bound(pc);
    PencilEigs out;
    out.values.resize(k);
    std::vector<Eigen::VectorXd> vectors;
    for (int j = 0; j < k; ++j) {
        const double isolated = bisect_eigenvalue(pc, j + 1, -1.0, hi0);
        vectors.push_back(eigenvector_near(pc, isolated, vectors));
        out.values(j) = stiffness_quadratic(pc, vectors.back()) /
                        m_inner(pc, vectors.back(), vectors.back());
    }
    if (with_vectors) out.vectors = std::move(vectors);
    return out;
}

}  // namespace

std::vector<double> graded_grid(double x0, double x1, int n_cells, double first_frac,
                                double ratio) {
    if (!(x1 > x0)) throw SturmError("graded_grid: empty interval");
    if (n_cells < 1) throw SturmError("graded_grid: need at least one cell");
    const double length = x1 - x0;
    const double d0 = first_frac * length;

    // longest geometric ramp that keeps cell sizes nondecreasing
    int n_ramp = 0;
    double ramp_len = 0.0;
    double cell = d0;
    for (int m = 1; m < n_cells; ++m) {
        const double next_len = ramp_len + cell;
        const double d_uniform = (length - next_len) / (n_cells - m);
        if (next_len >= length || d_uniform < cell) break;
        ramp_len = next_len;
        n_ramp = m;
        cell *= ratio;
    }

    std::vector<double> grid;
    grid.reserve(n_cells + 1);
    grid.push_back(x0);
    double x = x0;
    cell = d0;
    for (int m = 0; m < n_ramp; ++m) {
        x += cell;
        grid.push_back(x);
        cell *= ratio;
    }
    const int n_uniform = n_cells - n_ramp;
    const double d_uniform = (x1 - x) / n_uniform;
    for (int m = 1; m <= n_uniform; ++m) grid.push_back(x + m * d_uniform);
    grid.back() = x1;
    return grid;
}

SLProblem SLProblem::from_profile(GProfile profile, double beta) {
    if (beta < 0.0) throw SturmError("SLProblem: beta must be >= 0");
    if (profile.a.empty() || !(profile.a_star > 0.0))
        throw SturmError("SLProblem: empty profile");
    if (profile.min_value() < kFourPi * (1.0 - kTolIso))
        throw SturmError("SLProblem: G drops below 4*pi beyond tolerance");
    SLProblem p;
    p.a_star = profile.a_star;
    p.G = std::move(profile);
    p.beta = beta;
    return p;
}

SLProblem SLProblem::with_constant(double g_value, double a_star, double beta) {
    return from_profile(GProfile::constant(g_value, a_star), beta);
}

SLSpectrum sl_eigs(const SLProblem& problem, int k, int n_grid) {
    if (n_grid < 8) throw SturmError("sl_eigs: grid too small");
    if (k > n_grid) throw SturmError("sl_eigs: k exceeds grid size");
    SLSpectrum spec;
    spec.grid = graded_grid(0.0, problem.a_star, n_grid);
    const double b2 = problem.beta * problem.beta;
    const Pencil pc = assemble(
        spec.grid, [&](double a) { return problem.P(a); },
        [&](double a) { return b2 * problem.Q(a); }, [](double) { return 1.0; });
    PencilEigs eigs = pencil_eigs(pc, k, true);
    spec.eigenvalues = eigs.values;
    spec.eigenfunctions = std::move(eigs.vectors);
    // f1 is positive on the interior up to solver noise; enforce the sign
    // convention through the mean rather than a single node.
    if (!spec.eigenfunctions.empty()) {
        Eigen::VectorXd& f1 = spec.eigenfunctions.front();
        if (f1.sum() < 0.0) f1 = -f1;
    }
    return spec;
}

double rayleigh_quotient(const SLProblem& problem, const std::vector<double>& grid,
                         const Eigen::VectorXd& f) {
    if (static_cast<std::size_t>(f.size()) != grid.size())
        throw SturmError("rayleigh_quotient: size mismatch");
    const double b2 = problem.beta * problem.beta;
    const Pencil pc = assemble(
        grid, [&](double a) { return problem.P(a); },
        [&](double a) { return b2 * problem.Q(a); }, [](double) { return 1.0; });
    const double num = stiffness_quadratic(pc, f);
    const double den = m_inner(pc, f, f);
    if (!(den > 0.0)) throw SturmError("rayleigh_quotient: zero trial function");
    return num / den;
}

double disk_radial_kappa(int n, double beta, double R, int n_grid) {
    if (!(R > 0.0)) throw SturmError("disk_radial_kappa: R must be positive");
    if (beta < 0.0) throw SturmError("disk_radial_kappa: beta must be >= 0");
    const std::vector<double> grid = graded_grid(R * 1e-4, R, n_grid);
    const Pencil pc = assemble(
        grid, [](double r) { return r; },
        [&](double r) {
            const double t = 0.5 * beta * r - n / r;
            return t * t * r;
        },
        [](double r) { return r; });
    return pencil_eigs(pc, 1, false).values(0);
}

double kappa_disk(double beta, double a_star, int n_grid) {
    if (!(a_star > 0.0)) throw SturmError("kappa_disk: a_star must be positive");
    const SLProblem problem = SLProblem::with_constant(kFourPi, a_star, beta);
    const double kappa = sl_eigs(problem, 1, n_grid).eigenvalues(0);
    // Same problem after a = pi r^2; the two routes must agree.
    const double radial = disk_radial_kappa(0, beta, std::sqrt(a_star / kPi), n_grid);
    if (std::abs(kappa - radial) > 1e-4 * (1.0 + std::abs(kappa)))
        throw SturmError("kappa_disk: area and radial routes disagree");
    return kappa;
}

DiskLambda disk_lambda1(double beta, double R, int n_max, int n_grid) {
    if (n_max < 1) throw SturmError("disk_lambda1: n_max must be >= 1");
    DiskLambda out;
    out.lambda = disk_radial_kappa(0, beta, R, n_grid);
    out.n_argmin = 0;
    for (int n = -n_max; n <= n_max; ++n) {
        if (n == 0) continue;
        const double kappa = disk_radial_kappa(n, beta, R, n_grid);
        if (kappa < out.lambda) {
            out.lambda = kappa;
            out.n_argmin = n;
        }
    }
    // Channels above n_max are bounded below by the potential minimum
    // |n| (|n|/R^2 - beta), which grows quadratically in n.
    const double next = static_cast<double>(n_max) + 1.0;
    out.truncation_justified = next * (next / (R * R) - beta) > out.lambda;
    return out;
}

double beta_star(double tol, int n_grid, int n_max) {
    if (tol < 1e-5) throw SturmError("beta_star: tol must be >= 1e-5");
    const auto gap = [&](double beta) {
        double best = std::numeric_limits<double>::max();
        for (int n = -n_max; n <= n_max; ++n) {
            if (n == 0) continue;
            best = std::min(best, disk_radial_kappa(n, beta, 1.0, n_grid));
        }
        return best - disk_radial_kappa(0, beta, 1.0, n_grid);
    };
    double lo = 1.0, hi = 8.0;
    double g_lo = gap(lo), g_hi = gap(hi);
    if (!(g_lo > 0.0) || !(g_hi < 0.0))
        throw SturmError("beta_star: no sign change in bracket [1, 8]");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (gap(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void export_spectrum_csv(const SLSpectrum& spectrum, std::ostream& out) {
    out << "k,kappa\n";
    char buf[64];
    for (Eigen::Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%ld,%.17g\n", static_cast<long>(i + 1),
                      spectrum.eigenvalues(i));
        out << buf;
    }
}

void export_eigenfunction_csv(const SLSpectrum& spectrum, int k, std::ostream& out) {
    if (k < 1 || static_cast<std::size_t>(k) > spectrum.eigenfunctions.size())
        throw SturmError("export_eigenfunction_csv: bad index");
    out << "a,f\n";
    char buf[80];
    const Eigen::VectorXd& f = spectrum.eigenfunctions[k - 1];
    for (std::size_t i = 0; i < spectrum.grid.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", spectrum.grid[i],
                      f(static_cast<Eigen::Index>(i)));
        out << buf;
    }
}

}  // namespace magneu
