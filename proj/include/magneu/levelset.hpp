#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "magneu/fem.hpp"
#include "magneu/geometry.hpp"

namespace magneu {

struct LevelsetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Discrete isoperimetric tolerance at the reference resolution
/// (h = 0.05, n_levels = 200), calibrated on the disk.
inline constexpr double kTolIso = 0.02;

/// Level-line statistics of a torsion-type P1 field, sliced exactly:
/// for each threshold t (descending from near t* to near 0),
///   mu        = area of the super-level set {psi_h > t}
///   gamma     = integral of 1/|grad psi_h| over the level line
///   perimeter = length of the level line
///   flux      = integral of |grad psi_h| over the level line.
struct LevelProfile {
    double t_star = 0.0;
    double mesh_area = 0.0;
    double mesh_h = 0.0;  // resolution of the carrying mesh
    std::vector<double> thresholds;  // descending
    std::vector<double> mu;          // nondecreasing as t decreases
    std::vector<double> gamma;
    std::vector<double> perimeter;
    std::vector<double> flux;
    bool plateau_skipped = false;  // a cut hit a zero-gradient triangle
};

/// The level-line coefficient reparametrized by enclosed area:
/// G(a) = gamma(mu^{-1}(a)) on a uniform grid over [0, a*].
struct GProfile {
    std::vector<double> a;  // strictly increasing, a.front() = 0, a.back() = a_star
    std::vector<double> g;
    double a_star = 0.0;
    bool is_constant = false;
    double constant_value = 0.0;
    bool ties_collapsed = false;  // mu plateaus merged during inversion

    static GProfile constant(double value, double a_star, int n_points = 2);

    /// Piecewise-linear evaluation with constant extrapolation at the ends.
    double eval(double at) const;
    double min_value() const;
    double max_value() const;
};

/// Slice psi against n_levels uniform thresholds in
/// [t* 1e-3, t* (1 - 1e-3)]. Rejects fields with negative interior values
/// or nonzero boundary values. A field that is identically zero (a mesh
/// with no interior vertex) yields an empty profile.
LevelProfile level_profile(const ScalarField& psi, int n_levels);

/// Max relative deviation of the discrete Green identity
/// flux(t) = mu(t), over thresholds with mu >= 0.05 a*.
double flux_identity_check(const LevelProfile& profile);

/// Max relative deviation of mu(t) from the trapezoid integral of gamma
/// over [t, t*], over thresholds with mu >= 0.05 a*.
double derivative_identity_check(const LevelProfile& profile);

/// Invert t -> mu(t) (piecewise linear, ties collapsed onto the first
/// threshold) and compose with gamma to obtain G on a uniform a-grid with
/// n_points points (0 = one point per threshold plus endpoints).
/// Super-level sets smaller than a few mesh cells cannot resolve the level
/// line; samples with mu below ~pi (4h)^2 are dropped and G is extended
/// constantly from the first resolved sample, matching the endpoint
/// convention.
GProfile g_profile(const LevelProfile& profile, int n_points = 0);

/// CSV export: `t, mu, gamma, perimeter, flux`.
void export_level_csv(const LevelProfile& profile, std::ostream& out);
/// CSV export: `a, G`.
void export_g_csv(const GProfile& profile, std::ostream& out);

}  // namespace magneu
