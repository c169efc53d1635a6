#include "magneu/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace magneu {

namespace {

struct TriCut {
    double super_area = 0.0;  // area of {psi_h > t} inside the triangle
    double seg_len = 0.0;     // length of the level segment
    bool cut = false;
};

// Exact clip of the linear interpolant on one triangle against threshold t.
TriCut clip_triangle(const Vec2 p[3], const double v[3], double t) {
    TriCut out;
    const bool above[3] = {v[0] > t, v[1] > t, v[2] > t};
    const int n_above = above[0] + above[1] + above[2];
    const double full = 0.5 * std::abs(cross(p[1] - p[0], p[2] - p[0]));
    if (n_above == 0) return out;
    if (n_above == 3) {
        out.super_area = full;
        return out;
    }
    // one or two vertices above: the super-level part is a triangle or a quad
    Vec2 poly[4];
    Vec2 cuts[2];
    int np = 0, nc = 0;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        if (above[i]) poly[np++] = p[i];
        if (above[i] != above[j]) {
            const double s = (t - v[i]) / (v[j] - v[i]);
            const Vec2 q = p[i] + s * (p[j] - p[i]);
            poly[np++] = q;
            if (nc < 2) cuts[nc++] = q;
        }
    }
    double area2 = 0.0;
    for (int i = 0; i < np; ++i) area2 += cross(poly[i], poly[(i + 1) % np]);
    out.super_area = 0.5 * std::abs(area2);
    out.cut = (nc == 2);
    if (out.cut) out.seg_len = norm(cuts[1] - cuts[0]);
    return out;
}

}  // namespace

GProfile GProfile::constant(double value, double a_star, int n_points) {
    GProfile p;
    p.a_star = a_star;
    p.is_constant = true;
    p.constant_value = value;
    const int n = std::max(2, n_points);
    p.a.resize(n);
    p.g.assign(n, value);
    for (int i = 0; i < n; ++i) p.a[i] = a_star * i / (n - 1);
    return p;
}

double GProfile::eval(double at) const {
    if (is_constant) return constant_value;
    if (at <= a.front()) return g.front();
    if (at >= a.back()) return g.back();
    const auto it = std::upper_bound(a.begin(), a.end(), at);
    const std::size_t i = static_cast<std::size_t>(it - a.begin());
    const double w = (at - a[i - 1]) / (a[i] - a[i - 1]);
    return g[i - 1] + w * (g[i] - g[i - 1]);
}

double GProfile::min_value() const {
    return is_constant ? constant_value : *std::min_element(g.begin(), g.end());
}

double GProfile::max_value() const {
    return is_constant ? constant_value : *std::max_element(g.begin(), g.end());
}

LevelProfile level_profile(const ScalarField& psi, int n_levels) {
    if (psi.mesh == nullptr) throw LevelsetError("level_profile: field has no mesh");
    if (n_levels < 2) throw LevelsetError("level_profile: need at least 2 levels");
    const Mesh& mesh = *psi.mesh;
    const double t_star = psi.values.maxCoeff();
    const double scale = std::max(t_star, 1.0e-300);

    const std::vector<bool> on_boundary = mesh.boundary_vertex_mask();
    for (Eigen::Index i = 0; i < psi.values.size(); ++i) {
        if (on_boundary[i] && std::abs(psi.values(i)) > 1e-12 * scale)
            throw LevelsetError("level_profile: field does not vanish on the boundary");
        if (!on_boundary[i] && psi.values(i) < -1e-12 * scale)
            throw LevelsetError("level_profile: negative interior value");
    }

    LevelProfile profile;
    profile.t_star = t_star;
    profile.mesh_area = mesh.total_area();
    profile.mesh_h = mesh.h;
    if (!(t_star > 0.0)) return profile;  // identically zero field

    const double lo = t_star * 1e-3;
    const double hi = t_star * (1.0 - 1e-3);
    profile.thresholds.resize(n_levels);
    for (int j = 0; j < n_levels; ++j)
        profile.thresholds[j] = hi - (hi - lo) * j / (n_levels - 1);

    const std::size_t nt = mesh.n_triangles();
    std::vector<std::array<double, 3>> tri_vals(nt);
    std::vector<double> grad_norm(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tr = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) tri_vals[t][i] = psi.values(tr[i]);
    }
    {
        const std::vector<Vec2> grads = p1_gradient(psi);
        for (std::size_t t = 0; t < nt; ++t) grad_norm[t] = norm(grads[t]);
    }

    profile.mu.assign(n_levels, 0.0);
    profile.gamma.assign(n_levels, 0.0);
    profile.perimeter.assign(n_levels, 0.0);
    profile.flux.assign(n_levels, 0.0);

    const double grad_eps = 1e-14;
    for (int j = 0; j < n_levels; ++j) {
        const double t = profile.thresholds[j];
        double mu = 0.0, gamma = 0.0, per = 0.0, flux = 0.0;
        for (std::size_t k = 0; k < nt; ++k) {
            const auto& tr = mesh.triangles[k];
            Vec2 p[3];
            for (int i = 0; i < 3; ++i) p[i] = mesh.vertices[tr[i]];
            const TriCut c = clip_triangle(p, tri_vals[k].data(), t);
            mu += c.super_area;
            if (!c.cut) continue;
            per += c.seg_len;
            const double g = grad_norm[k];
            if (g > grad_eps) {
                gamma += c.seg_len / g;
                flux += c.seg_len * g;
            } else {
                profile.plateau_skipped = true;
            }
        }
        profile.mu[j] = mu;
        profile.gamma[j] = gamma;
        profile.perimeter[j] = per;
        profile.flux[j] = flux;
    }
    return profile;
}

double flux_identity_check(const LevelProfile& profile) {
    double worst = 0.0;
    for (std::size_t j = 0; j < profile.thresholds.size(); ++j) {
        if (profile.mu[j] < 0.05 * profile.mesh_area) continue;
        worst = std::max(worst, std::abs(profile.flux[j] - profile.mu[j]) / profile.mu[j]);
    }
    return worst;
}

double derivative_identity_check(const LevelProfile& profile) {
    double worst = 0.0;
    if (profile.thresholds.empty()) return worst;
    // gamma extended constantly on (t_0, t*]
    double integral = profile.gamma.front() * (profile.t_star - profile.thresholds.front());
    for (std::size_t j = 0; j < profile.thresholds.size(); ++j) {
        if (j > 0)
            integral += 0.5 * (profile.gamma[j - 1] + profile.gamma[j]) *
                        (profile.thresholds[j - 1] - profile.thresholds[j]);
        if (profile.mu[j] < 0.05 * profile.mesh_area) continue;
        worst = std::max(worst, std::abs(integral - profile.mu[j]) / profile.mu[j]);
    }
    return worst;
}

GProfile g_profile(const LevelProfile& profile, int n_points) {
    const std::size_t n = profile.thresholds.size();
    if (n < 2) throw LevelsetError("g_profile: profile has too few thresholds");
    const double a_star = profile.mesh_area;

    // A level line is resolved only when the super-level set is a few mesh
    // cells wide (inscribed width ~ 2 mu / perimeter, which adapts to
    // anisotropic level sets) and the line stays a cell or two away from
    // the boundary layer. Outside that window the samples are slicing noise
    // and G is extended constantly.
    const double h = profile.mesh_h;
    const auto resolved = [&](std::size_t j) {
        if (h <= 0.0) return true;
        const double per = profile.perimeter[j];
        if (!(per > 0.0)) return false;
        if (2.0 * profile.mu[j] / per < 6.0 * h && profile.mu[j] < 0.5 * a_star)
            return false;
        if (a_star - profile.mu[j] < 1.5 * h * per &&
            a_star - profile.mu[j] < 0.25 * a_star)
            return false;
        return true;
    };

    // mu must be nondecreasing along descending thresholds; collapse ties by
    // keeping the first threshold of each plateau. Since the mu and gamma
    // knots coincide, composing gamma(t) with t(mu) reduces to piecewise
    // linear interpolation of gamma against mu.
    std::vector<double> mu_knots;
    std::vector<double> g_knots;
    const double tie_tol = 1e-12 * a_star;
    bool collapsed = false;
    for (std::size_t j = 0; j < n; ++j) {
        if (!mu_knots.empty() && profile.mu[j] < mu_knots.back() - tie_tol)
            throw LevelsetError("g_profile: mu is not monotone");
        if (!resolved(j)) continue;
        if (!mu_knots.empty() && profile.mu[j] <= mu_knots.back() + tie_tol) {
            collapsed = true;
            continue;
        }
        mu_knots.push_back(profile.mu[j]);
        g_knots.push_back(profile.gamma[j]);
    }
    if (mu_knots.size() < 3)
        throw LevelsetError("g_profile: too few resolved levels to invert mu");

    // The constant extensions inherit the full noise of a single edge
    // sample; stabilize the two end knots with a small median window.
    const auto median_of = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    const std::size_t win = std::min<std::size_t>(5, g_knots.size());
    g_knots.front() = median_of({g_knots.begin(), g_knots.begin() + win});
    g_knots.back() = median_of({g_knots.end() - win, g_knots.end()});

    GProfile out;
    out.a_star = a_star;
    out.ties_collapsed = collapsed;
    const int np = n_points > 1 ? n_points : static_cast<int>(n) + 1;
    out.a.resize(np);
    out.g.resize(np);
    std::size_t seg = 0;
    for (int i = 0; i < np; ++i) {
        const double a = a_star * i / (np - 1);
        out.a[i] = a;
        if (a <= mu_knots.front()) {
            out.g[i] = g_knots.front();
            continue;
        }
        if (a >= mu_knots.back()) {
            out.g[i] = g_knots.back();
            continue;
        }
        while (seg + 2 < mu_knots.size() && mu_knots[seg + 1] < a) ++seg;
        const double span = mu_knots[seg + 1] - mu_knots[seg];
        const double w = span > 0.0 ? std::clamp((a - mu_knots[seg]) / span, 0.0, 1.0) : 0.0;
        out.g[i] = g_knots[seg] + w * (g_knots[seg + 1] - g_knots[seg]);
    }
    return out;
}

void export_level_csv(const LevelProfile& profile, std::ostream& out) {
    out << "t,mu,gamma,perimeter,flux\n";
    char buf[256];
    for (std::size_t j = 0; j < profile.thresholds.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      profile.thresholds[j], profile.mu[j], profile.gamma[j],
                      profile.perimeter[j], profile.flux[j]);
        out << buf;
    }
}

void export_g_csv(const GProfile& profile, std::ostream& out) {
    out << "a,G\n";
    char buf[128];
    for (std::size_t i = 0; i < profile.a.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", profile.a[i], profile.g[i]);
        out << buf;
    }
}

}  // namespace magneu
