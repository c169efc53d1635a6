#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace magneu::detail {
namespace {

// nb[i] is the neighbor across the edge opposite v[i], i.e. the edge
// (v[(i+1)%3], v[(i+2)%3]); -1 on the hull. Vertices are CCW.
struct Tri {
    int v[3];
    int nb[3];
    bool alive = true;
};

double orient2d(Vec2 a, Vec2 b, Vec2 c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// > 0 when d lies strictly inside the circumcircle of CCW triangle (a,b,c).
double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
           ad * (bdx * cdy - bdy * cdx);
}

class Triangulation {
public:
    explicit Triangulation(const std::vector<Vec2>& input) : pts_(input) {
        if (input.size() < 3) throw MeshError("delaunay: fewer than 3 points");
        double lo_x = input[0].x, hi_x = lo_x, lo_y = input[0].y, hi_y = lo_y;
        for (const Vec2& p : input) {
            lo_x = std::min(lo_x, p.x);
            hi_x = std::max(hi_x, p.x);
            lo_y = std::min(lo_y, p.y);
            hi_y = std::max(hi_y, p.y);
        }
        scale_ = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
        // Four ordinary corner points of an enlarged bounding box; their
        // incident triangles are discarded at the end. Keeping them finite
        // and real means every incircle test is a plain geometric predicate.
        const double m = 8.0 * scale_;
        super_ = static_cast<int>(pts_.size());
        pts_.push_back({lo_x - m, lo_y - m});
        pts_.push_back({hi_x + m, lo_y - m});
        pts_.push_back({hi_x + m, hi_y + m});
        pts_.push_back({lo_x - m, hi_y + m});
        tris_.push_back(Tri{{super_, super_ + 1, super_ + 2}, {-1, 1, -1}, true});
        tris_.push_back(Tri{{super_, super_ + 2, super_ + 3}, {-1, -1, 0}, true});
        for (int i = 0; i < super_; ++i) insert(i);
    }

    std::vector<std::array<int, 3>> result() const {
        std::vector<std::array<int, 3>> out;
        for (const Tri& t : tris_) {
            if (!t.alive) continue;
            if (t.v[0] >= super_ || t.v[1] >= super_ || t.v[2] >= super_) continue;
            out.push_back({t.v[0], t.v[1], t.v[2]});
        }
        return out;
    }

private:
    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    int super_ = 0;
    int last_ = 0;
    double scale_ = 1.0;

    double eps_orient() const { return 1e-13 * scale_ * scale_; }

    // Walk toward p from the most recently created triangle. Returns the
    // containing triangle and, when p sits on one of its edges, that edge.
    std::pair<int, int> locate(Vec2 p) const {
        int cur = last_;
        for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
            const Tri& t = tris_[cur];
            int on_edge = -1;
            int n_on = 0;
            int next = -1;
            for (int e = 0; e < 3; ++e) {
                const Vec2 a = pts_[t.v[(e + 1) % 3]];
                const Vec2 b = pts_[t.v[(e + 2) % 3]];
                const double o = orient2d(a, b, p);
                if (o < -eps_orient()) {
                    next = t.nb[e];
                    break;
                }
                if (o <= eps_orient()) {
                    on_edge = e;
                    ++n_on;
                }
            }
            if (next == -1) {
                if (n_on > 1) throw MeshError("delaunay: duplicate point");
                return {cur, on_edge};
            }
            if (next < 0) throw MeshError("delaunay: walked off the hull");
            cur = next;
        }
        throw MeshError("delaunay: point location did not terminate");
    }

    int neighbor_index(int t, int nb) const {
        for (int e = 0; e < 3; ++e)
            if (tris_[t].nb[e] == nb) return e;
        throw MeshError("delaunay: inconsistent adjacency");
    }

    void set_neighbor(int t, int old_nb, int new_nb) {
        if (t < 0) return;
        tris_[t].nb[neighbor_index(t, old_nb)] = new_nb;
    }

    void insert(int pi) {
        const Vec2 p = pts_[pi];
        auto [ti, edge] = locate(p);
        std::vector<int> dirty;
        if (edge < 0) {
            split_interior(ti, pi, dirty);
        } else {
            split_edge(ti, edge, pi, dirty);
        }
        for (int t : dirty) legalize(t, pi);
    }

    // 1 -> 3 split of triangle ti at interior point pi. Child k keeps the
    // edge of ti opposite ti.v[k]; all children have v[0] == pi.
    void split_interior(int ti, int pi, std::vector<int>& dirty) {
        const Tri t = tris_[ti];
        const int base = static_cast<int>(tris_.size());
        for (int k = 0; k < 3; ++k) {
            Tri c;
            c.v[0] = pi;
            c.v[1] = t.v[(k + 1) % 3];
            c.v[2] = t.v[(k + 2) % 3];
            c.nb[0] = t.nb[k];
            c.nb[1] = base + (k + 1) % 3;  // shares edge (v[2], pi)
            c.nb[2] = base + (k + 2) % 3;  // shares edge (pi, v[1])
            tris_.push_back(c);
            set_neighbor(t.nb[k], ti, base + k);
        }
        tris_[ti].alive = false;
        last_ = base;
        dirty = {base, base + 1, base + 2};
    }

    // 2 -> 4 split when pi lies on the edge of ti opposite ti.v[edge].
    void split_edge(int ti, int edge, int pi, std::vector<int>& dirty) {
        const int tj = tris_[ti].nb[edge];
        if (tj < 0) {
            split_interior(ti, pi, dirty);  // hull edge of the super box
            return;
        }
        const Tri a = tris_[ti];
        const Tri b = tris_[tj];
        const int ja = edge;
        const int jb = neighbor_index(tj, ti);
        const int va = a.v[ja];
        const int u = a.v[(ja + 1) % 3];
        const int w = a.v[(ja + 2) % 3];
        const int vb = b.v[jb];  // b traverses the shared edge as (w, u)

        const int nb_va_u = a.nb[(ja + 2) % 3];  // across edge (va, u)
        const int nb_w_va = a.nb[(ja + 1) % 3];  // across edge (w, va)
        const int nb_u_vb = b.nb[(jb + 1) % 3];  // across edge (u, vb)
        const int nb_vb_w = b.nb[(jb + 2) % 3];  // across edge (vb, w)

        // CCW ring around pi: va, u, vb, w.
        const int ring[4] = {va, u, vb, w};
        const int outer[4] = {nb_va_u, nb_u_vb, nb_vb_w, nb_w_va};
        const int base = static_cast<int>(tris_.size());
        for (int k = 0; k < 4; ++k) {
            Tri c;
            c.v[0] = pi;
            c.v[1] = ring[k];
            c.v[2] = ring[(k + 1) % 4];
            c.nb[0] = outer[k];
            c.nb[1] = base + (k + 1) % 4;
            c.nb[2] = base + (k + 3) % 4;
            tris_.push_back(c);
        }
        set_neighbor(nb_va_u, ti, base + 0);
        set_neighbor(nb_u_vb, tj, base + 1);
        set_neighbor(nb_vb_w, tj, base + 2);
        set_neighbor(nb_w_va, ti, base + 3);
        tris_[ti].alive = false;
        tris_[tj].alive = false;
        last_ = base;
        dirty = {base, base + 1, base + 2, base + 3};
    }

    // Flip the edge opposite v[0] == pi of triangle t while illegal.
    // Cocircular configurations (incircle ~ 0) are treated as legal.
    void legalize(int t, int pi) {
        const int opp = tris_[t].nb[0];
        if (opp < 0) return;
        const Tri a = tris_[t];
        const int jo = neighbor_index(opp, t);
        const int q = tris_[opp].v[jo];
        if (incircle(pts_[a.v[0]], pts_[a.v[1]], pts_[a.v[2]], pts_[q]) <= 0.0) return;

        const int u = a.v[1], w = a.v[2];
        const int t_pu_nb = a.nb[2];  // across (pi, u)
        const int t_wp_nb = a.nb[1];  // across (w, pi)
        // opp is (q, w, u) up to rotation: v[jo] = q, v[jo+1] = w, v[jo+2] = u.
        const int o_uq_nb = tris_[opp].nb[(jo + 1) % 3];  // across (u, q)
        const int o_qw_nb = tris_[opp].nb[(jo + 2) % 3];  // across (q, w)

        Tri t_new;  // (pi, u, q)
        t_new.v[0] = pi;
        t_new.v[1] = u;
        t_new.v[2] = q;
        t_new.nb[0] = o_uq_nb;
        t_new.nb[1] = opp;
        t_new.nb[2] = t_pu_nb;

        Tri o_new;  // (pi, q, w)
        o_new.v[0] = pi;
        o_new.v[1] = q;
        o_new.v[2] = w;
        o_new.nb[0] = o_qw_nb;
        o_new.nb[1] = t_wp_nb;
        o_new.nb[2] = t;

        tris_[t] = t_new;
        tris_[opp] = o_new;
        set_neighbor(o_uq_nb, opp, t);
        set_neighbor(t_wp_nb, t, opp);
        last_ = t;
        legalize(t, pi);
        legalize(opp, pi);
    }
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& points) {
    Triangulation tr(points);
    return tr.result();
}

}  // namespace magneu::detail
