#include "eit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace eit {

namespace {

long double orient_ld(Vec2 a, Vec2 b, Vec2 c) {
    long double abx = (long double)b.x - a.x, aby = (long double)b.y - a.y;
    long double acx = (long double)c.x - a.x, acy = (long double)c.y - a.y;
    return abx * acy - aby * acx;
}

// > 0 iff p strictly inside the circumcircle of CCW triangle (a,b,c),
// with a small relative margin so cocircular points count as outside.
bool in_circumcircle(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
    long double ax = (long double)a.x - p.x, ay = (long double)a.y - p.y;
    long double bx = (long double)b.x - p.x, by = (long double)b.y - p.y;
    long double cx = (long double)c.x - p.x, cy = (long double)c.y - p.y;
    long double a2 = ax * ax + ay * ay;
    long double b2 = bx * bx + by * by;
    long double c2 = cx * cx + cy * cy;
    long double det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
    long double mag = std::abs(ax * by * c2) + std::abs(ax * b2 * cy) + std::abs(ay * bx * c2) +
                      std::abs(ay * b2 * cx) + std::abs(a2 * bx * cy) + std::abs(a2 * by * cx);
    return det > 1e-15L * mag;
}

struct Circum {
    Vec2 center;
    double radius;
};

Circum circumcircle(Vec2 a, Vec2 b, Vec2 c) {
    double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if (d == 0.0) return {Vec2{0, 0}, std::numeric_limits<double>::infinity()};
    double a2 = norm2(a), b2 = norm2(b), c2 = norm2(c);
    Vec2 u;
    u.x = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    u.y = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    return {u, distance(u, a)};
}

// O(1) inside test for the convex boundary polygon (star-shaped around the
// center, one edge per angular sector).  Returns the signed distance to the
// sector chord, positive inside.
struct DomainPolygon {
    std::vector<Vec2> verts;
    Vec2 center;
    int res;

    explicit DomainPolygon(const DomainSpec& dom)
        : verts(dom.boundary_polygon()), center(dom.center), res(dom.boundary_resolution) {}

    double signed_inside(Vec2 p) const {
        double ang = std::atan2(p.y - center.y, p.x - center.x);
        if (ang < 0) ang += 2.0 * M_PI;
        int i = std::min(res - 1, (int)(ang / (2.0 * M_PI / res)));
        Vec2 a = verts[(size_t)i], b = verts[(size_t)((i + 1) % res)];
        Vec2 e = b - a;
        double len = norm(e);
        Vec2 n_in{-e.y / len, e.x / len};
        return dot(p - a, n_in);
    }
    bool inside(Vec2 p, double margin = 0.0) const { return signed_inside(p) > margin; }
};

struct Tri {
    int v[3];
    int nbr[3]; // nbr[i] across edge (v[i+1], v[i+2]); -1 if none
    bool alive;
};

struct Segment {
    int a, b;
    int component; // -2 domain boundary, otherwise inclusion index
};

class Triangulator {
  public:
    std::vector<Vec2> pts;
    std::vector<Tri> tris;
    std::vector<int> node2tri;
    int hint = 0;

    void init_super(Vec2 center, double big) {
        pts = {Vec2{center.x, center.y + 3 * big}, Vec2{center.x - 3 * big, center.y - 2 * big},
               Vec2{center.x + 3 * big, center.y - 2 * big}};
        tris.push_back(Tri{{0, 1, 2}, {-1, -1, -1}, true});
        node2tri = {0, 0, 0};
        hint = 0;
    }

    int locate(Vec2 p) const {
        int cur = hint;
        if (cur < 0 || cur >= (int)tris.size() || !tris[(size_t)cur].alive) {
            cur = -1;
            for (int i = (int)tris.size() - 1; i >= 0; --i)
                if (tris[(size_t)i].alive) { cur = i; break; }
            if (cur < 0) throw std::runtime_error("mesh: no alive triangles");
        }
        int prev = -1;
        for (int steps = 0; steps < (int)tris.size() + 16; ++steps) {
            const Tri& t = tris[(size_t)cur];
            int next = -1;
            for (int i = 0; i < 3; ++i) {
                Vec2 u = pts[(size_t)t.v[(i + 1) % 3]];
                Vec2 w = pts[(size_t)t.v[(i + 2) % 3]];
                long double o = orient_ld(u, w, p);
                long double mag = (std::abs((long double)u.x) + std::abs((long double)w.x) +
                                   std::abs((long double)p.x) + 1.0L) *
                                  (std::abs((long double)u.y) + std::abs((long double)w.y) +
                                   std::abs((long double)p.y) + 1.0L);
                if (o < -1e-16L * mag && t.nbr[i] >= 0 && t.nbr[i] != prev) {
                    next = t.nbr[i];
                    break;
                }
            }
            if (next < 0) return cur;
            prev = cur;
            cur = next;
        }
        // fallback: linear scan
        for (size_t i = 0; i < tris.size(); ++i) {
            if (!tris[i].alive) continue;
            const Tri& t = tris[i];
            bool in = true;
            for (int k = 0; k < 3 && in; ++k) {
                Vec2 u = pts[(size_t)t.v[(k + 1) % 3]];
                Vec2 w = pts[(size_t)t.v[(k + 2) % 3]];
                if (orient_ld(u, w, p) < -1e-12L) in = false;
            }
            if (in) return (int)i;
        }
        throw std::runtime_error("mesh: point location failed");
    }

    // Insert p; returns its node index, an existing node index when p
    // duplicates one, or -1 when a distinct node lies within skip_dist.
    int insert(Vec2 p, double skip_dist = 0.0) {
        int t0 = locate(p);
        for (int k = 0; k < 3; ++k) {
            int v = tris[(size_t)t0].v[k];
            double d = distance(pts[(size_t)v], p);
            if (d < 1e-12) return v;
            if (skip_dist > 0.0 && d < skip_dist) return -1;
        }

        // cavity: BFS over triangles whose circumcircle contains p
        std::vector<int> cavity = {t0};
        std::set<int> in_cavity = {t0};
        std::deque<int> queue = {t0};
        while (!queue.empty()) {
            int ct = queue.front();
            queue.pop_front();
            for (int i = 0; i < 3; ++i) {
                int nb = tris[(size_t)ct].nbr[i];
                if (nb < 0 || in_cavity.count(nb)) continue;
                const Tri& n = tris[(size_t)nb];
                if (in_circumcircle(pts[(size_t)n.v[0]], pts[(size_t)n.v[1]], pts[(size_t)n.v[2]], p)) {
                    in_cavity.insert(nb);
                    cavity.push_back(nb);
                    queue.push_back(nb);
                }
            }
        }

        // boundary of the cavity: directed edges with interior on the left
        struct BEdge { int u, w, outer; };
        std::vector<BEdge> bnd;
        for (int ct : cavity) {
            const Tri& t = tris[(size_t)ct];
            for (int i = 0; i < 3; ++i) {
                int nb = t.nbr[i];
                if (nb >= 0 && in_cavity.count(nb)) continue;
                bnd.push_back({t.v[(i + 1) % 3], t.v[(i + 2) % 3], nb});
            }
        }
        for (const auto& e : bnd)
            if (orient_ld(p, pts[(size_t)e.u], pts[(size_t)e.w]) <= 0.0L)
                throw std::runtime_error("mesh: degenerate cavity during point insertion");

        int ip = (int)pts.size();
        pts.push_back(p);
        node2tri.push_back(-1);
        for (int ct : cavity) tris[(size_t)ct].alive = false;

        std::map<int, int> fan_by_u, fan_by_w;
        std::vector<int> created;
        created.reserve(bnd.size());
        for (const auto& e : bnd) {
            int idx = (int)tris.size();
            tris.push_back(Tri{{ip, e.u, e.w}, {e.outer, -1, -1}, true});
            created.push_back(idx);
            fan_by_u[e.u] = idx;
            fan_by_w[e.w] = idx;
            if (e.outer >= 0) {
                // the outer triangle sees the shared edge with opposite
                // orientation; match by endpoints so a triangle bordering the
                // cavity along two edges keeps both links distinct
                Tri& o = tris[(size_t)e.outer];
                for (int k = 0; k < 3; ++k) {
                    int a = o.v[(k + 1) % 3], b = o.v[(k + 2) % 3];
                    if (a == e.w && b == e.u) {
                        o.nbr[k] = idx;
                        break;
                    }
                }
            }
        }
        for (size_t bi = 0; bi < bnd.size(); ++bi) {
            Tri& t = tris[(size_t)created[bi]];
            t.nbr[1] = fan_by_u.at(bnd[bi].w); // across edge (w, p)
            t.nbr[2] = fan_by_w.at(bnd[bi].u); // across edge (p, u)
            node2tri[(size_t)t.v[0]] = created[bi];
            node2tri[(size_t)t.v[1]] = created[bi];
            node2tri[(size_t)t.v[2]] = created[bi];
        }
        hint = created.front();
        return ip;
    }

    // star of node a via adjacency BFS
    template <typename F>
    void for_star(int a, F&& fn) const {
        int t0 = node2tri[(size_t)a];
        if (t0 < 0 || !tris[(size_t)t0].alive) {
            t0 = -1;
            for (size_t i = 0; i < tris.size(); ++i) {
                if (!tris[i].alive) continue;
                const Tri& t = tris[i];
                if (t.v[0] == a || t.v[1] == a || t.v[2] == a) { t0 = (int)i; break; }
            }
            if (t0 < 0) throw std::runtime_error("mesh: node has no incident triangle");
        }
        std::set<int> seen = {t0};
        std::deque<int> queue = {t0};
        while (!queue.empty()) {
            int ti = queue.front();
            queue.pop_front();
            if (!fn(ti)) return;
            const Tri& t = tris[(size_t)ti];
            for (int i = 0; i < 3; ++i) {
                int nb = t.nbr[i];
                if (nb < 0 || seen.count(nb)) continue;
                const Tri& n = tris[(size_t)nb];
                if (n.v[0] == a || n.v[1] == a || n.v[2] == a) {
                    seen.insert(nb);
                    queue.push_back(nb);
                }
            }
        }
    }

    bool edge_exists(int a, int b) const {
        bool found = false;
        for_star(a, [&](int ti) {
            const Tri& t = tris[(size_t)ti];
            if (t.v[0] == b || t.v[1] == b || t.v[2] == b) {
                found = true;
                return false;
            }
            return true;
        });
        return found;
    }
};

int split_count_pow2(double length, double h) {
    int c = 1;
    while (length / c > h && c < (1 << 24)) c *= 2;
    return c;
}

} // namespace

double Mesh::triangle_area(const MeshTriangle& t) const {
    Vec2 a = nodes[(size_t)t.v[0]], b = nodes[(size_t)t.v[1]], c = nodes[(size_t)t.v[2]];
    return 0.5 * cross(b - a, c - a);
}

std::vector<char> Mesh::boundary_node_mask() const {
    std::vector<char> mask(nodes.size(), 0);
    for (const auto& e : boundary_edges) {
        mask[(size_t)e.a] = 1;
        mask[(size_t)e.b] = 1;
    }
    return mask;
}

double Mesh::boundary_perimeter() const {
    double p = 0.0;
    for (const auto& e : boundary_edges) p += edge_length(e.a, e.b);
    return p;
}

Mesh generate_mesh(const DomainSpec& dom, const InclusionSet& incl, double h_target) {
    dom.validate();
    incl.validate();
    if (!(h_target > 0.0)) throw std::invalid_argument("h_target must be positive");
    if (h_target >= 2.0 * dom.radius)
        throw std::invalid_argument("h_target larger than domain");
    for (const auto& c : incl.components)
        if (h_target >= c.shape.shortest_edge())
            throw std::invalid_argument("h_target must be smaller than the shortest inclusion edge");
    if (!incl.empty() && dom.clearance(incl) <= 0.0)
        throw std::invalid_argument("inclusion must lie strictly inside the domain");

    DomainPolygon dpoly(dom);
    for (const auto& c : incl.components)
        for (const auto& v : c.shape.vertices)
            if (!dpoly.inside(v, 1e-12))
                throw std::invalid_argument("inclusion vertex outside the discretized domain boundary");

    Triangulator tr;
    double big = 16.0 * (dom.radius + norm(dom.center) + 1.0);
    tr.init_super(dom.center, big);

    std::vector<Segment> segments;

    // constraint chains: split every polygon edge into 2^ceil(log2(L/h)) pieces
    auto add_chain = [&](const std::vector<Vec2>& poly, int component) {
        std::vector<int> ids(poly.size());
        for (size_t i = 0; i < poly.size(); ++i) {
            int id = tr.insert(poly[i]);
            if (id < 0) throw std::runtime_error("mesh: constraint vertex rejected");
            ids[i] = id;
        }
        for (size_t i = 0; i < poly.size(); ++i) {
            Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
            int ia = ids[i], ib = ids[(i + 1) % poly.size()];
            int pieces = split_count_pow2(distance(a, b), h_target);
            int prev = ia;
            for (int s = 1; s < pieces; ++s) {
                Vec2 q = a + (double(s) / pieces) * (b - a);
                int iq = tr.insert(q);
                if (iq < 0) throw std::runtime_error("mesh: constraint split point rejected");
                segments.push_back({prev, iq, component});
                prev = iq;
            }
            segments.push_back({prev, ib, component});
        }
    };

    add_chain(dpoly.verts, -2);
    for (size_t j = 0; j < incl.components.size(); ++j)
        add_chain(incl.components[j].shape.vertices, (int)j);

    // interior seeds on a hex grid, kept clear of all constraints
    double apothem = dom.radius * std::cos(M_PI / dom.boundary_resolution);
    double row_dy = h_target * std::sqrt(3.0) / 2.0;
    int row = 0;
    for (double y = dom.center.y - dom.radius; y <= dom.center.y + dom.radius; y += row_dy, ++row) {
        double x0 = dom.center.x - dom.radius + ((row % 2) ? 0.5 * h_target : 0.0);
        for (double x = x0; x <= dom.center.x + dom.radius; x += h_target) {
            Vec2 p{x, y};
            if (distance(p, dom.center) > apothem - 0.55 * h_target) continue;
            bool clear = true;
            for (const auto& s : segments) {
                if (s.component == -2) continue;
                if (point_segment_distance(p, tr.pts[(size_t)s.a], tr.pts[(size_t)s.b]) <
                    0.5 * h_target) {
                    clear = false;
                    break;
                }
            }
            if (clear) tr.insert(p, 0.25 * h_target);
        }
    }

    // constraint recovery by midpoint insertion
    auto recover = [&]() {
        for (int pass = 0; pass < 64; ++pass) {
            int inserted = 0;
            for (size_t si = 0; si < segments.size(); ++si) {
                Segment s = segments[si];
                if (tr.edge_exists(s.a, s.b)) continue;
                Vec2 mid = 0.5 * (tr.pts[(size_t)s.a] + tr.pts[(size_t)s.b]);
                int im = tr.insert(mid);
                if (im < 0 || im == s.a || im == s.b)
                    throw std::runtime_error("mesh: constraint recovery hit a degenerate split");
                segments[si] = {s.a, im, s.component};
                segments.push_back({im, s.b, s.component});
                ++inserted;
            }
            if (inserted == 0) return;
        }
        throw std::runtime_error("mesh: constraint recovery failed to terminate within pass cap");
    };

    recover();

    // circumradius refinement, encroachment-aware
    const size_t node_cap = 400000;
    for (int pass = 0; pass < 40; ++pass) {
        int inserted = 0;
        size_t tri_count = tr.tris.size();
        for (size_t ti = 0; ti < tri_count; ++ti) {
            if (!tr.tris[ti].alive) continue;
            const Tri& t = tr.tris[ti];
            if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue; // touches super vertices
            Vec2 a = tr.pts[(size_t)t.v[0]], b = tr.pts[(size_t)t.v[1]], c = tr.pts[(size_t)t.v[2]];
            Vec2 centroid = (1.0 / 3.0) * (a + b + c);
            if (!dpoly.inside(centroid)) continue;
            Circum cc = circumcircle(a, b, c);
            if (!(cc.radius > h_target)) continue;
            if (tr.pts.size() > node_cap)
                throw std::runtime_error("mesh: refinement exceeded node cap");
            if (!dpoly.inside(cc.center, 0.1 * h_target)) continue;
            // splitting an encroached constraint keeps constraint edges present
            int enc = -1;
            for (size_t si = 0; si < segments.size(); ++si) {
                Vec2 pa = tr.pts[(size_t)segments[si].a], pb = tr.pts[(size_t)segments[si].b];
                if (dot(pa - cc.center, pb - cc.center) < 0.0) { enc = (int)si; break; }
            }
            if (enc >= 0) {
                Segment s = segments[(size_t)enc];
                if (tr.pts.size() && distance(tr.pts[(size_t)s.a], tr.pts[(size_t)s.b]) < 0.35 * h_target)
                    continue;
                Vec2 mid = 0.5 * (tr.pts[(size_t)s.a] + tr.pts[(size_t)s.b]);
                int im = tr.insert(mid);
                if (im < 0 || im == s.a || im == s.b) continue;
                segments[(size_t)enc] = {s.a, im, s.component};
                segments.push_back({im, s.b, s.component});
                ++inserted;
            } else {
                if (tr.insert(cc.center, 0.4 * h_target) >= 0) ++inserted;
            }
        }
        recover();
        if (inserted == 0) break;
        if (pass == 39)
            throw std::runtime_error("mesh: refinement failed to settle within pass cap");
    }

    // finalize: drop super world, compact, tag, build edge tables
    Mesh m;
    m.domain = dom;
    m.h_target = h_target;

    std::vector<int> remap(tr.pts.size(), -1);
    std::vector<size_t> kept;
    for (size_t ti = 0; ti < tr.tris.size(); ++ti) {
        if (!tr.tris[ti].alive) continue;
        const Tri& t = tr.tris[ti];
        if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;
        Vec2 centroid = (1.0 / 3.0) * (tr.pts[(size_t)t.v[0]] + tr.pts[(size_t)t.v[1]] +
                                       tr.pts[(size_t)t.v[2]]);
        if (!dpoly.inside(centroid)) continue;
        kept.push_back(ti);
        for (int k = 0; k < 3; ++k)
            if (remap[(size_t)t.v[k]] < 0) {
                remap[(size_t)t.v[k]] = (int)m.nodes.size();
                m.nodes.push_back(tr.pts[(size_t)t.v[k]]);
            }
    }
    for (size_t ti : kept) {
        const Tri& t = tr.tris[ti];
        MeshTriangle mt{};
        for (int k = 0; k < 3; ++k) mt.v[k] = remap[(size_t)t.v[k]];
        Vec2 a = m.nodes[(size_t)mt.v[0]], b = m.nodes[(size_t)mt.v[1]], c = m.nodes[(size_t)mt.v[2]];
        if (cross(b - a, c - a) <= 0.0)
            throw std::runtime_error("mesh: non-positive triangle emitted");
        Vec2 centroid = (1.0 / 3.0) * (a + b + c);
        mt.region = kRegionBackground;
        for (size_t j = 0; j < incl.components.size(); ++j)
            if (incl.components[j].shape.contains(centroid)) {
                mt.region = (int)j;
                break;
            }
        m.triangles.push_back(mt);
    }

    // edge bookkeeping over kept triangles
    struct EdgeUse {
        int count = 0;
        int tri = -1;
        int slot = -1;
        int tri2 = -1;
    };
    std::map<std::pair<int, int>, EdgeUse> edges;
    for (size_t ti = 0; ti < m.triangles.size(); ++ti) {
        const MeshTriangle& t = m.triangles[ti];
        for (int i = 0; i < 3; ++i) {
            int u = t.v[(i + 1) % 3], w = t.v[(i + 2) % 3];
            auto key = std::minmax(u, w);
            auto& eu = edges[{key.first, key.second}];
            if (eu.count == 0) {
                eu.tri = (int)ti;
                eu.slot = i;
            } else {
                eu.tri2 = (int)ti;
            }
            eu.count++;
        }
    }

    m.inclusion_edges.assign(incl.components.size(), {});
    for (const auto& [key, eu] : edges) {
        if (eu.count == 1) {
            const MeshTriangle& t = m.triangles[(size_t)eu.tri];
            int u = t.v[(eu.slot + 1) % 3], w = t.v[(eu.slot + 2) % 3];
            Vec2 pu = m.nodes[(size_t)u], pw = m.nodes[(size_t)w];
            BoundaryEdge be;
            be.a = u;
            be.b = w;
            Vec2 d = pw - pu;
            double len = norm(d);
            be.normal = {d.y / len, -d.x / len};
            Vec2 mid = 0.5 * (pu + pw);
            double ang = std::atan2(mid.y - dom.center.y, mid.x - dom.center.x);
            if (ang < 0) ang += 2.0 * M_PI;
            be.arc_param = ang;
            if (dpoly.signed_inside(mid) > 1e-9 * dom.radius + 1e-12)
                throw std::runtime_error("mesh: open edge not on the domain boundary (non-conforming)");
            m.boundary_edges.push_back(be);
        } else if (eu.count == 2) {
            const MeshTriangle& t1 = m.triangles[(size_t)eu.tri];
            const MeshTriangle& t2 = m.triangles[(size_t)eu.tri2];
            if (t1.region == t2.region) continue;
            const MeshTriangle* inc = &t1;
            const MeshTriangle* bg = &t2;
            if (inc->region == kRegionBackground) std::swap(inc, bg);
            if (bg->region != kRegionBackground)
                throw std::runtime_error("mesh: two inclusion regions share an edge");
            InclusionEdge ie;
            ie.a = key.first;
            ie.b = key.second;
            Vec2 pa = m.nodes[(size_t)ie.a], pb = m.nodes[(size_t)ie.b];
            Vec2 d = pb - pa;
            double len = norm(d);
            Vec2 n{-d.y / len, d.x / len};
            Vec2 inc_centroid = (1.0 / 3.0) * (m.nodes[(size_t)inc->v[0]] + m.nodes[(size_t)inc->v[1]] +
                                               m.nodes[(size_t)inc->v[2]]);
            if (dot(n, inc_centroid - 0.5 * (pa + pb)) < 0.0) n = -1.0 * n;
            ie.normal = n;
            m.inclusion_edges[(size_t)inc->region].push_back(ie);
        } else {
            throw std::runtime_error("mesh: edge shared by more than two triangles");
        }
    }
    std::sort(m.boundary_edges.begin(), m.boundary_edges.end(),
              [](const BoundaryEdge& a, const BoundaryEdge& b) { return a.arc_param < b.arc_param; });
    for (auto& comp : m.inclusion_edges)
        std::sort(comp.begin(), comp.end(), [](const InclusionEdge& a, const InclusionEdge& b) {
            return a.a < b.a || (a.a == b.a && a.b < b.b);
        });

    // conservation checks: triangulation must cover the polygonal domain and
    // each inclusion exactly
    double total = 0.0;
    std::vector<double> region_area(incl.components.size(), 0.0);
    for (const auto& t : m.triangles) {
        double a = m.triangle_area(t);
        total += a;
        if (t.region >= 0) region_area[(size_t)t.region] += a;
    }
    double dom_area = dom.polygon_area();
    if (std::abs(total - dom_area) > 1e-9 * dom_area)
        throw std::runtime_error("mesh: triangle areas do not sum to the domain area");
    for (size_t j = 0; j < region_area.size(); ++j) {
        double want = incl.components[j].shape.area();
        if (std::abs(region_area[j] - want) > 1e-9 * want)
            throw std::runtime_error("mesh: region areas do not match inclusion area");
    }
    return m;
}

MeshQuality validate_mesh(const Mesh& m) {
    MeshQuality q;
    q.min_angle_deg = 180.0;
    q.max_circumradius = 0.0;

    for (const auto& t : m.triangles) {
        double area = m.triangle_area(t);
        if (area <= 0.0) {
            q.orientation_violations++;
            continue;
        }
        Vec2 a = m.nodes[(size_t)t.v[0]], b = m.nodes[(size_t)t.v[1]], c = m.nodes[(size_t)t.v[2]];
        double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
        auto angle = [](double opp, double s1, double s2) {
            double v = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
            return std::acos(std::clamp(v, -1.0, 1.0)) * 180.0 / M_PI;
        };
        q.min_angle_deg = std::min({q.min_angle_deg, angle(la, lb, lc), angle(lb, lc, la),
                                    angle(lc, la, lb)});
        q.max_circumradius = std::max(q.max_circumradius, la * lb * lc / (4.0 * area));
    }

    std::map<std::pair<int, int>, std::vector<int>> edges;
    for (size_t ti = 0; ti < m.triangles.size(); ++ti) {
        const MeshTriangle& t = m.triangles[ti];
        for (int i = 0; i < 3; ++i) {
            auto key = std::minmax(t.v[(i + 1) % 3], t.v[(i + 2) % 3]);
            edges[{key.first, key.second}].push_back((int)ti);
        }
    }
    std::set<std::pair<int, int>> boundary_set;
    for (const auto& e : m.boundary_edges) {
        auto key = std::minmax(e.a, e.b);
        boundary_set.insert({key.first, key.second});
    }
    std::set<std::pair<int, int>> inclusion_set;
    for (const auto& comp : m.inclusion_edges)
        for (const auto& e : comp) {
            auto key = std::minmax(e.a, e.b);
            inclusion_set.insert({key.first, key.second});
        }

    for (const auto& [key, owners] : edges) {
        if (owners.size() > 2) {
            q.conformity_violations++;
            q.notes.push_back("edge shared by more than two triangles");
        } else if (owners.size() == 1) {
            if (!boundary_set.count(key)) {
                q.conformity_violations++;
                q.notes.push_back("open edge not registered as a boundary edge");
            }
        } else {
            int r1 = m.triangles[(size_t)owners[0]].region;
            int r2 = m.triangles[(size_t)owners[1]].region;
            if (r1 != r2 && !inclusion_set.count(key)) {
                q.conformity_violations++;
                q.notes.push_back("region interface edge not registered as an inclusion edge");
            }
        }
    }

    // boundary edges: single closed cycle, outward normals
    std::map<int, int> outdeg, indeg;
    for (const auto& e : m.boundary_edges) {
        outdeg[e.a]++;
        indeg[e.b]++;
        Vec2 mid = m.edge_midpoint(e.a, e.b);
        if (dot(e.normal, mid - m.domain.center) <= 0.0) {
            q.orientation_violations++;
            q.notes.push_back("boundary normal does not point away from the domain center");
        }
    }
    for (const auto& [node, d] : outdeg)
        if (d != 1 || indeg[node] != 1) {
            q.conformity_violations++;
            q.notes.push_back("boundary edges do not form a single cycle at a node");
        }
    if (!m.boundary_edges.empty()) {
        std::map<int, int> next;
        for (const auto& e : m.boundary_edges) next[e.a] = e.b;
        int start = m.boundary_edges.front().a;
        int cur = start;
        size_t steps = 0;
        do {
            auto it = next.find(cur);
            if (it == next.end()) break;
            cur = it->second;
            ++steps;
        } while (cur != start && steps <= next.size());
        if (cur != start || steps != next.size()) {
            q.conformity_violations++;
            q.notes.push_back("boundary cycle does not close or splits into multiple loops");
        }
    }

    // inclusion edge cycles: every node has degree 2 within its component
    for (const auto& comp : m.inclusion_edges) {
        std::map<int, int> deg;
        for (const auto& e : comp) {
            deg[e.a]++;
            deg[e.b]++;
        }
        for (const auto& [node, d] : deg)
            if (d != 2) {
                q.conformity_violations++;
                q.notes.push_back("inclusion edge cycle broken at a node");
            }
    }
    return q;
}

int snap_boundary_point(const Mesh& m, Vec2 p) {
    double dist_to_boundary = std::numeric_limits<double>::infinity();
    for (const auto& e : m.boundary_edges)
        dist_to_boundary = std::min(dist_to_boundary,
                                    point_segment_distance(p, m.nodes[(size_t)e.a], m.nodes[(size_t)e.b]));
    if (dist_to_boundary > m.h_target)
        throw std::invalid_argument("snap_boundary_point: point is farther than h_target from the boundary");
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& e : m.boundary_edges) {
        for (int v : {e.a, e.b}) {
            double d = distance(p, m.nodes[(size_t)v]);
            if (d < best_d) {
                best_d = d;
                best = v;
            }
        }
    }
    return best;
}

namespace {
void put_f(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    os << buf;
}
} // namespace

void write_mesh(const Mesh& m, std::ostream& os) {
    os << "# eitrec mesh v1\n";
    os << "DOMAIN ";
    put_f(os, m.domain.center.x);
    os << ' ';
    put_f(os, m.domain.center.y);
    os << ' ';
    put_f(os, m.domain.radius);
    os << ' ' << m.domain.boundary_resolution << ' ';
    put_f(os, m.h_target);
    os << '\n';
    os << "NODES " << m.nodes.size() << '\n';
    for (const auto& p : m.nodes) {
        put_f(os, p.x);
        os << ' ';
        put_f(os, p.y);
        os << '\n';
    }
    os << "TRIANGLES " << m.triangles.size() << '\n';
    for (const auto& t : m.triangles)
        os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << t.region << '\n';
    os << "BOUNDARY_EDGES " << m.boundary_edges.size() << '\n';
    for (const auto& e : m.boundary_edges) {
        os << e.a << ' ' << e.b << ' ';
        put_f(os, e.normal.x);
        os << ' ';
        put_f(os, e.normal.y);
        os << ' ';
        put_f(os, e.arc_param);
        os << '\n';
    }
    os << "INCLUSION_EDGES " << m.inclusion_edges.size() << '\n';
    for (size_t j = 0; j < m.inclusion_edges.size(); ++j) {
        os << "COMPONENT " << j << ' ' << m.inclusion_edges[j].size() << '\n';
        for (const auto& e : m.inclusion_edges[j]) {
            os << e.a << ' ' << e.b << ' ';
            put_f(os, e.normal.x);
            os << ' ';
            put_f(os, e.normal.y);
            os << '\n';
        }
    }
}

void write_mesh_file(const Mesh& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open mesh file for writing: " + path);
    write_mesh(m, os);
}

Mesh read_mesh(std::istream& is) {
    Mesh m;
    std::string line;
    auto next_line = [&]() -> std::string {
        while (std::getline(is, line)) {
            if (!line.empty() && line[0] != '#') return line;
        }
        throw std::runtime_error("mesh file truncated");
    };
    {
        std::istringstream ss(next_line());
        std::string tag;
        ss >> tag >> m.domain.center.x >> m.domain.center.y >> m.domain.radius >>
            m.domain.boundary_resolution >> m.h_target;
        if (tag != "DOMAIN") throw std::runtime_error("mesh file: expected DOMAIN");
    }
    {
        std::istringstream ss(next_line());
        std::string tag;
        size_t n;
        ss >> tag >> n;
        if (tag != "NODES") throw std::runtime_error("mesh file: expected NODES");
        m.nodes.resize(n);
        for (auto& p : m.nodes) {
            std::istringstream ls(next_line());
            ls >> p.x >> p.y;
        }
    }
    {
        std::istringstream ss(next_line());
        std::string tag;
        size_t n;
        ss >> tag >> n;
        if (tag != "TRIANGLES") throw std::runtime_error("mesh file: expected TRIANGLES");
        m.triangles.resize(n);
        for (auto& t : m.triangles) {
            std::istringstream ls(next_line());
            ls >> t.v[0] >> t.v[1] >> t.v[2] >> t.region;
        }
    }
    {
        std::istringstream ss(next_line());
        std::string tag;
        size_t n;
        ss >> tag >> n;
        if (tag != "BOUNDARY_EDGES") throw std::runtime_error("mesh file: expected BOUNDARY_EDGES");
        m.boundary_edges.resize(n);
        for (auto& e : m.boundary_edges) {
            std::istringstream ls(next_line());
            ls >> e.a >> e.b >> e.normal.x >> e.normal.y >> e.arc_param;
        }
    }
    {
        std::istringstream ss(next_line());
        std::string tag;
        size_t n;
        ss >> tag >> n;
        if (tag != "INCLUSION_EDGES") throw std::runtime_error("mesh file: expected INCLUSION_EDGES");
        m.inclusion_edges.resize(n);
        for (size_t j = 0; j < n; ++j) {
            std::istringstream hs(next_line());
            std::string ctag;
            size_t cj, cnt;
            hs >> ctag >> cj >> cnt;
            if (ctag != "COMPONENT" || cj != j)
                throw std::runtime_error("mesh file: expected COMPONENT header");
            m.inclusion_edges[j].resize(cnt);
            for (auto& e : m.inclusion_edges[j]) {
                std::istringstream ls(next_line());
                ls >> e.a >> e.b >> e.normal.x >> e.normal.y;
            }
        }
    }
    return m;
}

Mesh read_mesh_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open mesh file: " + path);
    return read_mesh(is);
}

} // namespace eit
