#include "eit/geometry.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace eit {

Vec2 normalized(Vec2 a) {
    double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    return {a.x / n, a.y / n};
}

Direction Direction::from_angle(double theta) {
    Direction d;
    d.omega = {std::cos(theta), std::sin(theta)};
    d.omega_perp = {std::sin(theta), -std::cos(theta)};
    return d;
}

Direction Direction::from_vector(Vec2 w) {
    Vec2 u = normalized(w);
    Direction d;
    d.omega = u;
    d.omega_perp = {u.y, -u.x};
    return d;
}

double Polygon::signed_area() const {
    double s = 0.0;
    size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i) {
        Vec2 a = vertices[i];
        Vec2 b = vertices[(i + 1) % n];
        s += cross(a, b);
    }
    return 0.5 * s;
}

Vec2 Polygon::centroid() const {
    double a6 = 0.0;
    Vec2 c{0.0, 0.0};
    size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i) {
        Vec2 p = vertices[i];
        Vec2 q = vertices[(i + 1) % n];
        double w = cross(p, q);
        a6 += w;
        c = c + w * (p + q);
    }
    if (a6 == 0.0) throw std::invalid_argument("degenerate polygon has no centroid");
    return (1.0 / (3.0 * a6)) * c;
}

double Polygon::diameter() const {
    double d = 0.0;
    for (size_t i = 0; i < vertices.size(); ++i)
        for (size_t j = i + 1; j < vertices.size(); ++j)
            d = std::max(d, distance(vertices[i], vertices[j]));
    return d;
}

double Polygon::shortest_edge() const {
    double d = std::numeric_limits<double>::infinity();
    size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i)
        d = std::min(d, distance(vertices[i], vertices[(i + 1) % n]));
    return d;
}

bool Polygon::contains(Vec2 p) const {
    bool inside = false;
    size_t n = vertices.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        Vec2 a = vertices[i];
        Vec2 b = vertices[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xi = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xi) inside = !inside;
        }
    }
    return inside;
}

bool Polygon::is_simple() const {
    size_t n = vertices.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        Vec2 a = vertices[i];
        Vec2 b = vertices[(i + 1) % n];
        for (size_t j = i + 1; j < n; ++j) {
            // skip adjacent edges (share a vertex)
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            Vec2 c = vertices[j];
            Vec2 d = vertices[(j + 1) % n];
            if (segments_properly_intersect(a, b, c, d)) return false;
        }
    }
    return true;
}

void Polygon::validate() const {
    if (vertices.size() < 3) throw std::invalid_argument("polygon needs >= 3 vertices");
    if (signed_area() <= 0.0)
        throw std::invalid_argument("polygon vertices must be counter-clockwise with positive area");
    if (!is_simple()) throw std::invalid_argument("polygon is self-intersecting");
}

bool InclusionSet::has_contrast() const {
    for (const auto& c : components)
        if (c.conductivity != 1.0) return true;
    return false;
}

double InclusionSet::diameter() const {
    std::vector<Vec2> all;
    for (const auto& c : components)
        all.insert(all.end(), c.shape.vertices.begin(), c.shape.vertices.end());
    double d = 0.0;
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = i + 1; j < all.size(); ++j)
            d = std::max(d, distance(all[i], all[j]));
    return d;
}

void InclusionSet::validate() const {
    for (size_t j = 0; j < components.size(); ++j) {
        const auto& c = components[j];
        c.shape.validate();
        if (!(c.conductivity > 0.0))
            throw std::invalid_argument("conductivity must be positive");
    }
    // pairwise disjoint closures: no edge crossings, no containment
    for (size_t i = 0; i < components.size(); ++i) {
        for (size_t j = i + 1; j < components.size(); ++j) {
            const auto& a = components[i].shape;
            const auto& b = components[j].shape;
            size_t na = a.vertices.size(), nb = b.vertices.size();
            for (size_t p = 0; p < na; ++p)
                for (size_t q = 0; q < nb; ++q)
                    if (segments_properly_intersect(a.vertices[p], a.vertices[(p + 1) % na],
                                                    b.vertices[q], b.vertices[(q + 1) % nb]))
                        throw std::invalid_argument("inclusion disjointness violated: edges cross");
            if (a.contains(b.vertices[0]) || b.contains(a.vertices[0]))
                throw std::invalid_argument("inclusion disjointness violated: nested components");
            // closures disjoint: also keep a positive gap between boundaries
            double gap = std::numeric_limits<double>::infinity();
            for (size_t p = 0; p < na; ++p)
                for (size_t q = 0; q < nb; ++q)
                    gap = std::min(gap, point_segment_distance(a.vertices[p], b.vertices[q],
                                                               b.vertices[(q + 1) % nb]));
            if (gap <= 0.0)
                throw std::invalid_argument("inclusion disjointness violated: touching closures");
        }
    }
}

void DomainSpec::validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("domain radius must be positive");
    if (boundary_resolution < 64)
        throw std::invalid_argument("boundary_resolution must be >= 64");
}

std::vector<Vec2> DomainSpec::boundary_polygon() const {
    std::vector<Vec2> v(static_cast<size_t>(boundary_resolution));
    for (int i = 0; i < boundary_resolution; ++i) {
        double t = 2.0 * M_PI * i / boundary_resolution;
        v[static_cast<size_t>(i)] = {center.x + radius * std::cos(t),
                                     center.y + radius * std::sin(t)};
    }
    return v;
}

double DomainSpec::polygon_area() const {
    int n = boundary_resolution;
    return 0.5 * n * radius * radius * std::sin(2.0 * M_PI / n);
}

double DomainSpec::clearance(const InclusionSet& incl) const {
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& c : incl.components)
        for (const auto& v : c.shape.vertices)
            dist = std::min(dist, radius - distance(v, center));
    return dist;
}

double support_function(const InclusionSet& incl, const Direction& d) {
    if (incl.empty()) throw std::invalid_argument("no inclusion");
    double h = -std::numeric_limits<double>::infinity();
    for (const auto& c : incl.components)
        for (const auto& v : c.shape.vertices)
            h = std::max(h, dot(v, d.omega));
    return h;
}

bool is_regular(const InclusionSet& incl, const Direction& d, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("regularity tolerance must be positive");
    double h = support_function(incl, d);
    double band = tol * std::max(incl.diameter(), 1e-300);
    int maximizers = 0;
    for (const auto& c : incl.components)
        for (const auto& v : c.shape.vertices)
            if (dot(v, d.omega) > h - band) ++maximizers;
    if (maximizers != 1) return false;
    // reject an edge at the maximum that is perpendicular to omega
    for (const auto& c : incl.components) {
        const auto& vs = c.shape.vertices;
        size_t n = vs.size();
        for (size_t i = 0; i < n; ++i) {
            Vec2 a = vs[i], b = vs[(i + 1) % n];
            if (dot(a, d.omega) > h - band || dot(b, d.omega) > h - band) {
                Vec2 e = normalized(b - a);
                if (std::abs(dot(e, d.omega)) < std::sin(kRegularityAngleTol)) return false;
            }
        }
    }
    return true;
}

GeometricCondition check_geometric_condition(const InclusionSet& incl, const DomainSpec& dom) {
    GeometricCondition gc;
    gc.diam = incl.diameter();
    gc.dist = dom.clearance(incl);
    gc.satisfied = gc.diam < gc.dist;
    return gc;
}

namespace {

// clip polygon by half-plane x . omega <= h (Sutherland-Hodgman)
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 omega, double h) {
    std::vector<Vec2> out;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        Vec2 a = poly[i];
        Vec2 b = poly[(i + 1) % n];
        double da = dot(a, omega) - h;
        double db = dot(b, omega) - h;
        bool ina = da <= 0.0, inb = db <= 0.0;
        if (ina) out.push_back(a);
        if (ina != inb) {
            double t = da / (da - db);
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

} // namespace

Polygon hull_from_support(const SupportTable& table) {
    const auto& entries = table.entries;
    if (entries.size() < 3)
        throw std::invalid_argument("hull_from_support needs >= 3 directions");
    std::vector<double> angles;
    angles.reserve(entries.size());
    for (const auto& e : entries) {
        double a = e.direction.angle();
        if (a < 0) a += 2.0 * M_PI;
        angles.push_back(a);
    }
    std::sort(angles.begin(), angles.end());
    double max_gap = 2.0 * M_PI - (angles.back() - angles.front());
    for (size_t i = 0; i + 1 < angles.size(); ++i)
        max_gap = std::max(max_gap, angles[i + 1] - angles[i]);
    if (max_gap >= M_PI)
        throw std::invalid_argument("directions span at most a half-circle; intersection unbounded");

    // scale for the initial clipping box: generously beyond every half-plane offset
    double scale = 1.0;
    for (const auto& e : entries) scale = std::max(scale, std::abs(e.h_estimate));
    double big = 64.0 * scale;
    std::vector<Vec2> poly = {{-big, -big}, {big, -big}, {big, big}, {-big, big}};
    for (const auto& e : entries) {
        poly = clip_halfplane(poly, e.direction.omega, e.h_estimate);
        if (poly.size() < 3) {
            std::ostringstream os;
            os << "hull_from_support: infeasible half-plane intersection at direction angle "
               << e.direction.angle();
            throw std::runtime_error(os.str());
        }
    }
    for (const auto& v : poly)
        if (std::abs(v.x) > 0.99 * big || std::abs(v.y) > 0.99 * big)
            throw std::runtime_error("hull_from_support: intersection effectively unbounded");

    // drop duplicate/collinear points introduced by clipping
    std::vector<Vec2> clean;
    for (const auto& v : poly) {
        if (!clean.empty() && distance(clean.back(), v) < 1e-12 * big) continue;
        clean.push_back(v);
    }
    while (clean.size() > 1 && distance(clean.front(), clean.back()) < 1e-12 * big)
        clean.pop_back();
    if (clean.size() < 3) throw std::runtime_error("hull_from_support: degenerate intersection");

    // rotate to start at lexicographically smallest vertex, keep CCW
    size_t start = 0;
    for (size_t i = 1; i < clean.size(); ++i) {
        if (clean[i].x < clean[start].x ||
            (clean[i].x == clean[start].x && clean[i].y < clean[start].y))
            start = i;
    }
    Polygon result;
    for (size_t i = 0; i < clean.size(); ++i)
        result.vertices.push_back(clean[(start + i) % clean.size()]);
    if (result.signed_area() < 0.0)
        std::reverse(result.vertices.begin() + 1, result.vertices.end());
    return result;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double l2 = norm2(ab);
    if (l2 == 0.0) return distance(p, a);
    double t = std::clamp(dot(p - a, ab) / l2, 0.0, 1.0);
    return distance(p, a + t * ab);
}

bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return cross(q - p, r - p); };
    double o1 = orient(a, b, c), o2 = orient(a, b, d);
    double o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0)
        return true;
    return false;
}

double hausdorff_distance(const Polygon& a, const Polygon& b) {
    double diam = std::max(a.diameter(), b.diameter());
    if (diam == 0.0) return 0.0;
    double step = diam / 2000.0;

    auto dist_to_polygon = [](Vec2 p, const Polygon& poly) {
        double d = std::numeric_limits<double>::infinity();
        size_t n = poly.vertices.size();
        for (size_t i = 0; i < n; ++i)
            d = std::min(d, point_segment_distance(p, poly.vertices[i], poly.vertices[(i + 1) % n]));
        return d;
    };
    auto one_sided = [&](const Polygon& from, const Polygon& to) {
        double worst = 0.0;
        size_t n = from.vertices.size();
        for (size_t i = 0; i < n; ++i) {
            Vec2 p = from.vertices[i];
            Vec2 q = from.vertices[(i + 1) % n];
            double len = distance(p, q);
            int samples = std::max(1, static_cast<int>(std::ceil(len / step)));
            for (int s = 0; s <= samples; ++s) {
                Vec2 x = p + (static_cast<double>(s) / samples) * (q - p);
                worst = std::max(worst, dist_to_polygon(x, to));
            }
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

Polygon convex_hull(std::vector<Vec2> pts) {
    if (pts.size() < 3) throw std::invalid_argument("convex hull needs >= 3 points");
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    size_t n = pts.size();
    std::vector<Vec2> h(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    Polygon poly;
    poly.vertices = std::move(h);
    return poly;
}

Polygon convex_hull(const InclusionSet& incl) {
    std::vector<Vec2> pts;
    for (const auto& c : incl.components)
        pts.insert(pts.end(), c.shape.vertices.begin(), c.shape.vertices.end());
    return convex_hull(std::move(pts));
}

} // namespace eit
