#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace eit {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
Vec2 normalized(Vec2 a);

// Unit direction with its clockwise-rotated perpendicular:
// omega = (cos t, sin t), omega_perp = (sin t, -cos t), det(omega omega_perp) = -1.
struct Direction {
    Vec2 omega;
    Vec2 omega_perp;

    static Direction from_angle(double theta);
    static Direction from_vector(Vec2 w);
    double angle() const { return std::atan2(omega.y, omega.x); }
};

// Simple polygon, vertices in counter-clockwise order.
struct Polygon {
    std::vector<Vec2> vertices;

    double signed_area() const;
    double area() const { return std::abs(signed_area()); }
    Vec2 centroid() const;
    double diameter() const;
    double shortest_edge() const;
    bool contains(Vec2 p) const;   // even-odd crossing test
    bool is_simple() const;
    void validate() const;         // throws on violation
};

struct InclusionComponent {
    Polygon shape;
    double conductivity = 2.0;
};

struct InclusionSet {
    std::vector<InclusionComponent> components;

    bool empty() const { return components.empty(); }
    bool has_contrast() const;     // any k_j != 1; k_j = 1 is the null configuration
    double diameter() const;       // max pairwise vertex distance over all components
    void validate() const;         // simple polygons, k > 0, disjoint closures
};

// Circular domain discretized as an inscribed polygon with boundary_resolution segments.
struct DomainSpec {
    Vec2 center{0.0, 0.0};
    double radius = 1.0;
    int boundary_resolution = 256;

    void validate() const;
    std::vector<Vec2> boundary_polygon() const;
    double polygon_area() const;
    double clearance(const InclusionSet& incl) const; // min vertex distance to the circle
};

struct SupportEntry {
    Direction direction;
    double h_estimate = 0.0;
    // diagnostics
    bool regular = true;
    bool perturbed = false;
    bool trusted = true;
    bool below_noise = false;
    double r_squared = 0.0;
    double mu_hat = 0.0;
    double window_tau_min = 0.0;
    double window_tau_max = 0.0;
    std::string method;
};

struct SupportTable {
    std::vector<SupportEntry> entries;
};

struct GeometricCondition {
    bool satisfied = false;
    double diam = 0.0;
    double dist = 0.0;
};

inline constexpr double kRegularityVertexTol = 1e-9;   // fraction of diam(D)
inline constexpr double kRegularityAngleTol = 1e-6;    // radians

// h_D(omega) = max over inclusion vertices of v . omega.
double support_function(const InclusionSet& incl, const Direction& d);

// True iff the supporting line x.omega = h_D(omega) meets the inclusion boundary
// at a single vertex.  A direction is flagged non-regular when two distinct
// vertices lie within tol*diam of the maximum or an edge at the maximum is
// perpendicular to omega within kRegularityAngleTol.
bool is_regular(const InclusionSet& incl, const Direction& d, double tol = kRegularityVertexTol);

// diam D vs dist(D, boundary circle).
GeometricCondition check_geometric_condition(const InclusionSet& incl, const DomainSpec& dom);

// Intersection of half-planes { x . omega <= h }, counter-clockwise, starting
// from the lexicographically smallest vertex.  Requires >= 3 directions whose
// angular gaps are all < pi.
Polygon hull_from_support(const SupportTable& table);

// Symmetric Hausdorff distance between polygon boundaries, dense edge sampling
// at step max(diam)/2000.
double hausdorff_distance(const Polygon& a, const Polygon& b);

// Convex hull of all inclusion vertices (monotone chain); reference hull for
// reconstruction error metrics.
Polygon convex_hull(const InclusionSet& incl);
Polygon convex_hull(std::vector<Vec2> points);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

} // namespace eit
