#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "eit/geometry.hpp"

using namespace eit;

namespace {

Polygon diamond(double r = 0.2) {
    Polygon p;
    p.vertices = {{r, 0}, {0, r}, {-r, 0}, {0, -r}};
    return p;
}

Polygon square(double a, double b) { // [a,b]^2
    Polygon p;
    p.vertices = {{a, a}, {b, a}, {b, b}, {a, b}};
    return p;
}

InclusionSet single(const Polygon& poly, double k = 2.0) {
    InclusionSet s;
    s.components.push_back({poly, k});
    return s;
}

// brute-force support: max of x.omega over a dense boundary sampling
// (vertices included), the independent oracle for vertex attainment
double support_brute_force(const InclusionSet& incl, const Direction& d, int samples_per_edge) {
    double best = -1e300;
    for (const auto& c : incl.components) {
        const auto& vs = c.shape.vertices;
        for (size_t i = 0; i < vs.size(); ++i) {
            Vec2 a = vs[i], b = vs[(i + 1) % vs.size()];
            for (int s = 0; s <= samples_per_edge; ++s) {
                Vec2 x = a + (double(s) / samples_per_edge) * (b - a);
                best = std::max(best, dot(x, d.omega));
            }
        }
    }
    return best;
}

} // namespace

TEST_CASE("direction convention") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    for (int i = 0; i < 100; ++i) {
        double theta = u(rng);
        Direction d = Direction::from_angle(theta);
        CHECK(std::abs(norm(d.omega) - 1.0) < 1e-12);
        CHECK(std::abs(norm(d.omega_perp) - 1.0) < 1e-12);
        CHECK(std::abs(dot(d.omega, d.omega_perp)) < 1e-12);
        // det(omega omega_perp) < 0
        CHECK(cross(d.omega, d.omega_perp) < 0.0);
    }
    Direction d = Direction::from_angle(0.3);
    CHECK(d.omega_perp.x == doctest::Approx(std::sin(0.3)));
    CHECK(d.omega_perp.y == doctest::Approx(-std::cos(0.3)));
}

TEST_CASE("support function on reference shapes") {
    auto dia = single(diamond());
    CHECK(support_function(dia, Direction::from_angle(0.0)) == doctest::Approx(0.2));

    auto sq = single(square(0.0, 1.0));
    double s2 = std::sqrt(2.0) / 2.0;
    CHECK(support_function(sq, Direction::from_vector({s2, s2})) ==
          doctest::Approx(std::sqrt(2.0)));

    InclusionSet two;
    two.components.push_back({diamond(), 2.0});
    two.components.push_back({square(-0.6, -0.5), 3.0});
    CHECK(support_function(two, Direction::from_angle(0.0)) == doctest::Approx(0.2));

    CHECK_THROWS(support_function(InclusionSet{}, Direction::from_angle(0.0)));
}

TEST_CASE("support function equals the brute-force boundary maximum") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    InclusionSet two;
    two.components.push_back({diamond(), 2.0});
    two.components.push_back({square(-0.6, -0.5), 3.0});
    for (int i = 0; i < 50; ++i) {
        Direction d = Direction::from_angle(u(rng));
        double ref = support_brute_force(two, d, 100);
        CHECK(support_function(two, d) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("support function invariant under vertex-order rotation") {
    Polygon p = diamond();
    for (size_t shift = 1; shift < 4; ++shift) {
        Polygon q;
        for (size_t i = 0; i < 4; ++i) q.vertices.push_back(p.vertices[(i + shift) % 4]);
        for (double theta : {0.0, 0.4, 1.7, 3.3, 5.1}) {
            Direction d = Direction::from_angle(theta);
            CHECK(support_function(single(p), d) ==
                  doctest::Approx(support_function(single(q), d)).epsilon(1e-15));
        }
    }
}

TEST_CASE("regularity of directions") {
    auto sq = single(square(-0.2, 0.2));
    CHECK_FALSE(is_regular(sq, Direction::from_angle(0.0))); // whole right edge achieves max
    CHECK(is_regular(sq, Direction::from_angle(M_PI / 4.0))); // unique corner
    CHECK(is_regular(single(diamond()), Direction::from_angle(0.0))); // unique vertex
}

TEST_CASE("non-regular directions of the diamond are exactly its edge normals") {
    auto dia = single(diamond());
    const int n = 10000;
    std::vector<double> flagged;
    for (int i = 0; i < n; ++i) {
        double theta = 2.0 * M_PI * i / n;
        if (!is_regular(dia, Direction::from_angle(theta))) flagged.push_back(theta);
    }
    REQUIRE(flagged.size() == 4);
    for (size_t k = 0; k < 4; ++k)
        CHECK(flagged[k] == doctest::Approx(M_PI / 4.0 + k * M_PI / 2.0).epsilon(1e-12));
}

TEST_CASE("geometric condition") {
    DomainSpec dom; // unit disk
    dom.boundary_resolution = 64;

    auto gc = check_geometric_condition(single(diamond()), dom);
    CHECK(gc.satisfied);
    CHECK(gc.diam == doctest::Approx(0.4));
    CHECK(gc.dist == doctest::Approx(0.8));

    auto gc2 = check_geometric_condition(single(square(-0.2, 0.2)), dom);
    CHECK(gc2.satisfied);
    CHECK(gc2.diam == doctest::Approx(0.4 * std::sqrt(2.0)));
    CHECK(gc2.dist == doctest::Approx(1.0 - 0.2 * std::sqrt(2.0)));

    auto gc3 = check_geometric_condition(single(square(-0.9, 0.9)), dom);
    CHECK_FALSE(gc3.satisfied);
}

TEST_CASE("hull from support: diamond at 4 axis directions gives the circumscribed square") {
    SupportTable t;
    for (int k = 0; k < 4; ++k) {
        SupportEntry e;
        e.direction = Direction::from_angle(k * M_PI / 2.0);
        e.h_estimate = 0.2;
        t.entries.push_back(e);
    }
    Polygon hull = hull_from_support(t);
    REQUIRE(hull.vertices.size() == 4);
    CHECK(hull.area() == doctest::Approx(0.16));
    // starts at the lexicographically smallest vertex, counter-clockwise
    CHECK(hull.vertices[0].x == doctest::Approx(-0.2));
    CHECK(hull.vertices[0].y == doctest::Approx(-0.2));
    CHECK(hull.signed_area() > 0.0);
}

TEST_CASE("hull from support: 8 uniform directions with h=0.2 give the octagon of inradius 0.2") {
    SupportTable t;
    for (int k = 0; k < 8; ++k) {
        SupportEntry e;
        e.direction = Direction::from_angle(k * M_PI / 4.0);
        e.h_estimate = 0.2;
        t.entries.push_back(e);
    }
    Polygon hull = hull_from_support(t);
    REQUIRE(hull.vertices.size() == 8);
    // inradius = distance from origin to each edge midpoint
    for (size_t i = 0; i < 8; ++i) {
        Vec2 a = hull.vertices[i], b = hull.vertices[(i + 1) % 8];
        CHECK(point_segment_distance({0, 0}, a, b) == doctest::Approx(0.2).epsilon(1e-9));
    }
}

TEST_CASE("hull from support at 64 exact directions approximates a convex body") {
    Polygon body;
    body.vertices = {{0.3, -0.1}, {0.25, 0.2}, {-0.05, 0.3}, {-0.3, 0.1}, {-0.2, -0.25}};
    auto incl = single(body);
    SupportTable t;
    for (int k = 0; k < 64; ++k) {
        SupportEntry e;
        e.direction = Direction::from_angle(2.0 * M_PI * k / 64.0);
        e.h_estimate = support_function(incl, e.direction);
        t.entries.push_back(e);
    }
    Polygon hull = hull_from_support(t);
    CHECK(hausdorff_distance(hull, convex_hull(incl)) < 0.02);
    CHECK(hausdorff_distance(hull, convex_hull(incl)) < 0.01);
}

TEST_CASE("hull from support preconditions") {
    SupportTable two;
    for (int k = 0; k < 2; ++k) {
        SupportEntry e;
        e.direction = Direction::from_angle(k * 1.0);
        e.h_estimate = 1.0;
        two.entries.push_back(e);
    }
    CHECK_THROWS(hull_from_support(two));

    SupportTable half; // all within a half circle
    for (int k = 0; k < 5; ++k) {
        SupportEntry e;
        e.direction = Direction::from_angle(0.1 + k * 0.5);
        e.h_estimate = 1.0;
        half.entries.push_back(e);
    }
    CHECK_THROWS(hull_from_support(half));
}

TEST_CASE("hausdorff distance") {
    Polygon a = square(0.0, 1.0);
    CHECK(hausdorff_distance(a, a) == doctest::Approx(0.0));

    Polygon b;
    b.vertices = {{0, 0}, {1, 0}, {1, 1.1}, {0, 1.1}};
    CHECK(hausdorff_distance(a, b) == doctest::Approx(0.1).epsilon(2e-2));

    // diamond vs its circumscribed square: the square corner (0.2, 0.2) to the
    // diamond edge x + y = 0.2 is |0.4 - 0.2| / sqrt(2) = 0.2 / sqrt(2)
    Polygon d = diamond();
    Polygon sq = square(-0.2, 0.2);
    CHECK(hausdorff_distance(d, sq) == doctest::Approx(0.2 / std::sqrt(2.0)).epsilon(2e-2));
}

TEST_CASE("polygon validation") {
    Polygon cw;
    cw.vertices = {{0, 0}, {0, 1}, {1, 1}, {1, 0}}; // clockwise
    CHECK_THROWS(cw.validate());

    Polygon bow;
    bow.vertices = {{0, 0}, {1, 1}, {1, 0}, {0, 1}}; // self-intersecting
    CHECK_THROWS(bow.validate());

    CHECK_NOTHROW(diamond().validate());
}

TEST_CASE("inclusion set validation") {
    InclusionSet overlapping;
    overlapping.components.push_back({square(-0.2, 0.2), 2.0});
    overlapping.components.push_back({square(0.0, 0.4), 3.0});
    CHECK_THROWS(overlapping.validate());

    InclusionSet bad_k;
    bad_k.components.push_back({diamond(), -2.0});
    CHECK_THROWS(bad_k.validate());

    InclusionSet null_cfg; // k = 1 is the valid null configuration
    null_cfg.components.push_back({diamond(), 1.0});
    CHECK_NOTHROW(null_cfg.validate());
    CHECK_FALSE(null_cfg.has_contrast());

    InclusionSet ok;
    ok.components.push_back({diamond(), 2.0});
    ok.components.push_back({square(-0.6, -0.5), 0.5});
    CHECK_NOTHROW(ok.validate());
}
