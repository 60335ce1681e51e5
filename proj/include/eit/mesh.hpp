#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "eit/geometry.hpp"

namespace eit {

inline constexpr int kRegionBackground = -1;

struct MeshTriangle {
    int v[3];        // counter-clockwise node indices
    int region;      // kRegionBackground or inclusion component index
};

struct BoundaryEdge {
    int a = 0, b = 0;     // directed: interior on the left
    Vec2 normal;          // unit, outward
    double arc_param = 0; // angle of the edge midpoint around the domain center
};

struct InclusionEdge {
    int a = 0, b = 0;
    Vec2 normal;          // unit, oriented into the inclusion
};

// Inclusion-conforming triangulation: every inclusion polygon edge is a union
// of triangle edges, triangles are tagged by region, boundary and inclusion
// edges carry quadrature-ready normals.
struct Mesh {
    DomainSpec domain;
    double h_target = 0.0;
    std::vector<Vec2> nodes;
    std::vector<MeshTriangle> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<std::vector<InclusionEdge>> inclusion_edges; // per component

    double edge_length(int a, int b) const { return distance(nodes[size_t(a)], nodes[size_t(b)]); }
    Vec2 edge_midpoint(int a, int b) const { return 0.5 * (nodes[size_t(a)] + nodes[size_t(b)]); }
    double triangle_area(const MeshTriangle& t) const;
    std::vector<char> boundary_node_mask() const;
    double boundary_perimeter() const;
};

struct MeshQuality {
    double min_angle_deg = 0.0;
    double max_circumradius = 0.0;
    int conformity_violations = 0;
    int orientation_violations = 0;
    std::vector<std::string> notes;

    bool ok() const { return conformity_violations == 0 && orientation_violations == 0; }
};

// Bowyer-Watson triangulation seeded with the domain boundary polygon and the
// inclusion polygons; constraint edges split to length <= h_target (power-of-two
// subdivision), hex-grid interior fill, circumradius refinement with
// encroachment-aware constraint splitting, recovery by midpoint insertion.
Mesh generate_mesh(const DomainSpec& dom, const InclusionSet& incl, double h_target);

// Orientation, conformity (hanging nodes, tag separation), cycle structure,
// normal orientation, min angle and max circumradius.
MeshQuality validate_mesh(const Mesh& m);

// Nearest boundary node; p must lie within h_target of the domain boundary.
int snap_boundary_point(const Mesh& m, Vec2 p);

void write_mesh(const Mesh& m, std::ostream& os);
void write_mesh_file(const Mesh& m, const std::string& path);
Mesh read_mesh(std::istream& is);
Mesh read_mesh_file(const std::string& path);

} // namespace eit
