#pragma once

#include "lapeig/common.hpp"

#include <array>
#include <iosfwd>
#include <set>
#include <vector>

namespace lapeig {

/// Node indices of a counterclockwise triangle. The edge (v[0], v[1]) is the
/// refinement edge used by newest-vertex bisection; v[2] is the newest vertex.
using Triangle = std::array<int, 3>;

/// Conforming 2D P1 triangulation. Boundary nodes are derived from topology
/// (endpoints of edges that belong to exactly one triangle) and carry
/// homogeneous or lifted Dirichlet data. Free nodes are numbered as dofs in
/// increasing node order.
class Mesh {
public:
    Mesh() = default;
    Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles);

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_dofs() const { return static_cast<int>(free_nodes_.size()); }

    const std::vector<Point>& nodes() const { return nodes_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const Point& node(int i) const { return nodes_[i]; }
    const Triangle& triangle(int t) const { return triangles_[t]; }

    bool is_boundary(int node) const { return boundary_[node]; }
    std::vector<int> boundary_nodes() const;
    const std::vector<int>& free_nodes() const { return free_nodes_; }
    /// -1 for boundary nodes.
    int dof_of_node(int node) const { return dof_of_node_[node]; }
    int node_of_dof(int dof) const { return free_nodes_.at(dof); }

    /// Triangles incident to a node, ascending.
    const std::vector<int>& node_patch(int node) const { return node_patch_[node]; }

    double signed_area(int t) const;
    Point barycenter(int t) const;
    double diameter(int t) const;
    double total_area() const;

private:
    std::vector<Point> nodes_;
    std::vector<Triangle> triangles_;
    std::vector<bool> boundary_;
    std::vector<int> free_nodes_;
    std::vector<int> dof_of_node_;
    std::vector<std::vector<int>> node_patch_;
};

enum class Diagonal {
    up,   ///< bottom-left to top-right
    down, ///< top-left to bottom-right
};

/// Square [low, high]^2 split into cells_per_side^2 cells, two right
/// triangles per cell.
Mesh uniform_square(int cells_per_side, double low = 0.0, double high = 1.0,
                    Diagonal diagonal = Diagonal::up);

/// Unit square minus the wedge {x > 0.8 y + 0.1 and y < 0.8 x + 0.1}.
/// Block-structured: the remaining hexagon is cut into three convex
/// quadrilaterals, each meshed by a mapped ceil(cells/2)^2 grid.
Mesh reentrant_corner(int cells_per_side);

/// True iff the point lies in the closed re-entrant corner domain.
bool in_reentrant_domain(const Point& p);

/// Exact area of the re-entrant corner domain.
double reentrant_domain_area();

/// Conjunction of half-planes a.x <= c.
class RegionPredicate {
public:
    struct HalfPlane {
        Point normal;
        double offset;
    };

    static RegionPredicate box(double xmin, double xmax, double ymin, double ymax);
    static RegionPredicate half_planes(std::vector<HalfPlane> planes);

    bool contains(const Point& p) const;

private:
    std::vector<HalfPlane> planes_;
};

struct RefineResult {
    Mesh mesh;
    /// Set when no triangle barycenter fell inside the region; the mesh is then
    /// returned unchanged.
    bool region_missed = false;
};

/// Each step bisects every triangle with barycenter in the region and closes
/// the mesh by bisecting triangles with hanging nodes until it is conforming.
RefineResult refine_local(const Mesh& mesh, const RegionPredicate& region, int steps);

struct SupportPatch {
    std::vector<int> triangles;
    std::set<int> nodes;
    /// max distance from the dof node to the patch (attained at a vertex)
    double diameter = 0.0;
};

SupportPatch support_patch(const Mesh& mesh, int dof);

/// Edge-match scan: every edge is shared by at most two triangles and no node
/// lies in the interior of a boundary edge.
bool is_conforming(const Mesh& mesh);

void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

} // namespace lapeig
