#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "stokesrbf/errors.hpp"
#include "stokesrbf/types.hpp"

namespace stokesrbf {

/// Scattered interior/boundary nodes with outward unit normals and unit
/// tangents on the boundary. Global node index: interior first, then boundary.
struct NodeSet {
    std::vector<Point2> interior;
    std::vector<Point2> boundary;
    std::vector<Vec2> normals;   // per boundary node
    std::vector<Vec2> tangents;  // normal rotated +90 degrees

    std::size_t n_interior() const { return interior.size(); }
    std::size_t n_boundary() const { return boundary.size(); }
    std::size_t total() const { return interior.size() + boundary.size(); }

    bool is_boundary(std::size_t i) const { return i >= interior.size(); }
    Point2 node(std::size_t i) const {
        return i < interior.size() ? interior[i] : boundary[i - interior.size()];
    }
    const Vec2& normal_of(std::size_t i) const { return normals[i - interior.size()]; }
    const Vec2& tangent_of(std::size_t i) const { return tangents[i - interior.size()]; }
};

/// Quasi-uniform nodes on the unit disk: sunflower-spiral interior plus an
/// equispaced boundary ring with analytic radial normals. Deterministic given
/// seed; the total count equals target_count.
NodeSet generate_disk_nodes(int target_count, unsigned seed = 0);

/// Tensor grid on the unit square (0,1)^2; corners are assigned to one side
/// deterministically (bottom, right, top, left priority).
NodeSet generate_square_nodes(int n_per_side);

NodeSet load_nodes(const std::string& path);
void save_nodes(const NodeSet& set, const std::string& path);

/// Local subdomain of the LHI method: the local_size nearest nodes to an
/// interior center, partitioned into solution centers (sc), boundary nodes
/// (fc) and PDE nodes (pdec). The center never sits in its own pdec set.
struct Stencil {
    std::size_t center = 0;           // global node index
    std::vector<std::size_t> nodes;   // k nearest, sorted by distance (ties by index)
    std::vector<std::size_t> sc;      // center first
    std::vector<std::size_t> fc;
    std::vector<std::size_t> pdec;
    double local_h = 0.0;             // mean nearest-neighbor distance inside the stencil
};

/// One stencil per interior node. Throws StencilTooSmall when the partition
/// leaves the PDE set empty.
std::vector<Stencil> build_stencils(const NodeSet& set, int local_size);

struct Triangulation {
    std::vector<std::array<std::size_t, 3>> triangles;  // global node indices
    std::vector<double> areas;

    double total_area() const {
        double s = 0.0;
        for (double a : areas) s += a;
        return s;
    }
};

/// Delaunay triangulation (Bowyer-Watson) over all nodes.
Triangulation triangulate(const NodeSet& set);

/// sqrt( sum_tri area * mean of squared vertex values ): the P1 vertex
/// quadrature of the squared field. nodal uses the global node index order.
double l2_norm(const std::vector<double>& nodal, const Triangulation& tri);

/// Diagonal quadrature weights m_i = sum_{tri owning i} area/3, so that
/// l2_norm(u)^2 == sum_i m_i u_i^2.
std::vector<double> lumped_masses(const NodeSet& set, const Triangulation& tri);

}  // namespace stokesrbf
