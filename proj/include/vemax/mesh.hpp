#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "vemax/geometry.hpp"

namespace vemax {

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Box {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

    [[nodiscard]] double width() const { return x1 - x0; }
    [[nodiscard]] double height() const { return y1 - y0; }
};

/// Cartesian background grid with nx * ny cells.
struct GridSpec {
    Box domain;
    int nx = 2;
    int ny = 2;

    /// Grid whose spacing is h along both axes; the domain extents must be multiples of h.
    [[nodiscard]] static GridSpec with_spacing(const Box& domain, double h);
    [[nodiscard]] double hx() const { return domain.width() / nx; }
    [[nodiscard]] double hy() const { return domain.height() / ny; }
    void validate() const;
};

struct MeshEdge {
    int a = 0;  ///< canonical orientation a -> b with a < b
    int b = 0;
    double length = 0.0;
};

/// Edge reference in a cell loop; sign is +1 when the loop runs a -> b.
struct CellEdge {
    int edge = 0;
    int sign = 1;
};

struct Cell {
    std::vector<int> vertices;    ///< counter-clockwise loop
    std::vector<CellEdge> edges;  ///< edges[i] joins vertices[i] -> vertices[i+1]
    Region region = Region::Plus;
    PolygonMetrics metrics;
    int background = -1;  ///< index of the Cartesian cell it came from, -1 if none
};

struct PolyMesh {
    Box domain;
    std::vector<Point2> vertices;
    std::vector<MeshEdge> edges;
    std::vector<Cell> cells;
    std::vector<std::array<int, 2>> edge_cells;  ///< second entry -1 on the boundary
    std::vector<int> boundary_edges;
    std::vector<int> interface_edges;
    double h_max = 0.0;
    std::vector<std::string> warnings;

    [[nodiscard]] Polygon cell_polygon(std::size_t c) const;
    [[nodiscard]] Point2 edge_vector(std::size_t e) const { return vertices[edges[e].b] - vertices[edges[e].a]; }
    [[nodiscard]] Point2 edge_midpoint(std::size_t e) const {
        return (vertices[edges[e].a] + vertices[edges[e].b]) * 0.5;
    }
    [[nodiscard]] bool is_boundary_edge(std::size_t e) const { return edge_cells[e][1] < 0; }
    [[nodiscard]] std::size_t num_cells() const { return cells.size(); }
    [[nodiscard]] std::size_t num_edges() const { return edges.size(); }
    [[nodiscard]] std::size_t num_vertices() const { return vertices.size(); }
};

struct MeshOptions {
    double snap_tol = kDefaultSnapTolerance;  ///< relative to the cell diameter
    double merge_tol = 1e-12;                 ///< absolute vertex deduplication distance
};

/// Builds the topology of a polygonal partition from its cell loops. Coincident vertices
/// are merged, vertices lying on another cell's edge are inserted into that loop, and
/// entities are numbered deterministically (vertices lexicographically, edges by endpoints).
[[nodiscard]] PolyMesh mesh_from_polygons(const Box& domain, const std::vector<Polygon>& polygons,
                                          const std::vector<Region>& regions, const MeshOptions& options = {},
                                          const std::vector<int>& background = {});

[[nodiscard]] PolyMesh build_cartesian_mesh(const GridSpec& grid);

/// Cuts every background cell by every interface primitive in turn.
[[nodiscard]] PolyMesh build_cut_mesh(const GridSpec& grid, const InterfaceSpec& spec,
                                      const MeshOptions& options = {});

/// Throws MeshError when a topological invariant fails (edge use counts, orientation,
/// closed loops, Euler characteristic of a simply connected partition).
void check_mesh(const PolyMesh& mesh);

/// Uniform bucket index of cell bounding boxes for point location and neighbourhood queries.
class CellLocator {
public:
    explicit CellLocator(const PolyMesh& mesh);

    /// Cell containing p (boundary within tol counts), or -1.
    [[nodiscard]] int locate(Point2 p, double tol = 1e-12) const;

    [[nodiscard]] const Polygon& polygon(std::size_t c) const { return polygons_[c]; }

    /// Calls f(cell) for every cell whose bucket overlaps [lo, hi]; a cell may be reported
    /// more than once.
    template <class F>
    void for_each_candidate(Point2 lo, Point2 hi, F&& f) const {
        const auto [i0, j0] = bucket(lo);
        const auto [i1, j1] = bucket(hi);
        for (long j = j0; j <= j1; ++j) {
            for (long i = i0; i <= i1; ++i) {
                const auto b = static_cast<std::size_t>(j * nx_ + i);
                for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) f(items_[k]);
            }
        }
    }

private:
    [[nodiscard]] std::pair<long, long> bucket(Point2 p) const;

    const PolyMesh* mesh_;
    std::vector<Polygon> polygons_;
    double cell_ = 1.0;
    long nx_ = 1, ny_ = 1;
    std::vector<std::size_t> start_;
    std::vector<int> items_;
};

struct DofMap {
    std::size_t num_edge_dofs = 0;
    std::size_t num_vertex_dofs = 0;
    std::vector<bool> boundary_edge;
    std::vector<bool> boundary_vertex;

    [[nodiscard]] std::size_t num_boundary_edges() const;
};

[[nodiscard]] DofMap dof_map(const PolyMesh& mesh);

}  // namespace vemax
