#include "vemax/fem_ref.hpp"

#include <cmath>
#include <exception>

namespace vemax {

TriMesh triangulate_mesh(const PolyMesh& mesh) {
    std::vector<Polygon> tris;
    std::vector<Region> regions;
    std::vector<int> parent;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const Polygon poly = mesh.cell_polygon(c);
        auto push = [&](Point2 a, Point2 b, Point2 d) {
            tris.push_back(Polygon{{a, b, d}});
            regions.push_back(mesh.cells[c].region);
            parent.push_back(static_cast<int>(c));
        };
        if (poly.size() == 3) {
            push(poly[0], poly[1], poly[2]);
        } else if (poly.size() == 4 && cross(poly[1] - poly[0], poly[2] - poly[1]) > 0.0 &&
                   cross(poly[2] - poly[1], poly[3] - poly[2]) > 0.0 &&
                   cross(poly[3] - poly[2], poly[0] - poly[3]) > 0.0 &&
                   cross(poly[0] - poly[3], poly[1] - poly[0]) > 0.0) {
            // Ties (squares) take the 0-2 diagonal.
            if (distance(poly[1], poly[3]) < distance(poly[0], poly[2])) {
                push(poly[0], poly[1], poly[3]);
                push(poly[1], poly[2], poly[3]);
            } else {
                push(poly[0], poly[1], poly[2]);
                push(poly[0], poly[2], poly[3]);
            }
        } else {
            for (const auto& t : triangulate(poly)) push(t.a, t.b, t.c);
        }
    }
    TriMesh out = mesh_from_polygons(mesh.domain, tris, regions, {}, parent);
    for (std::size_t c = 0; c < out.num_cells(); ++c) {
        if (out.cells[c].vertices.size() != 3) {
            throw MeshError("triangulate_mesh: cell " + std::to_string(c) + " gained a hanging vertex");
        }
        // mesh_from_polygons stores the Cartesian id; map back to the polygon parent.
        out.cells[c].background = mesh.cells[static_cast<std::size_t>(out.cells[c].background)].background;
    }
    return out;
}

Nd0Element nd0_element(const std::array<Point2, 3>& p) {
    const double area2 = cross(p[1] - p[0], p[2] - p[0]);
    if (!(area2 > 0.0)) throw GeometryError("nd0_element: triangle is degenerate or clockwise");
    const double area = 0.5 * area2;
    // grad lambda_i is the inward normal of the opposite edge scaled by its length / (2|T|).
    std::array<Eigen::Vector2d, 3> g;
    for (int i = 0; i < 3; ++i) {
        const Point2 e = p[(i + 2) % 3] - p[(i + 1) % 3];
        g[i] = Eigen::Vector2d(-e.y, e.x) / area2;
    }
    auto m = [&](int i, int j) { return area * (i == j ? 2.0 : 1.0) / 12.0; };
    auto gg = [&](int i, int j) { return g[i].dot(g[j]); };
    Nd0Element el;
    std::array<double, 3> curl{};
    for (int i = 0; i < 3; ++i) {
        const int a = i;
        const int b = (i + 1) % 3;
        curl[i] = 2.0 * (g[a].x() * g[b].y() - g[a].y() * g[b].x());
    }
    for (int i = 0; i < 3; ++i) {
        const int a = i, b = (i + 1) % 3;
        for (int j = 0; j < 3; ++j) {
            const int c = j, d = (j + 1) % 3;
            el.curl(i, j) = area * curl[i] * curl[j];
            el.mass(i, j) = m(a, c) * gg(b, d) - m(a, d) * gg(b, c) - m(b, c) * gg(a, d) + m(b, d) * gg(a, c);
        }
    }
    return el;
}

namespace {

struct TriBlock {
    Eigen::Matrix3cd a;
    Eigen::Vector3cd rhs;
};

TriBlock tri_block(const TriMesh& tri, std::size_t c, const CoefficientField& coeffs, const VectorField& f,
                   const QuadSpec& spec) {
    const Cell& cell = tri.cells[c];
    std::array<Point2, 3> p;
    for (int i = 0; i < 3; ++i) p[static_cast<std::size_t>(i)] = tri.vertices[static_cast<std::size_t>(cell.vertices[static_cast<std::size_t>(i)])];
    const Nd0Element el = nd0_element(p);
    TriBlock blk;
    blk.a = coeffs.alpha(cell.region) * el.curl.cast<Complex>() - coeffs.beta(cell.region) * el.mass.cast<Complex>();
    blk.rhs.setZero();
    if (!f) return blk;
    const double area2 = cross(p[1] - p[0], p[2] - p[0]);
    std::array<Eigen::Vector2d, 3> g;
    for (int i = 0; i < 3; ++i) {
        const Point2 e = p[static_cast<std::size_t>((i + 2) % 3)] - p[static_cast<std::size_t>((i + 1) % 3)];
        g[static_cast<std::size_t>(i)] = Eigen::Vector2d(-e.y, e.x) / area2;
    }
    for (const auto& q : triangle_rule(Triangle{p[0], p[1], p[2]}, spec.order)) {
        // Barycentric coordinates of q.
        std::array<double, 3> lam;
        for (int i = 0; i < 3; ++i) {
            const Point2 a = p[static_cast<std::size_t>((i + 1) % 3)];
            const Point2 b = p[static_cast<std::size_t>((i + 2) % 3)];
            lam[static_cast<std::size_t>(i)] = cross(b - a, q.x - a) / area2;
        }
        const CVec2 fv = f(q.x, cell.region);
        if (!fv.allFinite()) throw FieldError("non-finite source sample in triangle " + std::to_string(c));
        for (int i = 0; i < 3; ++i) {
            const auto a = static_cast<std::size_t>(i);
            const auto b = static_cast<std::size_t>((i + 1) % 3);
            const Eigen::Vector2d w = lam[a] * g[b] - lam[b] * g[a];
            blk.rhs[i] += q.w * (fv[0] * w.x() + fv[1] * w.y());
        }
    }
    return blk;
}

}  // namespace

LinearSystem nd0_assemble(const TriMesh& tri, const CoefficientField& coeffs, const VectorField& f,
                          const QuadSpec& source_quad) {
    coeffs.validate();
    const std::size_t ncell = tri.num_cells();
    for (const auto& cell : tri.cells) {
        if (cell.vertices.size() != 3) throw MeshError("nd0_assemble: mesh is not triangular");
    }
    std::vector<TriBlock> blocks(ncell);
    std::exception_ptr error;
    const auto n = static_cast<long>(ncell);
#pragma omp parallel for schedule(dynamic, 64)
    for (long c = 0; c < n; ++c) {
        try {
            blocks[static_cast<std::size_t>(c)] = tri_block(tri, static_cast<std::size_t>(c), coeffs, f, source_quad);
        } catch (...) {
#pragma omp critical(vemax_nd0_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);

    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(9 * ncell);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(tri.num_edges()));
    for (std::size_t c = 0; c < ncell; ++c) {
        const Cell& cell = tri.cells[c];
        for (int i = 0; i < 3; ++i) {
            const auto& ei = cell.edges[static_cast<std::size_t>(i)];
            b[ei.edge] += static_cast<double>(ei.sign) * blocks[c].rhs[i];
            for (int j = 0; j < 3; ++j) {
                const auto& ej = cell.edges[static_cast<std::size_t>(j)];
                trips.emplace_back(ei.edge, ej.edge, static_cast<double>(ei.sign * ej.sign) * blocks[c].a(i, j));
            }
        }
    }
    const auto ne = static_cast<Eigen::Index>(tri.num_edges());
    SparseMatrixC A(ne, ne);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    return LinearSystem::unconstrained(std::move(A), std::move(b));
}

Nd0Solution nd0_solve(const TriMesh& tri, const CoefficientField& coeffs, const VectorField& f, const VectorField& g,
                      const Nd0Options& options) {
    const LinearSystem sys = set_tangential_bc(nd0_assemble(tri, coeffs, f, options.source_quad), tri, g,
                                               options.boundary_quad);
    Nd0Solution sol;
    sol.report = solve(sys);
    sol.u = sol.report.u;
    return sol;
}

}  // namespace vemax
