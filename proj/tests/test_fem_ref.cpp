#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numbers>
#include <random>

#include "support.hpp"
#include "vemax/fem_ref.hpp"
#include "vemax/postproc.hpp"
#include "vemax/problems.hpp"

using namespace vemax;

namespace {

// Whitney element from barycentric gradients obtained by inverting the vertex matrix,
// mass by the edge-midpoint rule (exact for quadratics).
struct WhitneyOracle {
    Eigen::Matrix3d mass;
    Eigen::Matrix3d curl;
};

WhitneyOracle whitney_oracle(const std::array<Point2, 3>& p) {
    Eigen::Matrix3d V;
    for (int i = 0; i < 3; ++i) V.row(i) << 1.0, p[i].x, p[i].y;
    const Eigen::Matrix3d C = V.inverse();  // column i: coefficients of lambda_i
    std::array<Eigen::Vector2d, 3> g;
    for (int i = 0; i < 3; ++i) g[i] = Eigen::Vector2d(C(1, i), C(2, i));
    const double area = 0.5 * std::abs(V.determinant());
    auto lambda = [&](int i, Point2 x) { return C(0, i) + C(1, i) * x.x + C(2, i) * x.y; };
    auto w = [&](int i, Point2 x) {
        const int a = i, b = (i + 1) % 3;
        return Eigen::Vector2d(lambda(a, x) * g[b] - lambda(b, x) * g[a]);
    };
    WhitneyOracle o;
    o.mass.setZero();
    for (int m = 0; m < 3; ++m) {
        const Point2 x = (p[m] + p[(m + 1) % 3]) * 0.5;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) o.mass(i, j) += area / 3.0 * w(i, x).dot(w(j, x));
    }
    Eigen::Vector3d rot;
    for (int i = 0; i < 3; ++i) {
        const auto& ga = g[i];
        const auto& gb = g[(i + 1) % 3];
        rot[i] = 2.0 * (ga.x() * gb.y() - ga.y() * gb.x());
    }
    o.curl = area * rot * rot.transpose();
    return o;
}

std::array<Point2, 3> corners(const Polygon& t) { return {t[0], t[1], t[2]}; }

double rel_diff(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(Triangulate, SquaresSplitWithoutNewVertices) {
    const auto mesh = test::cartesian(2);
    const auto tri = triangulate_mesh(mesh);
    EXPECT_EQ(tri.num_cells(), 8u);
    EXPECT_EQ(tri.num_vertices(), mesh.num_vertices());
    EXPECT_NO_THROW(check_mesh(tri));
    for (const auto& c : tri.cells) EXPECT_EQ(c.vertices.size(), 3u);
}

TEST(Triangulate, CutCellsKeepAreaAndTags) {
    const auto mesh = test::cut_mesh(8, test::circle_interface({0.02, -0.03}, 0.55));
    const auto tri = triangulate_mesh(mesh);
    EXPECT_NO_THROW(check_mesh(tri));
    // Original vertices survive; only centroid fans of cells with five or more vertices add one each.
    std::size_t big = 0;
    for (const auto& c : mesh.cells) big += c.vertices.size() >= 5;
    EXPECT_GE(tri.num_vertices(), mesh.num_vertices());
    EXPECT_LE(tri.num_vertices(), mesh.num_vertices() + big);
    for (const auto& v : mesh.vertices) {
        EXPECT_TRUE(std::any_of(tri.vertices.begin(), tri.vertices.end(), [&](Point2 w) { return distance(v, w) == 0.0; }));
    }
    // Group children by background cell and region; each group keeps its area.
    std::map<std::pair<int, Region>, double> parent_area, child_area;
    bool saw_pentagon = false;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        saw_pentagon |= mesh.cells[c].vertices.size() >= 5;
        parent_area[{mesh.cells[c].background, mesh.cells[c].region}] += test::shoelace(mesh.cell_polygon(c).vertices);
    }
    for (std::size_t c = 0; c < tri.num_cells(); ++c) {
        const auto poly = tri.cell_polygon(c);
        const double a = test::tri_area(poly[0], poly[1], poly[2]);
        EXPECT_GT(a, 0.0);
        child_area[{tri.cells[c].background, tri.cells[c].region}] += a;
    }
    EXPECT_TRUE(saw_pentagon);
    ASSERT_EQ(parent_area.size(), child_area.size());
    for (const auto& [key, area] : parent_area) EXPECT_NEAR(child_area.at(key), area, 1e-14);
}

TEST(Triangulate, FiveLayerMeshIsValid) {
    const Problem p = make_problem(ExampleId::Layers, {.layers = 5});
    const auto mesh = build_cut_mesh(GridSpec::with_spacing(p.domain, 1.0 / 16.0), p.interface);
    const auto tri = triangulate_mesh(mesh);
    EXPECT_NO_THROW(check_mesh(tri));
    std::vector<int> uses(tri.num_edges(), 0);
    for (const auto& c : tri.cells)
        for (const auto& e : c.edges) ++uses[static_cast<std::size_t>(e.edge)];
    for (std::size_t e = 0; e < tri.num_edges(); ++e) {
        EXPECT_EQ(uses[e], tri.is_boundary_edge(e) ? 1 : 2);
    }
}

TEST(Nd0Element, MatchesWhitneyOracle) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
        const auto t = corners(test::random_triangle(rng));
        const auto el = nd0_element(t);
        const auto o = whitney_oracle(t);
        EXPECT_LT(rel_diff(el.mass, o.mass), 1e-12);
        EXPECT_LT(rel_diff(el.curl, o.curl), 1e-12);
        EXPECT_LT((el.mass - el.mass.transpose()).norm(), 1e-14 * el.mass.norm());
    }
}

TEST(Nd0Element, RejectsClockwise) {
    EXPECT_THROW((void)nd0_element({Point2{0, 0}, Point2{0, 1}, Point2{1, 0}}), GeometryError);
}

TEST(Nd0Element, CurlMatchesVemRotRotOnTriangles) {
    // On a triangle the lowest-order VEM space is the Whitney space, so the rot-rot blocks agree.
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        const Polygon t = test::random_triangle(rng);
        const auto mesh = test::single_cell_mesh(t);
        const auto ops = element_matrices(mesh, 0, {});
        // The single-cell mesh may rotate the loop; align local edges by their start vertex.
        const auto& cell = mesh.cells[0];
        std::array<Point2, 3> loop;
        for (int i = 0; i < 3; ++i) loop[i] = mesh.vertices[static_cast<std::size_t>(cell.vertices[i])];
        EXPECT_LT((ops.A - nd0_element(loop).curl).norm(), 1e-12 * ops.A.norm());
    }
}

TEST(Nd0Global, RotRotMatchesVemAssembly) {
    const auto mesh = test::cut_mesh(8, test::circle_interface({0.0, 0.0}, std::numbers::pi / 5));
    const auto tri = triangulate_mesh(mesh);
    CoefficientField coeffs;
    coeffs.alpha_minus = 3.0;
    coeffs.beta_plus = coeffs.beta_minus = 0.0;
    const auto ne = static_cast<Eigen::Index>(tri.num_edges());
    std::vector<Eigen::Triplet<Complex>> trips;
    for (std::size_t c = 0; c < tri.num_cells(); ++c) {
        const auto ops = element_matrices(tri, c, coeffs);
        const auto& edges = tri.cells[c].edges;
        for (std::size_t i = 0; i < edges.size(); ++i)
            for (std::size_t j = 0; j < edges.size(); ++j)
                trips.emplace_back(edges[i].edge, edges[j].edge, double(edges[i].sign * edges[j].sign) * ops.A(i, j));
    }
    SparseMatrixC vem(ne, ne);
    vem.setFromTriplets(trips.begin(), trips.end());
    const SparseMatrixC nd = nd0_assemble(tri, coeffs, {}).A;
    const double scale = nd.coeffs().cwiseAbs().maxCoeff();
    EXPECT_LT(SparseMatrixC(vem - nd).coeffs().cwiseAbs().maxCoeff(), 1e-12 * scale);
}

TEST(Nd0Solve, ReproducesPiecewiseConstants) {
    const auto mesh = triangulate_mesh(test::cut_mesh(16, test::circle_interface({0.0, 0.0}, std::numbers::pi / 5)));
    for (const CoefficientField& coeffs :
         {CoefficientField{1.0, 1.0, 1.0, 1.0}, CoefficientField::from_physics(5.0, 0.5, 0.5, 0.1, 1.0)}) {
        const CVec2 c(Complex(0.7, 0.1), Complex(-1.2, 0.3));
        const VectorField g = [c](Point2, Region) { return c; };
        const VectorField f = [c, coeffs](Point2, Region r) -> CVec2 { return -coeffs.beta(r) * c; };
        const auto sol = nd0_solve(mesh, coeffs, f, g);
        const DofVector exact = interpolate_edge(g, mesh, {});
        EXPECT_LT((sol.u - exact).norm() / exact.norm(), 1e-10);
    }
}

TEST(Nd0Solve, FirstOrderOnCircleProblem) {
    const Problem p = make_problem(ExampleId::Circle);
    std::vector<LevelErrors> rows;
    for (int k = 3; k <= 5; ++k) {
        const double h = std::ldexp(1.0, -k);
        const auto tri = triangulate_mesh(build_cut_mesh(GridSpec::with_spacing(p.domain, h), p.interface));
        Nd0Options opt;
        opt.source_quad = p.source_quad;
        opt.boundary_quad = p.edge_quad;
        const auto sol = nd0_solve(tri, p.coeffs, p.f, p.g, opt);
        const auto err = error_report(tri, sol.u, p.exact, p.rot_exact, p.error_quad);
        rows.push_back({k, h, err.l2_proj_error, err.rot_error});
    }
    const auto t = order_table(rows);
    EXPECT_GT(*t.rows[2].l2_order, 0.8);
    EXPECT_GT(*t.rows[2].rot_order, 0.8);
}

TEST(Nd0Assemble, RejectsPolygonalMesh) {
    EXPECT_THROW((void)nd0_assemble(test::cartesian(2), {}, {}), MeshError);
}
