#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "support.hpp"
#include "vemax/mesh.hpp"

using namespace vemax;

namespace {

int euler(const PolyMesh& m) {
    return static_cast<int>(m.num_vertices()) - static_cast<int>(m.num_edges()) + static_cast<int>(m.num_cells());
}

}  // namespace

TEST(CartesianMesh, CountsOnFourByFour) {
    const auto mesh = vemax::test::cartesian(4, {-1, 1, -1, 1});
    EXPECT_EQ(mesh.num_cells(), 16u);
    EXPECT_EQ(mesh.num_edges(), 40u);
    EXPECT_EQ(mesh.num_vertices(), 25u);
    EXPECT_EQ(euler(mesh), 1);
    EXPECT_NO_THROW(check_mesh(mesh));
    EXPECT_TRUE(mesh.interface_edges.empty());
    EXPECT_DOUBLE_EQ(mesh.h_max, std::sqrt(2.0) / 2);
}

TEST(DofMap, FourByFourBoundary) {
    const auto mesh = vemax::test::cartesian(4, {-1, 1, -1, 1});
    const auto dofs = dof_map(mesh);
    EXPECT_EQ(dofs.num_edge_dofs, 40u);
    EXPECT_EQ(dofs.num_vertex_dofs, 25u);
    // brute force: an edge is on the boundary when both endpoints share a domain side
    std::size_t expected = 0;
    for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
        const Point2 a = mesh.vertices[mesh.edges[e].a];
        const Point2 b = mesh.vertices[mesh.edges[e].b];
        const bool on = (std::abs(a.x) == 1 && a.x == b.x) || (std::abs(a.y) == 1 && a.y == b.y);
        expected += on;
        EXPECT_EQ(dofs.boundary_edge[e], on);
    }
    EXPECT_EQ(expected, 16u);
    EXPECT_EQ(dofs.num_boundary_edges(), 16u);
    std::size_t bv = 0;
    for (bool b : dofs.boundary_vertex) bv += b;
    EXPECT_EQ(bv, 16u);
}

TEST(DofMap, SingleCell) {
    const auto mesh = vemax::test::cartesian(1);
    const auto dofs = dof_map(mesh);
    EXPECT_EQ(dofs.num_edge_dofs, 4u);
    EXPECT_EQ(dofs.num_boundary_edges(), 4u);
}

TEST(CutMesh, OneCutCellAddsThreeEdges) {
    const Box box{0, 2, 0, 2};
    const auto plain = vemax::test::cartesian(2, box);
    const auto spec = vemax::test::single_interface(LinePrimitive{{0.25, 0.25}, {std::sqrt(0.5), std::sqrt(0.5)}});
    const auto cut = build_cut_mesh(GridSpec{box, 2, 2}, spec);
    EXPECT_NO_THROW(check_mesh(cut));
    EXPECT_EQ(cut.num_edges(), plain.num_edges() + 3);
    EXPECT_EQ(cut.num_cells(), plain.num_cells() + 1);
    EXPECT_EQ(cut.interface_edges.size(), 1u);
    EXPECT_EQ(dof_map(cut).num_edge_dofs, plain.num_edges() + 3);
}

TEST(CutMesh, SliverColumnDoublesOneColumn) {
    for (int n : {4, 8, 16}) {
        const auto mesh = vemax::test::cut_mesh(n, vemax::test::vertical_line_interface(1e-7));
        EXPECT_EQ(mesh.num_cells(), static_cast<std::size_t>(n * n + n));
        EXPECT_EQ(euler(mesh), 1);
        EXPECT_NO_THROW(check_mesh(mesh));
        EXPECT_EQ(mesh.interface_edges.size(), static_cast<std::size_t>(n));
        double min_area = 1.0;
        for (const auto& c : mesh.cells) min_area = std::min(min_area, c.metrics.area);
        EXPECT_NEAR(min_area, 1e-7 * 2.0 / n, 1e-18);
    }
}

TEST(CutMesh, CutCellsMatchCornerSignScan) {
    const double r = std::numbers::pi / 5;
    const int n = 16;
    const auto mesh = vemax::test::cut_mesh(n, vemax::test::circle_interface({0, 0}, r));
    EXPECT_NO_THROW(check_mesh(mesh));
    std::map<int, int> children;
    for (const auto& c : mesh.cells) ++children[c.background];
    int cut = 0;
    for (const auto& [bg, count] : children) cut += count > 1;

    int brute = 0;
    const double h = 2.0 / n;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            int neg = 0;
            for (int dj = 0; dj < 2; ++dj)
                for (int di = 0; di < 2; ++di) neg += std::hypot(-1 + (i + di) * h, -1 + (j + dj) * h) < r;
            brute += neg > 0 && neg < 4;
        }
    }
    EXPECT_EQ(cut, brute);
    EXPECT_GT(cut, 0);
}

TEST(CutMesh, LineTagsMatchCentroids) {
    const auto spec = vemax::test::vertical_line_interface(1e-7);
    const auto mesh = vemax::test::cut_mesh(16, spec);
    for (const auto& c : mesh.cells) EXPECT_EQ(level_eval(spec, c.metrics.centroid).region, c.region);
}

TEST(CutMesh, CircleTagMismatchStaysInChordStrip) {
    const double r = std::numbers::pi / 5;
    const auto spec = vemax::test::circle_interface({0, 0}, r);
    std::vector<double> strip_constants;
    for (int k = 3; k <= 6; ++k) {
        const int n = 2 << k;  // h = 2^-k on (-1,1)^2
        const double h = 1.0 / (1 << k);
        const auto mesh = vemax::test::cut_mesh(n, spec);
        for (const auto& c : mesh.cells) {
            const auto ev = level_eval(spec, c.metrics.centroid);
            if (ev.region != c.region) {
                EXPECT_LE(std::abs(ev.values[0]), h * h) << "level " << k;
            }
        }
        // Hausdorff distance between a chord with endpoints on the circle and its arc is the sagitta
        double worst = 0.0;
        for (int e : mesh.interface_edges) {
            const Point2 a = mesh.vertices[mesh.edges[e].a];
            const Point2 b = mesh.vertices[mesh.edges[e].b];
            const double half = 0.5 * distance(a, b);
            worst = std::max(worst, r - std::sqrt(r * r - half * half));
            EXPECT_NEAR(norm(a), r, 1e-12);
        }
        strip_constants.push_back(worst / (h * h));
    }
    for (double c : strip_constants) {
        EXPECT_GT(c, 0.0);
        EXPECT_LE(c, 2.0 / (8 * r));  // chord length at most sqrt(2) h
    }
    EXPECT_LT(strip_constants.back() / strip_constants.front(), 2.0);
    EXPECT_GT(strip_constants.back() / strip_constants.front(), 0.5);
}

TEST(CutMesh, CellLoopsCloseAndEdgesAreSharedOppositely) {
    const auto mesh = vemax::test::cut_mesh(16, vemax::test::circle_interface({0.03, -0.02}, 0.55));
    std::vector<int> sign_sum(mesh.num_edges(), 0), uses(mesh.num_edges(), 0);
    for (const auto& c : mesh.cells) {
        Point2 sum{};
        for (const auto& ce : c.edges) {
            sum = sum + mesh.edge_vector(ce.edge) * ce.sign;
            sign_sum[ce.edge] += ce.sign;
            ++uses[ce.edge];
        }
        EXPECT_LT(norm(sum), 1e-14);
    }
    for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
        if (mesh.is_boundary_edge(e)) {
            EXPECT_EQ(uses[e], 1);
        } else {
            EXPECT_EQ(uses[e], 2);
            EXPECT_EQ(sign_sum[e], 0);
        }
    }
}

TEST(CutMesh, ConstructionIsDeterministic) {
    const auto spec = vemax::test::circle_interface({0, 0}, 0.7);
    const auto a = vemax::test::cut_mesh(32, spec);
    const auto b = vemax::test::cut_mesh(32, spec);
    ASSERT_EQ(a.num_vertices(), b.num_vertices());
    ASSERT_EQ(a.num_edges(), b.num_edges());
    for (std::size_t v = 0; v < a.num_vertices(); ++v) EXPECT_EQ(a.vertices[v], b.vertices[v]);
    for (std::size_t e = 0; e < a.num_edges(); ++e) {
        EXPECT_EQ(a.edges[e].a, b.edges[e].a);
        EXPECT_EQ(a.edges[e].b, b.edges[e].b);
    }
}

TEST(CutMesh, TangentCircleIsReported) {
    // touches each side of the cell [0.25, 0.5]^2 at its midpoint
    const auto spec = vemax::test::circle_interface({0.375, 0.375}, 0.125);
    EXPECT_THROW((void)build_cut_mesh(GridSpec{{0, 1, 0, 1}, 4, 4}, spec), MeshError);
}

TEST(GridSpec, RejectsBadInput) {
    EXPECT_THROW((void)GridSpec::with_spacing({0, 1, 0, 1}, 0.3), MeshError);
    EXPECT_THROW((void)GridSpec::with_spacing({0, 1, 0, 1}, -1.0), MeshError);
    EXPECT_THROW((GridSpec{{0, 0, 0, 1}, 2, 2}.validate()), MeshError);
    const auto g = GridSpec::with_spacing({-1, 1, -1, 1}, 0.125);
    EXPECT_EQ(g.nx, 16);
    EXPECT_EQ(g.ny, 16);
}

TEST(CellLocator, FindsContainingCell) {
    const auto mesh = vemax::test::cut_mesh(16, vemax::test::circle_interface({0, 0}, 0.5));
    const CellLocator locator(mesh);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const Point2 p{u(rng), u(rng)};
        const int c = locator.locate(p);
        ASSERT_GE(c, 0);
        EXPECT_TRUE(contains(mesh.cell_polygon(c), p, 1e-12));
    }
    EXPECT_EQ(locator.locate({1.5, 0}), -1);
}
