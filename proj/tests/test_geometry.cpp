#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "vemax/geometry.hpp"

using namespace vemax;
using vemax::test::rect;
using vemax::test::shoelace;

namespace {

double piece_area(const CutResult& cut, int side) {
    double a = 0.0;
    for (const auto& p : cut.pieces)
        if (p.side == side) a += shoelace(p.polygon.vertices);
    return a;
}

bool in_triangle(const Triangle& t, Point2 p) {
    const double d1 = vemax::test::tri_area(t.a, t.b, p);
    const double d2 = vemax::test::tri_area(t.b, t.c, p);
    const double d3 = vemax::test::tri_area(t.c, t.a, p);
    return d1 >= 0 && d2 >= 0 && d3 >= 0;
}

// Crossing-number test, independent of geometry's contains().
bool in_polygon(const Polygon& poly, Point2 p) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const auto& a = poly[i];
        const auto& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) inside = !inside;
    }
    return inside;
}

Polygon thin_l_shape() { return Polygon{{{0, 0}, {3, 0}, {3, 0.2}, {0.2, 0.2}, {0.2, 3}, {0, 3}}}; }

Polygon scaled(const Polygon& p, double s) {
    Polygon q = p;
    for (auto& v : q.vertices) v = v * s;
    return q;
}

}  // namespace

TEST(LevelEval, CircleCenterIsInside) {
    const auto spec = vemax::test::circle_interface({0, 0}, std::numbers::pi / 5);
    const auto ev = level_eval(spec, {0, 0});
    ASSERT_EQ(ev.values.size(), 1u);
    EXPECT_DOUBLE_EQ(ev.values[0], -std::numbers::pi / 5);
    EXPECT_EQ(ev.region, Region::Minus);
}

TEST(LevelEval, LineIsSignedDistance) {
    const auto spec = vemax::test::vertical_line_interface(1e-7);
    const auto ev = level_eval(spec, {1, 0});
    EXPECT_NEAR(ev.values[0], 1.0 - 1e-7, 1e-15);
    EXPECT_EQ(ev.region, Region::Plus);
    EXPECT_EQ(level_eval(spec, {-1, 0}).region, Region::Minus);
}

TEST(LevelEval, OverlapOfTwoCirclesIsMinus) {
    InterfaceSpec spec;
    spec.primitives = {CirclePrimitive{{1.25, 0}, 0.35}, CirclePrimitive{{1.75, 0}, 0.35}};
    spec.region_rule = [](std::span<const int> s) { return (s[0] < 0 || s[1] < 0) ? Region::Minus : Region::Plus; };
    const auto ev = level_eval(spec, {1.5, 0});
    // both centres are 0.25 away
    EXPECT_NEAR(ev.values[0], 0.25 - 0.35, 1e-15);
    EXPECT_NEAR(ev.values[1], 0.25 - 0.35, 1e-15);
    EXPECT_EQ(ev.region, Region::Minus);
}

TEST(InterfaceSpec, ValidateRejectsMalformedPrimitives) {
    InterfaceSpec empty;
    empty.region_rule = [](std::span<const int>) { return Region::Plus; };
    EXPECT_THROW(empty.validate(), GeometryError);
    EXPECT_THROW(vemax::test::circle_interface({0, 0}, 0.0).validate(), GeometryError);
    EXPECT_THROW(vemax::test::single_interface(LinePrimitive{{0, 0}, {1.0, 1e-5}}).validate(), GeometryError);
    InterfaceSpec no_rule;
    no_rule.primitives.push_back(CirclePrimitive{{0, 0}, 1.0});
    EXPECT_THROW(no_rule.validate(), GeometryError);
}

TEST(CutPolygon, AxisAlignedLineSplitsSquare) {
    const auto cut = cut_polygon(vemax::test::unit_square(), LinePrimitive{{0.25, 0}, {1, 0}});
    ASSERT_EQ(cut.pieces.size(), 2u);
    EXPECT_NEAR(piece_area(cut, -1), 0.25, 1e-15);
    EXPECT_NEAR(piece_area(cut, +1), 0.75, 1e-15);
}

TEST(CutPolygon, CircleCutIsChordal) {
    const auto cut = cut_polygon(vemax::test::unit_square(), CirclePrimitive{{0, 0}, 0.6});
    ASSERT_EQ(cut.pieces.size(), 2u);
    const auto it = std::find_if(cut.pieces.begin(), cut.pieces.end(), [](const CutPiece& p) { return p.side < 0; });
    ASSERT_NE(it, cut.pieces.end());
    EXPECT_EQ(it->polygon.size(), 3u);
    EXPECT_NEAR(shoelace(it->polygon.vertices), 0.18, 1e-14);
    EXPECT_NEAR(piece_area(cut, +1), 1.0 - 0.18, 1e-14);
}

TEST(CutPolygon, ThinSliverIsKept) {
    const auto cut = cut_polygon(rect(0, -0.5, 0.5, 0.5) , LinePrimitive{{1e-7, 0}, {1, 0}});
    ASSERT_EQ(cut.pieces.size(), 2u);
    EXPECT_NEAR(piece_area(cut, -1), 1e-7, 1e-20);
    EXPECT_TRUE(cut.warnings.empty());
}

TEST(CutPolygon, UntouchedPolygonIsReturnedUnchanged) {
    const auto square = vemax::test::unit_square();
    const auto cut = cut_polygon(square, LinePrimitive{{2, 0}, {1, 0}});
    ASSERT_EQ(cut.pieces.size(), 1u);
    EXPECT_EQ(cut.pieces[0].side, -1);
    EXPECT_EQ(cut.pieces[0].polygon.vertices, square.vertices);
}

TEST(CutPolygon, CrossingNearVertexSnaps) {
    // crossing 1e-12 from the corner is well inside the snap radius
    const auto cut = cut_polygon(vemax::test::unit_square(), LinePrimitive{{0.5, 0}, {std::sqrt(0.5), std::sqrt(0.5)}});
    for (const auto& p : cut.pieces) {
        for (std::size_t i = 0; i < p.polygon.size(); ++i) EXPECT_GT(distance(p.polygon[i], p.polygon.next(i)), 1e-6);
    }
    const auto snapped =
        cut_polygon(vemax::test::unit_square(), LinePrimitive{{1e-12, 0}, {std::sqrt(0.5), std::sqrt(0.5)}});
    for (const auto& p : snapped.pieces) {
        for (std::size_t i = 0; i < p.polygon.size(); ++i) EXPECT_GT(distance(p.polygon[i], p.polygon.next(i)), 1e-9);
    }
}

TEST(CutPolygon, RejectsCircleInsideOrThroughOneEdge) {
    EXPECT_THROW((void)cut_polygon(vemax::test::unit_square(), CirclePrimitive{{0.5, 0.5}, 0.2}), GeometryError);
    EXPECT_THROW((void)cut_polygon(vemax::test::unit_square(), CirclePrimitive{{0.5, -0.1}, 0.2}), GeometryError);
}

TEST(CutPolygon, ConservesAreaAndOrientation) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Polygon poly = vemax::test::random_convex(rng, 4 + trial % 5);
        const double area = shoelace(poly.vertices);
        const Point2 c = centroid(poly);
        Primitive prim;
        if (trial % 2 == 0) {
            const double t = 2 * std::numbers::pi * u(rng);
            prim = LinePrimitive{c + Point2{u(rng) - 0.5, u(rng) - 0.5}, {std::cos(t), std::sin(t)}};
        } else {
            // large circle through the polygon so each edge is crossed at most once
            const double t = 2 * std::numbers::pi * u(rng);
            const double r = 5.0 + 3.0 * u(rng);
            prim = CirclePrimitive{c + Point2{std::cos(t), std::sin(t)} * (r + 0.6 * (u(rng) - 0.5)), r};
        }
        const auto cut = cut_polygon(poly, prim);
        double sum = 0.0;
        for (const auto& p : cut.pieces) {
            const double a = shoelace(p.polygon.vertices);
            EXPECT_GT(a, 0.0);
            sum += a;
        }
        EXPECT_NEAR(sum, area, 1e-12 * area) << "trial " << trial;
    }
}

TEST(PolygonMetrics, UnitSquare) {
    const auto m = polygon_metrics(vemax::test::unit_square());
    EXPECT_DOUBLE_EQ(m.area, 1.0);
    EXPECT_NEAR(m.diameter, std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(m.star_radius, 0.5, 1e-9);
    EXPECT_NEAR(m.centroid.x, 0.5, 1e-15);
    for (double l : m.supporting_heights) EXPECT_DOUBLE_EQ(l, 1.0);
    for (double h : m.edge_lengths) EXPECT_DOUBLE_EQ(h, 1.0);
}

TEST(PolygonMetrics, TriangleInradius) {
    const auto m = polygon_metrics(vemax::test::unit_triangle());
    EXPECT_DOUBLE_EQ(m.area, 0.5);
    EXPECT_NEAR(m.diameter, std::sqrt(2.0), 1e-15);
    // r = area / semiperimeter
    const double r = 0.5 / ((2.0 + std::sqrt(2.0)) / 2.0);
    EXPECT_NEAR(m.star_radius, r, 1e-9);
    EXPECT_NEAR(r, 0.29289321881, 1e-10);
}

TEST(PolygonMetrics, SliverRatio) {
    const auto m = polygon_metrics(rect(0, 0, 1, 1e-7));
    EXPECT_NEAR(m.star_radius, 5e-8, 1e-15);
    EXPECT_NEAR(m.diameter, 1.0, 1e-12);
    EXPECT_LT(m.star_radius / m.diameter, 1e-7);
}

TEST(PolygonMetrics, NonConvexStarRadius) {
    // thin L: the kernel is the 0.2 x 0.2 corner square
    const auto m = polygon_metrics(thin_l_shape());
    EXPECT_NEAR(m.star_radius, 0.1, 2e-3);
    EXPECT_LE(m.star_radius, 0.1 + 1e-12);
}

TEST(PolygonMetrics, RejectsNonSimple) {
    const Polygon bowtie{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}};
    EXPECT_THROW((void)polygon_metrics(bowtie), GeometryError);
    const Polygon clockwise{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
    EXPECT_THROW((void)polygon_metrics(clockwise), GeometryError);
}

TEST(PolygonMetrics, BoundsHoldOnRandomPolygons) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = polygon_metrics(vemax::test::random_convex(rng, 3 + trial % 6));
        EXPECT_LE(m.area, std::numbers::pi / 4 * m.diameter * m.diameter + 1e-12);
        EXPECT_GE(m.star_radius, 0.0);
        EXPECT_LE(m.star_radius, m.diameter / 2);
        for (double l : m.supporting_heights) EXPECT_LE(l, m.diameter + 1e-12);
    }
}

TEST(PolygonMetrics, ScaleCovariance) {
    std::mt19937_64 rng(3);
    for (const Polygon& base : {vemax::test::random_convex(rng, 5), thin_l_shape(), vemax::test::unit_triangle()}) {
        const auto m = polygon_metrics(base);
        for (double s : {0.5, 2.0}) {
            const auto ms = polygon_metrics(scaled(base, s));
            EXPECT_NEAR(ms.area, s * s * m.area, 1e-12 * ms.area);
            EXPECT_NEAR(ms.diameter, s * m.diameter, 1e-12 * ms.diameter);
            EXPECT_NEAR(ms.star_radius, s * m.star_radius, 1e-9 * ms.diameter);
            for (std::size_t e = 0; e < m.edge_lengths.size(); ++e) {
                EXPECT_NEAR(ms.edge_lengths[e], s * m.edge_lengths[e], 1e-12 * ms.diameter);
                EXPECT_NEAR(ms.supporting_heights[e], s * m.supporting_heights[e], 1e-12 * ms.diameter);
            }
        }
    }
}

TEST(Triangulate, SquareFan) {
    const auto tris = triangulate(vemax::test::unit_square());
    ASSERT_EQ(tris.size(), 4u);
    for (const auto& t : tris) EXPECT_NEAR(t.area(), 0.25, 1e-15);
}

TEST(Triangulate, PentagonFanSumsToArea) {
    const Polygon pent{{{0, 0}, {2, 0}, {2.5, 1}, {1, 2}, {-0.5, 1}}};
    const auto tris = triangulate(pent);
    ASSERT_EQ(tris.size(), 5u);
    double sum = 0.0;
    for (const auto& t : tris) sum += vemax::test::tri_area(t.a, t.b, t.c);
    EXPECT_NEAR(sum, shoelace(pent.vertices), 1e-12);
}

TEST(Triangulate, EarClipsWhenFanFails) {
    const Polygon l = thin_l_shape();
    ASSERT_FALSE(contains(l, centroid(l)));
    const auto tris = triangulate(l);
    EXPECT_EQ(tris.size(), l.size() - 2);
    double sum = 0.0;
    for (const auto& t : tris) {
        EXPECT_GT(t.area(), 0.0);
        sum += t.area();
    }
    EXPECT_NEAR(sum, 1.16, 1e-12);
}

TEST(Triangulate, SamplingAgreesWithPolygon) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Polygon> polys{thin_l_shape(), vemax::test::random_convex(rng, 7),
                               Polygon{{{0, 0}, {2, 0}, {2, 2}, {1, 0.5}, {0, 2}}}};
    for (const auto& poly : polys) {
        const auto tris = triangulate(poly);
        double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
        for (const auto& v : poly.vertices) {
            x0 = std::min(x0, v.x), x1 = std::max(x1, v.x), y0 = std::min(y0, v.y), y1 = std::max(y1, v.y);
        }
        int mismatches = 0;
        for (int k = 0; k < 1000; ++k) {
            const Point2 p{x0 + (x1 - x0) * u(rng), y0 + (y1 - y0) * u(rng)};
            const bool in_tris = std::any_of(tris.begin(), tris.end(), [&](const Triangle& t) { return in_triangle(t, p); });
            if (in_tris != in_polygon(poly, p)) ++mismatches;
        }
        EXPECT_EQ(mismatches, 0);
    }
}
