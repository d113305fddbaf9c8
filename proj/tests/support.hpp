#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "vemax/mesh.hpp"

namespace vemax::test {

inline Polygon rect(double x0, double y0, double x1, double y1) { return Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}; }

inline Polygon unit_square() { return rect(0.0, 0.0, 1.0, 1.0); }

inline Polygon unit_triangle() { return Polygon{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}}; }

/// Minus on the negative side of the (single) primitive.
inline InterfaceSpec single_interface(Primitive primitive) {
    InterfaceSpec spec;
    spec.primitives.push_back(primitive);
    spec.region_rule = [](std::span<const int> s) { return s[0] < 0 ? Region::Minus : Region::Plus; };
    return spec;
}

inline InterfaceSpec circle_interface(Point2 center, double radius) {
    return single_interface(CirclePrimitive{center, radius});
}

inline InterfaceSpec vertical_line_interface(double x) { return single_interface(LinePrimitive{{x, 0.0}, {1.0, 0.0}}); }

inline PolyMesh cartesian(int n, Box box = {0.0, 1.0, 0.0, 1.0}) { return build_cartesian_mesh(GridSpec{box, n, n}); }

inline PolyMesh cut_mesh(int n, const InterfaceSpec& spec, Box box = {-1.0, 1.0, -1.0, 1.0}) {
    return build_cut_mesh(GridSpec{box, n, n}, spec);
}

inline Box bounding_box(const Polygon& poly) {
    Box b{poly[0].x, poly[0].x, poly[0].y, poly[0].y};
    for (const auto& v : poly.vertices) {
        b.x0 = std::min(b.x0, v.x), b.x1 = std::max(b.x1, v.x);
        b.y0 = std::min(b.y0, v.y), b.y1 = std::max(b.y1, v.y);
    }
    return b;
}

inline PolyMesh single_cell_mesh(const Polygon& poly, Region region = Region::Plus) {
    return mesh_from_polygons(bounding_box(poly), {poly}, {region});
}

/// Convex polygon with `n` vertices on a jittered circle, counter-clockwise.
inline Polygon random_convex(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    std::uniform_real_distribution<double> shift(-2.0, 2.0);
    const Point2 c{shift(rng), shift(rng)};
    Polygon poly;
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * std::numbers::pi * (k + 0.5 + jitter(rng)) / n;
        poly.vertices.push_back(c + Point2{std::cos(t), std::sin(t)} * scale);
    }
    return poly;
}

inline Polygon random_triangle(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        Polygon t{{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}};
        const double a = signed_area(t);
        if (std::abs(a) < 1e-2) continue;
        if (a < 0) std::swap(t.vertices[1], t.vertices[2]);
        return t;
    }
}

/// Triangle area by the cross product, independent of the polygon routines.
inline double tri_area(Point2 a, Point2 b, Point2 c) { return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)); }

/// Shoelace area written out independently of geometry's signed_area.
inline double shoelace(const std::vector<Point2>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& p = v[i];
        const auto& q = v[(i + 1) % v.size()];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

}  // namespace vemax::test
