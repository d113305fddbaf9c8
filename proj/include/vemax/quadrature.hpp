#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "vemax/geometry.hpp"

namespace vemax {

/// A line across which the integrand may be singular (e.g. |x - eps|^s). Integration
/// grades geometrically toward it.
struct SingularLine {
    Point2 point;
    Point2 normal{1.0, 0.0};
    double ratio = 0.25;
    int levels = 20;
};

struct QuadSpec {
    int order = 7;  ///< polynomial degree integrated exactly per sub-triangle / sub-segment
    std::optional<SingularLine> singular;
    bool adaptive = false;  ///< recursive midpoint subdivision of sub-triangles
    int max_depth = 8;
    double adaptive_rtol = 1e-9;
    double adaptive_atol = 1e-13;  ///< per unit area
};

struct QuadPoint {
    Point2 x;
    double w = 0.0;
};

/// Gauss-Legendre nodes/weights on [0, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

[[nodiscard]] const GaussRule& gauss_legendre(int npoints);

/// Collapsed tensor Gauss rule exact for polynomials of the given degree.
[[nodiscard]] std::vector<QuadPoint> triangle_rule(const Triangle& tri, int order);

/// Sub-triangles used for a polygon: graded strips toward the singular line when present.
[[nodiscard]] std::vector<Triangle> integration_triangles(const Polygon& poly, const QuadSpec& spec);

/// Non-adaptive composite rule over a polygon.
[[nodiscard]] std::vector<QuadPoint> polygon_rule(const Polygon& poly, const QuadSpec& spec);

/// Composite Gauss rule along the segment a -> b (weights include the length).
[[nodiscard]] std::vector<QuadPoint> segment_rule(Point2 a, Point2 b, const QuadSpec& spec);

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <class T>
double magnitude(const T& v) {
    return v.norm();
}

template <class T, class F>
T integrate_triangle(const Triangle& tri, int order, F& f) {
    T sum{};
    bool first = true;
    for (const auto& q : triangle_rule(tri, order)) {
        if (first) {
            sum = f(q.x) * q.w;
            first = false;
        } else {
            sum = sum + f(q.x) * q.w;
        }
    }
    return sum;
}

template <class T, class F>
T integrate_adaptive(const Triangle& tri, const QuadSpec& spec, F& f, const T& coarse, int depth) {
    const Point2 ab = (tri.a + tri.b) * 0.5;
    const Point2 bc = (tri.b + tri.c) * 0.5;
    const Point2 ca = (tri.c + tri.a) * 0.5;
    const Triangle kids[4] = {{tri.a, ab, ca}, {ab, tri.b, bc}, {ca, bc, tri.c}, {ab, bc, ca}};
    T parts[4];
    for (int k = 0; k < 4; ++k) parts[k] = integrate_triangle<T>(kids[k], spec.order, f);
    T fine = parts[0] + parts[1] + parts[2] + parts[3];
    const double diff = magnitude(T(fine - coarse));
    if (depth >= spec.max_depth ||
        diff <= spec.adaptive_rtol * magnitude(fine) + spec.adaptive_atol * tri.area()) {
        return fine;
    }
    T sum = integrate_adaptive<T>(kids[0], spec, f, parts[0], depth + 1);
    for (int k = 1; k < 4; ++k) sum = sum + integrate_adaptive<T>(kids[k], spec, f, parts[k], depth + 1);
    return sum;
}

}  // namespace detail

/// Integral of f over the polygon; f maps Point2 to a value type supporting + and * double.
template <class T, class F>
T integrate(const Polygon& poly, const QuadSpec& spec, F&& f) {
    T sum{};
    bool first = true;
    for (const auto& tri : integration_triangles(poly, spec)) {
        T part = detail::integrate_triangle<T>(tri, spec.order, f);
        if (spec.adaptive) part = detail::integrate_adaptive<T>(tri, spec, f, part, 1);
        if (first) {
            sum = part;
            first = false;
        } else {
            sum = sum + part;
        }
    }
    return sum;
}

}  // namespace vemax
