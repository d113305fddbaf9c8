#include "vemax/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace vemax {

const GaussRule& gauss_legendre(int npoints) {
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(npoints); it != cache.end()) return it->second;

    // Newton iteration on P_n from the Chebyshev-like initial guesses.
    GaussRule rule;
    const int n = std::max(npoints, 1);
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto idx = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[idx] = 0.5 * (x + 1.0);
        rule.weights[idx] = 0.5 * w;
    }
    return cache.emplace(npoints, std::move(rule)).first->second;
}

std::vector<QuadPoint> triangle_rule(const Triangle& tri, int order) {
    const int n = std::max((order + 3) / 2, 1);
    const GaussRule& g = gauss_legendre(n);
    const double jac = 2.0 * tri.area();
    const Point2 e1 = tri.b - tri.a;
    const Point2 e2 = tri.c - tri.a;
    std::vector<QuadPoint> out;
    out.reserve(g.nodes.size() * g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double u = g.nodes[i];
        for (std::size_t j = 0; j < g.nodes.size(); ++j) {
            const double v = g.nodes[j] * (1.0 - u);
            out.push_back({tri.a + e1 * u + e2 * v, g.weights[i] * g.weights[j] * (1.0 - u) * jac});
        }
    }
    return out;
}

namespace {

constexpr int kGradedSegmentPoints = 8;

Polygon offset_cut_keep(const Polygon& poly, const SingularLine& line, double offset, int keep_side,
                        std::vector<Polygon>* other) {
    const LinePrimitive cut{line.point + line.normal * offset, line.normal};
    const CutResult res = cut_polygon(poly, cut, 0.0);
    Polygon kept;
    for (const auto& piece : res.pieces) {
        if (piece.side == keep_side) {
            kept = piece.polygon;
        } else if (other != nullptr) {
            other->push_back(piece.polygon);
        }
    }
    return kept;
}

// Strips of one-sided polygon (all signed distances have sign `side`) graded toward the line.
void graded_strips(const Polygon& poly, const SingularLine& line, int side, std::vector<Polygon>& out) {
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (const auto& v : poly.vertices) {
        const double d = std::abs(dot(v - line.point, line.normal));
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (dmin > dmax - dmin) {
        out.push_back(poly);
        return;
    }
    Polygon rest = poly;
    double delta = dmax;
    for (int k = 0; k < line.levels; ++k) {
        delta *= line.ratio;
        if (delta <= dmin) break;
        // Pieces farther than delta are final; the near part keeps being graded.
        Polygon near = offset_cut_keep(rest, line, side * delta, -side, &out);
        if (near.size() < 3) return;
        rest = std::move(near);
    }
    out.push_back(rest);
}

}  // namespace

std::vector<Triangle> integration_triangles(const Polygon& poly, const QuadSpec& spec) {
    if (!spec.singular) return triangulate(poly);
    const SingularLine& line = *spec.singular;
    double lo = 0.0, hi = 0.0;
    for (const auto& v : poly.vertices) {
        const double d = dot(v - line.point, line.normal);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    std::vector<Polygon> strips;
    if (lo < 0.0 && hi > 0.0) {
        const LinePrimitive cut{line.point, line.normal};
        for (const auto& piece : cut_polygon(poly, cut, 0.0).pieces) {
            graded_strips(piece.polygon, line, piece.side, strips);
        }
    } else {
        graded_strips(poly, line, hi > 0.0 ? 1 : -1, strips);
    }
    std::vector<Triangle> tris;
    for (const auto& s : strips) {
        for (const auto& t : triangulate(s)) tris.push_back(t);
    }
    return tris;
}

std::vector<QuadPoint> polygon_rule(const Polygon& poly, const QuadSpec& spec) {
    std::vector<QuadPoint> out;
    for (const auto& tri : integration_triangles(poly, spec)) {
        auto pts = triangle_rule(tri, spec.order);
        out.insert(out.end(), pts.begin(), pts.end());
    }
    return out;
}

std::vector<QuadPoint> segment_rule(Point2 a, Point2 b, const QuadSpec& spec) {
    int npoints = std::max(spec.order / 2 + 1, 1);
    const double len = distance(a, b);
    std::vector<double> breaks{0.0, 1.0};
    if (spec.singular) {
        const SingularLine& line = *spec.singular;
        const double da = dot(a - line.point, line.normal);
        const double db = dot(b - line.point, line.normal);
        std::vector<std::pair<double, double>> pieces;  // parameter intervals, each one-sided
        if (da * db < 0.0) {
            const double t0 = da / (da - db);
            pieces = {{0.0, t0}, {t0, 1.0}};
        } else {
            pieces = {{0.0, 1.0}};
        }
        breaks.clear();
        for (auto [t0, t1] : pieces) {
            const double d0 = std::abs(da + t0 * (db - da));
            const double d1 = std::abs(da + t1 * (db - da));
            breaks.push_back(t0);
            const double dmin = std::min(d0, d1);
            const double dmax = std::max(d0, d1);
            if (dmin <= dmax - dmin && dmax > 0.0) {
                // Breakpoints where the distance equals dmax * ratio^k.
                std::vector<double> inner;
                double delta = dmax;
                for (int k = 0; k < line.levels; ++k) {
                    delta *= line.ratio;
                    if (delta <= dmin) break;
                    const double frac = (delta - dmin) / (dmax - dmin);
                    inner.push_back(d0 < d1 ? t0 + frac * (t1 - t0) : t1 - frac * (t1 - t0));
                }
                breaks.insert(breaks.end(), inner.begin(), inner.end());
                // pieces of ratio 1/ratio need more than order-7 Gauss for |d|^s
                if (!inner.empty()) npoints = std::max(npoints, kGradedSegmentPoints);
            }
        }
        breaks.push_back(1.0);
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    }
    const GaussRule& g = gauss_legendre(npoints);
    std::vector<QuadPoint> out;
    out.reserve((breaks.size() - 1) * g.nodes.size());
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double t0 = breaks[k];
        const double t1 = breaks[k + 1];
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const double t = t0 + (t1 - t0) * g.nodes[i];
            out.push_back({a + (b - a) * t, g.weights[i] * (t1 - t0) * len});
        }
    }
    return out;
}

}  // namespace vemax
