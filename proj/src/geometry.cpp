#include "vemax/geometry.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace vemax {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool lex_less(const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

int classify(double value, double tol) {
    if (value > tol) return 1;
    if (value < -tol) return -1;
    return 0;
}

// Crossing of the primitive with segment [a, b] whose end values have strictly
// opposite signs. Endpoints are put in lexicographic order first so the two cells
// sharing the segment compute a bit-identical point.
Point2 crossing_point(const Primitive& primitive, Point2 a, Point2 b) {
    if (lex_less(b, a)) std::swap(a, b);
    const Point2 d = b - a;
    return std::visit(
        overloaded{
            [&](const LinePrimitive& line) {
                const double va = dot(a - line.point, line.normal);
                const double vb = dot(b - line.point, line.normal);
                const double t = va / (va - vb);
                return a + d * std::clamp(t, 0.0, 1.0);
            },
            [&](const CirclePrimitive& circle) {
                const Point2 ac = a - circle.center;
                const double qa = dot(d, d);
                const double qb = dot(d, ac);
                const double qc = dot(ac, ac) - circle.radius * circle.radius;
                const double disc = std::max(qb * qb - qa * qc, 0.0);
                const double q = -(qb + std::copysign(std::sqrt(disc), qb));
                double best = 0.5;
                double best_err = std::numeric_limits<double>::infinity();
                for (double t : {q / qa, q != 0.0 ? qc / q : 0.5}) {
                    const double err = t < 0.0 ? -t : (t > 1.0 ? t - 1.0 : 0.0);
                    if (err < best_err) {
                        best_err = err;
                        best = t;
                    }
                }
                return a + d * std::clamp(best, 0.0, 1.0);
            }},
        primitive);
}

enum class SegmentContact { None, Dips, Tangent };

// Contact of a circle with the interior of a segment whose endpoints both lie outside or on it.
// Dips: the circle enters and leaves through the segment. Tangent: it touches within tol.
SegmentContact circle_segment_contact(const CirclePrimitive& circle, Point2 a, Point2 b, double tol) {
    const Point2 d = b - a;
    const double len = norm(d);
    if (len == 0.0) return SegmentContact::None;
    const double t = std::clamp(dot(circle.center - a, d) / (len * len), 0.0, 1.0);
    const double margin = tol / len;
    if (t <= margin || t >= 1.0 - margin) return SegmentContact::None;
    const double dist = distance(a + d * t, circle.center);
    if (dist > circle.radius + tol) return SegmentContact::None;
    if (dist >= circle.radius - tol) return SegmentContact::Tangent;
    const double half = std::sqrt(circle.radius * circle.radius - dist * dist) / len;
    return t - half > margin && t + half < 1.0 - margin ? SegmentContact::Dips : SegmentContact::None;
}

}  // namespace

double level_value(const Primitive& primitive, Point2 p) {
    return std::visit(overloaded{[&](const LinePrimitive& line) { return dot(p - line.point, line.normal); },
                                 [&](const CirclePrimitive& circle) {
                                     return distance(p, circle.center) - circle.radius;
                                 }},
                      primitive);
}

void InterfaceSpec::validate() const {
    if (primitives.empty()) throw GeometryError("interface needs at least one primitive");
    if (!region_rule) throw GeometryError("interface has no region rule");
    for (std::size_t i = 0; i < primitives.size(); ++i) {
        std::visit(overloaded{[&](const LinePrimitive& line) {
                                  if (!line.point.is_finite() || std::abs(norm(line.normal) - 1.0) > 1e-12) {
                                      throw GeometryError("line primitive " + std::to_string(i) +
                                                          " needs a finite point and a unit normal");
                                  }
                              },
                              [&](const CirclePrimitive& circle) {
                                  if (!circle.center.is_finite() || !(circle.radius > 0.0)) {
                                      throw GeometryError("circle primitive " + std::to_string(i) +
                                                          " needs a positive radius");
                                  }
                              }},
                   primitives[i]);
    }
}

LevelEvaluation level_eval(const InterfaceSpec& spec, Point2 p) {
    LevelEvaluation out;
    out.values.reserve(spec.primitives.size());
    std::vector<int> signs;
    signs.reserve(spec.primitives.size());
    for (const auto& primitive : spec.primitives) {
        const double v = level_value(primitive, p);
        out.values.push_back(v);
        signs.push_back(v < 0.0 ? -1 : 1);
    }
    out.region = spec.region_rule(signs);
    return out;
}

double signed_area(const Polygon& poly) {
    const Point2 o = poly[0];
    double twice = 0.0;
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) twice += cross(poly[i] - o, poly[i + 1] - o);
    return 0.5 * twice;
}

Point2 centroid(const Polygon& poly) {
    // Shift to the first vertex to limit cancellation on small cells far from the origin.
    const Point2 o = poly[0];
    double a2 = 0.0;
    Point2 c;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 p = poly[i] - o;
        const Point2 q = poly.next(i) - o;
        const double w = cross(p, q);
        a2 += w;
        c = c + (p + q) * w;
    }
    if (a2 == 0.0) throw GeometryError("centroid of a zero-area polygon");
    return o + c / (3.0 * a2);
}

double diameter(const Polygon& poly) {
    double d = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, distance(poly[i], poly[j]));
    }
    return d;
}

namespace {

bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
    auto orient = [](Point2 a, Point2 b, Point2 c) {
        const double v = cross(b - a, c - a);
        return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    };
    auto on_segment = [](Point2 a, Point2 b, Point2 p) {
        return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
               p.y <= std::max(a.y, b.y);
    };
    const int o1 = orient(p1, p2, q1);
    const int o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1);
    const int o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    const Point2 d = b - a;
    const double len2 = dot(d, d);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return distance(p, a + d * t);
}

}  // namespace

bool is_simple(const Polygon& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if (poly[i] == poly.next(i)) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(poly[i], poly.next(i), poly[j], poly.next(j))) return false;
        }
    }
    return true;
}

bool contains(const Polygon& poly, Point2 p, double tol) {
    bool inside = false;
    double boundary_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Point2 a = poly[i];
        const Point2 b = poly[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) inside = !inside;
        boundary_distance = std::min(boundary_distance, point_segment_distance(p, a, b));
    }
    return inside || boundary_distance <= tol;
}

double kernel_depth(const Polygon& poly, Point2 p) {
    double depth = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 e = poly.next(i) - poly[i];
        const double len = norm(e);
        if (len == 0.0) continue;
        depth = std::min(depth, cross(e, p - poly[i]) / len);
    }
    return depth;
}

double star_radius(const Polygon& poly) {
    double xmin = poly[0].x, xmax = poly[0].x, ymin = poly[0].y, ymax = poly[0].y;
    for (const auto& v : poly.vertices) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    // Axis-aligned rectangles (possibly with collinear hanging vertices) have a closed form.
    const bool on_box = std::all_of(poly.vertices.begin(), poly.vertices.end(), [&](const Point2& v) {
        return v.x == xmin || v.x == xmax || v.y == ymin || v.y == ymax;
    });
    const double area = signed_area(poly);
    if (on_box && std::abs(area - (xmax - xmin) * (ymax - ymin)) <= 1e-14 * area) {
        return 0.5 * std::min(xmax - xmin, ymax - ymin);
    }

    // kernel_depth is a minimum of affine functions, hence concave: a coarse grid
    // followed by repeated zooming around the incumbent converges to its maximum.
    constexpr int coarse = 64;
    constexpr int fine = 8;
    double best = -std::numeric_limits<double>::infinity();
    Point2 best_point = centroid(poly);
    best = kernel_depth(poly, best_point);
    double dx = (xmax - xmin) / coarse;
    double dy = (ymax - ymin) / coarse;
    for (int i = 0; i <= coarse; ++i) {
        for (int j = 0; j <= coarse; ++j) {
            const Point2 p{xmin + i * dx, ymin + j * dy};
            const double v = kernel_depth(poly, p);
            if (v > best) {
                best = v;
                best_point = p;
            }
        }
    }
    const double stop = 1e-13 * std::max(xmax - xmin, ymax - ymin);
    for (int iter = 0; iter < 200 && std::max(dx, dy) > stop; ++iter) {
        const Point2 center = best_point;
        const double wx = 2.0 * dx;
        const double wy = 2.0 * dy;
        dx = 2.0 * wx / fine;
        dy = 2.0 * wy / fine;
        for (int i = 0; i <= fine; ++i) {
            for (int j = 0; j <= fine; ++j) {
                const Point2 p{center.x - wx + i * dx, center.y - wy + j * dy};
                const double v = kernel_depth(poly, p);
                if (v > best) {
                    best = v;
                    best_point = p;
                }
            }
        }
    }
    return std::max(best, 0.0);
}

PolygonMetrics polygon_metrics(const Polygon& poly) {
    if (!is_simple(poly)) throw GeometryError("polygon_metrics: polygon is not simple");
    PolygonMetrics m;
    m.area = signed_area(poly);
    if (!(m.area > 0.0)) throw GeometryError("polygon_metrics: polygon is not counter-clockwise");
    m.diameter = diameter(poly);
    m.centroid = centroid(poly);
    m.star_radius = star_radius(poly);
    const std::size_t n = poly.size();
    m.edge_lengths.resize(n);
    m.supporting_heights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i];
        const Point2 e = poly.next(i) - a;
        const double len = norm(e);
        m.edge_lengths[i] = len;
        double l = 0.0;
        for (const auto& v : poly.vertices) l = std::max(l, std::abs(cross(e, v - a)) / len);
        m.supporting_heights[i] = l;
    }
    return m;
}

CutResult cut_polygon(const Polygon& poly, const Primitive& primitive, double snap_tol) {
    if (poly.size() < 3) throw GeometryError("cut_polygon: polygon has fewer than 3 vertices");
    if (snap_tol < 0.0) throw GeometryError("cut_polygon: negative snap tolerance");
    const double h = diameter(poly);
    const double tol = snap_tol * h;
    const std::size_t n = poly.size();

    std::vector<int> sign(n);
    for (std::size_t i = 0; i < n; ++i) sign[i] = classify(level_value(primitive, poly[i]), tol);

    if (const auto* circle = std::get_if<CirclePrimitive>(&primitive)) {
        for (std::size_t i = 0; i < n; ++i) {
            const int si = sign[i];
            const int sj = sign[(i + 1) % n];
            if (si < 0 || sj < 0) continue;
            switch (circle_segment_contact(*circle, poly[i], poly.next(i), tol)) {
                case SegmentContact::Dips:
                    throw GeometryError("cut_polygon: circle enters and leaves through a single edge");
                case SegmentContact::Tangent:
                    throw GeometryError("cut_polygon: circle is tangent to a polygon edge");
                case SegmentContact::None:
                    break;
            }
        }
        if (std::none_of(sign.begin(), sign.end(), [](int s) { return s < 0; }) &&
            kernel_depth(poly, circle->center) > circle->radius) {
            throw GeometryError("cut_polygon: circle lies strictly inside the polygon");
        }
    }

    std::vector<Point2> loop;
    std::vector<int> loop_sign;
    loop.reserve(n + 2);
    loop_sign.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        loop.push_back(poly[i]);
        loop_sign.push_back(sign[i]);
        if (sign[i] * sign[j] < 0) {
            const Point2 p = crossing_point(primitive, poly[i], poly[j]);
            if (distance(p, poly[i]) <= tol) {
                loop_sign.back() = 0;
            } else if (distance(p, poly[j]) <= tol) {
                sign[j] = 0;
                if (j == 0) loop_sign.front() = 0;
            } else {
                loop.push_back(p);
                loop_sign.push_back(0);
            }
        }
    }

    const std::size_t m = loop.size();
    std::vector<std::size_t> nonzero;
    for (std::size_t k = 0; k < m; ++k) {
        if (loop_sign[k] != 0) nonzero.push_back(k);
    }
    if (nonzero.empty()) throw GeometryError("cut_polygon: polygon collapses onto the interface");

    // Boundary zeros where the side flips; everything else (touching points) stays in its piece.
    std::vector<std::size_t> transitions;
    for (std::size_t k = 0; k < nonzero.size(); ++k) {
        const std::size_t from = nonzero[k];
        const std::size_t to = nonzero[(k + 1) % nonzero.size()];
        if (loop_sign[from] == loop_sign[to]) continue;
        std::size_t zeros = 0;
        std::size_t zero_at = 0;
        for (std::size_t q = (from + 1) % m; q != to; q = (q + 1) % m) {
            ++zeros;
            zero_at = q;
        }
        if (zeros != 1) throw GeometryError("cut_polygon: interface runs along a polygon edge between sides");
        transitions.push_back(zero_at);
    }

    CutResult result;
    if (transitions.empty()) {
        result.pieces.push_back({poly, loop_sign[nonzero.front()]});
        return result;
    }
    if (transitions.size() != 2) {
        std::ostringstream msg;
        msg << "cut_polygon: interface crosses the polygon boundary " << transitions.size() << " times";
        throw GeometryError(msg.str());
    }

    const double parent_area = signed_area(poly);
    auto sub_loop = [&](std::size_t from, std::size_t to) {
        Polygon piece;
        for (std::size_t q = from;; q = (q + 1) % m) {
            piece.vertices.push_back(loop[q]);
            if (q == to) break;
        }
        return piece;
    };
    for (int t = 0; t < 2; ++t) {
        const std::size_t from = transitions[t];
        const std::size_t to = transitions[1 - t];
        Polygon piece = sub_loop(from, to);
        const int side = loop_sign[(from + 1) % m];
        const double a = signed_area(piece);
        if (!(a >= 1e-14 * parent_area)) {
            std::ostringstream msg;
            msg << "dropped degenerate piece (area " << a << ") on side " << side;
            result.warnings.push_back(msg.str());
            continue;
        }
        result.pieces.push_back({std::move(piece), side});
    }
    return result;
}

std::vector<std::array<std::size_t, 3>> ear_clip(const Polygon& poly) {
    std::vector<std::size_t> idx(poly.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<std::array<std::size_t, 3>> out;
    auto inside_triangle = [](Point2 p, Point2 a, Point2 b, Point2 c) {
        return cross(b - a, p - a) >= 0.0 && cross(c - b, p - b) >= 0.0 && cross(a - c, p - c) >= 0.0;
    };
    while (idx.size() > 3) {
        const std::size_t k = idx.size();
        bool clipped = false;
        for (int pass = 0; pass < 2 && !clipped; ++pass) {
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t ip = idx[(i + k - 1) % k];
                const std::size_t ic = idx[i];
                const std::size_t in = idx[(i + 1) % k];
                const Point2 a = poly[ip], b = poly[ic], c = poly[in];
                const double turn = cross(b - a, c - b);
                // Second pass tolerates collinear ears so the loop always terminates.
                if (pass == 0 ? turn <= 0.0 : turn < 0.0) continue;
                bool ear = true;
                for (std::size_t q : idx) {
                    if (q == ip || q == ic || q == in) continue;
                    const Point2 p = poly[q];
                    if (p == a || p == b || p == c) continue;
                    if (inside_triangle(p, a, b, c)) {
                        ear = false;
                        break;
                    }
                }
                if (!ear) continue;
                out.push_back({ip, ic, in});
                idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
                clipped = true;
                break;
            }
        }
        if (!clipped) throw GeometryError("ear_clip: no ear found; polygon is not simple");
    }
    out.push_back({idx[0], idx[1], idx[2]});
    return out;
}

std::vector<Triangle> triangulate(const Polygon& poly) {
    std::vector<Triangle> tris;
    const Point2 c = centroid(poly);
    if (kernel_depth(poly, c) > 0.0) {
        tris.reserve(poly.size());
        for (std::size_t i = 0; i < poly.size(); ++i) tris.push_back({c, poly[i], poly.next(i)});
        return tris;
    }
    for (const auto& t : ear_clip(poly)) tris.push_back({poly[t[0]], poly[t[1]], poly[t[2]]});
    return tris;
}

}  // namespace vemax
