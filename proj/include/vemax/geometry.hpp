#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace vemax {

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    constexpr bool operator==(const Point2&) const = default;
    constexpr Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    constexpr Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Point2 operator/(double s) const { return {x / s, y / s}; }
    [[nodiscard]] bool is_finite() const { return std::isfinite(x) && std::isfinite(y); }
};

[[nodiscard]] constexpr double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
[[nodiscard]] constexpr double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
[[nodiscard]] inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
[[nodiscard]] inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }

/// Region of the computational domain on either side of the media interface.
enum class Region { Plus, Minus };

[[nodiscard]] inline const char* to_string(Region r) { return r == Region::Plus ? "plus" : "minus"; }

/// Straight interface line; the level set is the signed distance dot(p - point, normal).
struct LinePrimitive {
    Point2 point;
    Point2 normal;
};

/// Circle interface; the level set |p - center| - radius is negative inside.
struct CirclePrimitive {
    Point2 center;
    double radius = 0.0;
};

using Primitive = std::variant<LinePrimitive, CirclePrimitive>;

[[nodiscard]] double level_value(const Primitive& primitive, Point2 p);

/// Maps the per-primitive side signs (+1 / -1) of a point to its region.
using RegionRule = std::function<Region(std::span<const int>)>;

/// Composite signed-level-set description of the media interfaces.
struct InterfaceSpec {
    std::vector<Primitive> primitives;
    RegionRule region_rule;

    /// Throws GeometryError when a primitive is malformed or the rule is missing.
    void validate() const;
};

struct LevelEvaluation {
    std::vector<double> values;
    Region region = Region::Plus;
};

/// Signed values of every primitive at p and the region tag selected by the rule.
[[nodiscard]] LevelEvaluation level_eval(const InterfaceSpec& spec, Point2 p);

/// Counter-clockwise simple polygon.
struct Polygon {
    std::vector<Point2> vertices;

    [[nodiscard]] std::size_t size() const { return vertices.size(); }
    [[nodiscard]] const Point2& operator[](std::size_t i) const { return vertices[i]; }
    [[nodiscard]] const Point2& next(std::size_t i) const { return vertices[(i + 1) % vertices.size()]; }
};

[[nodiscard]] double signed_area(const Polygon& poly);
[[nodiscard]] Point2 centroid(const Polygon& poly);
[[nodiscard]] double diameter(const Polygon& poly);
[[nodiscard]] bool is_simple(const Polygon& poly);
[[nodiscard]] bool contains(const Polygon& poly, Point2 p, double tol = 0.0);

/// Minimum over the edges of the signed distance from p to each edge's supporting line,
/// positive on the interior side. Non-negative exactly on the polygon's kernel.
[[nodiscard]] double kernel_depth(const Polygon& poly, Point2 p);

struct PolygonMetrics {
    double area = 0.0;
    double diameter = 0.0;
    Point2 centroid;
    double star_radius = 0.0;
    std::vector<double> edge_lengths;
    std::vector<double> supporting_heights;
};

[[nodiscard]] PolygonMetrics polygon_metrics(const Polygon& poly);

/// Radius of the largest ball from whose every point the whole polygon is visible.
[[nodiscard]] double star_radius(const Polygon& poly);

struct CutPiece {
    Polygon polygon;
    int side = 0;  ///< +1 / -1 relative to the cutting primitive
};

struct CutResult {
    std::vector<CutPiece> pieces;
    std::vector<std::string> warnings;
};

inline constexpr double kDefaultSnapTolerance = 1e-9;

/// Splits a convex polygon by one primitive. Circles are cut along the chord joining
/// the two boundary crossings. Crossings within snap_tol * diameter of a vertex snap to it.
[[nodiscard]] CutResult cut_polygon(const Polygon& poly, const Primitive& primitive,
                                    double snap_tol = kDefaultSnapTolerance);

struct Triangle {
    Point2 a, b, c;

    [[nodiscard]] double area() const { return 0.5 * cross(b - a, c - a); }
};

/// Centroid fan when the polygon is star-shaped with respect to its centroid,
/// ear clipping otherwise.
[[nodiscard]] std::vector<Triangle> triangulate(const Polygon& poly);

/// Ear clipping returning vertex index triples of the input loop.
[[nodiscard]] std::vector<std::array<std::size_t, 3>> ear_clip(const Polygon& poly);

}  // namespace vemax
