#include "vemax/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace vemax {

GridSpec GridSpec::with_spacing(const Box& domain, double h) {
    if (!(h > 0.0)) throw MeshError("grid spacing must be positive");
    GridSpec g;
    g.domain = domain;
    const double nx = domain.width() / h;
    const double ny = domain.height() / h;
    g.nx = static_cast<int>(std::lround(nx));
    g.ny = static_cast<int>(std::lround(ny));
    if (std::abs(nx - g.nx) > 1e-9 * nx || std::abs(ny - g.ny) > 1e-9 * ny) {
        throw MeshError("domain extents are not multiples of the grid spacing");
    }
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) throw MeshError("degenerate grid domain");
    if (nx < 1 || ny < 1) throw MeshError("grid needs at least one cell per axis");
}

Polygon PolyMesh::cell_polygon(std::size_t c) const {
    Polygon p;
    p.vertices.reserve(cells[c].vertices.size());
    for (int v : cells[c].vertices) p.vertices.push_back(vertices[static_cast<std::size_t>(v)]);
    return p;
}

namespace {

struct PointKey {
    std::int64_t i, j;
    bool operator==(const PointKey&) const = default;
};

struct PointKeyHash {
    std::size_t operator()(const PointKey& k) const noexcept {
        return std::hash<std::int64_t>{}(k.i) ^ (std::hash<std::int64_t>{}(k.j) * 0x9e3779b97f4a7c15ULL);
    }
};

class PointMerger {
public:
    explicit PointMerger(double tol) : tol_(tol), bin_(std::max(tol, 1e-300) * 4.0) {}

    int insert(Point2 p) {
        const PointKey k{static_cast<std::int64_t>(std::floor(p.x / bin_)),
                         static_cast<std::int64_t>(std::floor(p.y / bin_))};
        for (std::int64_t di = -1; di <= 1; ++di) {
            for (std::int64_t dj = -1; dj <= 1; ++dj) {
                auto it = bins_.find({k.i + di, k.j + dj});
                if (it == bins_.end()) continue;
                for (int id : it->second) {
                    if (distance(points_[static_cast<std::size_t>(id)], p) <= tol_) return id;
                }
            }
        }
        const int id = static_cast<int>(points_.size());
        points_.push_back(p);
        bins_[k].push_back(id);
        return id;
    }

    [[nodiscard]] const std::vector<Point2>& points() const { return points_; }

private:
    double tol_;
    double bin_;
    std::vector<Point2> points_;
    std::unordered_map<PointKey, std::vector<int>, PointKeyHash> bins_;
};

// Uniform bucket grid over the vertices, used to find vertices lying on cell edges.
class VertexBins {
public:
    VertexBins(const std::vector<Point2>& pts, const Box& box, double cell) : pts_(pts), box_(box) {
        cell_ = cell > 0.0 ? cell : std::max(box.width(), box.height());
        nx_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(box.width() / cell_)) + 1);
        ny_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(box.height() / cell_)) + 1);
        const auto nbins = static_cast<std::size_t>(nx_ * ny_);
        start_.assign(nbins + 1, 0);
        std::vector<std::size_t> bin_of(pts.size());
        for (std::size_t v = 0; v < pts.size(); ++v) {
            bin_of[v] = bin(pts[v]);
            ++start_[bin_of[v] + 1];
        }
        std::partial_sum(start_.begin(), start_.end(), start_.begin());
        items_.resize(pts.size());
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t v = 0; v < pts.size(); ++v) items_[fill[bin_of[v]]++] = static_cast<int>(v);
    }

    template <class F>
    void for_each_in_box(Point2 lo, Point2 hi, F&& f) const {
        const auto [i0, j0] = index(lo);
        const auto [i1, j1] = index(hi);
        for (std::int64_t i = i0; i <= i1; ++i) {
            for (std::int64_t j = j0; j <= j1; ++j) {
                const auto b = static_cast<std::size_t>(j * nx_ + i);
                for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) f(items_[k]);
            }
        }
    }

private:
    [[nodiscard]] std::pair<std::int64_t, std::int64_t> index(Point2 p) const {
        auto i = static_cast<std::int64_t>(std::floor((p.x - box_.x0) / cell_));
        auto j = static_cast<std::int64_t>(std::floor((p.y - box_.y0) / cell_));
        return {std::clamp<std::int64_t>(i, 0, nx_ - 1), std::clamp<std::int64_t>(j, 0, ny_ - 1)};
    }
    [[nodiscard]] std::size_t bin(Point2 p) const {
        const auto [i, j] = index(p);
        return static_cast<std::size_t>(j * nx_ + i);
    }

    const std::vector<Point2>& pts_;
    Box box_;
    double cell_ = 1.0;
    std::int64_t nx_ = 1, ny_ = 1;
    std::vector<std::size_t> start_;
    std::vector<int> items_;
};

std::uint64_t edge_key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

PolyMesh mesh_from_polygons(const Box& domain, const std::vector<Polygon>& polygons,
                            const std::vector<Region>& regions, const MeshOptions& options,
                            const std::vector<int>& background) {
    if (polygons.size() != regions.size()) throw MeshError("mesh_from_polygons: one region per polygon required");
    PolyMesh mesh;
    mesh.domain = domain;

    PointMerger merger(options.merge_tol);
    std::vector<std::vector<int>> raw_loops(polygons.size());
    for (std::size_t c = 0; c < polygons.size(); ++c) {
        for (const auto& p : polygons[c].vertices) raw_loops[c].push_back(merger.insert(p));
    }

    // Lexicographic renumbering.
    const auto& pts = merger.points();
    std::vector<int> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Point2& p = pts[static_cast<std::size_t>(a)];
        const Point2& q = pts[static_cast<std::size_t>(b)];
        return p.x < q.x || (p.x == q.x && p.y < q.y);
    });
    std::vector<int> rank(pts.size());
    mesh.vertices.resize(pts.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
        mesh.vertices[r] = pts[static_cast<std::size_t>(order[r])];
    }

    double max_diam = 0.0;
    for (const auto& poly : polygons) max_diam = std::max(max_diam, diameter(poly));
    const VertexBins bins(mesh.vertices, domain, max_diam);
    const double on_tol = 4.0 * options.merge_tol;

    for (std::size_t c = 0; c < polygons.size(); ++c) {
        std::vector<int> loop;
        const auto& raw = raw_loops[c];
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const int a = rank[static_cast<std::size_t>(raw[i])];
            const int b = rank[static_cast<std::size_t>(raw[(i + 1) % raw.size()])];
            loop.push_back(a);
            if (a == b) continue;
            const Point2 pa = mesh.vertices[static_cast<std::size_t>(a)];
            const Point2 pb = mesh.vertices[static_cast<std::size_t>(b)];
            const Point2 d = pb - pa;
            const double len2 = dot(d, d);
            std::vector<std::pair<double, int>> hanging;
            const Point2 lo{std::min(pa.x, pb.x) - on_tol, std::min(pa.y, pb.y) - on_tol};
            const Point2 hi{std::max(pa.x, pb.x) + on_tol, std::max(pa.y, pb.y) + on_tol};
            bins.for_each_in_box(lo, hi, [&](int v) {
                if (v == a || v == b) return;
                const Point2 p = mesh.vertices[static_cast<std::size_t>(v)];
                const double t = dot(p - pa, d) / len2;
                if (t <= 0.0 || t >= 1.0) return;
                if (std::abs(cross(d, p - pa)) / std::sqrt(len2) > on_tol) return;
                hanging.emplace_back(t, v);
            });
            std::sort(hanging.begin(), hanging.end());
            for (const auto& [t, v] : hanging) loop.push_back(v);
        }
        // Drop repeats introduced by merging.
        std::vector<int> clean;
        for (int v : loop) {
            if (clean.empty() || clean.back() != v) clean.push_back(v);
        }
        while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
        if (clean.size() < 3) {
            std::ostringstream msg;
            msg << "cell " << c << " collapsed after vertex merging and was dropped";
            mesh.warnings.push_back(msg.str());
            continue;
        }
        Cell cell;
        cell.vertices = std::move(clean);
        cell.region = regions[c];
        cell.background = background.empty() ? -1 : background[c];
        mesh.cells.push_back(std::move(cell));
    }

    std::vector<std::uint64_t> keys;
    for (const auto& cell : mesh.cells) {
        const std::size_t n = cell.vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const int a = cell.vertices[i];
            const int b = cell.vertices[(i + 1) % n];
            keys.push_back(edge_key(std::min(a, b), std::max(a, b)));
        }
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    mesh.edges.resize(keys.size());
    for (std::size_t e = 0; e < keys.size(); ++e) {
        auto& edge = mesh.edges[e];
        edge.a = static_cast<int>(keys[e] >> 32);
        edge.b = static_cast<int>(keys[e] & 0xffffffffULL);
        edge.length = distance(mesh.vertices[static_cast<std::size_t>(edge.a)],
                               mesh.vertices[static_cast<std::size_t>(edge.b)]);
    }

    mesh.edge_cells.assign(keys.size(), {-1, -1});
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        auto& cell = mesh.cells[c];
        const std::size_t n = cell.vertices.size();
        cell.edges.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const int a = cell.vertices[i];
            const int b = cell.vertices[(i + 1) % n];
            const auto key = edge_key(std::min(a, b), std::max(a, b));
            const auto e = static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), key) - keys.begin());
            cell.edges[i] = {static_cast<int>(e), a < b ? 1 : -1};
            auto& uses = mesh.edge_cells[e];
            if (uses[0] < 0) {
                uses[0] = static_cast<int>(c);
            } else if (uses[1] < 0) {
                uses[1] = static_cast<int>(c);
            } else {
                throw MeshError("edge shared by more than two cells");
            }
        }
    }

    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        const auto [c0, c1] = mesh.edge_cells[e];
        if (c1 < 0) {
            mesh.boundary_edges.push_back(static_cast<int>(e));
        } else if (mesh.cells[static_cast<std::size_t>(c0)].region !=
                   mesh.cells[static_cast<std::size_t>(c1)].region) {
            mesh.interface_edges.push_back(static_cast<int>(e));
        }
    }

    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        auto& cell = mesh.cells[c];
        try {
            cell.metrics = polygon_metrics(mesh.cell_polygon(c));
        } catch (const GeometryError& err) {
            std::ostringstream msg;
            msg << "cell " << c << ": " << err.what();
            throw MeshError(msg.str());
        }
        mesh.h_max = std::max(mesh.h_max, cell.metrics.diameter);
    }
    return mesh;
}

PolyMesh build_cartesian_mesh(const GridSpec& grid) {
    grid.validate();
    std::vector<Polygon> polys;
    std::vector<Region> regions;
    std::vector<int> background;
    const double hx = grid.hx();
    const double hy = grid.hy();
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const double xa = grid.domain.x0 + hx * i;
            const double xb = i + 1 == grid.nx ? grid.domain.x1 : grid.domain.x0 + hx * (i + 1);
            const double ya = grid.domain.y0 + hy * j;
            const double yb = j + 1 == grid.ny ? grid.domain.y1 : grid.domain.y0 + hy * (j + 1);
            polys.push_back(Polygon{{{xa, ya}, {xb, ya}, {xb, yb}, {xa, yb}}});
            regions.push_back(Region::Plus);
            background.push_back(j * grid.nx + i);
        }
    }
    return mesh_from_polygons(grid.domain, polys, regions, {}, background);
}

PolyMesh build_cut_mesh(const GridSpec& grid, const InterfaceSpec& spec, const MeshOptions& options) {
    grid.validate();
    spec.validate();
    std::vector<Polygon> polys;
    std::vector<Region> regions;
    std::vector<int> background;
    std::vector<std::string> warnings;
    const double hx = grid.hx();
    const double hy = grid.hy();

    struct Piece {
        Polygon poly;
        std::vector<int> signs;
    };

    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const double xa = grid.domain.x0 + hx * i;
            const double xb = i + 1 == grid.nx ? grid.domain.x1 : grid.domain.x0 + hx * (i + 1);
            const double ya = grid.domain.y0 + hy * j;
            const double yb = j + 1 == grid.ny ? grid.domain.y1 : grid.domain.y0 + hy * (j + 1);
            std::vector<Piece> pieces{{Polygon{{{xa, ya}, {xb, ya}, {xb, yb}, {xa, yb}}}, {}}};
            for (const auto& primitive : spec.primitives) {
                std::vector<Piece> next;
                for (auto& piece : pieces) {
                    CutResult cut;
                    try {
                        cut = cut_polygon(piece.poly, primitive, options.snap_tol);
                    } catch (const GeometryError& err) {
                        std::ostringstream msg;
                        msg << "background cell (" << i << ", " << j << ") at [" << xa << ", " << xb << "] x [" << ya
                            << ", " << yb << "]: " << err.what() << "; try a different grid resolution";
                        throw MeshError(msg.str());
                    }
                    for (auto& w : cut.warnings) warnings.push_back(std::move(w));
                    for (auto& child : cut.pieces) {
                        Piece p{std::move(child.polygon), piece.signs};
                        p.signs.push_back(child.side);
                        next.push_back(std::move(p));
                    }
                }
                pieces = std::move(next);
            }
            for (auto& piece : pieces) {
                regions.push_back(spec.region_rule(piece.signs));
                polys.push_back(std::move(piece.poly));
                background.push_back(j * grid.nx + i);
            }
        }
    }
    PolyMesh mesh = mesh_from_polygons(grid.domain, polys, regions, options, background);
    mesh.warnings.insert(mesh.warnings.end(), warnings.begin(), warnings.end());
    return mesh;
}

void check_mesh(const PolyMesh& mesh) {
    std::vector<int> uses(mesh.edges.size(), 0);
    std::vector<int> sign_sum(mesh.edges.size(), 0);
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        const auto& cell = mesh.cells[c];
        const std::size_t n = cell.vertices.size();
        if (cell.edges.size() != n) throw MeshError("cell edge loop length mismatch");
        Point2 closure;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& ref = cell.edges[i];
            const auto& e = mesh.edges[static_cast<std::size_t>(ref.edge)];
            const int from = ref.sign > 0 ? e.a : e.b;
            const int to = ref.sign > 0 ? e.b : e.a;
            if (from != cell.vertices[i] || to != cell.vertices[(i + 1) % n]) {
                throw MeshError("cell edge loop does not follow its vertex loop");
            }
            closure = closure + mesh.edge_vector(static_cast<std::size_t>(ref.edge)) * ref.sign;
            ++uses[static_cast<std::size_t>(ref.edge)];
            sign_sum[static_cast<std::size_t>(ref.edge)] += ref.sign;
        }
        const double scale = cell.metrics.diameter;
        if (norm(closure) > 1e-12 * std::max(scale, 1.0)) throw MeshError("cell edge loop does not close");
        if (!(cell.metrics.area > 0.0)) throw MeshError("cell with non-positive area");
    }
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        if (uses[e] == 2 && sign_sum[e] != 0) throw MeshError("interior edge used with equal orientation twice");
        if (uses[e] < 1 || uses[e] > 2) throw MeshError("edge use count outside {1, 2}");
    }
    const auto v = static_cast<long long>(mesh.vertices.size());
    const auto e = static_cast<long long>(mesh.edges.size());
    const auto f = static_cast<long long>(mesh.cells.size());
    if (v - e + f != 1) throw MeshError("Euler characteristic V - E + F != 1");
}

CellLocator::CellLocator(const PolyMesh& mesh) : mesh_(&mesh) {
    const Box& box = mesh.domain;
    cell_ = mesh.h_max > 0.0 ? mesh.h_max / std::sqrt(2.0) : std::max(box.width(), box.height());
    nx_ = std::max(1L, static_cast<long>(std::ceil(box.width() / cell_)));
    ny_ = std::max(1L, static_cast<long>(std::ceil(box.height() / cell_)));
    polygons_.reserve(mesh.cells.size());
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) polygons_.push_back(mesh.cell_polygon(c));

    const auto nbins = static_cast<std::size_t>(nx_ * ny_);
    std::vector<std::vector<int>> lists(nbins);
    for (std::size_t c = 0; c < polygons_.size(); ++c) {
        Point2 lo = polygons_[c][0], hi = polygons_[c][0];
        for (const auto& v : polygons_[c].vertices) {
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
        }
        const auto [i0, j0] = bucket(lo);
        const auto [i1, j1] = bucket(hi);
        for (long j = j0; j <= j1; ++j) {
            for (long i = i0; i <= i1; ++i) lists[static_cast<std::size_t>(j * nx_ + i)].push_back(static_cast<int>(c));
        }
    }
    start_.assign(nbins + 1, 0);
    for (std::size_t b = 0; b < nbins; ++b) start_[b + 1] = start_[b] + lists[b].size();
    items_.reserve(start_.back());
    for (const auto& l : lists) items_.insert(items_.end(), l.begin(), l.end());
}

std::pair<long, long> CellLocator::bucket(Point2 p) const {
    const Box& box = mesh_->domain;
    const auto i = static_cast<long>(std::floor((p.x - box.x0) / cell_));
    const auto j = static_cast<long>(std::floor((p.y - box.y0) / cell_));
    return {std::clamp(i, 0L, nx_ - 1), std::clamp(j, 0L, ny_ - 1)};
}

int CellLocator::locate(Point2 p, double tol) const {
    int found = -1;
    for_each_candidate(p, p, [&](int c) {
        if (found < 0 && contains(polygons_[static_cast<std::size_t>(c)], p, 0.0)) found = c;
    });
    if (found >= 0 || tol <= 0.0) return found;
    for_each_candidate(Point2{p.x - tol, p.y - tol}, Point2{p.x + tol, p.y + tol}, [&](int c) {
        if (found < 0 && contains(polygons_[static_cast<std::size_t>(c)], p, tol)) found = c;
    });
    return found;
}

std::size_t DofMap::num_boundary_edges() const {
    return static_cast<std::size_t>(std::count(boundary_edge.begin(), boundary_edge.end(), true));
}

DofMap dof_map(const PolyMesh& mesh) {
    DofMap map;
    map.num_edge_dofs = mesh.edges.size();
    map.num_vertex_dofs = mesh.vertices.size();
    map.boundary_edge.assign(mesh.edges.size(), false);
    map.boundary_vertex.assign(mesh.vertices.size(), false);
    for (int e : mesh.boundary_edges) {
        map.boundary_edge[static_cast<std::size_t>(e)] = true;
        map.boundary_vertex[static_cast<std::size_t>(mesh.edges[static_cast<std::size_t>(e)].a)] = true;
        map.boundary_vertex[static_cast<std::size_t>(mesh.edges[static_cast<std::size_t>(e)].b)] = true;
    }
    return map;
}

}  // namespace vemax
