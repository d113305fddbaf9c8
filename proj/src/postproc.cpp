#include "vemax/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/SparseLU>

namespace vemax {

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

template <class PerCell>
double cell_reduce(const PolyMesh& mesh, PerCell&& per_cell) {
    const auto n = static_cast<long>(mesh.num_cells());
    std::vector<double> parts(mesh.num_cells(), 0.0);
#pragma omp parallel for schedule(dynamic, 64)
    for (long c = 0; c < n; ++c) parts[static_cast<std::size_t>(c)] = per_cell(static_cast<std::size_t>(c));
    return pairwise_sum(parts);
}

std::string fmt_double(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

}  // namespace

double l2_projected_error(const PolyMesh& mesh, const DofVector& u_h, const VectorField& u_exact,
                          const QuadSpec& spec) {
    const double sq = cell_reduce(mesh, [&](std::size_t c) {
        const CVec2 pi = cell_projection(mesh, c, u_h);
        const Region region = mesh.cells[c].region;
        return integrate<double>(mesh.cell_polygon(c), spec,
                                 [&](Point2 p) { return (u_exact(p, region) - pi).squaredNorm(); });
    });
    return std::sqrt(sq);
}

double rot_error(const PolyMesh& mesh, const DofVector& u_h, const ScalarField& rot_exact, const QuadSpec& spec) {
    const double sq = cell_reduce(mesh, [&](std::size_t c) {
        const Complex r = cell_rot(mesh, c, u_h);
        const Region region = mesh.cells[c].region;
        return integrate<double>(mesh.cell_polygon(c), spec,
                                 [&](Point2 p) { return std::norm(rot_exact(p, region) - r); });
    });
    return std::sqrt(sq);
}

ErrorReport error_report(const PolyMesh& mesh, const DofVector& u_h, const VectorField& u_exact,
                         const ScalarField& rot_exact, const QuadSpec& spec) {
    return {l2_projected_error(mesh, u_h, u_exact, spec), rot_error(mesh, u_h, rot_exact, spec)};
}

namespace {

std::optional<double> order_between(double coarse, double fine) {
    if (!(coarse > 0.0) || !(fine > 0.0)) return std::nullopt;
    return std::log2(coarse / fine);
}

std::optional<double> mean_of(const std::vector<ConvergenceRow>& rows, std::optional<double> ConvergenceRow::*field) {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : rows) {
        if (r.*field) {
            sum += *(r.*field);
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
}

}  // namespace

std::optional<double> ConvergenceTable::mean_l2_order() const { return mean_of(rows, &ConvergenceRow::l2_order); }

std::optional<double> ConvergenceTable::mean_rot_order() const { return mean_of(rows, &ConvergenceRow::rot_order); }

ConvergenceTable order_table(const std::vector<LevelErrors>& levels) {
    if (levels.size() < 2) throw std::invalid_argument("order_table: at least two levels are required");
    ConvergenceTable table;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const LevelErrors& cur = levels[k];
        if (!(cur.h > 0.0) || cur.l2_err < 0.0 || cur.rot_err < 0.0) {
            throw std::invalid_argument("order_table: h must be positive and errors non-negative");
        }
        ConvergenceRow row{cur.level, cur.h, cur.l2_err, std::nullopt, cur.rot_err, std::nullopt};
        if (k > 0) {
            const LevelErrors& prev = levels[k - 1];
            if (std::abs(prev.h / cur.h - 2.0) > 1e-9) {
                throw std::invalid_argument("order_table: h must halve between consecutive levels");
            }
            row.l2_order = order_between(prev.l2_err, cur.l2_err);
            row.rot_order = order_between(prev.rot_err, cur.rot_err);
        }
        table.rows.push_back(row);
    }
    return table;
}

void write_convergence_csv(const ConvergenceTable& table, std::ostream& out) {
    auto order = [](const std::optional<double>& o) { return o ? fmt_double("%.4f", *o) : std::string("--"); };
    out << "h,l2_err,l2_order,rot_err,rot_order\n";
    for (const auto& r : table.rows) {
        out << fmt_double("%.10e", r.h) << ',' << fmt_double("%.10e", r.l2_err) << ',' << order(r.l2_order) << ','
            << fmt_double("%.10e", r.rot_err) << ',' << order(r.rot_order) << '\n';
    }
}

namespace {

bool is_convex(const Polygon& poly) {
    const std::size_t n = poly.size();
    const double scale = diameter(poly);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly.next(i);
        const Point2 c = poly[(i + 2) % n];
        if (cross(b - a, c - b) < -1e-12 * scale * scale) return false;
    }
    return true;
}

std::vector<CVec2> all_projections(const PolyMesh& mesh, const DofVector& u) {
    std::vector<CVec2> out(mesh.num_cells());
    const auto n = static_cast<long>(mesh.num_cells());
#pragma omp parallel for schedule(static)
    for (long c = 0; c < n; ++c) out[static_cast<std::size_t>(c)] = cell_projection(mesh, static_cast<std::size_t>(c), u);
    return out;
}

// L2 distance of two piecewise-constant fields given by their per-cell values.
double piecewise_distance(const PolyMesh& fine, const std::vector<CVec2>& pf, const PolyMesh& coarse,
                          const std::vector<CVec2>& pc, const QuadSpec& spec) {
    const CellLocator locator(coarse);
    std::vector<char> convex(coarse.num_cells());
    for (std::size_t c = 0; c < coarse.num_cells(); ++c) convex[c] = is_convex(locator.polygon(c)) ? 1 : 0;
    const double tol = 1e-12 * std::max(coarse.domain.width(), coarse.domain.height());

    std::exception_ptr error;
    const double sq = cell_reduce(fine, [&](std::size_t c) -> double {
        try {
            const Polygon poly = fine.cell_polygon(c);
            const int home = locator.locate(fine.cells[c].metrics.centroid, tol);
            if (home >= 0 && convex[static_cast<std::size_t>(home)]) {
                const Polygon& hp = locator.polygon(static_cast<std::size_t>(home));
                const bool inside = std::all_of(poly.vertices.begin(), poly.vertices.end(),
                                                [&](Point2 v) { return contains(hp, v, tol); });
                if (inside) return fine.cells[c].metrics.area * (pf[c] - pc[static_cast<std::size_t>(home)]).squaredNorm();
            }
            double s = 0.0;
            for (const auto& q : polygon_rule(poly, spec)) {
                const int k = locator.locate(q.x, tol);
                if (k < 0) {
                    std::ostringstream msg;
                    msg << "cross_compare: point (" << q.x.x << ", " << q.x.y << ") lies outside the coarse mesh";
                    throw MeshError(msg.str());
                }
                s += q.w * (pf[c] - pc[static_cast<std::size_t>(k)]).squaredNorm();
            }
            return s;
        } catch (...) {
#pragma omp critical(vemax_cross_error)
            if (!error) error = std::current_exception();
            return 0.0;
        }
    });
    if (error) std::rethrow_exception(error);
    return std::sqrt(sq);
}

std::vector<CVec2> all_rots(const PolyMesh& mesh, const DofVector& u) {
    std::vector<CVec2> out(mesh.num_cells());
    const auto n = static_cast<long>(mesh.num_cells());
#pragma omp parallel for schedule(static)
    for (long c = 0; c < n; ++c) out[static_cast<std::size_t>(c)] = CVec2(cell_rot(mesh, static_cast<std::size_t>(c), u), 0.0);
    return out;
}

}  // namespace

double cross_compare(const PolyMesh& fine, const DofVector& u_fine, const PolyMesh& coarse, const DofVector& u_coarse,
                     const QuadSpec& spec) {
    return piecewise_distance(fine, all_projections(fine, u_fine), coarse, all_projections(coarse, u_coarse), spec);
}

double cross_compare_rot(const PolyMesh& fine, const DofVector& u_fine, const PolyMesh& coarse,
                         const DofVector& u_coarse, const QuadSpec& spec) {
    return piecewise_distance(fine, all_rots(fine, u_fine), coarse, all_rots(coarse, u_coarse), spec);
}

double projected_norm(const PolyMesh& mesh, const DofVector& u_h) {
    const double sq = cell_reduce(mesh, [&](std::size_t c) {
        return mesh.cells[c].metrics.area * cell_projection(mesh, c, u_h).squaredNorm();
    });
    return std::sqrt(sq);
}

HelmholtzSplit helmholtz_split(const PolyMesh& mesh, const DofVector& v_h, const CoefficientField& coeffs,
                               const StabilizationOptions& stab, NodalBoundary boundary) {
    const SparseMatrixC B = assemble_b_matrix(mesh, coeffs, stab);
    const SparseMatrixC G = gradient_matrix(mesh).cast<Complex>();
    const DofMap dm = dof_map(mesh);

    // Free nodal unknowns.
    std::vector<int> free;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        if (boundary == NodalBoundary::Zero && dm.boundary_vertex[v]) continue;
        free.push_back(static_cast<int>(v));
    }
    if (boundary == NodalBoundary::Free && !free.empty()) free.erase(free.begin());

    std::vector<Eigen::Triplet<Complex>> sel;
    for (std::size_t k = 0; k < free.size(); ++k) sel.emplace_back(free[k], static_cast<int>(k), 1.0);
    SparseMatrixC E(static_cast<Eigen::Index>(mesh.num_vertices()), static_cast<Eigen::Index>(free.size()));
    E.setFromTriplets(sel.begin(), sel.end());

    const SparseMatrixC GE = G * E;
    SparseMatrixC K = SparseMatrixC(GE.transpose()) * B * GE;
    K.makeCompressed();
    const Eigen::VectorXcd Bv = B * v_h;
    const Eigen::VectorXcd rhs = GE.transpose() * Bv;

    HelmholtzSplit out;
    Eigen::VectorXcd qf = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(free.size()));
    if (!free.empty()) {
        Eigen::SparseLU<SparseMatrixC> lu;
        lu.compute(K);
        if (lu.info() != Eigen::Success) throw SolverError("helmholtz_split: nodal system is singular");
        qf = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !qf.allFinite()) throw SolverError("helmholtz_split: nodal solve failed");
    }
    out.q = E * qf;
    out.w = v_h - G * out.q;
    out.b_norm = std::sqrt(std::abs(v_h.conjugate().dot(Bv)));
    const Eigen::VectorXcd res = GE.transpose() * (B * out.w);
    out.residual = res.size() > 0 ? res.cwiseAbs().maxCoeff() : 0.0;
    return out;
}

namespace {

void write_geometry(const PolyMesh& mesh, std::ostream& out, const char* title) {
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const auto& v : mesh.vertices) out << fmt_double("%.17g", v.x) << ' ' << fmt_double("%.17g", v.y) << " 0\n";
    std::size_t size = 0;
    for (const auto& c : mesh.cells) size += c.vertices.size() + 1;
    out << "CELLS " << mesh.num_cells() << ' ' << size << '\n';
    for (const auto& c : mesh.cells) {
        out << c.vertices.size();
        for (int v : c.vertices) out << ' ' << v;
        out << '\n';
    }
    out << "CELL_TYPES " << mesh.num_cells() << '\n';
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) out << "7\n";
    out << "CELL_DATA " << mesh.num_cells() << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

}  // namespace

void write_field_vtk(const PolyMesh& mesh, const DofVector& u_h, std::ostream& out) {
    write_geometry(mesh, out, "vemax projected field");
    const std::vector<CVec2> pi = all_projections(mesh, u_h);
    out << "VECTORS re_u double\n";
    for (const auto& p : pi) out << fmt_double("%.10e", p[0].real()) << ' ' << fmt_double("%.10e", p[1].real()) << " 0\n";
    out << "VECTORS im_u double\n";
    for (const auto& p : pi) out << fmt_double("%.10e", p[0].imag()) << ' ' << fmt_double("%.10e", p[1].imag()) << " 0\n";
    out << "SCALARS rot double 1\nLOOKUP_TABLE default\n";
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) out << fmt_double("%.10e", cell_rot(mesh, c, u_h).real()) << '\n';
}

void export_field(const PolyMesh& mesh, const DofVector& u_h, const std::string& path) {
    auto out = open_out(path);
    write_field_vtk(mesh, u_h, out);
    if (!out) throw std::runtime_error("failed writing " + path);
}

void export_mesh(const PolyMesh& mesh, const std::string& path) {
    auto out = open_out(path);
    write_geometry(mesh, out, "vemax mesh");
    out << "SCALARS region int 1\nLOOKUP_TABLE default\n";
    for (const auto& c : mesh.cells) out << (c.region == Region::Minus ? 1 : 0) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path);
}

VtkSummary read_vtk_summary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    VtkSummary s;
    std::string line;
    bool in_cell_data = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "POINTS") {
            ls >> s.points;
        } else if (key == "CELLS") {
            ls >> s.cells;
        } else if (key == "CELL_DATA") {
            in_cell_data = true;
        } else if (in_cell_data && (key == "SCALARS" || key == "VECTORS")) {
            std::string name;
            ls >> name;
            s.cell_arrays.push_back(name);
        }
    }
    return s;
}

}  // namespace vemax
