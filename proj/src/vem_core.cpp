#include "vemax/vem_core.hpp"

#include <cmath>
#include <exception>
#include <sstream>

namespace vemax {

CoefficientField CoefficientField::from_physics(double omega, double eps_plus, double eps_minus, double sigma_plus,
                                                double sigma_minus, double alpha_plus, double alpha_minus) {
    if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
    CoefficientField c;
    c.alpha_plus = alpha_plus;
    c.alpha_minus = alpha_minus;
    c.beta_plus = omega * omega * Complex(eps_plus, sigma_plus / omega);
    c.beta_minus = omega * omega * Complex(eps_minus, sigma_minus / omega);
    c.validate();
    return c;
}

void CoefficientField::validate() const {
    if (!(alpha_plus > 0.0) || !(alpha_minus > 0.0) || !std::isfinite(alpha_plus) || !std::isfinite(alpha_minus)) {
        throw std::invalid_argument("alpha must be positive and finite in both regions");
    }
    for (Complex b : {beta_plus, beta_minus}) {
        if (!std::isfinite(b.real()) || !std::isfinite(b.imag())) throw std::invalid_argument("beta must be finite");
    }
}

Eigen::MatrixXcd ElementOperators::a() const { return A.cast<Complex>() - M - S.cast<Complex>(); }

Eigen::MatrixXcd ElementOperators::b() const { return M + S.cast<Complex>(); }

Complex edge_integral(const VectorField& field, Point2 a, Point2 b, Region region, const QuadSpec& spec, int edge) {
    const Point2 d = b - a;
    const double len = norm(d);
    const Point2 t = d / len;
    Complex sum = 0.0;
    for (const auto& q : segment_rule(a, b, spec)) {
        const CVec2 v = field(q.x, region);
        // A component orthogonal to the edge is skipped so that it may be infinite there.
        const Complex vt = (t.x != 0.0 ? v[0] * t.x : Complex(0.0)) + (t.y != 0.0 ? v[1] * t.y : Complex(0.0));
        if (!std::isfinite(vt.real()) || !std::isfinite(vt.imag())) {
            std::ostringstream msg;
            msg << "non-finite field sample on edge " << edge << " at (" << q.x.x << ", " << q.x.y << ")";
            throw FieldError(msg.str());
        }
        sum += q.w * vt;
    }
    return sum;
}

DofVector interpolate_edge(const VectorField& field, const PolyMesh& mesh, const QuadSpec& spec) {
    const auto n = static_cast<long>(mesh.num_edges());
    DofVector dofs(n);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 64)
    for (long e = 0; e < n; ++e) {
        const auto& edge = mesh.edges[static_cast<std::size_t>(e)];
        const Region region = mesh.cells[static_cast<std::size_t>(mesh.edge_cells[static_cast<std::size_t>(e)][0])].region;
        try {
            dofs[e] = edge_integral(field, mesh.vertices[static_cast<std::size_t>(edge.a)],
                                    mesh.vertices[static_cast<std::size_t>(edge.b)], region, spec, static_cast<int>(e));
        } catch (...) {
#pragma omp critical(vemax_interp_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return dofs;
}

Eigen::VectorXcd local_dofs(const PolyMesh& mesh, std::size_t cell, const DofVector& global) {
    const auto& edges = mesh.cells[cell].edges;
    Eigen::VectorXcd out(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t i = 0; i < edges.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = static_cast<double>(edges[i].sign) * global[edges[i].edge];
    }
    return out;
}

Complex element_rot(const PolyMesh& mesh, std::size_t cell, const Eigen::VectorXcd& local) {
    return local.sum() / mesh.cells[cell].metrics.area;
}

Complex cell_rot(const PolyMesh& mesh, std::size_t cell, const DofVector& global) {
    return element_rot(mesh, cell, local_dofs(mesh, cell, global));
}

Eigen::Matrix2Xd element_projection(const PolyMesh& mesh, std::size_t cell) {
    const Cell& c = mesh.cells[cell];
    const double area = c.metrics.area;
    if (!(area > 0.0)) throw GeometryError("element_projection: cell " + std::to_string(cell) + " has zero area");
    const Point2 xc = c.metrics.centroid;
    const std::size_t n = c.vertices.size();
    Eigen::Matrix2Xd P(2, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = mesh.vertices[static_cast<std::size_t>(c.vertices[i])];
        const Point2 b = mesh.vertices[static_cast<std::size_t>(c.vertices[(i + 1) % n])];
        // Midpoints measured from the centroid keep the differences well conditioned.
        const Point2 m = (a - xc + (b - xc)) * 0.5;
        P(0, static_cast<Eigen::Index>(i)) = -m.y / area;
        P(1, static_cast<Eigen::Index>(i)) = m.x / area;
    }
    return P;
}

CVec2 cell_projection(const PolyMesh& mesh, std::size_t cell, const DofVector& global) {
    return element_projection(mesh, cell).cast<Complex>() * local_dofs(mesh, cell, global);
}

ElementOperators element_matrices(const PolyMesh& mesh, std::size_t cell, const CoefficientField& coeffs,
                                  const StabilizationOptions& stab) {
    const Cell& c = mesh.cells[cell];
    const auto n = static_cast<Eigen::Index>(c.vertices.size());
    const double area = c.metrics.area;
    ElementOperators op;
    op.cell = static_cast<int>(cell);
    op.P = element_projection(mesh, cell);
    op.r = Eigen::RowVectorXd::Constant(n, 1.0 / area);
    op.A = coeffs.alpha(c.region) * area * op.r.transpose() * op.r;
    op.M = coeffs.beta(c.region) * area * (op.P.transpose() * op.P).cast<Complex>();

    // Q(e, i): tangential trace of (I - Pi_K) phi_i on edge e.
    Eigen::MatrixXd Q(n, n);
    Eigen::VectorXd len(n);
    for (Eigen::Index e = 0; e < n; ++e) {
        const auto ue = static_cast<std::size_t>(e);
        const Point2 a = mesh.vertices[static_cast<std::size_t>(c.vertices[ue])];
        const Point2 b = mesh.vertices[static_cast<std::size_t>(c.vertices[(ue + 1) % c.vertices.size()])];
        len[e] = c.metrics.edge_lengths[ue];
        const Point2 t = (b - a) / len[e];
        for (Eigen::Index i = 0; i < n; ++i) {
            Q(e, i) = (e == i ? 1.0 / len[e] : 0.0) - (op.P(0, i) * t.x + op.P(1, i) * t.y);
        }
    }
    const double s = stab.scale == StabScale::GlobalH ? stab.global_h : c.metrics.diameter;
    op.S = s * Q.transpose() * len.asDiagonal() * Q;
    op.S = 0.5 * (op.S + op.S.transpose()).eval();
    return op;
}

Eigen::SparseMatrix<double> gradient_matrix(const PolyMesh& mesh) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * mesh.num_edges());
    for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
        trips.emplace_back(static_cast<int>(e), mesh.edges[e].a, -1.0);
        trips.emplace_back(static_cast<int>(e), mesh.edges[e].b, 1.0);
    }
    Eigen::SparseMatrix<double> G(static_cast<Eigen::Index>(mesh.num_edges()),
                                  static_cast<Eigen::Index>(mesh.num_vertices()));
    G.setFromTriplets(trips.begin(), trips.end());
    return G;
}

}  // namespace vemax
