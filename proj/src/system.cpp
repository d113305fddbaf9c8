#include "vemax/system.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>

#include <Eigen/UmfPackSupport>
#include <unsupported/Eigen/SparseExtra>

namespace vemax {

namespace {

using Trip = Eigen::Triplet<Complex>;

struct CellBlock {
    Eigen::MatrixXcd a;
    Eigen::VectorXcd rhs;
};

CVec2 source_integral(const PolyMesh& mesh, std::size_t c, const VectorField& f, const QuadSpec& spec) {
    const Region region = mesh.cells[c].region;
    auto checked = [&](Point2 p) -> CVec2 {
        const CVec2 v = f(p, region);
        if (!v.allFinite()) {
            std::ostringstream msg;
            msg << "non-finite source sample in cell " << c << " at (" << p.x << ", " << p.y << ")";
            throw FieldError(msg.str());
        }
        return v;
    };
    return integrate<CVec2>(mesh.cell_polygon(c), spec, checked);
}

CellBlock cell_block(const PolyMesh& mesh, std::size_t c, const CoefficientField& coeffs, const VectorField& f,
                     const AssemblyOptions& options) {
    const ElementOperators ops = element_matrices(mesh, c, coeffs, options.stab);
    CellBlock block;
    block.a = ops.a();
    if (f) {
        const CVec2 fk = source_integral(mesh, c, f, options.source_quad);
        block.rhs = ops.P.cast<Complex>().transpose() * fk;
    } else {
        block.rhs = Eigen::VectorXcd::Zero(ops.P.cols());
    }
    return block;
}

void scatter(const Cell& cell, const Eigen::MatrixXcd& a, const Eigen::VectorXcd* rhs, std::vector<Trip>& trips,
             Eigen::VectorXcd* b) {
    const std::size_t n = cell.edges.size();
    for (std::size_t i = 0; i < n; ++i) {
        const int gi = cell.edges[i].edge;
        const double si = cell.edges[i].sign;
        if (rhs != nullptr) (*b)[gi] += si * (*rhs)[static_cast<Eigen::Index>(i)];
        for (std::size_t j = 0; j < n; ++j) {
            const double sj = cell.edges[j].sign;
            trips.emplace_back(gi, cell.edges[j].edge,
                               si * sj * a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
    }
}

std::size_t count_entries(const PolyMesh& mesh) {
    std::size_t total = 0;
    for (const auto& cell : mesh.cells) total += cell.edges.size() * cell.edges.size();
    return total;
}

LinearSystem finish(const PolyMesh& mesh, const std::vector<Trip>& trips, Eigen::VectorXcd b) {
    const auto n = static_cast<Eigen::Index>(mesh.num_edges());
    SparseMatrixC A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    return LinearSystem::unconstrained(std::move(A), std::move(b));
}

}  // namespace

DofVector LinearSystem::expand(const Eigen::VectorXcd& x_free) const {
    DofVector u = constrained_values;
    for (std::size_t k = 0; k < free_to_global.size(); ++k) u[free_to_global[k]] = x_free[static_cast<Eigen::Index>(k)];
    return u;
}

LinearSystem LinearSystem::unconstrained(SparseMatrixC A, Eigen::VectorXcd b) {
    LinearSystem sys;
    const auto n = A.rows();
    sys.A = std::move(A);
    sys.b = std::move(b);
    sys.free_to_global.resize(static_cast<std::size_t>(n));
    sys.global_to_free.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        sys.free_to_global[static_cast<std::size_t>(i)] = static_cast<int>(i);
        sys.global_to_free[static_cast<std::size_t>(i)] = static_cast<int>(i);
    }
    sys.constrained_values = DofVector::Zero(n);
    return sys;
}

LinearSystem assemble(const PolyMesh& mesh, const CoefficientField& coeffs, const VectorField& f,
                      const AssemblyOptions& options) {
    coeffs.validate();
    std::vector<Trip> trips;
    trips.reserve(count_entries(mesh));
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(mesh.num_edges()));
    const std::size_t ncell = mesh.num_cells();
    const std::size_t chunk = std::max<std::size_t>(options.chunk_cells, 1);
    std::vector<CellBlock> blocks;
    for (std::size_t begin = 0; begin < ncell; begin += chunk) {
        const std::size_t end = std::min(ncell, begin + chunk);
        blocks.assign(end - begin, {});
        std::exception_ptr error;
        const auto count = static_cast<long>(end - begin);
#pragma omp parallel for schedule(dynamic, 32)
        for (long k = 0; k < count; ++k) {
            try {
                blocks[static_cast<std::size_t>(k)] =
                    cell_block(mesh, begin + static_cast<std::size_t>(k), coeffs, f, options);
            } catch (...) {
#pragma omp critical(vemax_assemble_error)
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
        // Merge in cell order so the triplet sequence matches the serial path exactly.
        for (std::size_t c = begin; c < end; ++c) {
            const CellBlock& blk = blocks[c - begin];
            scatter(mesh.cells[c], blk.a, &blk.rhs, trips, &b);
        }
    }
    return finish(mesh, trips, std::move(b));
}

LinearSystem assemble_serial(const PolyMesh& mesh, const CoefficientField& coeffs, const VectorField& f,
                             const AssemblyOptions& options) {
    coeffs.validate();
    std::vector<Trip> trips;
    trips.reserve(count_entries(mesh));
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(mesh.num_edges()));
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const CellBlock blk = cell_block(mesh, c, coeffs, f, options);
        scatter(mesh.cells[c], blk.a, &blk.rhs, trips, &b);
    }
    return finish(mesh, trips, std::move(b));
}

SparseMatrixC assemble_b_matrix(const PolyMesh& mesh, const CoefficientField& coeffs,
                                const StabilizationOptions& stab) {
    const std::size_t ncell = mesh.num_cells();
    std::vector<Eigen::MatrixXcd> blocks(ncell);
    const auto n = static_cast<long>(ncell);
#pragma omp parallel for schedule(dynamic, 32)
    for (long c = 0; c < n; ++c) {
        blocks[static_cast<std::size_t>(c)] = element_matrices(mesh, static_cast<std::size_t>(c), coeffs, stab).b();
    }
    std::vector<Trip> trips;
    trips.reserve(count_entries(mesh));
    for (std::size_t c = 0; c < ncell; ++c) scatter(mesh.cells[c], blocks[c], nullptr, trips, nullptr);
    const auto ne = static_cast<Eigen::Index>(mesh.num_edges());
    SparseMatrixC B(ne, ne);
    B.setFromTriplets(trips.begin(), trips.end());
    B.makeCompressed();
    return B;
}

Eigen::VectorXcd assemble_load(const PolyMesh& mesh, const VectorField& f, const QuadSpec& spec) {
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(mesh.num_edges()));
    if (!f) return b;
    const std::size_t ncell = mesh.num_cells();
    std::vector<CVec2> fk(ncell);
    std::exception_ptr error;
    const auto n = static_cast<long>(ncell);
#pragma omp parallel for schedule(dynamic, 32)
    for (long c = 0; c < n; ++c) {
        try {
            fk[static_cast<std::size_t>(c)] = source_integral(mesh, static_cast<std::size_t>(c), f, spec);
        } catch (...) {
#pragma omp critical(vemax_load_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    for (std::size_t c = 0; c < ncell; ++c) {
        const Eigen::VectorXcd rhs = element_projection(mesh, c).cast<Complex>().transpose() * fk[c];
        const Cell& cell = mesh.cells[c];
        for (std::size_t i = 0; i < cell.edges.size(); ++i) {
            b[cell.edges[i].edge] += static_cast<double>(cell.edges[i].sign) * rhs[static_cast<Eigen::Index>(i)];
        }
    }
    return b;
}

LinearSystem eliminate(const LinearSystem& sys, const std::vector<int>& dofs, const std::vector<Complex>& values) {
    if (dofs.size() != values.size()) throw std::invalid_argument("eliminate: dofs and values differ in length");
    const auto nglobal = static_cast<std::size_t>(sys.num_global());
    LinearSystem out;
    out.symmetric = sys.symmetric;
    out.constrained_values = sys.constrained_values;
    std::vector<bool> fixed(nglobal, false);
    for (std::size_t g = 0; g < nglobal; ++g) fixed[g] = sys.global_to_free[g] < 0;
    for (std::size_t k = 0; k < dofs.size(); ++k) {
        const auto g = static_cast<std::size_t>(dofs[k]);
        if (sys.global_to_free[g] < 0) throw std::invalid_argument("eliminate: DoF already constrained");
        fixed[g] = true;
        out.constrained_values[dofs[k]] = values[k];
    }

    // Map old free indices to new free indices.
    const auto nfree_old = static_cast<std::size_t>(sys.num_free());
    std::vector<int> remap(nfree_old, -1);
    Eigen::VectorXcd old_values = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(nfree_old));
    out.global_to_free.assign(nglobal, -1);
    for (std::size_t k = 0; k < nfree_old; ++k) {
        const int g = sys.free_to_global[k];
        if (fixed[static_cast<std::size_t>(g)]) {
            old_values[static_cast<Eigen::Index>(k)] = out.constrained_values[g];
        } else {
            remap[k] = static_cast<int>(out.free_to_global.size());
            out.global_to_free[static_cast<std::size_t>(g)] = remap[k];
            out.free_to_global.push_back(g);
        }
    }
    const auto nfree = static_cast<Eigen::Index>(out.free_to_global.size());
    out.b.resize(nfree);
    for (std::size_t k = 0; k < nfree_old; ++k) {
        if (remap[k] >= 0) out.b[remap[k]] = sys.b[static_cast<Eigen::Index>(k)];
    }
    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(sys.A.nonZeros()));
    for (Eigen::Index j = 0; j < sys.A.outerSize(); ++j) {
        const int cj = remap[static_cast<std::size_t>(j)];
        for (SparseMatrixC::InnerIterator it(sys.A, j); it; ++it) {
            const int ri = remap[static_cast<std::size_t>(it.row())];
            if (ri < 0) continue;
            if (cj >= 0) {
                trips.emplace_back(ri, cj, it.value());
            } else {
                out.b[ri] -= it.value() * old_values[j];
            }
        }
    }
    out.A.resize(nfree, nfree);
    out.A.setFromTriplets(trips.begin(), trips.end());
    out.A.makeCompressed();
    return out;
}

LinearSystem set_tangential_bc(const LinearSystem& sys, const PolyMesh& mesh, const VectorField& g,
                               const QuadSpec& spec) {
    std::vector<int> dofs;
    std::vector<Complex> values;
    for (int e : mesh.boundary_edges) {
        if (sys.global_to_free[static_cast<std::size_t>(e)] < 0) continue;
        dofs.push_back(e);
        if (g) {
            const auto& edge = mesh.edges[static_cast<std::size_t>(e)];
            const Region region = mesh.cells[static_cast<std::size_t>(mesh.edge_cells[static_cast<std::size_t>(e)][0])].region;
            values.push_back(edge_integral(g, mesh.vertices[static_cast<std::size_t>(edge.a)],
                                           mesh.vertices[static_cast<std::size_t>(edge.b)], region, spec, e));
        } else {
            values.emplace_back(0.0);
        }
    }
    return eliminate(sys, dofs, values);
}

namespace {

// Exposes UMFPACK's statistics array.
class UmfLU : public Eigen::UmfPackLU<SparseMatrixC> {
public:
    [[nodiscard]] double stat(int key) const { return m_umfpackInfo(key); }
};

}  // namespace

SolveReport solve(const LinearSystem& sys) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport report;
    report.matrix_nnz = static_cast<long>(sys.A.nonZeros());
    if (sys.num_free() == 0) {
        report.x = Eigen::VectorXcd(0);
        report.u = sys.expand(report.x);
        return report;
    }
    SparseMatrixC A = sys.A;
    A.makeCompressed();
    UmfLU lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) {
        throw SolverError(
            "sparse LU failed: the matrix is numerically singular (beta may coincide with a discrete "
            "eigenvalue); try a different omega or mesh resolution");
    }
    report.factor_nnz = lu.stat(UMFPACK_LNZ) + lu.stat(UMFPACK_UNZ);
    report.rcond = lu.stat(UMFPACK_RCOND);
    report.x = lu.solve(sys.b);
    if (lu.info() != Eigen::Success || !report.x.allFinite()) {
        throw SolverError("sparse LU solve failed; try a different omega or mesh resolution");
    }
    report.residual = (A * report.x - sys.b).norm();
    const double bnorm = sys.b.norm();
    report.relative_residual = bnorm > 0.0 ? report.residual / bnorm : report.residual;
    report.u = sys.expand(report.x);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report.relative_residual > kResidualTolerance) {
        std::ostringstream msg;
        msg << "relative residual " << report.relative_residual << " exceeds " << kResidualTolerance;
        throw SolverError(msg.str());
    }
    return report;
}

void write_matrix_market(const SparseMatrixC& A, const std::string& path) {
    if (!Eigen::saveMarket(A, path)) throw std::runtime_error("cannot write " + path);
}

}  // namespace vemax
