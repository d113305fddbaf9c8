#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "vemax/vem_core.hpp"

namespace vemax {

using SparseMatrixC = Eigen::SparseMatrix<Complex>;

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AssemblyOptions {
    QuadSpec source_quad;  ///< quadrature for the cell integrals of f
    StabilizationOptions stab;
    std::size_t chunk_cells = 8192;  ///< cells whose element blocks are held at once
};

/// Complex-symmetric system over the free edge DoFs. Before set_tangential_bc every DoF
/// is free and free_to_global is the identity.
struct LinearSystem {
    SparseMatrixC A;
    Eigen::VectorXcd b;
    std::vector<int> free_to_global;
    std::vector<int> global_to_free;  ///< -1 for constrained DoFs
    DofVector constrained_values;     ///< global length; meaningful on constrained DoFs only
    bool symmetric = true;

    [[nodiscard]] Eigen::Index num_global() const { return static_cast<Eigen::Index>(global_to_free.size()); }
    [[nodiscard]] Eigen::Index num_free() const { return A.rows(); }
    /// Global DoF vector from a free-DoF solution and the stored constrained values.
    [[nodiscard]] DofVector expand(const Eigen::VectorXcd& x_free) const;

    /// System with every DoF free.
    [[nodiscard]] static LinearSystem unconstrained(SparseMatrixC A, Eigen::VectorXcd b);
};

/// A = sum of scattered a_K, b_i = sum_K (integral of f over K) . P_i. An empty f means zero.
[[nodiscard]] LinearSystem assemble(const PolyMesh& mesh, const CoefficientField& coeffs, const VectorField& f,
                                    const AssemblyOptions& options = {});

/// Serial reference assembly, kept for cross-checking the parallel path.
[[nodiscard]] LinearSystem assemble_serial(const PolyMesh& mesh, const CoefficientField& coeffs, const VectorField& f,
                                           const AssemblyOptions& options = {});

/// Global matrix of b_h = sum of scattered (M_K + S_K), all DoFs.
[[nodiscard]] SparseMatrixC assemble_b_matrix(const PolyMesh& mesh, const CoefficientField& coeffs,
                                              const StabilizationOptions& stab = {});

/// Load vector b_i = sum_K (integral of f over K) . P_i over all DoFs.
[[nodiscard]] Eigen::VectorXcd assemble_load(const PolyMesh& mesh, const VectorField& f, const QuadSpec& spec);

/// Prescribes boundary DoFs from the tangential data g (empty means zero) and eliminates them
/// symmetrically.
[[nodiscard]] LinearSystem set_tangential_bc(const LinearSystem& sys, const PolyMesh& mesh, const VectorField& g,
                                             const QuadSpec& spec = {});

/// Eliminates the given global DoFs with the given values.
[[nodiscard]] LinearSystem eliminate(const LinearSystem& sys, const std::vector<int>& dofs,
                                     const std::vector<Complex>& values);

struct SolveReport {
    DofVector u;            ///< global DoFs including constrained values
    Eigen::VectorXcd x;     ///< free DoFs
    double residual = 0.0;  ///< ||A x - b||
    double relative_residual = 0.0;
    long matrix_nnz = 0;
    double factor_nnz = 0.0;  ///< nonzeros of L plus U
    double rcond = 0.0;       ///< reciprocal condition estimate of the factorization
    double seconds = 0.0;
};

inline constexpr double kResidualTolerance = 1e-8;

/// Sparse LU with pivoting. Throws SolverError on a singular factorization or a relative
/// residual above kResidualTolerance.
[[nodiscard]] SolveReport solve(const LinearSystem& sys);

void write_matrix_market(const SparseMatrixC& A, const std::string& path);

}  // namespace vemax
