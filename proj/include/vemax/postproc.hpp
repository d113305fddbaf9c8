#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vemax/system.hpp"

namespace vemax {

struct ErrorReport {
    double l2_proj_error = 0.0;  ///< ||u - Pi_h u_h||_0
    double rot_error = 0.0;      ///< ||rot u - rot u_h||_0
};

/// Summation by recursive halving; the result depends only on the order of `values`.
[[nodiscard]] double pairwise_sum(std::span<const double> values);

/// The branch of u_exact is chosen by the cell tag, never by a point-side test.
[[nodiscard]] double l2_projected_error(const PolyMesh& mesh, const DofVector& u_h, const VectorField& u_exact,
                                        const QuadSpec& spec);

[[nodiscard]] double rot_error(const PolyMesh& mesh, const DofVector& u_h, const ScalarField& rot_exact,
                               const QuadSpec& spec);

[[nodiscard]] ErrorReport error_report(const PolyMesh& mesh, const DofVector& u_h, const VectorField& u_exact,
                                       const ScalarField& rot_exact, const QuadSpec& spec);

struct LevelErrors {
    int level = 0;
    double h = 0.0;
    double l2_err = 0.0;
    double rot_err = 0.0;
};

struct ConvergenceRow {
    int level = 0;
    double h = 0.0;
    double l2_err = 0.0;
    std::optional<double> l2_order;
    double rot_err = 0.0;
    std::optional<double> rot_order;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;

    /// Mean of the defined orders; nullopt when none is defined.
    [[nodiscard]] std::optional<double> mean_l2_order() const;
    [[nodiscard]] std::optional<double> mean_rot_order() const;
};

/// log2(e_k / e_{k+1}) between consecutive levels. Requires h to halve at each step; an
/// order involving a zero error is undefined.
[[nodiscard]] ConvergenceTable order_table(const std::vector<LevelErrors>& levels);

/// CSV with header "h,l2_err,l2_order,rot_err,rot_order"; undefined orders are written as "--".
void write_convergence_csv(const ConvergenceTable& table, std::ostream& out);

/// ||Pi_h u_fine - Pi_h u_coarse||_0 integrated over the fine mesh, the coarse value taken from
/// the coarse cell containing each point.
[[nodiscard]] double cross_compare(const PolyMesh& fine, const DofVector& u_fine, const PolyMesh& coarse,
                                   const DofVector& u_coarse, const QuadSpec& spec = {});

/// ||rot u_fine - rot u_coarse||_0 with the same point location as cross_compare.
[[nodiscard]] double cross_compare_rot(const PolyMesh& fine, const DofVector& u_fine, const PolyMesh& coarse,
                                       const DofVector& u_coarse, const QuadSpec& spec = {});

/// ||Pi_h u_fine||_0, the usual normaliser for cross_compare.
[[nodiscard]] double projected_norm(const PolyMesh& mesh, const DofVector& u_h);

enum class NodalBoundary {
    Zero,  ///< nodal values vanish on the boundary
    Free,  ///< all vertices free, one vertex pinned to remove the constant
};

struct HelmholtzSplit {
    DofVector w;       ///< v_h - G q_h
    Eigen::VectorXcd q;  ///< nodal potential
    double residual = 0.0;  ///< max_s |b_h(w_h, grad s)| over nodal basis functions s
    double b_norm = 0.0;    ///< ||v_h||_b
};

/// Solves b_h(grad q, grad s) = b_h(v, grad s) for all nodal s and returns w = v - grad q.
[[nodiscard]] HelmholtzSplit helmholtz_split(const PolyMesh& mesh, const DofVector& v_h,
                                             const CoefficientField& coeffs, const StabilizationOptions& stab = {},
                                             NodalBoundary boundary = NodalBoundary::Zero);

/// Legacy ASCII VTK, polygon cells, cell data re_u, im_u (projected field) and rot (real part).
void export_field(const PolyMesh& mesh, const DofVector& u_h, const std::string& path);
void write_field_vtk(const PolyMesh& mesh, const DofVector& u_h, std::ostream& out);

/// Legacy ASCII VTK of the mesh with a region cell array (0 plus, 1 minus).
void export_mesh(const PolyMesh& mesh, const std::string& path);

struct VtkSummary {
    std::size_t points = 0;
    std::size_t cells = 0;
    std::vector<std::string> cell_arrays;
};

/// Reads back the header counts and cell-data array names of a file written here.
[[nodiscard]] VtkSummary read_vtk_summary(const std::string& path);

}  // namespace vemax
