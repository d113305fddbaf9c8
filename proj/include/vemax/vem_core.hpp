#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vemax/mesh.hpp"
#include "vemax/quadrature.hpp"

namespace vemax {

using Complex = std::complex<double>;
using CVec2 = Eigen::Vector2cd;
using DofVector = Eigen::VectorXcd;

/// Analytic fields receive the region of the cell (or edge) being integrated so that
/// two-sided definitions follow the mesh tags rather than a point-side test.
using VectorField = std::function<CVec2(Point2, Region)>;
using ScalarField = std::function<Complex(Point2, Region)>;

class FieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Piecewise coefficients of rot(alpha rot u) - beta u = f.
struct CoefficientField {
    double alpha_plus = 1.0;
    double alpha_minus = 1.0;
    Complex beta_plus = 1.0;
    Complex beta_minus = 1.0;

    /// beta = omega^2 (eps + i sigma / omega) per region.
    [[nodiscard]] static CoefficientField from_physics(double omega, double eps_plus, double eps_minus,
                                                       double sigma_plus, double sigma_minus,
                                                       double alpha_plus = 1.0, double alpha_minus = 1.0);

    [[nodiscard]] double alpha(Region r) const { return r == Region::Plus ? alpha_plus : alpha_minus; }
    [[nodiscard]] Complex beta(Region r) const { return r == Region::Plus ? beta_plus : beta_minus; }
    [[nodiscard]] bool is_real() const { return beta_plus.imag() == 0.0 && beta_minus.imag() == 0.0; }
    void validate() const;
};

enum class StabScale { LocalHK, GlobalH };

struct StabilizationOptions {
    StabScale scale = StabScale::LocalHK;
    double global_h = 0.0;  ///< used when scale == GlobalH
};

/// Local operators of one cell. Local DoFs follow the cell loop orientation.
struct ElementOperators {
    int cell = 0;
    Eigen::Matrix2Xd P;     ///< local DoFs -> constant projection
    Eigen::RowVectorXd r;   ///< local DoFs -> constant rot
    Eigen::MatrixXd A;      ///< alpha |K| r^T r
    Eigen::MatrixXcd M;     ///< beta |K| P^T P
    Eigen::MatrixXd S;      ///< s sum_e |e| q_e q_e^T

    /// a_K = A - M - S.
    [[nodiscard]] Eigen::MatrixXcd a() const;
    /// b_K = M + S.
    [[nodiscard]] Eigen::MatrixXcd b() const;
};

/// DoF_e = integral over e of field . t, with t along the canonical a -> b direction.
[[nodiscard]] DofVector interpolate_edge(const VectorField& field, const PolyMesh& mesh, const QuadSpec& spec);

/// Edge integral on a single segment; throws FieldError tagged with `edge` on non-finite samples.
[[nodiscard]] Complex edge_integral(const VectorField& field, Point2 a, Point2 b, Region region,
                                    const QuadSpec& spec, int edge = -1);

/// Global DoFs of a cell rearranged into loop orientation.
[[nodiscard]] Eigen::VectorXcd local_dofs(const PolyMesh& mesh, std::size_t cell, const DofVector& global);

/// Constant rot value from loop-oriented local DoFs.
[[nodiscard]] Complex element_rot(const PolyMesh& mesh, std::size_t cell, const Eigen::VectorXcd& local);

/// Constant rot value of the cell from a global DoF vector.
[[nodiscard]] Complex cell_rot(const PolyMesh& mesh, std::size_t cell, const DofVector& global);

[[nodiscard]] Eigen::Matrix2Xd element_projection(const PolyMesh& mesh, std::size_t cell);

/// Projection of the cell's restriction of a global DoF vector.
[[nodiscard]] CVec2 cell_projection(const PolyMesh& mesh, std::size_t cell, const DofVector& global);

[[nodiscard]] ElementOperators element_matrices(const PolyMesh& mesh, std::size_t cell, const CoefficientField& coeffs,
                                                const StabilizationOptions& stab = {});

/// Discrete gradient: (G q)_e = q(b) - q(a), edges x vertices.
[[nodiscard]] Eigen::SparseMatrix<double> gradient_matrix(const PolyMesh& mesh);

}  // namespace vemax
