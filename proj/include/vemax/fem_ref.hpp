#pragma once

#include <array>

#include "vemax/system.hpp"

namespace vemax {

/// Triangular PolyMesh; every cell has three vertices.
using TriMesh = PolyMesh;

/// Splits every cell into triangles: triangles are kept, convex quadrilaterals are split along
/// the shorter diagonal, larger cells use geometry's triangulate (a centroid fan adds one vertex). Tags and background ids are
/// inherited from the parent cell.
[[nodiscard]] TriMesh triangulate_mesh(const PolyMesh& mesh);

/// Lowest-order first-kind Nedelec element on a counter-clockwise triangle, local edges
/// p0->p1, p1->p2, p2->p0 with Whitney basis lambda_a grad lambda_b - lambda_b grad lambda_a.
struct Nd0Element {
    Eigen::Matrix3d curl;  ///< integral of rot w_i rot w_j
    Eigen::Matrix3d mass;  ///< integral of w_i . w_j
};

[[nodiscard]] Nd0Element nd0_element(const std::array<Point2, 3>& p);

struct Nd0Options {
    QuadSpec source_quad;  ///< default order 7
    QuadSpec boundary_quad;
};

struct Nd0Solution {
    DofVector u;  ///< edge DoFs, integral of u . t along canonical edge direction
    SolveReport report;
};

[[nodiscard]] LinearSystem nd0_assemble(const TriMesh& tri, const CoefficientField& coeffs, const VectorField& f,
                                        const QuadSpec& source_quad = {});

[[nodiscard]] Nd0Solution nd0_solve(const TriMesh& tri, const CoefficientField& coeffs, const VectorField& f,
                                    const VectorField& g, const Nd0Options& options = {});

}  // namespace vemax
