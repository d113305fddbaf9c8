#pragma once

#include <optional>
#include <string>

#include "vemax/mesh.hpp"
#include "vemax/vem_core.hpp"

namespace vemax {

enum class ExampleId { Circle, LineSingular, DoubleCircle, Layers };

[[nodiscard]] std::string to_string(ExampleId id);
[[nodiscard]] ExampleId parse_example_id(const std::string& name);

struct ProblemParams {
    // line_singular
    double s = 0.2;           ///< exponent of |x - eps_line|^s, must exceed -1/2
    double eps_line = 1e-7;   ///< interface position x = eps_line
    // double_circle, layers
    double omega = 5.0;
    double eps = 0.5;         ///< permittivity, also the width of the Gaussian source
    double sigma_minus = 1.0;
    double sigma_plus = 0.1;
    int layers = 2;           ///< 2 or 5

    bool operator==(const ProblemParams&) const = default;
};

/// A fully specified interface problem rot(alpha rot u) - beta u = f with tangential data g.
struct Problem {
    ExampleId id = ExampleId::Circle;
    Box domain;
    InterfaceSpec interface;
    CoefficientField coeffs;
    VectorField f;
    VectorField g;          ///< empty means homogeneous
    VectorField exact;      ///< empty when no closed form is known
    ScalarField rot_exact;  ///< empty when no closed form is known
    QuadSpec source_quad;   ///< cell integrals of f
    QuadSpec edge_quad;     ///< boundary data and interpolation
    QuadSpec error_quad;    ///< error norms

    [[nodiscard]] bool has_exact() const { return static_cast<bool>(exact); }
};

[[nodiscard]] Problem make_problem(ExampleId id, const ProblemParams& params = {});

/// Interface of the five-layer or two-layer configuration.
[[nodiscard]] InterfaceSpec layer_interface(int layers);

}  // namespace vemax
