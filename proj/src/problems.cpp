#include "vemax/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vemax {

std::string to_string(ExampleId id) {
    switch (id) {
        case ExampleId::Circle: return "circle";
        case ExampleId::LineSingular: return "line_singular";
        case ExampleId::DoubleCircle: return "double_circle";
        case ExampleId::Layers: return "layers";
    }
    return "unknown";
}

ExampleId parse_example_id(const std::string& name) {
    if (name == "circle") return ExampleId::Circle;
    if (name == "line_singular") return ExampleId::LineSingular;
    if (name == "double_circle") return ExampleId::DoubleCircle;
    if (name == "layers") return ExampleId::Layers;
    throw std::invalid_argument("unknown example '" + name + "' (circle, line_singular, double_circle, layers)");
}

namespace {

// u = phi(t) (y, x) with t = x^2 + y^2, so rot u = 2 (x^2 - y^2) phi'(t) and, for constant
// alpha, rot(alpha rot u) = alpha (d_y R, -d_x R).
struct RadialProfile {
    double r0 = 0.0, r1 = 0.0, k0 = 0.0, k1 = 0.0;

    [[nodiscard]] double phi(double t, Region r) const {
        if (r == Region::Minus) return -k0 * (r0 * r0 - t);
        return -0.1 * k1 * (r0 * r0 - t) * (r1 * r1 - t);
    }
    [[nodiscard]] double dphi(double t, Region r) const {
        if (r == Region::Minus) return k0;
        return 0.1 * k1 * (r1 * r1 + r0 * r0 - 2.0 * t);
    }
    [[nodiscard]] double ddphi(Region r) const { return r == Region::Minus ? 0.0 : -0.2 * k1; }
};

Problem circle_problem() {
    Problem p;
    p.id = ExampleId::Circle;
    p.domain = {-1.0, 1.0, -1.0, 1.0};
    RadialProfile prof;
    prof.r0 = std::numbers::pi / 5.0;
    prof.r1 = 1.0;
    prof.k1 = 20.0;
    prof.k0 = prof.k1 * (prof.r1 * prof.r1 - prof.r0 * prof.r0);
    p.interface.primitives = {CirclePrimitive{{0.0, 0.0}, prof.r0}};
    p.interface.region_rule = [](std::span<const int> s) { return s[0] < 0 ? Region::Minus : Region::Plus; };
    p.coeffs.alpha_minus = 1.0;
    p.coeffs.beta_minus = 1.0;
    p.coeffs.alpha_plus = 10.0;
    p.coeffs.beta_plus = 10.0;

    p.exact = [prof](Point2 q, Region r) -> CVec2 {
        const double ph = prof.phi(q.x * q.x + q.y * q.y, r);
        return CVec2(ph * q.y, ph * q.x);
    };
    p.rot_exact = [prof](Point2 q, Region r) -> Complex {
        return 2.0 * (q.x * q.x - q.y * q.y) * prof.dphi(q.x * q.x + q.y * q.y, r);
    };
    const CoefficientField coeffs = p.coeffs;
    p.f = [prof, coeffs](Point2 q, Region r) -> CVec2 {
        const double t = q.x * q.x + q.y * q.y;
        const double d1 = prof.dphi(t, r);
        const double d2 = prof.ddphi(r);
        const double diff = q.x * q.x - q.y * q.y;
        const double dRdy = -4.0 * q.y * d1 + 4.0 * q.y * diff * d2;
        const double dRdx = 4.0 * q.x * d1 + 4.0 * q.x * diff * d2;
        const double ph = prof.phi(t, r);
        const double a = coeffs.alpha(r);
        const Complex b = coeffs.beta(r);
        return CVec2(a * dRdy - b * ph * q.y, -a * dRdx - b * ph * q.x);
    };
    p.g = p.exact;
    return p;
}

Problem line_problem(const ProblemParams& params) {
    if (!(params.s > -0.5)) throw std::invalid_argument("line_singular needs s > -1/2");
    Problem p;
    p.id = ExampleId::LineSingular;
    p.domain = {-1.0, 1.0, -1.0, 1.0};
    const double eps = params.eps_line;
    const double s = params.s;
    p.interface.primitives = {LinePrimitive{{eps, 0.0}, {1.0, 0.0}}};
    p.interface.region_rule = [](std::span<const int> sg) { return sg[0] > 0 ? Region::Minus : Region::Plus; };
    p.coeffs.alpha_minus = 1.0;
    p.coeffs.alpha_plus = 1.0;
    p.coeffs.beta_minus = 1.0;
    p.coeffs.beta_plus = 2.0;

    auto u = [eps, s](Point2 q) -> CVec2 {
        return CVec2(std::pow(std::abs(q.x - eps), s) + std::cos(q.x + q.y), std::sin(q.x + q.y));
    };
    p.exact = [u](Point2 q, Region) { return u(q); };
    p.rot_exact = [](Point2 q, Region) -> Complex { return std::cos(q.x + q.y) + std::sin(q.x + q.y); };
    const CoefficientField coeffs = p.coeffs;
    p.f = [u, coeffs](Point2 q, Region r) -> CVec2 {
        const double c = std::cos(q.x + q.y);
        const double sn = std::sin(q.x + q.y);
        return CVec2(c - sn, sn - c) - coeffs.beta(r) * u(q);
    };
    p.g = p.exact;
    SingularLine line{{eps, 0.0}, {1.0, 0.0}, 0.25, 20};
    p.edge_quad.singular = line;
    p.error_quad.singular = line;
    return p;
}

VectorField gaussian_source(double omega, double width) {
    return [omega, width](Point2 q, Region) -> CVec2 {
        const double d = (q.x - 3.0) / width;
        return CVec2(0.0, Complex(0.0, -omega) * std::exp(-d * d));
    };
}

void wave_setup(Problem& p, const ProblemParams& params) {
    p.coeffs = CoefficientField::from_physics(params.omega, params.eps, params.eps, params.sigma_plus,
                                              params.sigma_minus);
    p.f = gaussian_source(params.omega, params.eps);
    // The source is close to a line source once eps is small.
    p.source_quad.adaptive = params.eps < 0.1;
}

Problem double_circle_problem(const ProblemParams& params) {
    Problem p;
    p.id = ExampleId::DoubleCircle;
    p.domain = {0.0, 4.0, 0.0, 1.0};
    p.interface.primitives = {CirclePrimitive{{1.25, 0.0}, 0.35}, CirclePrimitive{{1.75, 0.0}, 0.35}};
    p.interface.region_rule = [](std::span<const int> s) {
        return (s[0] < 0 || s[1] < 0) ? Region::Minus : Region::Plus;
    };
    wave_setup(p, params);
    return p;
}

Problem layers_problem(const ProblemParams& params) {
    Problem p;
    p.id = ExampleId::Layers;
    p.domain = {0.0, 4.0, 0.0, 1.0};
    p.interface = layer_interface(params.layers);
    wave_setup(p, params);
    return p;
}

}  // namespace

InterfaceSpec layer_interface(int layers) {
    std::vector<std::pair<double, double>> bands;
    if (layers == 2) {
        bands = {{0.24, 0.26}, {0.74, 0.76}};
    } else if (layers == 5) {
        bands = {{0.09, 0.11}, {0.24, 0.26}, {0.49, 0.51}, {0.74, 0.76}, {0.89, 0.91}};
    } else {
        throw std::invalid_argument("layers must be 2 or 5");
    }
    InterfaceSpec spec;
    for (auto [lo, hi] : bands) {
        spec.primitives.push_back(LinePrimitive{{0.0, lo}, {0.0, 1.0}});
        spec.primitives.push_back(LinePrimitive{{0.0, hi}, {0.0, 1.0}});
    }
    spec.region_rule = [](std::span<const int> s) {
        for (std::size_t k = 0; k + 1 < s.size(); k += 2) {
            if (s[k] > 0 && s[k + 1] < 0) return Region::Minus;
        }
        return Region::Plus;
    };
    return spec;
}

Problem make_problem(ExampleId id, const ProblemParams& params) {
    switch (id) {
        case ExampleId::Circle: return circle_problem();
        case ExampleId::LineSingular: return line_problem(params);
        case ExampleId::DoubleCircle: return double_circle_problem(params);
        case ExampleId::Layers: return layers_problem(params);
    }
    throw std::invalid_argument("unknown example id");
}

}  // namespace vemax
