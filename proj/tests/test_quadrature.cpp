#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vemax/quadrature.hpp"

using namespace vemax;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// integral of x^a y^b over the unit right triangle
double monomial_exact(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

}  // namespace

TEST(GaussLegendre, WeightsSumToOne) {
    for (int n = 1; n <= 12; ++n) {
        const auto& rule = gauss_legendre(n);
        double s = 0.0;
        for (double w : rule.weights) s += w;
        EXPECT_NEAR(s, 1.0, 1e-14);
        for (double x : rule.nodes) {
            EXPECT_GT(x, 0.0);
            EXPECT_LT(x, 1.0);
        }
    }
}

TEST(TriangleRule, ExactForMonomialsUpToOrder) {
    const Triangle t{{0, 0}, {1, 0}, {0, 1}};
    for (int order = 1; order <= 9; ++order) {
        const auto rule = triangle_rule(t, order);
        for (int a = 0; a <= order; ++a) {
            for (int b = 0; a + b <= order; ++b) {
                double s = 0.0;
                for (const auto& q : rule) s += std::pow(q.x.x, a) * std::pow(q.x.y, b) * q.w;
                EXPECT_NEAR(s, monomial_exact(a, b), 1e-14) << "order " << order << " x^" << a << " y^" << b;
            }
        }
    }
}

TEST(PolygonRule, IntegratesLinearFieldsExactly) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Polygon poly = vemax::test::random_convex(rng, 6);
        const auto rule = polygon_rule(poly, {});
        double area = 0.0, mx = 0.0;
        for (const auto& q : rule) {
            area += q.w;
            mx += q.w * q.x.x;
        }
        EXPECT_NEAR(area, vemax::test::shoelace(poly.vertices), 1e-13);
        EXPECT_NEAR(mx / area, centroid(poly).x, 1e-12);
    }
}

TEST(SegmentRule, GradedRuleResolvesEndpointSingularity) {
    const double eps = 1e-7;
    QuadSpec spec;
    spec.singular = SingularLine{{eps, 0}, {1, 0}, 0.25, 20};
    for (double s : {-0.4, -0.1, 0.2}) {
        const auto rule = segment_rule({eps, 0}, {eps + 0.1, 0}, spec);
        double sum = 0.0;
        for (const auto& q : rule) sum += std::pow(std::abs(q.x.x - eps), s) * q.w;
        // antiderivative |x - eps|^(s+1) / (s+1)
        EXPECT_NEAR(sum, std::pow(0.1, s + 1) / (s + 1), 1e-6) << "s = " << s;
    }
}

TEST(Integrate, GradedAreaRuleHandlesInteriorSingularLine) {
    const double eps = 0.03;
    QuadSpec spec;
    spec.singular = SingularLine{{eps, 0}, {1, 0}, 0.25, 20};
    const Polygon sq = vemax::test::rect(0, 0, 0.1, 0.1);
    const double s = -0.4;
    const double got = integrate<double>(sq, spec, [&](Point2 p) { return std::pow(std::abs(p.x - eps), s); });
    const double exact = 0.1 * (std::pow(eps, s + 1) + std::pow(0.1 - eps, s + 1)) / (s + 1);
    EXPECT_NEAR(got, exact, 1e-6 * exact);
}

TEST(Integrate, AdaptiveResolvesNarrowGaussian) {
    const double width = 0.01;
    QuadSpec spec;
    spec.adaptive = true;
    const Polygon cell = vemax::test::rect(2.9, 0, 3.1, 0.1);
    const double got = integrate<double>(cell, spec, [&](Point2 p) {
        const double d = (p.x - 3.0) / width;
        return std::exp(-d * d);
    });
    // erf closed form over |x - 3| <= 0.1, times the 0.1 height
    const double exact = 0.1 * width * std::sqrt(M_PI) * std::erf(0.1 / width);
    EXPECT_NEAR(got, exact, 1e-8 * exact);
}
