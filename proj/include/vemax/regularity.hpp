#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vemax/mesh.hpp"

namespace vemax {

struct RegularityParams {
    double theta = 0.9;
    double kappa0 = -1.0;
    double kappa1 = 60.0;
    double c1 = 10.0;
    double c2 = 10.0;

    bool operator==(const RegularityParams&) const = default;

    void validate() const;
};

/// r(theta) = 1 - kappa1 (theta - 1/2)(theta - 1).
[[nodiscard]] double r_of_theta(double theta, double kappa1);

/// Star-convexity threshold exp(1 + kappa0 - r(theta) / (2 (1 - theta))), 0 at theta = 1.
[[nodiscard]] double tau_theta(double theta, double kappa0, double kappa1);

/// Closed-form maximum of tau(theta)^(theta - 1) over theta in (1/2, 1].
[[nodiscard]] double varrho(double kappa0, double kappa1);

struct CellAudit {
    int cell = 0;
    double h = 0.0;
    double rho = 0.0;
    double threshold = 0.0;  ///< tau(theta) * h
    bool star_ok = false;
    int block_count = 0;  ///< cells meeting the ball of diameter 3h around the centroid
};

/// Smallest constants for which each edge condition holds on one (cell, edge) pair.
struct EdgeAudit {
    int cell = 0;
    int edge = 0;
    double c1_needed = 0.0;  ///< h_e h_K / |K|
    double c2_needed = 0.0;  ///< max(h_K / h_e, h_e l_e / |K|)
    bool short_edge_branch = false;  ///< true when the first condition needs the smaller constant
};

struct RegularityReport {
    RegularityParams params;
    double tau = 0.0;
    double varrho = 0.0;
    std::vector<CellAudit> cells;
    std::vector<EdgeAudit> edges;
    double worst_rho_ratio = 0.0;  ///< min over cells of rho / h
    double c1_required = 0.0;      ///< max c1_needed over edges using the first branch
    double c2_required = 0.0;      ///< max c2_needed over edges using the second branch
    int max_block_count = 0;
    int star_failures = 0;
    bool edge_pass = false;  ///< every edge satisfies a branch with the configured c1, c2

    [[nodiscard]] bool star_pass() const { return star_failures == 0; }
};

[[nodiscard]] RegularityReport audit_mesh(const PolyMesh& mesh, const RegularityParams& params);

/// Serial reference for the per-cell part of the audit, kept for cross-checking.
[[nodiscard]] RegularityReport audit_mesh_serial(const PolyMesh& mesh, const RegularityParams& params);

/// CSV with header "cell,h,rho,tau_h,pass".
void write_regularity_csv(const RegularityReport& report, std::ostream& out);

/// JSON summary of the global quantities.
[[nodiscard]] std::string regularity_summary_json(const RegularityReport& report);

}  // namespace vemax
