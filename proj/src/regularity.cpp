#include "vemax/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace vemax {

void RegularityParams::validate() const {
    if (!(theta > 0.5 && theta <= 1.0)) throw std::invalid_argument("theta must lie in (1/2, 1]");
    if (!(kappa0 < 0.0)) throw std::invalid_argument("kappa0 must be negative");
    if (!(kappa1 > 0.0)) throw std::invalid_argument("kappa1 must be positive");
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("edge constants must be positive");
}

double r_of_theta(double theta, double kappa1) { return 1.0 - kappa1 * (theta - 0.5) * (theta - 1.0); }

double tau_theta(double theta, double kappa0, double kappa1) {
    if (theta >= 1.0) return 0.0;
    return std::exp(1.0 + kappa0 - r_of_theta(theta, kappa1) / (2.0 * (1.0 - theta)));
}

double varrho(double kappa0, double kappa1) {
    const double ratio = (kappa0 + 1.0) / kappa1;
    if (ratio > 0.25) return std::exp(0.5);
    if (ratio < -0.25) return std::exp(-kappa0 / 2.0);
    const double num = 16.0 * kappa0 * kappa0 - 8.0 * kappa0 * (-4.0 + kappa1) + (4.0 + kappa1) * (4.0 + kappa1);
    return std::exp(num / (32.0 * kappa1));
}

namespace {

CellAudit audit_cell(const PolyMesh& mesh, const CellLocator& locator, std::size_t c, double tau,
                     std::vector<int>& stamp, int& stamp_value) {
    const Cell& cell = mesh.cells[c];
    CellAudit out;
    out.cell = static_cast<int>(c);
    out.h = cell.metrics.diameter;
    out.rho = cell.metrics.star_radius;
    out.threshold = tau * out.h;
    out.star_ok = out.rho >= out.threshold;

    const Point2 center = cell.metrics.centroid;
    const double radius = 1.5 * out.h;
    ++stamp_value;
    int count = 0;
    locator.for_each_candidate(Point2{center.x - radius, center.y - radius}, Point2{center.x + radius, center.y + radius},
                               [&](int k) {
                                   auto& s = stamp[static_cast<std::size_t>(k)];
                                   if (s == stamp_value) return;
                                   s = stamp_value;
                                   if (contains(locator.polygon(static_cast<std::size_t>(k)), center, radius)) ++count;
                               });
    out.block_count = count;
    return out;
}

void audit_edges(const PolyMesh& mesh, RegularityReport& report) {
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        const Cell& cell = mesh.cells[c];
        const auto& m = cell.metrics;
        for (std::size_t i = 0; i < cell.edges.size(); ++i) {
            EdgeAudit ea;
            ea.cell = static_cast<int>(c);
            ea.edge = cell.edges[i].edge;
            const double he = m.edge_lengths[i];
            const double le = m.supporting_heights[i];
            ea.c1_needed = he * m.diameter / m.area;
            ea.c2_needed = std::max(m.diameter / he, he * le / m.area);
            ea.short_edge_branch = ea.c1_needed <= ea.c2_needed;
            if (ea.short_edge_branch) {
                report.c1_required = std::max(report.c1_required, ea.c1_needed);
            } else {
                report.c2_required = std::max(report.c2_required, ea.c2_needed);
            }
            report.edges.push_back(ea);
        }
    }
    report.edge_pass = std::all_of(report.edges.begin(), report.edges.end(), [&](const EdgeAudit& ea) {
        return ea.c1_needed <= report.params.c1 || ea.c2_needed <= report.params.c2;
    });
}

void summarize(RegularityReport& report) {
    report.worst_rho_ratio = std::numeric_limits<double>::infinity();
    for (const auto& ca : report.cells) {
        report.worst_rho_ratio = std::min(report.worst_rho_ratio, ca.rho / ca.h);
        report.max_block_count = std::max(report.max_block_count, ca.block_count);
        if (!ca.star_ok) ++report.star_failures;
    }
}

RegularityReport prepare(const RegularityParams& params) {
    params.validate();
    RegularityReport report;
    report.params = params;
    report.tau = tau_theta(params.theta, params.kappa0, params.kappa1);
    report.varrho = varrho(params.kappa0, params.kappa1);
    return report;
}

}  // namespace

RegularityReport audit_mesh(const PolyMesh& mesh, const RegularityParams& params) {
    RegularityReport report = prepare(params);
    const CellLocator locator(mesh);
    const auto n = static_cast<long>(mesh.cells.size());
    report.cells.resize(mesh.cells.size());
#pragma omp parallel
    {
        std::vector<int> stamp(mesh.cells.size(), 0);
        int stamp_value = 0;
#pragma omp for schedule(static)
        for (long c = 0; c < n; ++c) {
            report.cells[static_cast<std::size_t>(c)] =
                audit_cell(mesh, locator, static_cast<std::size_t>(c), report.tau, stamp, stamp_value);
        }
    }
    audit_edges(mesh, report);
    summarize(report);
    return report;
}

RegularityReport audit_mesh_serial(const PolyMesh& mesh, const RegularityParams& params) {
    RegularityReport report = prepare(params);
    const CellLocator locator(mesh);
    std::vector<int> stamp(mesh.cells.size(), 0);
    int stamp_value = 0;
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        report.cells.push_back(audit_cell(mesh, locator, c, report.tau, stamp, stamp_value));
    }
    audit_edges(mesh, report);
    summarize(report);
    return report;
}

void write_regularity_csv(const RegularityReport& report, std::ostream& out) {
    out << "cell,h,rho,tau_h,pass\n";
    out << std::setprecision(10) << std::scientific;
    for (const auto& ca : report.cells) {
        out << ca.cell << ',' << ca.h << ',' << ca.rho << ',' << ca.threshold << ',' << (ca.star_ok ? 1 : 0) << '\n';
    }
}

std::string regularity_summary_json(const RegularityReport& report) {
    nlohmann::ordered_json j;
    j["theta"] = report.params.theta;
    j["kappa0"] = report.params.kappa0;
    j["kappa1"] = report.params.kappa1;
    j["tau"] = report.tau;
    j["varrho"] = report.varrho;
    j["cells"] = report.cells.size();
    j["worst_rho_over_h"] = report.worst_rho_ratio;
    j["star_failures"] = report.star_failures;
    j["c1_required"] = report.c1_required;
    j["c2_required"] = report.c2_required;
    j["edge_pass"] = report.edge_pass;
    j["max_block_count"] = report.max_block_count;
    return j.dump(2);
}

}  // namespace vemax
