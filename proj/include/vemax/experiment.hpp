#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vemax/postproc.hpp"
#include "vemax/problems.hpp"
#include "vemax/regularity.hpp"

namespace vemax {

enum class ReferenceMode {
    Auto,      ///< analytic when the example has a closed form, otherwise self
    Analytic,  ///< errors against the exact solution
    Self,      ///< errors against the solution at ref_level
};

[[nodiscard]] std::string to_string(ReferenceMode mode);
[[nodiscard]] ReferenceMode parse_reference_mode(const std::string& name);

enum class VtkOutput { None, Finest, All };

/// Declarative description of one convergence study.
///
/// Text form: '#' starts a comment, "[section]" opens a section, other lines are
/// "key = value". Sections and keys:
///   [problem]    example, s, eps_line, omega, eps, sigma_minus, sigma_plus, layers
///   [run]        levels (comma separated), reference (auto|analytic|self), ref_level, fem,
///                audit_only, vtk (none|finest|all), out
///   [solver]     stab (local-hk|global-h), quad_order, graded_source
///   [regularity] theta, kappa0, kappa1, c1, c2
struct ExperimentConfig {
    ExampleId example = ExampleId::Circle;
    ProblemParams params;
    std::vector<int> levels{3, 4, 5, 6, 7};
    ReferenceMode reference = ReferenceMode::Auto;
    int ref_level = 8;
    bool fem = false;
    bool audit_only = false;
    VtkOutput vtk = VtkOutput::Finest;
    std::string out = "out";
    StabScale stab = StabScale::LocalHK;
    int quad_order = 7;
    bool graded_source = false;  ///< grade the source quadrature toward a singular line as well
    RegularityParams regularity;

    bool operator==(const ExperimentConfig&) const = default;

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
    [[nodiscard]] ReferenceMode resolved_reference() const;
};

[[nodiscard]] ExperimentConfig parse_config(std::istream& in);
[[nodiscard]] ExperimentConfig parse_config_string(const std::string& text);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);
[[nodiscard]] std::string serialize_config(const ExperimentConfig& config);

[[nodiscard]] std::vector<int> parse_levels(const std::string& text);

struct LevelRecord {
    int level = 0;
    double h = 0.0;
    bool ok = false;
    std::string error;
    std::size_t cells = 0;
    std::size_t dofs = 0;
    ErrorReport errors;
    double relative_residual = 0.0;
    double seconds = 0.0;
    RegularityReport regularity;
    std::optional<ErrorReport> fem_errors;  ///< Nedelec errors measured like the VEM ones
    std::optional<double> fem_relative_difference;  ///< ||Pi u_vem - Pi u_nd0|| / ||Pi u_nd0||
};

struct ExperimentResult {
    ExperimentConfig config;
    ReferenceMode reference = ReferenceMode::Analytic;
    std::vector<LevelRecord> levels;
    std::optional<ConvergenceTable> table;
    std::optional<ConvergenceTable> fem_table;
    std::string reference_error;  ///< non-empty when the reference solve failed

    [[nodiscard]] bool all_ok() const;
};

/// Runs every level in order, writing artifacts under config.out:
///   errors.csv, fem_errors.csv / fem_comparison.csv (with fem), regularity_k<k>.csv,
///   regularity_k<k>.json, field_k<k>.vtk, mesh_k<k>.vtk, summary.json.
/// A failing level is recorded and the remaining levels still run.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

}  // namespace vemax
