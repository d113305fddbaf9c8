#include "vemax/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vemax/fem_ref.hpp"

namespace vemax {

std::string to_string(ReferenceMode mode) {
    switch (mode) {
        case ReferenceMode::Auto: return "auto";
        case ReferenceMode::Analytic: return "analytic";
        case ReferenceMode::Self: return "self";
    }
    return "auto";
}

ReferenceMode parse_reference_mode(const std::string& name) {
    if (name == "auto") return ReferenceMode::Auto;
    if (name == "analytic") return ReferenceMode::Analytic;
    if (name == "self") return ReferenceMode::Self;
    throw std::invalid_argument("reference must be auto, analytic or self, got '" + name + "'");
}

namespace {

std::string to_string(VtkOutput v) {
    switch (v) {
        case VtkOutput::None: return "none";
        case VtkOutput::Finest: return "finest";
        case VtkOutput::All: return "all";
    }
    return "finest";
}

VtkOutput parse_vtk(const std::string& name) {
    if (name == "none") return VtkOutput::None;
    if (name == "finest") return VtkOutput::Finest;
    if (name == "all") return VtkOutput::All;
    throw std::invalid_argument("vtk must be none, finest or all, got '" + name + "'");
}

std::string stab_name(StabScale s) { return s == StabScale::LocalHK ? "local-hk" : "global-h"; }

StabScale parse_stab(const std::string& name) {
    if (name == "local-hk") return StabScale::LocalHK;
    if (name == "global-h") return StabScale::GlobalH;
    throw std::invalid_argument("stab must be local-hk or global-h, got '" + name + "'");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw std::invalid_argument("'" + key + "' expects a number, got '" + v + "'");
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    int out = 0;
    try {
        out = std::stoi(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw std::invalid_argument("'" + key + "' expects an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("'" + key + "' expects true or false, got '" + v + "'");
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto dots = item.find("..");
        if (dots != std::string::npos) {
            const int a = to_int("levels", trim(item.substr(0, dots)));
            const int b = to_int("levels", trim(item.substr(dots + 2)));
            for (int k = a; k <= b; ++k) out.push_back(k);
        } else {
            out.push_back(to_int("levels", item));
        }
    }
    return out;
}

ReferenceMode ExperimentConfig::resolved_reference() const {
    if (reference != ReferenceMode::Auto) return reference;
    return (example == ExampleId::Circle || example == ExampleId::LineSingular) ? ReferenceMode::Analytic
                                                                              : ReferenceMode::Self;
}

void ExperimentConfig::validate() const {
    if (levels.empty()) throw std::invalid_argument("levels must not be empty");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 1 || levels[i] > 12) throw std::invalid_argument("levels must lie in 1..12");
        if (i > 0 && levels[i] <= levels[i - 1]) throw std::invalid_argument("levels must be strictly ascending");
    }
    const ReferenceMode mode = resolved_reference();
    if (mode == ReferenceMode::Analytic && (example == ExampleId::DoubleCircle || example == ExampleId::Layers)) {
        throw std::invalid_argument(vemax::to_string(example) + " has no closed-form solution; use reference = self");
    }
    if (mode == ReferenceMode::Self && !audit_only && ref_level <= levels.back()) {
        throw std::invalid_argument("ref_level must exceed the finest compared level");
    }
    if (quad_order < 1) throw std::invalid_argument("quad_order must be at least 1");
    if (!(params.omega > 0.0) || !(params.eps > 0.0)) throw std::invalid_argument("omega and eps must be positive");
    if (!(params.s > -0.5)) throw std::invalid_argument("s must exceed -1/2");
    if (params.layers != 2 && params.layers != 5) throw std::invalid_argument("layers must be 2 or 5");
    regularity.validate();
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw std::invalid_argument("line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "problem" && section != "run" && section != "solver" && section != "regularity") {
                throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown section '" + section + "'");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string v = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;
        if (full == "problem.example") c.example = parse_example_id(v);
        else if (full == "problem.s") c.params.s = to_double(full, v);
        else if (full == "problem.eps_line") c.params.eps_line = to_double(full, v);
        else if (full == "problem.omega") c.params.omega = to_double(full, v);
        else if (full == "problem.eps") c.params.eps = to_double(full, v);
        else if (full == "problem.sigma_minus") c.params.sigma_minus = to_double(full, v);
        else if (full == "problem.sigma_plus") c.params.sigma_plus = to_double(full, v);
        else if (full == "problem.layers") c.params.layers = to_int(full, v);
        else if (full == "run.levels") c.levels = parse_levels(v);
        else if (full == "run.reference") c.reference = parse_reference_mode(v);
        else if (full == "run.ref_level") c.ref_level = to_int(full, v);
        else if (full == "run.fem") c.fem = to_bool(full, v);
        else if (full == "run.audit_only") c.audit_only = to_bool(full, v);
        else if (full == "run.vtk") c.vtk = parse_vtk(v);
        else if (full == "run.out") c.out = v;
        else if (full == "solver.stab") c.stab = parse_stab(v);
        else if (full == "solver.quad_order") c.quad_order = to_int(full, v);
        else if (full == "solver.graded_source") c.graded_source = to_bool(full, v);
        else if (full == "regularity.theta") c.regularity.theta = to_double(full, v);
        else if (full == "regularity.kappa0") c.regularity.kappa0 = to_double(full, v);
        else if (full == "regularity.kappa1") c.regularity.kappa1 = to_double(full, v);
        else if (full == "regularity.c1") c.regularity.c1 = to_double(full, v);
        else if (full == "regularity.c2") c.regularity.c2 = to_double(full, v);
        else throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown key '" + full + "'");
    }
    return c;
}

ExperimentConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path);
    return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "[problem]\n";
    o << "example = " << vemax::to_string(c.example) << '\n';
    o << "s = " << num(c.params.s) << '\n';
    o << "eps_line = " << num(c.params.eps_line) << '\n';
    o << "omega = " << num(c.params.omega) << '\n';
    o << "eps = " << num(c.params.eps) << '\n';
    o << "sigma_minus = " << num(c.params.sigma_minus) << '\n';
    o << "sigma_plus = " << num(c.params.sigma_plus) << '\n';
    o << "layers = " << c.params.layers << '\n';
    o << "\n[run]\n";
    o << "levels = ";
    for (std::size_t i = 0; i < c.levels.size(); ++i) o << (i ? "," : "") << c.levels[i];
    o << '\n';
    o << "reference = " << to_string(c.reference) << '\n';
    o << "ref_level = " << c.ref_level << '\n';
    o << "fem = " << (c.fem ? "true" : "false") << '\n';
    o << "audit_only = " << (c.audit_only ? "true" : "false") << '\n';
    o << "vtk = " << to_string(c.vtk) << '\n';
    o << "out = " << c.out << '\n';
    o << "\n[solver]\n";
    o << "stab = " << stab_name(c.stab) << '\n';
    o << "quad_order = " << c.quad_order << '\n';
    o << "graded_source = " << (c.graded_source ? "true" : "false") << '\n';
    o << "\n[regularity]\n";
    o << "theta = " << num(c.regularity.theta) << '\n';
    o << "kappa0 = " << num(c.regularity.kappa0) << '\n';
    o << "kappa1 = " << num(c.regularity.kappa1) << '\n';
    o << "c1 = " << num(c.regularity.c1) << '\n';
    o << "c2 = " << num(c.regularity.c2) << '\n';
    return o.str();
}

bool ExperimentResult::all_ok() const {
    return reference_error.empty() &&
           std::all_of(levels.begin(), levels.end(), [](const LevelRecord& r) { return r.ok; });
}

namespace {

namespace fs = std::filesystem;

struct Solved {
    PolyMesh mesh;
    DofVector u;
    SolveReport report;
};

Problem configured_problem(const ExperimentConfig& c) {
    Problem p = make_problem(c.example, c.params);
    p.source_quad.order = c.quad_order;
    p.error_quad.order = c.quad_order;
    if (c.graded_source && p.edge_quad.singular) p.source_quad.singular = p.edge_quad.singular;
    return p;
}

PolyMesh level_mesh(const Problem& p, int k) {
    PolyMesh mesh = build_cut_mesh(GridSpec::with_spacing(p.domain, std::ldexp(1.0, -k)), p.interface);
    check_mesh(mesh);
    return mesh;
}

Solved solve_on(const Problem& p, const ExperimentConfig& c, PolyMesh mesh, int k) {
    AssemblyOptions ao;
    ao.source_quad = p.source_quad;
    ao.stab = {c.stab, std::ldexp(1.0, -k)};
    const LinearSystem sys = set_tangential_bc(assemble(mesh, p.coeffs, p.f, ao), mesh, p.g, p.edge_quad);
    Solved s;
    s.report = solve(sys);
    s.u = s.report.u;
    s.mesh = std::move(mesh);
    return s;
}

// Orders only between consecutive successful levels.
ConvergenceTable table_from(const std::vector<LevelErrors>& rows) {
    ConvergenceTable out;
    std::size_t start = 0;
    while (start < rows.size()) {
        std::size_t end = start + 1;
        while (end < rows.size() && rows[end].level == rows[end - 1].level + 1) ++end;
        if (end - start >= 2) {
            const std::vector<LevelErrors> run(rows.begin() + static_cast<long>(start), rows.begin() + static_cast<long>(end));
            for (const auto& r : order_table(run).rows) out.rows.push_back(r);
        } else {
            const auto& r = rows[start];
            out.rows.push_back({r.level, r.h, r.l2_err, std::nullopt, r.rot_err, std::nullopt});
        }
        start = end;
    }
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string csv_of(const ConvergenceTable& t) {
    std::ostringstream o;
    write_convergence_csv(t, o);
    return o.str();
}

nlohmann::ordered_json order_json(const std::optional<double>& o) {
    return o ? nlohmann::ordered_json(*o) : nlohmann::ordered_json(nullptr);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
    config.validate();
    const Problem problem = configured_problem(config);
    ExperimentResult result;
    result.config = config;
    result.reference = config.resolved_reference();
    const fs::path out(config.out);
    fs::create_directories(out);
    write_text(out / "config.ini", serialize_config(config));
    auto say = [&](const std::string& msg) {
        if (log != nullptr) *log << msg << std::endl;
    };

    std::optional<Solved> reference;
    if (!config.audit_only && result.reference == ReferenceMode::Self) {
        say("reference level " + std::to_string(config.ref_level));
        try {
            reference = solve_on(problem, config, level_mesh(problem, config.ref_level), config.ref_level);
        } catch (const std::exception& e) {
            result.reference_error = e.what();
            say(std::string("reference failed: ") + e.what());
        }
    }

    std::vector<LevelErrors> vem_rows;
    std::vector<LevelErrors> fem_rows;
    for (std::size_t i = 0; i < config.levels.size(); ++i) {
        const int k = config.levels[i];
        LevelRecord rec;
        rec.level = k;
        rec.h = std::ldexp(1.0, -k);
        const auto t0 = std::chrono::steady_clock::now();
        const bool finest = i + 1 == config.levels.size();
        try {
            PolyMesh mesh = level_mesh(problem, k);
            rec.cells = mesh.num_cells();
            rec.regularity = audit_mesh(mesh, config.regularity);
            {
                std::ofstream csv(out / ("regularity_k" + std::to_string(k) + ".csv"), std::ios::binary);
                write_regularity_csv(rec.regularity, csv);
            }
            write_text(out / ("regularity_k" + std::to_string(k) + ".json"),
                       regularity_summary_json(rec.regularity) + "\n");
            if (config.vtk == VtkOutput::All || (config.vtk == VtkOutput::Finest && finest)) {
                export_mesh(mesh, (out / ("mesh_k" + std::to_string(k) + ".vtk")).string());
            }
            if (!config.audit_only) {
                if (result.reference == ReferenceMode::Self && !reference) throw std::runtime_error("no reference solution");
                const Solved s = solve_on(problem, config, std::move(mesh), k);
                rec.dofs = static_cast<std::size_t>(s.report.x.size());
                rec.relative_residual = s.report.relative_residual;
                if (result.reference == ReferenceMode::Analytic) {
                    rec.errors = error_report(s.mesh, s.u, problem.exact, problem.rot_exact, problem.error_quad);
                } else {
                    rec.errors = {cross_compare(reference->mesh, reference->u, s.mesh, s.u),
                                  cross_compare_rot(reference->mesh, reference->u, s.mesh, s.u)};
                }
                if (config.vtk == VtkOutput::All || (config.vtk == VtkOutput::Finest && finest)) {
                    export_field(s.mesh, s.u, (out / ("field_k" + std::to_string(k) + ".vtk")).string());
                }
                if (config.fem) {
                    const TriMesh tri = triangulate_mesh(s.mesh);
                    Nd0Options no;
                    no.source_quad = problem.source_quad;
                    no.boundary_quad = problem.edge_quad;
                    const Nd0Solution nd = nd0_solve(tri, problem.coeffs, problem.f, problem.g, no);
                    const double nd_norm = projected_norm(tri, nd.u);
                    rec.fem_relative_difference = cross_compare(tri, nd.u, s.mesh, s.u) / nd_norm;
                    if (result.reference == ReferenceMode::Analytic) {
                        rec.fem_errors = error_report(tri, nd.u, problem.exact, problem.rot_exact, problem.error_quad);
                        fem_rows.push_back({k, rec.h, rec.fem_errors->l2_proj_error, rec.fem_errors->rot_error});
                    }
                }
                vem_rows.push_back({k, rec.h, rec.errors.l2_proj_error, rec.errors.rot_error});
            }
            rec.ok = true;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        {
            std::ostringstream msg;
            msg << "level " << k << ": ";
            if (!rec.ok) {
                msg << "FAILED " << rec.error;
            } else if (config.audit_only) {
                msg << rec.cells << " cells, worst rho/h " << rec.regularity.worst_rho_ratio;
            } else {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%zu cells, %zu dofs, l2 %.4e, rot %.4e, %.2fs", rec.cells, rec.dofs,
                              rec.errors.l2_proj_error, rec.errors.rot_error, rec.seconds);
                msg << buf;
            }
            say(msg.str());
        }
        result.levels.push_back(std::move(rec));
    }

    if (!vem_rows.empty()) {
        result.table = table_from(vem_rows);
        write_text(out / "errors.csv", csv_of(*result.table));
    }
    if (!fem_rows.empty()) {
        result.fem_table = table_from(fem_rows);
        write_text(out / "fem_errors.csv", csv_of(*result.fem_table));
    }
    if (config.fem && !config.audit_only) {
        std::ostringstream o;
        o << "h,rel_diff\n";
        for (const auto& r : result.levels) {
            if (!r.fem_relative_difference) continue;
            char buf[96];
            std::snprintf(buf, sizeof buf, "%.10e,%.10e\n", r.h, *r.fem_relative_difference);
            o << buf;
        }
        write_text(out / "fem_comparison.csv", o.str());
    }

    nlohmann::ordered_json j;
    j["example"] = vemax::to_string(config.example);
    j["reference"] = to_string(result.reference);
    if (result.reference == ReferenceMode::Self) j["ref_level"] = config.ref_level;
    if (!result.reference_error.empty()) j["reference_error"] = result.reference_error;
    j["all_ok"] = result.all_ok();
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (const auto& r : result.levels) {
        nlohmann::ordered_json l;
        l["level"] = r.level;
        l["h"] = r.h;
        l["ok"] = r.ok;
        if (!r.ok) l["error"] = r.error;
        l["cells"] = r.cells;
        if (!config.audit_only) {
            l["dofs"] = r.dofs;
            l["l2_err"] = r.errors.l2_proj_error;
            l["rot_err"] = r.errors.rot_error;
            l["relative_residual"] = r.relative_residual;
        }
        l["worst_rho_over_h"] = r.regularity.worst_rho_ratio;
        l["star_failures"] = r.regularity.star_failures;
        if (r.fem_relative_difference) l["fem_relative_difference"] = *r.fem_relative_difference;
        l["seconds"] = r.seconds;
        levels.push_back(l);
    }
    j["levels"] = levels;
    if (result.table) {
        j["mean_l2_order"] = order_json(result.table->mean_l2_order());
        j["mean_rot_order"] = order_json(result.table->mean_rot_order());
    }
    write_text(out / "summary.json", j.dump(2) + "\n");
    return result;
}

}  // namespace vemax
