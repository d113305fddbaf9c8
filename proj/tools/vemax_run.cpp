#include <iostream>

#include "CLI11.hpp"
#include "vemax/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Cut-mesh virtual element solver for 2D Maxwell interface problems"};
    std::string config_path, example, levels, stab, reference, vtk, out;
    int quad_order = 0, ref_level = 0, layers = 0;
    double theta = 0, kappa0 = 0, kappa1 = 0, s = 0, omega = 0, eps = 0, sigma_minus = 0, sigma_plus = 0;
    bool fem = false, audit_only = false, graded_source = false, print_config = false;

    app.add_option("--config", config_path, "key=value config file; flags override it")->check(CLI::ExistingFile);
    auto* o_example = app.add_option("--example", example, "circle | line_singular | double_circle | layers");
    auto* o_levels = app.add_option("--levels", levels, "levels k with h = 2^-k, e.g. 3..7 or 3,4,5");
    auto* o_stab = app.add_option("--stab", stab, "stabilization scale: local-hk | global-h");
    auto* o_quad = app.add_option("--quad-order", quad_order, "quadrature degree per sub-triangle");
    auto* o_theta = app.add_option("--theta", theta, "regularity exponent theta in (1/2, 1]");
    auto* o_kappa0 = app.add_option("--kappa0", kappa0, "shape parameter kappa0 < 0");
    auto* o_kappa1 = app.add_option("--kappa1", kappa1, "shape parameter kappa1 > 0");
    auto* o_ref = app.add_option("--ref-level", ref_level, "reference level for self-convergence");
    auto* o_reference = app.add_option("--reference", reference, "auto | analytic | self");
    auto* o_out = app.add_option("--out", out, "output directory");
    auto* o_vtk = app.add_option("--vtk", vtk, "none | finest | all");
    auto* o_s = app.add_option("--s", s, "singular exponent (line_singular)");
    auto* o_omega = app.add_option("--omega", omega, "angular frequency (double_circle, layers)");
    auto* o_eps = app.add_option("--eps", eps, "permittivity and source width (double_circle, layers)");
    auto* o_sm = app.add_option("--sigma-minus", sigma_minus, "conductivity in the minus region");
    auto* o_sp = app.add_option("--sigma-plus", sigma_plus, "conductivity in the plus region");
    auto* o_layers = app.add_option("--layers", layers, "2 or 5 (layers)");
    auto* o_fem = app.add_flag("--fem", fem, "also solve with lowest-order Nedelec elements on a triangulation");
    auto* o_audit = app.add_flag("--audit-only", audit_only, "build meshes and run the regularity audit only");
    auto* o_graded = app.add_flag("--graded-source", graded_source, "grade the source quadrature near singular lines");
    app.add_flag("--print-config", print_config, "print the resolved config and exit");
    CLI11_PARSE(app, argc, argv);

    try {
        vemax::ExperimentConfig c = config_path.empty() ? vemax::ExperimentConfig{} : vemax::load_config(config_path);
        if (o_example->count()) c.example = vemax::parse_example_id(example);
        if (o_levels->count()) c.levels = vemax::parse_levels(levels);
        if (o_stab->count()) c.stab = stab == "global-h" ? vemax::StabScale::GlobalH
                                     : stab == "local-hk" ? vemax::StabScale::LocalHK
                                                          : throw std::invalid_argument("--stab: local-hk or global-h");
        if (o_quad->count()) c.quad_order = quad_order;
        if (o_theta->count()) c.regularity.theta = theta;
        if (o_kappa0->count()) c.regularity.kappa0 = kappa0;
        if (o_kappa1->count()) c.regularity.kappa1 = kappa1;
        if (o_ref->count()) c.ref_level = ref_level;
        if (o_reference->count()) c.reference = vemax::parse_reference_mode(reference);
        if (o_out->count()) c.out = out;
        if (o_vtk->count()) {
            c.vtk = vemax::parse_config_string("[run]\nvtk = " + vtk).vtk;
        }
        if (o_s->count()) c.params.s = s;
        if (o_omega->count()) c.params.omega = omega;
        if (o_eps->count()) c.params.eps = eps;
        if (o_sm->count()) c.params.sigma_minus = sigma_minus;
        if (o_sp->count()) c.params.sigma_plus = sigma_plus;
        if (o_layers->count()) c.params.layers = layers;
        if (o_fem->count()) c.fem = fem;
        if (o_audit->count()) c.audit_only = audit_only;
        if (o_graded->count()) c.graded_source = graded_source;
        c.validate();
        if (print_config) {
            std::cout << vemax::serialize_config(c);
            return 0;
        }
        const vemax::ExperimentResult r = vemax::run_experiment(c, &std::cout);
        if (r.table) {
            std::cout << '\n';
            vemax::write_convergence_csv(*r.table, std::cout);
        }
        return r.all_ok() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
