// Parallel kernels against their serial references on Example 1 meshes.
#include <benchmark/benchmark.h>

#include <cmath>
#include <map>

#include "vemax/problems.hpp"
#include "vemax/regularity.hpp"
#include "vemax/system.hpp"

namespace {

const vemax::Problem& problem() {
    static const vemax::Problem p = vemax::make_problem(vemax::ExampleId::Circle);
    return p;
}

const vemax::PolyMesh& mesh_at(int level) {
    static std::map<int, vemax::PolyMesh> cache;
    auto it = cache.find(level);
    if (it == cache.end()) {
        const auto grid = vemax::GridSpec::with_spacing(problem().domain, std::ldexp(1.0, -level));
        it = cache.emplace(level, vemax::build_cut_mesh(grid, problem().interface)).first;
    }
    return it->second;
}

template <bool Parallel>
void BM_Assemble(benchmark::State& state) {
    const auto& mesh = mesh_at(static_cast<int>(state.range(0)));
    const auto& p = problem();
    vemax::AssemblyOptions opt;
    opt.source_quad = p.source_quad;
    for (auto _ : state) {
        auto sys = Parallel ? vemax::assemble(mesh, p.coeffs, p.f, opt) : vemax::assemble_serial(mesh, p.coeffs, p.f, opt);
        benchmark::DoNotOptimize(sys.b.data());
    }
    state.counters["cells"] = static_cast<double>(mesh.num_cells());
}

template <bool Parallel>
void BM_Audit(benchmark::State& state) {
    const auto& mesh = mesh_at(static_cast<int>(state.range(0)));
    const vemax::RegularityParams params;
    for (auto _ : state) {
        auto r = Parallel ? vemax::audit_mesh(mesh, params) : vemax::audit_mesh_serial(mesh, params);
        benchmark::DoNotOptimize(r.worst_rho_ratio);
    }
    state.counters["cells"] = static_cast<double>(mesh.num_cells());
}

}  // namespace

BENCHMARK(BM_Assemble<true>)->Name("assemble/parallel")->DenseRange(5, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Assemble<false>)->Name("assemble/serial")->DenseRange(5, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Audit<true>)->Name("audit/parallel")->DenseRange(5, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Audit<false>)->Name("audit/serial")->DenseRange(5, 7)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
