#include <benchmark/benchmark.h>

#include <cmath>
#include <string>

#include "qgraph/greens.hpp"
#include "qgraph/oracle.hpp"
#include "qgraph/quantum_map.hpp"
#include "qgraph/scattering.hpp"
#include "qgraph/spectrum.hpp"

namespace {

using namespace qgraph;

struct Fixture {
    MetricGraph graph;
    ConditionSet conditions;
};

Fixture make_lasso() {
    GraphBuilder b;
    b.add_vertex("v1").add_lead("e1", "v1").add_bond("e2", "v1", "v1", 1.0);
    return {b.build(), {VertexCondition::neumann_kirchhoff()}};
}

/// Ring of n vertices with a chord and a lead; incommensurate lengths.
Fixture make_ring(int n) {
    GraphBuilder b;
    for (int i = 0; i < n; ++i) b.add_vertex("v" + std::to_string(i));
    for (int i = 0; i < n; ++i) {
        b.add_bond("e" + std::to_string(i), "v" + std::to_string(i),
                   "v" + std::to_string((i + 1) % n), 1.0 + 0.1 * i);
    }
    b.add_bond("chord", "v0", "v" + std::to_string(n / 2), std::sqrt(2.0));
    b.add_lead("lead", "v1");
    return {b.build(), ConditionSet(n, VertexCondition::neumann_kirchhoff())};
}

void BM_QuantumMapAssembly(benchmark::State& state) {
    auto f = make_ring(static_cast<int>(state.range(0)));
    double k = 1.0;
    for (auto _ : state) {
        k += 1e-3;
        benchmark::DoNotOptimize(quantum_map(f.graph, f.conditions, Complex(k, 0.0)));
    }
}
BENCHMARK(BM_QuantumMapAssembly)->Arg(8)->Arg(24)->Arg(48);

void BM_ScatteringSolve(benchmark::State& state) {
    auto f = make_ring(static_cast<int>(state.range(0)));
    double k = 1.0;
    for (auto _ : state) {
        k += 1e-3;
        benchmark::DoNotOptimize(scattering_matrix(f.graph, f.conditions, Complex(k, 0.0)));
    }
}
BENCHMARK(BM_ScatteringSolve)->Arg(8)->Arg(24)->Arg(48);

void BM_GreensOpen(benchmark::State& state) {
    auto f = make_lasso();
    const EnergyPoint e = EnergyPoint::from_wavenumber(Complex(1.0, 0.1));
    const GraphPoint x{f.graph.edge_index("e1"), 0.4};
    const GraphPoint xp{f.graph.edge_index("e2"), 0.7};
    for (auto _ : state) {
        benchmark::DoNotOptimize(greens_open(f.graph, f.conditions, x, xp, e));
    }
}
BENCHMARK(BM_GreensOpen);

void BM_PathSum(benchmark::State& state) {
    auto f = make_lasso();
    const EnergyPoint e = EnergyPoint::from_wavenumber(Complex(1.0, 0.4));
    const GraphPoint x{f.graph.edge_index("e1"), 0.4};
    const GraphPoint xp{f.graph.edge_index("e1"), 1.2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            path_sum_greens(f.graph, f.conditions, x, xp, e, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_PathSum)->Arg(20)->Arg(80);

void BM_SpectrumScan(benchmark::State& state) {
    GraphBuilder b;
    b.add_vertex("v1").add_vertex("v2");
    b.add_bond("e1", "v1", "v2", M_PI);
    Fixture f{b.build(), {VertexCondition::dirichlet(), VertexCondition::dirichlet()}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(find_eigenvalues(f.graph, f.conditions, 0.5, 10.5));
    }
}
BENCHMARK(BM_SpectrumScan);

}  // namespace

BENCHMARK_MAIN();
