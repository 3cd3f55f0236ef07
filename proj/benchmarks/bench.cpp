#include <benchmark/benchmark.h>

#include "rydosc/lindblad.hpp"
#include "rydosc/observables.hpp"
#include "rydosc/propagator.hpp"

using namespace rydosc;

static void bm_apply_passage(benchmark::State& state) {
    const FockSpace space(static_cast<int>(state.range(0)));
    const PassageChannel channel{ResonanceMode::two_phonon, 0.2,
                                 AtomState::from_population(0.2)};
    const Passage passage(channel, space);
    DensityMatrix rho = thermal_state(space, 0.3);
    for (auto _ : state) {
        rho = passage.apply(rho);
        benchmark::DoNotOptimize(rho.rho.data());
    }
}
BENCHMARK(bm_apply_passage)->Arg(20)->Arg(40)->Arg(80);

static void bm_lindblad_rhs(benchmark::State& state) {
    const FockSpace space(static_cast<int>(state.range(0)));
    MasterEquation me;
    me.mode = ResonanceMode::two_phonon;
    me.coupling = 0.2;
    me.atom = AtomState::from_population(0.2);
    me.bath = ThermalBath{0.005, 0.1};
    const DensityMatrix rho = thermal_state(space, 0.3);
    for (auto _ : state) {
        Matrix d = rhs(me, rho);
        benchmark::DoNotOptimize(d.data());
    }
}
BENCHMARK(bm_lindblad_rhs)->Arg(20)->Arg(40)->Arg(80);

static void bm_evolve_unit_tau(benchmark::State& state) {
    const FockSpace space(40);
    MasterEquation me;
    me.mode = ResonanceMode::two_phonon;
    me.coupling = 0.2;
    me.atom = AtomState::from_population(0.2);
    const DensityMatrix rho = thermal_state(space, 0.3);
    for (auto _ : state) {
        EvolveResult r = evolve(me, rho, 1.0);
        benchmark::DoNotOptimize(r.state.rho.data());
    }
}
BENCHMARK(bm_evolve_unit_tau);

static void bm_wigner_grid(benchmark::State& state) {
    const FockSpace space(40);
    const PassageChannel channel{ResonanceMode::two_phonon, 0.2,
                                 AtomState::from_population(0.2)};
    const DensityMatrix rho =
        iterate_passages(channel, vacuum(space), 30).states.back();
    WignerGridSpec spec;
    spec.nx = spec.np = static_cast<int>(state.range(0));
    for (auto _ : state) {
        WignerGrid grid = wigner(rho, spec);
        benchmark::DoNotOptimize(grid.values.data());
    }
}
BENCHMARK(bm_wigner_grid)->Arg(101)->Arg(201);

static void bm_minimize_variance(benchmark::State& state) {
    const FockSpace space(40);
    const PassageChannel channel{ResonanceMode::two_phonon, 0.06,
                                 AtomState::from_population(0.1)};
    const DensityMatrix rho =
        iterate_passages(channel, vacuum(space), 30).states.back();
    for (auto _ : state) {
        QuadratureReport rep = minimize_variance(rho);
        benchmark::DoNotOptimize(rep.variance_min);
    }
}
BENCHMARK(bm_minimize_variance);

BENCHMARK_MAIN();
