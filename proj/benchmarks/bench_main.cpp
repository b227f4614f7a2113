// Micro-benchmarks for the synthesis and estimation hot paths.

#include <benchmark/benchmark.h>

#include "isac/emulation.hpp"
#include "isac/estimation.hpp"
#include "isac/pipeline.hpp"
#include "isac/synthesis.hpp"

namespace {

using namespace isac;

SensingScenario adtr_scenario(std::size_t nt, std::size_t nf) {
    SensingScenario s;
    s.mode = Mode::Adtr;
    s.array.kind = ArrayLayout::Kind::Upa;
    s.array.rows = 4;
    s.array.cols = 8;
    s.array.spacing_wl = 0.5;
    s.carrier_hz = 3.5e9;
    s.bandwidth_hz = 40e6;
    s.n_time = nt;
    s.n_freq = nf;
    s.quantization.ideal = true;

    TargetState a{50.0, 7.0, FarFieldDirection{50.0, -20.0}, -5.0, {}};
    TargetState b{155.0, 5.0, FarFieldDirection{0.0, 0.0}, -25.0, {}};
    s.snapshots = {{"t1", {a, b}}};
    return s;
}

SensingScenario satr_scenario(std::size_t nf) {
    SensingScenario s;
    s.mode = Mode::Satr;
    s.array.kind = ArrayLayout::Kind::Ula;
    s.array.count = 16;
    s.array.tx_count = 8;
    s.array.spacing_wl = 0.5;
    s.carrier_hz = 3.5e9;
    s.bandwidth_hz = 40e6;
    s.n_time = 1;
    s.n_freq = nf;
    s.quantization.ideal = true;
    s.snapshots = {{"s1", {TargetState{3.0, 0.0, PlanarBearing{30.0}, 0.0, {}}}}};
    return s;
}

void BM_SynthesizeAdtr(benchmark::State& state) {
    const auto nt = static_cast<std::size_t>(state.range(0));
    const SensingScenario s = adtr_scenario(nt, 251);
    const CompiledSnapshot cs = compile_adtr(s, s.snapshots[0]);
    const SweepParams sweep{s.carrier_hz, s.bandwidth_hz, s.n_freq};
    for (auto _ : state) {
        CfrDataset d = synthesize_cfr_adtr(cs.apm, cs.units, sweep);
        benchmark::DoNotOptimize(d.samples.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * nt * 251 * 32);
}
BENCHMARK(BM_SynthesizeAdtr)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_RangeVelocityMap(benchmark::State& state) {
    const SensingScenario s = adtr_scenario(256, 251);
    const CompiledSnapshot cs = compile_adtr(s, s.snapshots[0]);
    const CfrDataset d =
        synthesize_cfr_adtr(cs.apm, cs.units, {s.carrier_hz, s.bandwidth_hz, s.n_freq});
    for (auto _ : state) {
        RangeVelocityMap map = range_velocity_map(d, 0, 4, 4, Window::None);
        benchmark::DoNotOptimize(map.power_db.data());
    }
}
BENCHMARK(BM_RangeVelocityMap)->Unit(benchmark::kMillisecond);

void BM_BeamformPas(benchmark::State& state) {
    const SensingScenario s = adtr_scenario(8, 251);
    const ArrayGeometry geom = s.make_geometry();
    const auto b = two_way_signature(geom, {50.0, -20.0});
    const auto elev = linear_grid(-89, 89, 1.0);
    const auto azim = linear_grid(-89, 89, 1.0);
    for (auto _ : state) {
        auto pas = beamform_two_way(b, geom, elev, azim);
        benchmark::DoNotOptimize(pas.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * elev.size() * azim.size());
}
BENCHMARK(BM_BeamformPas)->Unit(benchmark::kMillisecond);

void BM_PadpBeamform(benchmark::State& state) {
    const SensingScenario s = adtr_scenario(2, 101);
    const CompiledSnapshot cs = compile_adtr(s, s.snapshots[0]);
    const CfrDataset d =
        synthesize_cfr_adtr(cs.apm, cs.units, {s.carrier_hz, s.bandwidth_hz, s.n_freq});
    const DelayProfiles prof = delay_profiles(d, 0, 4);
    const auto elev = linear_grid(-89, 89, 4.0);
    const auto azim = linear_grid(-89, 89, 4.0);
    const ArrayGeometry geom = s.make_geometry();
    for (auto _ : state) {
        Padp padp = padp_beamform(prof, geom, elev, azim);
        benchmark::DoNotOptimize(padp.power_db.data());
    }
}
BENCHMARK(BM_PadpBeamform)->Unit(benchmark::kMillisecond);

void BM_SatrMatchedFilter(benchmark::State& state) {
    const SensingScenario s = satr_scenario(251);
    const ArrayGeometry geom = s.make_geometry();
    const CompiledSnapshot cs = compile_satr(s, s.snapshots[0]);
    const CfrDataset d =
        synthesize_cfr_satr(cs.apm, cs.units, {s.carrier_hz, s.bandwidth_hz, s.n_freq});
    const auto ranges = linear_grid(2.0, 4.0, 0.02);
    const auto angles = linear_grid(-90.0, 90.0, 0.25);
    for (auto _ : state) {
        RangeAngleMap map = joint_range_angle_satr(d, geom, ranges, angles, Window::Hanning);
        benchmark::DoNotOptimize(map.power_db.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * ranges.size() *
                            angles.size());
}
BENCHMARK(BM_SatrMatchedFilter)->Unit(benchmark::kMillisecond);

void BM_FullRun(benchmark::State& state) {
    const SensingScenario s = adtr_scenario(static_cast<std::size_t>(state.range(0)), 251);
    for (auto _ : state) {
        RunResult r = run_scenario(s, RunOptions{}, "");
        benchmark::DoNotOptimize(r.report.snapshots.data());
    }
}
BENCHMARK(BM_FullRun)->Arg(256)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
