#include <benchmark/benchmark.h>

#include <complex>

#include "ncrsense/config.hpp"
#include "ncrsense/crb.hpp"
#include "ncrsense/model.hpp"
#include "ncrsense/optimizer.hpp"
#include "ncrsense/rng.hpp"
#include "ncrsense/sinr.hpp"

namespace {

using namespace ncrsense;

SystemConfig bench_config(int m, int ns, int n) {
    SystemConfigParams p;
    p.noise_power_dbm = -94.0;
    p.chan_est_err_var_db = -20.0;
    p.propagated_noise_var_dbm = -198.0;
    p.repeater_user_chan_var_db = -80.0;
    p.composite_chan_var_db = -184.0;
    p.rcs_var_db = 10.0;
    p.target_angle_deg = 30.0;
    p.target_distance_m = 400.0;
    p.num_antennas = m;
    p.num_time_samples = n;
    p.num_subcarriers = ns;
    p.subcarrier_spacing_hz = 120e3;
    p.max_power = 1e6;
    p.min_user_sinr_db = 2.0;
    return SystemConfig::from_params(p);
}

void BM_SteeringVector(benchmark::State &state) {
    const int m = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(steering_vector(0.5236, m));
    }
}
BENCHMARK(BM_SteeringVector)->Arg(16)->Arg(64)->Arg(256);

void BM_DrawChannels(benchmark::State &state) {
    const auto cfg = bench_config(64, 128, 128);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(draw_channels(cfg, ++seed));
    }
}
BENCHMARK(BM_DrawChannels);

void BM_UserSinr(benchmark::State &state) {
    const auto cfg = bench_config(64, 128, 128);
    const auto chan = draw_channels(cfg, 7);
    const auto w = uniform_precoder(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(user_sinr(w, 70.0, chan.g, cfg));
    }
}
BENCHMARK(BM_UserSinr);

void BM_CrbClosedForm(benchmark::State &state) {
    const auto cfg = bench_config(64, 128, 128);
    const auto w = matched_precoder(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            crb_range(w, 70.0, cfg.rcs_var(), cfg.target_angle_rad(), 400.0, cfg));
    }
}
BENCHMARK(BM_CrbClosedForm);

void BM_FimDirect(benchmark::State &state) {
    const int ns = static_cast<int>(state.range(0));
    const auto cfg = bench_config(16, ns, 64);
    const auto w = matched_precoder(cfg);
    const std::complex<double> rcs{2.2, -2.2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fim_direct(w, 70.0, rcs, cfg.target_angle_rad(), 400.0, cfg));
    }
    state.SetComplexityN(ns);
}
BENCHMARK(BM_FimDirect)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_MeritGradient(benchmark::State &state) {
    const auto cfg = bench_config(64, 128, 128);
    const auto chan = draw_channels(cfg, 3);
    const auto w = uniform_precoder(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(merit_gradient(cfg, chan.g, w.w, 0.0, 1.0));
    }
}
BENCHMARK(BM_MeritGradient);

void BM_OptimizeJoint(benchmark::State &state) {
    const int m = static_cast<int>(state.range(0));
    const auto cfg = bench_config(m, 2 * m, 32);
    const auto chan = draw_channels(cfg, 5);
    const auto w0 = uniform_precoder(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimize_joint(cfg, chan.g, w0, 1.0));
    }
}
BENCHMARK(BM_OptimizeJoint)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
