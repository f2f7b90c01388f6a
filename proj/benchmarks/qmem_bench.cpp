#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qmem/calibration.hpp"
#include "qmem/coupler.hpp"
#include "qmem/dynamics.hpp"
#include "qmem/metrics.hpp"
#include "qmem/model.hpp"
#include "qmem/pulses.hpp"
#include "qmem/schedule.hpp"
#include "qmem/spectroscopy.hpp"

namespace {

using qmem::Complex;

qmem::DeviceModel bench_device() {
    qmem::CouplerModel coupler;
    coupler.critical_current = 2e-7;
    coupler.loop_inductance = 1e-9;
    coupler.wirebond_inductance = 5e-10;
    coupler.flux_per_volt = 1.5;
    coupler.flux_offset = 0.33;
    coupler.switchoff_flux = 0.0;

    qmem::DeviceModel dev;
    dev.coupler = qmem::calibrate_coupler(0.33, 20e6, -150e6, coupler);
    dev.bank.common = {6.15e9, 0.0, "common"};
    dev.bank.internal = {{5.991e9, 0.0, "m1"},
                         {5.997e9, 0.0, "m2"},
                         {6.003e9, 0.0, "m3"},
                         {6.009e9, 0.0, "m4"}};
    dev.bank.couplings = {4.38e6, 4.38e6, 4.38e6, 4.38e6};
    dev.reference_input_frequency = 6.0e9;
    return dev;
}

void bm_junction_phase(benchmark::State& state) {
    const qmem::DeviceModel dev = bench_device();
    double flux = 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(qmem::junction_phase(flux, dev.coupler));
        flux = flux < 0.45 ? flux + 1e-3 : 0.05;
    }
}
BENCHMARK(bm_junction_phase);

void bm_steady_state_reflection(benchmark::State& state) {
    const qmem::DeviceModel dev = bench_device();
    double f = 5.96e9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(qmem::steady_state_reflection(dev, f, 0.33));
        f = f < 6.04e9 ? f + 1e5 : 5.96e9;
    }
}
BENCHMARK(bm_steady_state_reflection);

void bm_simulate(benchmark::State& state) {
    const qmem::DeviceModel dev = bench_device();
    const auto n = static_cast<std::size_t>(state.range(0));

    qmem::PulseSpec spec;
    spec.fwhm = 57e-9;
    spec.center = 250e-9;
    const qmem::TemporalMode input =
        qmem::make_gaussian(spec, {0.0, 1e-10, n}, dev.reference_input_frequency);
    const qmem::ControlSchedule schedule =
        qmem::constant_flux_schedule(0.33, 0.0, input.end_time(), 1e-9);

    for (auto _ : state) {
        const qmem::SimulationResult result = qmem::simulate(dev, input, schedule);
        benchmark::DoNotOptimize(result.output.samples.back());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(bm_simulate)->Arg(5000)->Arg(20000);

void bm_fidelity(benchmark::State& state) {
    qmem::PulseSpec spec;
    spec.fwhm = 57e-9;
    spec.center = 500e-9;
    const qmem::TemporalMode ref = qmem::make_gaussian(spec, {0.0, 1e-9, 4001}, 6e9);
    qmem::TemporalMode resp = ref;
    for (std::size_t k = 0; k < resp.samples.size(); ++k)
        resp.samples[k] *= std::exp(Complex(0.0, 1e-3 * static_cast<double>(k)));

    for (auto _ : state) {
        const qmem::FidelityReport report =
            qmem::fidelity(ref, resp, {0.0, 4e-6});
        benchmark::DoNotOptimize(report.F);
    }
}
BENCHMARK(bm_fidelity);

void bm_fit_resonance(benchmark::State& state) {
    const double f_r = 6e9, Q_l = 5e4, Q_c = 1e5, phi0 = 0.15;
    std::vector<double> freqs;
    std::vector<Complex> s11;
    std::mt19937 rng(7u);
    std::normal_distribution<double> noise(0.0, 1e-4);
    for (int k = 0; k < 201; ++k) {
        const double f = f_r + f_r / Q_l * (k - 100) / 20.0;
        const Complex dip =
            1.0 - (2.0 * Q_l / Q_c) * std::exp(Complex(0.0, phi0)) /
                      (1.0 + Complex(0.0, 2.0 * Q_l) * (f / f_r - 1.0));
        freqs.push_back(f);
        s11.push_back(0.9 * std::exp(Complex(0.0, 0.4 - 2.0 * M_PI * f * 3e-8)) * dip +
                      Complex(noise(rng), noise(rng)));
    }

    for (auto _ : state) {
        const qmem::ResonanceFit fit = qmem::fit_resonance(freqs, s11);
        benchmark::DoNotOptimize(fit.f_r);
    }
}
BENCHMARK(bm_fit_resonance);

}  // namespace

BENCHMARK_MAIN();
