#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "qmem/dynamics.hpp"
#include "qmem/metrics.hpp"
#include "qmem/model.hpp"
#include "qmem/pulses.hpp"

namespace qmem {

/// Impedance-matching condition for a comb of spacing delta fed through a
/// common resonator: kappa = 2 pi g^2 / delta (all linear Hz).
double matched_kappa(double g, double delta);

/// Smallest flux in [switchoff_flux, 0.5] with coupler_state(flux).kappa =
/// target_kappa, found by bisection on the monotone branch to < 1 kHz.
/// Throws "kappa out of coupler range" for unreachable targets.
double matched_flux(const DeviceModel& model, double target_kappa);

/// Lag in `search_range` maximizing the autocorrelation of the
/// mean-removed internal-superposition envelope |sum_j b_j(t)| over the
/// longest switched-off (kappa ~ 0) stretch of the run, refined by
/// parabolic interpolation. Throws "no revival detected" on a flat
/// envelope.
double revival_period(const SimulationResult& result,
                      std::pair<double, double> search_range);

/// Default lag window for revival_period: around 1/spacing for a regular
/// comb, around 1/irregularity once the comb is measurably disordered
/// (irregularity > 1% of spacing), where the deep interference revival
/// lives.
std::pair<double, double> default_revival_search(const ResonatorBank& bank);

struct MemoryOptions {
    double dt = 1e-10;
    double ramp = 1e-9;
    /// Recording/release flux; NaN solves the impedance-matching condition
    /// for the device's mean coupling and spacing.
    double record_flux = std::numeric_limits<double>::quiet_NaN();
    int jobs = 1;
};

struct MemoryPoint {
    int cycles = 0;
    double storage_time = 0.0;  // store-segment duration, s
    double release_time = 0.0;  // release-segment start, s
    FidelityReport report;
};

/// Full record / store / release experiment for each cycle count: builds
/// the protocol from a recording-only probe, simulates it, and scores the
/// output against a switched-off full-reflection reference run of the same
/// input. The (storage_time, F) series feeds fit_decay directly.
std::vector<MemoryPoint> run_memory_experiment(const DeviceModel& model,
                                               const PulseSpec& pulse,
                                               const std::vector<int>& cycles,
                                               const MemoryOptions& options = {});

/// Measured revival period of the device: records the pulse, holds with the
/// coupler switched off, and runs revival_period over
/// default_revival_search. This is the storage granularity of the memory.
double memory_cycle_time(const DeviceModel& model, const PulseSpec& pulse,
                         const MemoryOptions& options = {});

/// Deterministic disorder: the first comb spacing grows by delta and the
/// last shrinks by delta, keeping the mean spacing and total span. Needs at
/// least 3 internal resonators for delta != 0.
ResonatorBank with_symmetric_disorder(const ResonatorBank& bank, double delta);

/// Random disorder: each spacing shifts by an independent uniform draw from
/// [-delta, delta] (deterministic for a fixed seed).
ResonatorBank with_random_disorder(const ResonatorBank& bank, double delta,
                                   std::uint64_t seed);

}  // namespace qmem
