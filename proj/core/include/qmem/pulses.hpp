#pragma once

#include <cstddef>
#include <vector>

#include "qmem/dynamics.hpp"
#include "qmem/model.hpp"
#include "qmem/schedule.hpp"

namespace qmem {

enum class PulseShape { gaussian };

/// Input envelope description. `fwhm` is the full width at half maximum of
/// the amplitude envelope; the amplitude spectrum then has FWHM
/// (4 ln2 / pi) / fwhm. `carrier_detuning` offsets the carrier from the
/// rotating frame; `amplitude` is the envelope peak in sqrt(photons/s).
struct PulseSpec {
    PulseShape shape = PulseShape::gaussian;
    double fwhm = 0.0;
    double center = 0.0;
    double carrier_detuning = 0.0;
    double amplitude = 1.0;
};

/// Uniform sample grid: n samples at t0, t0 + dt, ...
struct SampleGrid {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t n = 0;
};

/// samples = amplitude exp(-4 ln2 (t-center)^2 / fwhm^2)
///                     exp(i 2pi carrier_detuning (t-center)).
/// The grid must span center +/- 3 fwhm ("pulse truncated" otherwise).
/// Total energy is amplitude^2 fwhm sqrt(pi/(8 ln2)).
TemporalMode make_gaussian(const PulseSpec& spec, const SampleGrid& grid,
                           double frame_frequency = 0.0);

/// Times of local minima of |a_c(t)|^2 after `after`, each below
/// `fraction` of the running peak of |a_c|^2, refined by parabolic
/// interpolation. Returns an empty list when nothing qualifies (including a
/// trace with no energy at all).
std::vector<double> detect_dark_states(const SimulationResult& result, double after,
                                       double fraction = 0.05);

/// Builds the record / store / release program:
///   [record at record_flux until the first dark state t1 of the probe]
///   [store at the switch-off flux until t1 + store_cycles * T_rev]
///   [release at record_flux until release_until]
/// The probe must be a recording-only run of the same model at constant
/// record_flux. T_rev is 1/(mean comb spacing) for an equidistant comb; for
/// a disordered comb it is measured from an internal storage simulation
/// (the recording-phase beat period is hybridization-shifted and would
/// mistarget the release). release_until defaults to
/// t1 + store_cycles * T_rev + (t1 - probe start), mirroring the record
/// span; pass a larger value to extend the release window.
/// Throws "no dark state found" when the probe has no dark state.
ControlSchedule build_protocol(const DeviceModel& model, double record_flux,
                               int store_cycles, const SimulationResult& probe,
                               double release_until = -1.0);

}  // namespace qmem
