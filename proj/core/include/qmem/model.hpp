#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qmem/coupler.hpp"

namespace qmem {

using Complex = std::complex<double>;

/// Magnetic flux quantum h/2e in Wb.
inline constexpr double flux_quantum = 2.067833848e-15;
/// Planck constant in J*s (2019 SI exact value).
inline constexpr double planck_constant = 6.62607015e-34;

/// A single mode of the device: one resonance with its internal loss.
///
/// `frequency` is the linear resonance frequency in Hz. `gamma` is the
/// internal energy-decay linewidth in Hz (full width), so the internal
/// quality factor is Q_i = frequency / gamma and the field amplitude of an
/// isolated mode decays as exp(-pi * gamma * t).
struct ResonatorSpec {
    double frequency = 0.0;
    double gamma = 0.0;
    std::string label;
};

/// The memory cell: one common (bus) resonator coupled to a comb of
/// internal storage resonators.
///
/// `common.frequency` is the maximal common-resonator frequency, reached at
/// zero coupler actuation; the coupler can only pull it downward.
/// `couplings[j]` is the linear exchange coupling g_j in Hz between the
/// common resonator and internal resonator j. Internal frequencies must be
/// strictly increasing.
struct ResonatorBank {
    ResonatorSpec common;
    std::vector<ResonatorSpec> internal;
    std::vector<double> couplings;
};

/// Full parametric description of the device: resonator bank, flux-tunable
/// coupler, and the rotating-frame anchor used by the time-domain solver.
struct DeviceModel {
    ResonatorBank bank;
    CouplerModel coupler;
    double reference_input_frequency = 0.0;
};

/// Uniformly sampled complex envelope.
///
/// Waveguide fields carry sqrt(photon flux) units (|s|^2 is a rate),
/// intracavity fields carry sqrt(photon) units (|a|^2 is a population).
/// Samples are I + i*Q relative to the frame rotating at `frame_frequency`.
struct TemporalMode {
    double t0 = 0.0;
    double dt = 0.0;
    double frame_frequency = 0.0;
    std::vector<Complex> samples;

    std::size_t size() const { return samples.size(); }
    double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    double end_time() const { return samples.empty() ? t0 : time_at(samples.size() - 1); }
};

/// Energy of a waveguide mode: sum |s|^2 * dt, in photons.
double waveguide_energy(const TemporalMode& mode);

/// One violated invariant, as data. `field` names the offending field
/// (e.g. "bank.internal[2].gamma"), `rule` states the broken rule.
struct Violation {
    std::string field;
    std::string rule;
};

/// Checks every model invariant and returns the violations found; an empty
/// list means the model is valid. Never throws: violations are data.
std::vector<Violation> validate_device(const DeviceModel& model);

/// Throws std::invalid_argument listing all violations if the model is
/// invalid.
void require_valid(const DeviceModel& model);

/// Comb statistics of the internal resonators.
struct CombStats {
    double spacing = 0.0;       // mean consecutive spacing (Hz)
    double irregularity = 0.0;  // max |consecutive spacing - mean| (Hz)
};

/// Mean spacing and irregularity of the internal-resonator comb.
/// Requires at least two internal resonators ("comb undefined" otherwise).
CombStats comb_statistics(const ResonatorBank& bank);

}  // namespace qmem
