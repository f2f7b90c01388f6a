#pragma once

#include <utility>
#include <vector>

#include "qmem/dynamics.hpp"
#include "qmem/model.hpp"
#include "qmem/pulses.hpp"

namespace qmem {

/// Single-port reflection resonance parameters extracted by circle fitting:
///   S11(f) = a e^{i alpha} e^{-i 2 pi f tau}
///            [ 1 - (2 Q_l / |Q_c|) e^{i phi0} / (1 + 2i Q_l (f/f_r - 1)) ]
/// with 1/Q_l = 1/Q_i + cos(phi0)/|Q_c|.
struct ResonanceFit {
    double f_r = 0.0;           // resonance frequency, Hz
    double Q_l = 0.0;           // loaded quality factor
    double Q_c_mag = 0.0;       // |Q_c|, coupling quality factor magnitude
    double phi0 = 0.0;          // impedance-mismatch phase, rad
    double Q_i = 0.0;           // internal quality factor
    double amplitude = 0.0;     // off-resonant |S11|
    double phase_offset = 0.0;  // off-resonant arg(S11), rad
    double delay = 0.0;         // cable delay tau, s
    double rms_residual = 0.0;  // rms |model - data| over the scan
};

/// CW reflection map: element [i][j] = steady_state_reflection at
/// (flux_grid[i], freq_grid[j]). Rows are independent; `jobs` > 1 computes
/// them on that many threads.
std::vector<std::vector<Complex>> spectroscopy_map(const DeviceModel& model,
                                                   const std::vector<double>& flux_grid,
                                                   const std::vector<double>& freq_grid,
                                                   int jobs = 1);

/// Circle-fit pipeline for a single isolated reflection resonance:
/// (1) cable delay from a linear phase fit on the outer 20% of the span,
/// (2) algebraic (Taubin) circle fit, (3) arctangent phase-vs-frequency fit
/// for f_r and Q_l, (4) |Q_c| and phi0 from the circle diameter and the
/// off-resonant point, (5) Q_i from 1/Q_l = 1/Q_i + cos(phi0)/|Q_c|, then a
/// full Levenberg-Marquardt refinement of all parameters. Needs >= 8 points
/// spanning a few linewidths; throws "no resonance found" when the circle
/// fit degenerates. Scans in the opposite phasor convention (resonance
/// circle winding reversed, as produced by steady_state_reflection) fit via
/// the mirrored trace; negated phi0, alpha and tau map the result back onto
/// the original data, so callers never see the difference.
ResonanceFit fit_resonance(const std::vector<double>& freqs,
                           const std::vector<Complex>& s11);

/// Pulsed reflection map over (control voltage, carrier frequency).
struct ReflectionMap {
    std::vector<double> voltages;
    std::vector<double> frequencies;
    /// intensity[i][j]: peak |s_out|^2 inside the reference window for
    /// voltage i / frequency j, normalized so a switched-off (kappa = 0)
    /// run peaks at 1.
    std::vector<std::vector<double>> intensity;
};

struct ReflectionMapOptions {
    double dt = 1e-10;
    int jobs = 1;
};

/// For each grid cell: run a recording-only simulation at constant
/// flux = voltage_to_flux(voltage) with the pulse carrier at the given
/// absolute frequency, and record the peak reflected intensity inside
/// reference_window relative to the full-reflection reference run. The
/// minimum of the map marks the impedance-matched operating point.
ReflectionMap initial_reflection_map(const DeviceModel& model, const PulseSpec& pulse,
                                     const std::vector<double>& voltage_grid,
                                     const std::vector<double>& freq_grid,
                                     std::pair<double, double> reference_window,
                                     const ReflectionMapOptions& options = {});

}  // namespace qmem
