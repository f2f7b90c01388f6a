#pragma once

#include <cstddef>
#include <vector>

#include "qmem/model.hpp"
#include "qmem/schedule.hpp"

namespace qmem {

/// Instantaneous amplitudes of every mode, in sqrt(photon) units.
struct SystemState {
    double t = 0.0;
    Complex a_c{0.0, 0.0};    // common resonator
    std::vector<Complex> b;   // internal resonators, one per comb line
};

/// |a_c|^2 + sum_j |b_j|^2, in photons.
double stored_energy(const SystemState& state);

/// Full record of one time-domain run. `input`, `output` and `states` share
/// the sample grid (t0, dt, length). `net_input[k]` is the co-integrated
/// cumulative waveguide balance int_0^{t_k} (|s_in|^2 - |s_out|^2) dt, which
/// for a lossless device equals the stored energy gain up to integrator
/// truncation; it is carried as an extra state through the integrator so the
/// comparison measures integration error rather than quadrature error.
struct SimulationResult {
    std::vector<SystemState> states;
    TemporalMode input;
    TemporalMode output;
    ControlSchedule schedule;
    std::vector<double> net_input;
    std::vector<double> kappa;  // external coupling at each sample, Hz

    /// a_c(t) as a temporal mode on the result grid.
    TemporalMode common_mode() const;
    /// sum_j b_j(t) on the result grid (the collective internal amplitude).
    TemporalMode internal_superposition() const;
    /// b_j(t) on the result grid.
    TemporalMode internal_mode(std::size_t j) const;
};

/// Integrates the single-port coupled-mode system in the frame rotating at
/// model.reference_input_frequency f_d:
///
///   da_c/dt = -[ i 2pi (f_c + pull(t) - f_d) + pi kappa(t) + pi gamma_c ] a_c
///             - i 2pi sum_j g_j b_j + sqrt(2pi kappa(t)) s_in(t)
///   db_j/dt = -[ i 2pi (f_j - f_d) + pi gamma_j ] b_j - i 2pi g_j a_c
///   s_out   = sqrt(2pi kappa(t)) a_c - s_in
///
/// with (kappa, pull)(t) supplied by the schedule through the coupler model.
/// Fixed-step classical RK4 on the input grid; s_in at half steps is linear
/// interpolation of the input samples. Requires dt equal to input.dt,
/// input.frame_frequency equal to the reference frequency, the schedule to
/// cover the input span, and dt <= 1/(20 max rotating-frame detuning)
/// ("step too coarse" otherwise).
SimulationResult simulate(const DeviceModel& model, const TemporalMode& input,
                          const ControlSchedule& schedule, double dt);

/// Same with dt taken from the input grid.
SimulationResult simulate(const DeviceModel& model, const TemporalMode& input,
                          const ControlSchedule& schedule);

/// Closed-form CW reflection coefficient at a fixed flux:
///   S11 = 2pi kappa / [ i 2pi (f_c + pull - f) + pi kappa + pi gamma_c
///         + sum_j (2pi g_j)^2 / (i 2pi (f_j - f) + pi gamma_j) ] - 1.
/// kappa = 0 gives exactly -1; a lossless device gives |S11| = 1 everywhere.
Complex steady_state_reflection(const DeviceModel& model, double drive_frequency,
                                double flux);

}  // namespace qmem
