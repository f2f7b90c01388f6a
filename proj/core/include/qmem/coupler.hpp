#pragma once

namespace qmem {

/// RF-SQUID active coupler: a single Josephson junction shunted to ground
/// by a superconducting loop, acting as a flux-tunable inductance between
/// the common resonator and the external waveguide.
///
/// The flux response is the non-hysteretic screening relation
///     phi + beta_L * sin(phi) = 2*pi*flux,  beta_L = 2*pi*L*I_c/Phi0 < 1,
/// and the effective dimensionless mutual is
///     m(flux) = beta_L*cos(phi) / (1 + beta_L*cos(phi)).
/// Both the external coupling rate and the common-resonator frequency pull
/// are quadratic in m(flux) - m(switchoff_flux), with the two scale
/// constants calibrated against a designed operating point.
struct CouplerModel {
    double critical_current = 0.0;    // junction critical current I_c, A
    double loop_inductance = 0.0;     // SQUID loop inductance L, H
    double wirebond_inductance = 0.0; // parasitic bond inductance, H (documentation only;
                                      // fold it into loop_inductance to include it)
    double flux_per_volt = 0.0;       // control-line transfer coefficient, Phi0/V
    double kappa_scale = 0.0;         // Hz, maps (m - m_off)^2 to kappa
    double pull_scale = 0.0;          // Hz, maps (m - m_off)^2 to -frequency pull
    double flux_offset = 0.0;         // residual flux at zero control voltage, Phi0
    double switchoff_flux = 0.0;      // flux where kappa vanishes exactly, Phi0
};

/// Coupler output at a given flux.
struct CouplerState {
    double kappa = 0.0;        // external coupling linewidth, Hz (linear), >= 0
    double common_pull = 0.0;  // common-resonator frequency shift, Hz, <= 0
};

/// Screening parameter beta_L = 2*pi*L*I_c/Phi0.
double screening_parameter(const CouplerModel& model);

/// Solves phi + beta_L*sin(phi) = 2*pi*flux for the junction phase.
/// Safeguarded Newton iteration with bisection fallback; the residual is
/// driven below 1e-12 rad. Throws for beta_L >= 1 ("hysteretic regime
/// unsupported"); the map is single-valued only below that.
double junction_phase(double flux, const CouplerModel& model);

/// Effective dimensionless mutual m(flux).
double effective_mutual(double flux, const CouplerModel& model);

/// kappa and common-resonator pull at the given flux (in Phi0 units).
CouplerState coupler_state(double flux, const CouplerModel& model);

/// Returns a copy of `model` with kappa_scale and pull_scale set so that
/// coupler_state(target_flux) reproduces (target_kappa, target_pull)
/// exactly (closed-form division). Requires target_kappa > 0,
/// target_pull < 0, 0 < target_flux < 0.5, and a non-degenerate mutual at
/// the target flux.
CouplerModel calibrate_coupler(double target_flux, double target_kappa, double target_pull,
                               const CouplerModel& model);

/// Affine control-line map: flux = flux_offset + flux_per_volt * voltage.
double voltage_to_flux(double voltage, const CouplerModel& model);

/// Inverse of voltage_to_flux; requires flux_per_volt != 0.
double flux_to_voltage(double flux, const CouplerModel& model);

}  // namespace qmem
