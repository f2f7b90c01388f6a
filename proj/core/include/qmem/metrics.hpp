#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qmem/dynamics.hpp"
#include "qmem/model.hpp"

namespace qmem {

/// Temporal-mode overlap result. The reference f is normalized to unit
/// energy over the reference window and the response g is scaled by the
/// identical factor, so F compares like with like:
///   C[tau] = |sum_t f(t) conj(g(t + tau))|^2 at integer-sample lags,
///   F = max_tau C[tau].
/// `response_energy` is sum |g|^2 over the full response trace; by
/// Cauchy-Schwarz F <= response_energy.
struct FidelityReport {
    double F = 0.0;
    double best_lag = 0.0;                // tau*, s
    double response_energy = 0.0;         // sum |g|^2
    std::vector<double> correlation;      // C[tau] per lag
    double first_lag = 0.0;               // lag of correlation[0], s
    double lag_step = 0.0;                // dt, s
};

/// Exponential decay fit F(t) = amplitude * exp(-t / T_decay).
/// A constant series yields T_decay = +infinity with zero residual.
struct DecayFit {
    double T_decay = 0.0;
    double amplitude = 0.0;
    double residual_rms = 0.0;
    double Q_eff = 0.0;  // 2 pi f_ref T_decay
};

/// Photon-number conventions for estimate_photons: `effective_duration`
/// uses the Gaussian-equivalent duration fwhm*sqrt(pi/(4 ln2)) (energy of a
/// Gaussian of peak power P); `plain_fwhm` multiplies power by the bare
/// fwhm. A -135 dBm, 57 ns, 6 GHz pulse gives about 0.5 photons under the
/// default; quoted mean photon numbers depend strongly on which duration
/// and power (peak vs average) a setup reports, so the convention is a
/// parameter rather than a fact.
enum class PhotonConvention { effective_duration, plain_fwhm };

/// Cross-correlation fidelity between a reference mode and a response mode.
/// `reference_window` selects the reference samples that define mode f (and
/// its normalization). C[tau] is computed against response samples inside
/// `response_window` when given (to exclude e.g. the initial reflection);
/// response_energy always sums the full response. Both modes must share dt,
/// frame, and a sample-aligned grid. Throws "reference has no energy" on a
/// zero reference.
FidelityReport fidelity(const TemporalMode& reference, const TemporalMode& response,
                        std::pair<double, double> reference_window,
                        std::optional<std::pair<double, double>> response_window =
                            std::nullopt);

/// (energy of s_out inside release_window) / (total energy of s_in).
double efficiency(const SimulationResult& result,
                  std::pair<double, double> release_window);

/// Least-squares exponential fit: linear regression on log F followed by
/// one Gauss-Newton refinement of (amplitude, T_decay) in the nonlinear
/// model. Needs >= 3 points, all fidelities > 0 ("log-fit undefined;
/// filter or offset" otherwise). Q_eff = 2 pi f_ref T_decay.
DecayFit fit_decay(const std::vector<double>& storage_times,
                   const std::vector<double>& fidelities, double f_ref);

/// 2 pi f_ref t_decay.
double effective_quality_factor(double f_ref, double t_decay);

/// Mean photon number of a Gaussian pulse of the given peak power:
/// <n> = 10^((power_dbm - 30)/10) * duration / (h f).
double estimate_photons(double power_dbm, double fwhm, double f,
                        PhotonConvention convention = PhotonConvention::effective_duration);

}  // namespace qmem
