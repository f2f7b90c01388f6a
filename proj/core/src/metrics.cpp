#include "qmem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qmem {

namespace {

// Inclusive index range of samples with time inside [w0, w1]; empty ranges
// come back as (1, 0).
std::pair<std::ptrdiff_t, std::ptrdiff_t> window_indices(const TemporalMode& mode,
                                                         double w0, double w1) {
    auto lo = static_cast<std::ptrdiff_t>(std::ceil((w0 - mode.t0) / mode.dt - 1e-9));
    auto hi = static_cast<std::ptrdiff_t>(std::floor((w1 - mode.t0) / mode.dt + 1e-9));
    lo = std::max<std::ptrdiff_t>(lo, 0);
    hi = std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(mode.size()) - 1);
    if (hi < lo) return {1, 0};
    return {lo, hi};
}

}  // namespace

FidelityReport fidelity(const TemporalMode& reference, const TemporalMode& response,
                        std::pair<double, double> reference_window,
                        std::optional<std::pair<double, double>> response_window) {
    if (reference.size() < 2 || response.size() < 2)
        throw std::invalid_argument("modes need at least two samples");
    if (std::abs(reference.dt - response.dt) > 1e-9 * reference.dt)
        throw std::invalid_argument("modes must share the sample interval");
    if (reference.frame_frequency != response.frame_frequency)
        throw std::invalid_argument("modes must share the rotating frame");
    const double shift = (reference.t0 - response.t0) / reference.dt;
    const double shift_rounded = std::round(shift);
    if (std::abs(shift - shift_rounded) > 1e-6)
        throw std::invalid_argument("grids must be sample-aligned");
    const auto s0 = static_cast<std::ptrdiff_t>(shift_rounded);

    const auto [i_lo, i_hi] =
        window_indices(reference, reference_window.first, reference_window.second);
    double ref_energy = 0.0;
    for (std::ptrdiff_t i = i_lo; i <= i_hi; ++i)
        ref_energy += std::norm(reference.samples[static_cast<std::size_t>(i)]);
    if (!(ref_energy > 0.0)) throw std::runtime_error("reference has no energy");

    std::ptrdiff_t j_lo = 0;
    std::ptrdiff_t j_hi = static_cast<std::ptrdiff_t>(response.size()) - 1;
    if (response_window) {
        std::tie(j_lo, j_hi) =
            window_indices(response, response_window->first, response_window->second);
        if (j_hi < j_lo) throw std::invalid_argument("response window contains no samples");
    }

    double response_energy_raw = 0.0;
    for (const Complex& g : response.samples) response_energy_raw += std::norm(g);

    FidelityReport report;
    report.lag_step = reference.dt;
    report.response_energy = response_energy_raw / ref_energy;

    // C[lag] = |sum_i f(t_i) conj(g(t_i + lag))|^2 over integer-sample lags,
    // with f unit-normalized over its window and g carrying the same scale.
    const std::ptrdiff_t lag_lo = j_lo - s0 - i_hi;
    const std::ptrdiff_t lag_hi = j_hi - s0 - i_lo;
    report.first_lag = static_cast<double>(lag_lo) * reference.dt;
    report.correlation.resize(static_cast<std::size_t>(lag_hi - lag_lo + 1));

    std::ptrdiff_t best = lag_lo;
    for (std::ptrdiff_t lag = lag_lo; lag <= lag_hi; ++lag) {
        const std::ptrdiff_t a = std::max(i_lo, j_lo - s0 - lag);
        const std::ptrdiff_t b = std::min(i_hi, j_hi - s0 - lag);
        Complex acc{0.0, 0.0};
        for (std::ptrdiff_t i = a; i <= b; ++i)
            acc += reference.samples[static_cast<std::size_t>(i)] *
                   std::conj(response.samples[static_cast<std::size_t>(i + s0 + lag)]);
        const double c = std::norm(acc) / (ref_energy * ref_energy);
        report.correlation[static_cast<std::size_t>(lag - lag_lo)] = c;
        if (c > report.F) {
            report.F = c;
            best = lag;
        }
    }
    report.best_lag = static_cast<double>(best) * reference.dt;
    return report;
}

double efficiency(const SimulationResult& result,
                  std::pair<double, double> release_window) {
    double input_energy = 0.0;
    for (const Complex& s : result.input.samples) input_energy += std::norm(s);
    if (!(input_energy > 0.0)) throw std::invalid_argument("input has no energy");

    const auto [lo, hi] =
        window_indices(result.output, release_window.first, release_window.second);
    double out_energy = 0.0;
    for (std::ptrdiff_t k = lo; k <= hi; ++k)
        out_energy += std::norm(result.output.samples[static_cast<std::size_t>(k)]);
    return out_energy / input_energy;
}

DecayFit fit_decay(const std::vector<double>& storage_times,
                   const std::vector<double>& fidelities, double f_ref) {
    const std::size_t n = storage_times.size();
    if (n != fidelities.size())
        throw std::invalid_argument("times and fidelities must pair up");
    if (n < 3) throw std::invalid_argument("need at least 3 points");
    for (const double f : fidelities)
        if (!(f > 0.0)) throw std::invalid_argument("log-fit undefined; filter or offset");

    DecayFit fit;
    const auto [min_it, max_it] = std::minmax_element(fidelities.begin(), fidelities.end());
    if (*min_it == *max_it) {
        fit.T_decay = std::numeric_limits<double>::infinity();
        fit.amplitude = *min_it;
        fit.residual_rms = 0.0;
        fit.Q_eff = std::numeric_limits<double>::infinity();
        return fit;
    }

    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = std::log(fidelities[i]);
        st += storage_times[i];
        sy += y;
        stt += storage_times[i] * storage_times[i];
        sty += storage_times[i] * y;
    }
    const double den = static_cast<double>(n) * stt - st * st;
    if (den == 0.0) throw std::invalid_argument("storage times must not be all equal");
    const double slope = (static_cast<double>(n) * sty - st * sy) / den;
    const double intercept = (sy - slope * st) / static_cast<double>(n);
    double A = std::exp(intercept);
    double T = -1.0 / slope;

    // One Gauss-Newton step in the nonlinear model; the log fit weights
    // small fidelities too strongly otherwise.
    if (std::isfinite(T) && T > 0.0) {
        double jaa = 0.0, jat = 0.0, jtt = 0.0, ra = 0.0, rt2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = A * std::exp(-storage_times[i] / T);
            const double r = fidelities[i] - m;
            const double da = m / A;
            const double dtc = m * storage_times[i] / (T * T);
            jaa += da * da;
            jat += da * dtc;
            jtt += dtc * dtc;
            ra += da * r;
            rt2 += dtc * r;
        }
        const double det = jaa * jtt - jat * jat;
        if (det > 0.0) {
            const double dA = (jtt * ra - jat * rt2) / det;
            const double dT = (jaa * rt2 - jat * ra) / det;
            if (A + dA > 0.0) A += dA;
            if (T + dT > 0.0) T += dT;
        }
    }

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::isfinite(T) ? A * std::exp(-storage_times[i] / T) : A;
        ss += (fidelities[i] - m) * (fidelities[i] - m);
    }
    fit.T_decay = T;
    fit.amplitude = A;
    fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
    fit.Q_eff = effective_quality_factor(f_ref, T);
    return fit;
}

double effective_quality_factor(double f_ref, double t_decay) {
    return 2.0 * M_PI * f_ref * t_decay;
}

double estimate_photons(double power_dbm, double fwhm, double f,
                        PhotonConvention convention) {
    if (!(fwhm > 0.0)) throw std::invalid_argument("fwhm must be > 0");
    if (!(f > 0.0)) throw std::invalid_argument("frequency must be > 0");
    const double watts = std::pow(10.0, (power_dbm - 30.0) / 10.0);
    const double duration = convention == PhotonConvention::effective_duration
                                ? fwhm * std::sqrt(M_PI / (4.0 * std::log(2.0)))
                                : fwhm;
    return watts * duration / (planck_constant * f);
}

}  // namespace qmem
