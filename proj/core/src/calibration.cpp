#include "qmem/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "qmem/parallel.hpp"

namespace qmem {

double matched_kappa(double g, double delta) {
    if (!(g > 0.0)) throw std::invalid_argument("coupling g must be > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("spacing must be > 0");
    return 2.0 * M_PI * g * g / delta;
}

double matched_flux(const DeviceModel& model, double target_kappa) {
    require_valid(model);
    if (!(target_kappa >= 0.0))
        throw std::invalid_argument("target kappa must be >= 0");
    const CouplerModel& c = model.coupler;
    if (target_kappa == 0.0) return c.switchoff_flux;

    // kappa grows monotonically from switchoff_flux to flux = 0.5 (the
    // effective mutual is strictly decreasing there), so bisection applies.
    double lo = c.switchoff_flux;
    double hi = 0.5;
    if (coupler_state(hi, c).kappa < target_kappa)
        throw std::runtime_error("kappa out of coupler range");
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double k = coupler_state(mid, c).kappa;
        if (std::abs(k - target_kappa) < 1e3) return mid;
        (k < target_kappa ? lo : hi) = mid;
        if (hi - lo < 1e-15) break;
    }
    return 0.5 * (lo + hi);
}

double revival_period(const SimulationResult& result,
                      std::pair<double, double> search_range) {
    if (result.states.empty()) throw std::invalid_argument("result holds no states");
    if (!(search_range.second > search_range.first) || !(search_range.first > 0.0))
        throw std::invalid_argument("search range must satisfy 0 < lo < hi");

    // The storage stretch: the longest contiguous switched-off run of the
    // sampled coupling trace.
    if (result.kappa.size() != result.states.size())
        throw std::invalid_argument("result lacks a coupling trace");
    double peak_kappa = 0.0;
    for (const double k : result.kappa) peak_kappa = std::max(peak_kappa, k);
    const double off = std::max(1.0, 1e-9 * peak_kappa);
    std::size_t k_lo = 0, k_hi = 0;
    for (std::size_t k = 0; k < result.kappa.size();) {
        if (result.kappa[k] > off) {
            ++k;
            continue;
        }
        std::size_t run_end = k;
        while (run_end + 1 < result.kappa.size() && result.kappa[run_end + 1] <= off)
            ++run_end;
        if (run_end - k > k_hi - k_lo) {
            k_lo = k;
            k_hi = run_end;
        }
        k = run_end + 1;
    }
    const double dt = result.input.dt;
    if (k_hi <= k_lo + 16)
        throw std::invalid_argument("storage segment too short for revival analysis");

    // Envelope of the collective internal amplitude, decimated to ~1 ns
    // (its bandwidth is set by the comb span, far below that).
    const auto stride = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(1e-9 / dt + 0.5)));
    std::vector<double> env;
    env.reserve((k_hi - k_lo) / stride + 1);
    for (std::size_t k = k_lo; k <= k_hi; k += stride) {
        Complex sum{0.0, 0.0};
        for (const Complex& bj : result.states[k].b) sum += bj;
        env.push_back(std::abs(sum));
    }
    const double dte = dt * static_cast<double>(stride);
    const std::size_t m = env.size();

    double mean = 0.0;
    for (const double e : env) mean += e;
    mean /= static_cast<double>(m);
    double spread = 0.0;
    for (double& e : env) {
        e -= mean;
        spread = std::max(spread, std::abs(e));
    }
    if (spread <= 1e-9 * (std::abs(mean) + 1e-300))
        throw std::runtime_error("no revival detected");

    auto lag_lo = static_cast<std::size_t>(
        std::max(1.0, std::ceil(search_range.first / dte)));
    auto lag_hi =
        static_cast<std::size_t>(std::floor(search_range.second / dte));
    if (lag_hi + 16 > m) lag_hi = m > 16 ? m - 16 : 0;
    if (lag_lo >= lag_hi)
        throw std::invalid_argument("revival search range exceeds storage span");

    // Unbiased autocorrelation of the mean-removed envelope.
    const auto acf = [&](std::size_t lag) {
        double acc = 0.0;
        for (std::size_t k = 0; k + lag < m; ++k) acc += env[k] * env[k + lag];
        return acc / static_cast<double>(m - lag);
    };

    std::size_t best = lag_lo;
    double best_val = acf(lag_lo);
    for (std::size_t lag = lag_lo + 1; lag <= lag_hi; ++lag) {
        const double v = acf(lag);
        if (v > best_val) {
            best_val = v;
            best = lag;
        }
    }
    if (!(best_val > 0.0)) throw std::runtime_error("no revival detected");

    double refined = static_cast<double>(best);
    if (best > lag_lo && best < lag_hi) {
        const double left = acf(best - 1);
        const double right = acf(best + 1);
        const double denom = left - 2.0 * best_val + right;
        if (denom < 0.0)
            refined += std::clamp(0.5 * (left - right) / denom, -1.0, 1.0);
    }
    return refined * dte;
}

std::pair<double, double> default_revival_search(const ResonatorBank& bank) {
    const CombStats stats = comb_statistics(bank);
    if (stats.irregularity > 0.01 * stats.spacing)
        return {0.6 / stats.irregularity, 1.4 / stats.irregularity};
    return {0.5 / stats.spacing, 1.5 / stats.spacing};
}

namespace {

double resolve_record_flux(const DeviceModel& model, const MemoryOptions& options) {
    if (!std::isnan(options.record_flux)) return options.record_flux;
    const CombStats stats = comb_statistics(model.bank);
    double g_mean = 0.0;
    for (const double g : model.bank.couplings) g_mean += std::abs(g);
    g_mean /= static_cast<double>(model.bank.couplings.size());
    return matched_flux(model, matched_kappa(g_mean, stats.spacing));
}

TemporalMode pulse_on_grid(const PulseSpec& pulse, double t0, double t_end, double dt,
                           double frame) {
    const auto n =
        static_cast<std::size_t>(std::ceil((t_end - t0) / dt - 1e-9)) + 1;
    return make_gaussian(pulse, {t0, dt, n}, frame);
}

}  // namespace

std::vector<MemoryPoint> run_memory_experiment(const DeviceModel& model,
                                               const PulseSpec& pulse,
                                               const std::vector<int>& cycles,
                                               const MemoryOptions& options) {
    require_valid(model);
    if (cycles.empty()) throw std::invalid_argument("cycles must not be empty");
    for (const int n : cycles)
        if (n < 1) throw std::invalid_argument("cycle counts must be >= 1");

    const double f_d = model.reference_input_frequency;
    const double flux = resolve_record_flux(model, options);
    const CombStats stats = comb_statistics(model.bank);

    const double t0 = pulse.center - 4.0 * pulse.fwhm;
    const double probe_end = pulse.center + 4.0 * pulse.fwhm + 3.0 / stats.spacing;
    const TemporalMode probe_input =
        pulse_on_grid(pulse, t0, probe_end, options.dt, f_d);
    const ControlSchedule probe_schedule = constant_flux_schedule(
        flux, t0, probe_input.end_time(), options.ramp);
    const SimulationResult probe = simulate(model, probe_input, probe_schedule);

    std::vector<MemoryPoint> points(cycles.size());
    const auto run_one = [&](std::size_t idx) {
        const int n = cycles[idx];
        ControlSchedule protocol = build_protocol(model, flux, n, probe);
        const TemporalMode input =
            pulse_on_grid(pulse, t0, protocol.end_time(), options.dt, f_d);
        protocol.segments.back().t_end = input.end_time();
        const SimulationResult run = simulate(model, input, protocol);

        const ControlSchedule mirror =
            constant_direct_schedule(0.0, 0.0, t0, input.end_time(), options.ramp);
        const SimulationResult reference = simulate(model, input, mirror);

        const double release_start = protocol.segments[2].t_start;
        MemoryPoint& point = points[idx];
        point.cycles = n;
        point.storage_time =
            protocol.segments[1].t_end - protocol.segments[1].t_start;
        point.release_time = release_start;
        point.report = fidelity(
            reference.output, run.output,
            {pulse.center - 3.0 * pulse.fwhm, pulse.center + 3.0 * pulse.fwhm},
            {{release_start, input.end_time()}});
    };
    parallel_for(cycles.size(), options.jobs, run_one);
    return points;
}

double memory_cycle_time(const DeviceModel& model, const PulseSpec& pulse,
                         const MemoryOptions& options) {
    require_valid(model);
    const double f_d = model.reference_input_frequency;
    const double flux = resolve_record_flux(model, options);
    const CombStats stats = comb_statistics(model.bank);
    const std::pair<double, double> range = default_revival_search(model.bank);

    const double t0 = pulse.center - 4.0 * pulse.fwhm;
    const double probe_end = pulse.center + 4.0 * pulse.fwhm + 3.0 / stats.spacing;
    const TemporalMode probe_input =
        pulse_on_grid(pulse, t0, probe_end, options.dt, f_d);
    const ControlSchedule probe_schedule = constant_flux_schedule(
        flux, t0, probe_input.end_time(), options.ramp);
    const SimulationResult probe = simulate(model, probe_input, probe_schedule);

    std::size_t peak = 0;
    for (std::size_t k = 1; k < probe.states.size(); ++k)
        if (std::norm(probe.states[k].a_c) > std::norm(probe.states[peak].a_c)) peak = k;
    const std::vector<double> dark = detect_dark_states(probe, probe.states[peak].t);
    if (dark.empty()) throw std::runtime_error("no dark state found");
    const double t1 = dark.front();

    const double span = 2.2 * range.second;
    const TemporalMode input = pulse_on_grid(pulse, t0, t1 + span, options.dt, f_d);
    ControlSchedule hold = constant_flux_schedule(flux, t0, t1, options.ramp);
    hold.append_flux(input.end_time(), model.coupler.switchoff_flux);
    const SimulationResult stored = simulate(model, input, hold);
    return revival_period(stored, range);
}

ResonatorBank with_symmetric_disorder(const ResonatorBank& bank, double delta) {
    if (delta == 0.0) return bank;
    const std::size_t n = bank.internal.size();
    if (n < 3)
        throw std::invalid_argument(
            "symmetric disorder needs at least 3 internal resonators");
    std::vector<double> spacing(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j)
        spacing[j] = bank.internal[j + 1].frequency - bank.internal[j].frequency;
    spacing.front() += delta;
    spacing.back() -= delta;

    ResonatorBank out = bank;
    for (std::size_t j = 1; j < n; ++j)
        out.internal[j].frequency = out.internal[j - 1].frequency + spacing[j - 1];
    return out;
}

ResonatorBank with_random_disorder(const ResonatorBank& bank, double delta,
                                   std::uint64_t seed) {
    const std::size_t n = bank.internal.size();
    if (n < 2) throw std::invalid_argument("comb undefined: need at least two internal resonators");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-delta, delta);

    ResonatorBank out = bank;
    for (std::size_t j = 1; j < n; ++j) {
        const double spacing =
            bank.internal[j].frequency - bank.internal[j - 1].frequency + jitter(rng);
        out.internal[j].frequency = out.internal[j - 1].frequency + spacing;
    }
    return out;
}

}  // namespace qmem
