#include "qmem/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qmem/calibration.hpp"

namespace qmem {

TemporalMode make_gaussian(const PulseSpec& spec, const SampleGrid& grid,
                           double frame_frequency) {
    if (!(spec.fwhm > 0.0)) throw std::invalid_argument("pulse fwhm must be > 0");
    if (!(grid.dt > 0.0) || grid.n < 2)
        throw std::invalid_argument("grid needs dt > 0 and at least two samples");
    const double t_end = grid.t0 + static_cast<double>(grid.n - 1) * grid.dt;
    const double slack = 1e-12;
    if (grid.t0 > spec.center - 3.0 * spec.fwhm + slack ||
        t_end < spec.center + 3.0 * spec.fwhm - slack)
        throw std::invalid_argument("pulse truncated: grid must span center +/- 3 fwhm");

    TemporalMode mode;
    mode.t0 = grid.t0;
    mode.dt = grid.dt;
    mode.frame_frequency = frame_frequency;
    mode.samples.resize(grid.n);
    const double four_ln2 = 4.0 * std::log(2.0);
    for (std::size_t k = 0; k < grid.n; ++k) {
        const double u = mode.time_at(k) - spec.center;
        const double envelope =
            spec.amplitude * std::exp(-four_ln2 * u * u / (spec.fwhm * spec.fwhm));
        const double phase = 2.0 * M_PI * spec.carrier_detuning * u;
        mode.samples[k] = envelope * Complex(std::cos(phase), std::sin(phase));
    }
    return mode;
}

std::vector<double> detect_dark_states(const SimulationResult& result, double after,
                                       double fraction) {
    const std::size_t n = result.states.size();
    std::vector<double> found;
    if (n < 3) return found;

    std::vector<double> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = std::norm(result.states[k].a_c);

    double running_peak = p[0];
    for (std::size_t k = 1; k + 1 < n; ++k) {
        running_peak = std::max(running_peak, p[k]);
        if (result.states[k].t <= after) continue;
        if (running_peak <= 0.0) continue;
        if (!(p[k] <= p[k - 1] && p[k] < p[k + 1])) continue;
        if (p[k] > fraction * running_peak) continue;

        // Parabolic refinement on the three samples around the minimum.
        const double denom = p[k - 1] - 2.0 * p[k] + p[k + 1];
        double shift = 0.0;
        if (denom > 0.0) shift = 0.5 * (p[k - 1] - p[k + 1]) / denom;
        shift = std::clamp(shift, -1.0, 1.0);
        found.push_back(result.states[k].t + shift * result.input.dt);
    }
    return found;
}

namespace {

// Zero-padded copy of `input` covering at least [input.t0, t_end].
TemporalMode extend_with_zeros(const TemporalMode& input, double t_end) {
    TemporalMode out = input;
    const auto n = static_cast<std::size_t>(
                       std::ceil((t_end - input.t0) / input.dt - 1e-9)) +
                   1;
    if (n > out.samples.size()) out.samples.resize(n, Complex(0.0, 0.0));
    return out;
}

// Revival period for the release timing. A recording-phase beat period will
// not do: with the coupler on, the comb hybridizes with the loaded common
// mode and the effective spacings shift by up to ~(2 pi g)^2 / (pi kappa)^2,
// tens of percent at the matched point. The release must lock to the
// switched-off dynamics, so a disordered comb gets its period from a
// dedicated storage simulation.
double storage_revival_period(const DeviceModel& model, double record_flux, double t1,
                              const SimulationResult& probe) {
    const CombStats stats = comb_statistics(model.bank);
    if (stats.irregularity <= 0.01 * stats.spacing) return 1.0 / stats.spacing;

    const double span = 4.0 / stats.spacing;
    const double t0 = probe.input.t0;
    TemporalMode input = extend_with_zeros(probe.input, t1 + span);
    ControlSchedule hold = constant_flux_schedule(record_flux, t0, t1,
                                                  probe.schedule.ramp);
    hold.append_flux(input.end_time(), model.coupler.switchoff_flux);
    const SimulationResult stored = simulate(model, input, hold);
    return revival_period(stored, {0.5 / stats.spacing, 1.5 / stats.spacing});
}

}  // namespace

ControlSchedule build_protocol(const DeviceModel& model, double record_flux,
                               int store_cycles, const SimulationResult& probe,
                               double release_until) {
    require_valid(model);
    if (store_cycles < 1) throw std::invalid_argument("store_cycles must be >= 1");
    if (probe.schedule.segments.size() != 1 || probe.schedule.segments[0].direct ||
        std::abs(probe.schedule.segments[0].flux - record_flux) > 1e-9)
        throw std::invalid_argument(
            "probe must be a recording-only run at constant record_flux");
    if (probe.states.empty()) throw std::invalid_argument("probe holds no states");

    std::size_t peak = 0;
    for (std::size_t k = 1; k < probe.states.size(); ++k)
        if (std::norm(probe.states[k].a_c) > std::norm(probe.states[peak].a_c)) peak = k;
    const std::vector<double> dark = detect_dark_states(probe, probe.states[peak].t);
    if (dark.empty()) throw std::runtime_error("no dark state found");
    const double t1 = dark.front();

    const double T_rev = storage_revival_period(model, record_flux, t1, probe);
    const double t0 = probe.input.t0;
    const double store_end = t1 + static_cast<double>(store_cycles) * T_rev;
    double horizon = release_until;
    if (!(horizon > 0.0) || horizon <= store_end) horizon = store_end + (t1 - t0);

    ControlSchedule protocol;
    protocol.ramp = probe.schedule.ramp;
    protocol.segments.push_back({t0, t1, false, record_flux, {}});
    protocol.segments.push_back({t1, store_end, false, model.coupler.switchoff_flux, {}});
    protocol.segments.push_back({store_end, horizon, false, record_flux, {}});
    require_valid(protocol);
    return protocol;
}

}  // namespace qmem
