#include "qmem/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmem {

double stored_energy(const SystemState& state) {
    double e = std::norm(state.a_c);
    for (const Complex& bj : state.b) e += std::norm(bj);
    return e;
}

TemporalMode SimulationResult::common_mode() const {
    TemporalMode m = input;
    for (std::size_t k = 0; k < states.size(); ++k) m.samples[k] = states[k].a_c;
    return m;
}

TemporalMode SimulationResult::internal_superposition() const {
    TemporalMode m = input;
    for (std::size_t k = 0; k < states.size(); ++k) {
        Complex sum{0.0, 0.0};
        for (const Complex& bj : states[k].b) sum += bj;
        m.samples[k] = sum;
    }
    return m;
}

TemporalMode SimulationResult::internal_mode(std::size_t j) const {
    TemporalMode m = input;
    for (std::size_t k = 0; k < states.size(); ++k) m.samples[k] = states[k].b[j];
    return m;
}

namespace {

// Mode amplitudes plus the co-integrated waveguide balance.
struct Stage {
    Complex a;
    std::vector<Complex> b;
    double e;
};

struct RateTable {
    Complex a_self;               // -(i 2pi detuning_c + pi kappa + pi gamma_c), kappa added per call
    std::vector<Complex> b_self;  // -(i 2pi detuning_j + pi gamma_j)
    std::vector<double> g2pi;     // 2pi g_j
    double gamma_c_pi;
    double detuning_c_2pi;
};

double max_detuning(const DeviceModel& model, const ControlSchedule& schedule) {
    const double f_d = model.reference_input_frequency;
    double det = 0.0;
    for (const ResonatorSpec& r : model.bank.internal)
        det = std::max(det, std::abs(r.frequency - f_d));
    // Pull varies between segment plateaus; the cosine fades interpolate, so
    // extremes sit on the plateaus themselves.
    for (const ControlSegment& seg : schedule.segments) {
        const CouplerState s = segment_state(seg, model.coupler);
        det = std::max(det,
                       std::abs(model.bank.common.frequency + s.common_pull - f_d));
    }
    return det;
}

}  // namespace

SimulationResult simulate(const DeviceModel& model, const TemporalMode& input,
                          const ControlSchedule& schedule) {
    return simulate(model, input, schedule, input.dt);
}

SimulationResult simulate(const DeviceModel& model, const TemporalMode& input,
                          const ControlSchedule& schedule, double dt) {
    require_valid(model);
    require_valid(schedule);
    if (input.size() < 2 || !(input.dt > 0.0))
        throw std::invalid_argument("input must supply at least two samples with dt > 0");
    if (std::abs(dt - input.dt) > 1e-9 * input.dt)
        throw std::invalid_argument("dt must equal the input sample interval");
    if (input.frame_frequency != model.reference_input_frequency)
        throw std::invalid_argument(
            "input frame must rotate at the model reference_input_frequency");
    if (input.t0 < schedule.start_time() - 1e-12 ||
        input.end_time() > schedule.end_time() + 1e-12)
        throw std::out_of_range("schedule does not cover simulation span");
    const double det = max_detuning(model, schedule);
    if (det > 0.0 && dt > 1.0 / (20.0 * det))
        throw std::invalid_argument("step too coarse: dt exceeds 1/(20 max detuning)");

    const std::size_t n = input.size();
    const std::size_t nb = model.bank.internal.size();
    const double f_d = model.reference_input_frequency;
    const double two_pi = 2.0 * M_PI;

    RateTable rt;
    rt.gamma_c_pi = M_PI * model.bank.common.gamma;
    rt.detuning_c_2pi = two_pi * (model.bank.common.frequency - f_d);
    rt.b_self.resize(nb);
    rt.g2pi.resize(nb);
    for (std::size_t j = 0; j < nb; ++j) {
        rt.b_self[j] = Complex(-M_PI * model.bank.internal[j].gamma,
                               -two_pi * (model.bank.internal[j].frequency - f_d));
        rt.g2pi[j] = two_pi * model.bank.couplings[j];
    }

    const auto drive_at = [&](double t) -> Complex {
        const double x = (t - input.t0) / input.dt;
        if (x <= 0.0) return input.samples.front();
        const auto last = static_cast<double>(n - 1);
        if (x >= last) return input.samples.back();
        const auto k = static_cast<std::size_t>(x);
        const double frac = x - static_cast<double>(k);
        return input.samples[k] + frac * (input.samples[k + 1] - input.samples[k]);
    };

    // d/dt of (a, b, e) at time t given amplitudes y. The balance state e
    // integrates |s_in|^2 - |s_out|^2 with s_out built from the same stage
    // amplitudes, so comparing it with the stored energy isolates integrator
    // truncation from quadrature error.
    const auto derivative = [&](double t, const Stage& y, Stage& dy) {
        const CouplerState cs = schedule_state(t, schedule, model.coupler);
        const double kappa = std::max(0.0, cs.kappa);
        const double root = std::sqrt(two_pi * kappa);
        const Complex s_in = drive_at(t);

        Complex sum_gb{0.0, 0.0};
        for (std::size_t j = 0; j < nb; ++j) sum_gb += rt.g2pi[j] * y.b[j];

        const Complex a_coeff(-(M_PI * kappa + rt.gamma_c_pi),
                              -(rt.detuning_c_2pi + two_pi * cs.common_pull));
        dy.a = a_coeff * y.a + Complex(0.0, -1.0) * sum_gb + root * s_in;
        for (std::size_t j = 0; j < nb; ++j)
            dy.b[j] = rt.b_self[j] * y.b[j] + Complex(0.0, -rt.g2pi[j]) * y.a;

        const Complex s_out = root * y.a - s_in;
        dy.e = std::norm(s_in) - std::norm(s_out);
    };

    SimulationResult result;
    result.input = input;
    result.schedule = schedule;
    result.output = input;
    result.states.resize(n);
    result.net_input.resize(n);
    result.kappa.resize(n);

    Stage y{Complex(0.0, 0.0), std::vector<Complex>(nb, Complex(0.0, 0.0)), 0.0};
    Stage k1 = y, k2 = y, k3 = y, k4 = y, tmp = y;

    const auto record = [&](std::size_t k) {
        const double t = input.time_at(k);
        result.states[k].t = t;
        result.states[k].a_c = y.a;
        result.states[k].b = y.b;
        result.net_input[k] = y.e;
        const CouplerState cs = schedule_state(t, schedule, model.coupler);
        result.kappa[k] = std::max(0.0, cs.kappa);
        const double root = std::sqrt(two_pi * result.kappa[k]);
        result.output.samples[k] = root * y.a - input.samples[k];
    };

    record(0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double t = input.time_at(k);
        const double h = input.dt;

        derivative(t, y, k1);
        tmp.a = y.a + 0.5 * h * k1.a;
        for (std::size_t j = 0; j < nb; ++j) tmp.b[j] = y.b[j] + 0.5 * h * k1.b[j];
        tmp.e = y.e + 0.5 * h * k1.e;
        derivative(t + 0.5 * h, tmp, k2);
        tmp.a = y.a + 0.5 * h * k2.a;
        for (std::size_t j = 0; j < nb; ++j) tmp.b[j] = y.b[j] + 0.5 * h * k2.b[j];
        tmp.e = y.e + 0.5 * h * k2.e;
        derivative(t + 0.5 * h, tmp, k3);
        tmp.a = y.a + h * k3.a;
        for (std::size_t j = 0; j < nb; ++j) tmp.b[j] = y.b[j] + h * k3.b[j];
        tmp.e = y.e + h * k3.e;
        derivative(t + h, tmp, k4);

        const double sixth = h / 6.0;
        y.a += sixth * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
        for (std::size_t j = 0; j < nb; ++j)
            y.b[j] += sixth * (k1.b[j] + 2.0 * k2.b[j] + 2.0 * k3.b[j] + k4.b[j]);
        y.e += sixth * (k1.e + 2.0 * k2.e + 2.0 * k3.e + k4.e);

        record(k + 1);
    }
    return result;
}

Complex steady_state_reflection(const DeviceModel& model, double drive_frequency,
                                double flux) {
    require_valid(model);
    const double two_pi = 2.0 * M_PI;
    const CouplerState cs = coupler_state(flux, model.coupler);
    const double kappa = std::max(0.0, cs.kappa);

    Complex denom(M_PI * kappa + M_PI * model.bank.common.gamma,
                  two_pi * (model.bank.common.frequency + cs.common_pull -
                            drive_frequency));
    for (std::size_t j = 0; j < model.bank.internal.size(); ++j) {
        const double g = model.bank.couplings[j];
        if (g == 0.0) continue;
        const Complex pole(M_PI * model.bank.internal[j].gamma,
                           two_pi * (model.bank.internal[j].frequency - drive_frequency));
        // Lossless comb line driven exactly on resonance: the line pins the
        // common mode, giving complete reflection.
        if (pole == Complex(0.0, 0.0)) return Complex(-1.0, 0.0);
        denom += (two_pi * g) * (two_pi * g) / pole;
    }
    return two_pi * kappa / denom - 1.0;
}

}  // namespace qmem
