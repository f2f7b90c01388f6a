#include "qmem/coupler.hpp"

#include <cmath>
#include <stdexcept>

#include "qmem/model.hpp"

namespace qmem {

double screening_parameter(const CouplerModel& model) {
    return 2.0 * M_PI * model.loop_inductance * model.critical_current / flux_quantum;
}

double junction_phase(double flux, const CouplerModel& model) {
    const double beta = screening_parameter(model);
    if (beta >= 1.0) throw std::domain_error("hysteretic regime unsupported: beta_L >= 1");
    const double target = 2.0 * M_PI * flux;

    // phi + beta*sin(phi) is strictly increasing for beta < 1, so the root is
    // unique and bracketed by target -/+ beta.
    double lo = target - beta;
    double hi = target + beta;
    double phi = target / (1.0 + beta);  // linearized guess, exact at beta -> 0
    if (phi < lo || phi > hi) phi = target;

    for (int iter = 0; iter < 100; ++iter) {
        const double f = phi + beta * std::sin(phi) - target;
        if (std::abs(f) < 1e-13) break;
        if (f > 0.0) hi = phi; else lo = phi;
        const double step = f / (1.0 + beta * std::cos(phi));
        double next = phi - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        phi = next;
    }
    return phi;
}

double effective_mutual(double flux, const CouplerModel& model) {
    const double beta = screening_parameter(model);
    const double c = beta * std::cos(junction_phase(flux, model));
    return c / (1.0 + c);
}

CouplerState coupler_state(double flux, const CouplerModel& model) {
    const double m = effective_mutual(flux, model);
    const double m_off = effective_mutual(model.switchoff_flux, model);
    const double d2 = (m - m_off) * (m - m_off);
    return {model.kappa_scale * d2, -model.pull_scale * d2};
}

CouplerModel calibrate_coupler(double target_flux, double target_kappa, double target_pull,
                               const CouplerModel& model) {
    if (!(target_kappa > 0.0)) throw std::invalid_argument("calibration target kappa must be > 0");
    if (!(target_pull < 0.0)) throw std::invalid_argument("calibration target pull must be < 0");
    if (!(target_flux > 0.0 && target_flux < 0.5))
        throw std::invalid_argument("calibration flux must lie in (0, 0.5)");
    const double m = effective_mutual(target_flux, model);
    const double m_off = effective_mutual(model.switchoff_flux, model);
    const double d2 = (m - m_off) * (m - m_off);
    if (d2 < 1e-24)
        throw std::invalid_argument("degenerate calibration point: mutual equals switch-off value");
    CouplerModel out = model;
    out.kappa_scale = target_kappa / d2;
    out.pull_scale = -target_pull / d2;
    return out;
}

double voltage_to_flux(double voltage, const CouplerModel& model) {
    return model.flux_offset + model.flux_per_volt * voltage;
}

double flux_to_voltage(double flux, const CouplerModel& model) {
    if (model.flux_per_volt == 0.0)
        throw std::invalid_argument("flux_to_voltage undefined: flux_per_volt is zero");
    return (flux - model.flux_offset) / model.flux_per_volt;
}

}  // namespace qmem
