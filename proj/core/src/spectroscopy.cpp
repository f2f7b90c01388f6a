#include "qmem/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "qmem/coupler.hpp"
#include "qmem/parallel.hpp"
#include "qmem/schedule.hpp"

namespace qmem {

std::vector<std::vector<Complex>> spectroscopy_map(const DeviceModel& model,
                                                   const std::vector<double>& flux_grid,
                                                   const std::vector<double>& freq_grid,
                                                   int jobs) {
    require_valid(model);
    if (flux_grid.empty() || freq_grid.empty())
        throw std::invalid_argument("spectroscopy grids must not be empty");

    std::vector<std::vector<Complex>> map(flux_grid.size());
    parallel_for(flux_grid.size(), jobs, [&](std::size_t i) {
        std::vector<Complex>& row = map[i];
        row.resize(freq_grid.size());
        for (std::size_t j = 0; j < freq_grid.size(); ++j)
            row[j] = steady_state_reflection(model, freq_grid[j], flux_grid[i]);
    });
    return map;
}

namespace {

constexpr double two_pi = 2.0 * M_PI;

double wrap_angle(double a) {
    a = std::fmod(a + M_PI, two_pi);
    if (a < 0.0) a += two_pi;
    return a - M_PI;
}

// theta[k] = arg(z[k]) continued past branch cuts, assuming < pi jumps
// between neighbouring scan points.
std::vector<double> unwrapped_phase(const std::vector<Complex>& z) {
    std::vector<double> theta(z.size());
    double offset = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        double a = std::arg(z[k]) + offset;
        if (k > 0) {
            while (a - theta[k - 1] > M_PI) {
                a -= two_pi;
                offset -= two_pi;
            }
            while (a - theta[k - 1] < -M_PI) {
                a += two_pi;
                offset += two_pi;
            }
        }
        theta[k] = a;
    }
    return theta;
}

struct Circle {
    double cx = 0.0, cy = 0.0, r = 0.0;
};

// Taubin's algebraic circle fit: minimizes the gradient-weighted algebraic
// distance, bias-free to first order in noise. Works on centered data for
// conditioning.
Circle taubin_circle(const std::vector<Complex>& pts) {
    const auto n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const Complex& p : pts) {
        mx += p.real();
        my += p.imag();
    }
    mx /= n;
    my /= n;

    double Mxx = 0, Myy = 0, Mxy = 0, Mxz = 0, Myz = 0, Mzz = 0;
    for (const Complex& p : pts) {
        const double x = p.real() - mx;
        const double y = p.imag() - my;
        const double z = x * x + y * y;
        Mxx += x * x;
        Myy += y * y;
        Mxy += x * y;
        Mxz += x * z;
        Myz += y * z;
        Mzz += z * z;
    }
    Mxx /= n;
    Myy /= n;
    Mxy /= n;
    Mxz /= n;
    Myz /= n;
    Mzz /= n;

    // Newton on the characteristic polynomial, seeded at 0 (Taubin's root is
    // the smallest non-negative one).
    const double Mz = Mxx + Myy;
    const double Cov_xy = Mxx * Myy - Mxy * Mxy;
    const double A3 = 4.0 * Mz;
    const double A2 = -3.0 * Mz * Mz - Mzz;
    const double A1 = Mzz * Mz + 4.0 * Cov_xy * Mz - Mxz * Mxz - Myz * Myz - Mz * Mz * Mz;
    const double A0 = Mxz * Mxz * Myy + Myz * Myz * Mxx - Mzz * Cov_xy -
                      2.0 * Mxz * Myz * Mxy + Mz * Mz * Cov_xy;
    double eta = 0.0;
    for (int iter = 0; iter < 50; ++iter) {
        const double poly = A0 + eta * (A1 + eta * (A2 + eta * A3));
        const double deriv = A1 + eta * (2.0 * A2 + eta * 3.0 * A3);
        if (deriv == 0.0) break;
        const double step = poly / deriv;
        eta -= step;
        if (std::abs(step) < 1e-14 * (std::abs(eta) + 1e-300)) break;
    }

    const double det = (Mxx - eta) * (Myy - eta) - Mxy * Mxy;
    Circle c;
    if (det == 0.0 || !std::isfinite(det)) {
        c.r = std::numeric_limits<double>::infinity();
        return c;
    }
    const double ux = (Mxz * (Myy - eta) - Myz * Mxy) / (2.0 * det);
    const double uy = (Myz * (Mxx - eta) - Mxz * Mxy) / (2.0 * det);
    c.cx = ux + mx;
    c.cy = uy + my;
    c.r = std::sqrt(std::max(0.0, ux * ux + uy * uy + Mz - 2.0 * eta));
    return c;
}

// The prefactor phase is kept relative to the scan centre f_c. With the
// absolute convention alpha - 2 pi f tau the two phase parameters are
// degenerate to one part in (span / f)^2 and the polish stalls well short
// of convergence; centering makes them orthogonal over the scan.
Complex resonance_model(double f, double f_c, const double* p) {
    // p = {f_r, Q_l, |Q_c|, phi0, a, alpha_c, tau}
    const Complex denom(1.0, 2.0 * p[1] * (f / p[0] - 1.0));
    const Complex dip = std::polar(2.0 * p[1] / p[2], p[3]) / denom;
    return std::polar(p[4], p[5] - two_pi * (f - f_c) * p[6]) * (1.0 - dip);
}

double model_sse(const std::vector<double>& freqs, const std::vector<Complex>& s11,
                 double f_c, const double* p) {
    double sse = 0.0;
    for (std::size_t k = 0; k < freqs.size(); ++k)
        sse += std::norm(resonance_model(freqs[k], f_c, p) - s11[k]);
    return sse;
}

// Fits the documented model against one chirality of the trace. The family
// is closed under conjugation (negate phi0, alpha and tau map the fit onto
// the mirrored data), so the public entry point tries both windings.
ResonanceFit fit_arc(const std::vector<double>& freqs,
                     const std::vector<Complex>& s11) {
    const std::size_t n = freqs.size();

    // 1. Cable delay from the scan wings (outer 20% of the span), where the
    // resonance term is nearly flat and phase is linear in frequency. The
    // wings regress separately: a dip deeper than unity winds the unwrapped
    // phase by a full turn between them, and a joint fit would book that
    // step as extra delay. Each wing's own intercept absorbs the winding.
    const double span = freqs.back() - freqs.front();
    const double wing_lo = freqs.front() + 0.1 * span;
    const double wing_hi = freqs.back() - 0.1 * span;
    const std::vector<double> theta_full = unwrapped_phase(s11);
    const auto wing_slope = [&](double lo, double hi, double& slope) {
        double sw = 0, swf = 0, swff = 0, swt = 0, swft = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (freqs[k] < lo || freqs[k] > hi) continue;
            const double f = freqs[k] - freqs.front();
            sw += 1.0;
            swf += f;
            swff += f * f;
            swt += theta_full[k];
            swft += f * theta_full[k];
        }
        const double det = sw * swff - swf * swf;
        if (!(det > 0.0)) return false;
        slope = (sw * swft - swf * swt) / det;
        return true;
    };
    double tau = 0.0;
    double left = 0.0, right = 0.0;
    const bool left_ok = wing_slope(freqs.front(), wing_lo, left);
    const bool right_ok = wing_slope(wing_hi, freqs.back(), right);
    if (left_ok && right_ok)
        tau = -0.5 * (left + right) / two_pi;
    else if (left_ok || right_ok)
        tau = -(left_ok ? left : right) / two_pi;

    std::vector<Complex> w(n);
    for (std::size_t k = 0; k < n; ++k)
        w[k] = s11[k] * std::polar(1.0, two_pi * freqs[k] * tau);

    // 2. Algebraic circle fit. A flat arc means the data never loops around
    // a resonance.
    const Circle circle = taubin_circle(w);
    double spread = 0.0;
    for (std::size_t k = 1; k < n; ++k)
        spread = std::max(spread, std::abs(w[k] - w[0]));
    if (!(circle.r > 0.0) || !std::isfinite(circle.r) || spread < 1e-12 ||
        spread < 0.05 * circle.r)
        throw std::runtime_error("no resonance found");
    const Complex c(circle.cx, circle.cy);

    // 3. Phase-vs-frequency fit around the circle centre:
    // theta(f) = theta0 + 2 atan(2 Q_l (1 - f/f_r)).
    std::vector<Complex> rel(n);
    for (std::size_t k = 0; k < n; ++k) rel[k] = w[k] - c;
    const std::vector<double> theta = unwrapped_phase(rel);

    // Steepest descent of theta marks the resonance; its slope there is
    // -4 Q_l / f_r.
    std::size_t steep = 1;
    double steepest = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double slope = (theta[k] - theta[k - 1]) / (freqs[k] - freqs[k - 1]);
        if (-slope > steepest) {
            steepest = -slope;
            steep = k;
        }
    }
    if (!(steepest > 0.0)) throw std::runtime_error("no resonance found");
    double f_r = 0.5 * (freqs[steep] + freqs[steep - 1]);
    double Q_l = 0.25 * steepest * f_r;
    double theta0 = theta[steep] - 2.0 * std::atan(2.0 * Q_l * (1.0 - freqs[steep] / f_r));

    for (int iter = 0; iter < 60; ++iter) {
        Eigen::Matrix3d JtJ = Eigen::Matrix3d::Zero();
        Eigen::Vector3d Jtr = Eigen::Vector3d::Zero();
        for (std::size_t k = 0; k < n; ++k) {
            const double u = 2.0 * Q_l * (1.0 - freqs[k] / f_r);
            const double denom = 1.0 + u * u;
            const double resid = theta[k] - (theta0 + 2.0 * std::atan(u));
            Eigen::Vector3d J(1.0, 4.0 * (1.0 - freqs[k] / f_r) / denom,
                              4.0 * Q_l * freqs[k] / (f_r * f_r * denom));
            JtJ += J * J.transpose();
            Jtr += J * resid;
        }
        const Eigen::Vector3d step = JtJ.ldlt().solve(Jtr);
        if (!step.allFinite()) break;
        theta0 += step(0);
        Q_l += step(1);
        f_r += step(2);
        if (!(Q_l > 0.0) || !(f_r > 0.0)) throw std::runtime_error("no resonance found");
        if (std::abs(step(2)) < 1e-9 * f_r && std::abs(step(1)) < 1e-9 * Q_l) break;
    }

    // 4. Off-resonant point sits diametrically opposite the resonance dip.
    const Complex z_off = c - circle.r * std::polar(1.0, theta0);
    const double a = std::abs(z_off);
    if (!(a > 0.0)) throw std::runtime_error("no resonance found");
    const double alpha = std::arg(z_off);
    const double phi0 = wrap_angle(theta0 + M_PI - alpha);
    const double Q_c_mag = Q_l * a / circle.r;

    const double f_c = 0.5 * (freqs.front() + freqs.back());
    double p[7] = {f_r, Q_l, Q_c_mag, phi0, a,
                   wrap_angle(alpha - two_pi * f_c * tau), tau};

    // 5. Full Levenberg-Marquardt polish of all seven parameters against the
    // complex data. Numeric Jacobian; parameters are scaled by their own
    // magnitude so the trust region is meaningful across 12 decades.
    double lambda = 1e-3;
    double sse = model_sse(freqs, s11, f_c, p);
    const double floors[7] = {1.0, 1e-3, 1e-3, 1e-9, 1e-9, 1e-9, 1e-15};
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::MatrixXd J(2 * n, 7);
        Eigen::VectorXd r(2 * n);
        for (std::size_t k = 0; k < n; ++k) {
            const Complex diff = s11[k] - resonance_model(freqs[k], f_c, p);
            r(2 * k) = diff.real();
            r(2 * k + 1) = diff.imag();
        }
        for (int i = 0; i < 7; ++i) {
            const double h = std::max(std::abs(p[i]), floors[i]) * 1e-7;
            double q[7];
            std::copy(p, p + 7, q);
            q[i] += h;
            for (std::size_t k = 0; k < n; ++k) {
                const Complex d = (resonance_model(freqs[k], f_c, q) -
                                   resonance_model(freqs[k], f_c, p)) /
                                  h;
                J(2 * k, i) = d.real();
                J(2 * k + 1, i) = d.imag();
            }
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd Jtr = J.transpose() * r;
        Eigen::MatrixXd damped = JtJ;
        for (int i = 0; i < 7; ++i)
            damped(i, i) += lambda * std::max(JtJ(i, i), 1e-300);
        const Eigen::VectorXd step = damped.ldlt().solve(Jtr);
        if (!step.allFinite()) break;

        double q[7];
        for (int i = 0; i < 7; ++i) q[i] = p[i] + step(i);
        if (!(q[0] > 0.0) || !(q[1] > 0.0) || !(q[2] > 0.0) || !(q[4] > 0.0)) {
            lambda *= 10.0;
            if (lambda > 1e12) break;
            continue;
        }
        const double trial = model_sse(freqs, s11, f_c, q);
        if (trial < sse) {
            const bool done = sse - trial < 1e-14 * (sse + 1e-300);
            std::copy(q, q + 7, p);
            sse = trial;
            lambda = std::max(lambda * 0.2, 1e-12);
            if (done) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }

    ResonanceFit fit;
    fit.f_r = p[0];
    fit.Q_l = p[1];
    fit.Q_c_mag = p[2];
    fit.phi0 = wrap_angle(p[3]);
    fit.amplitude = p[4];
    fit.phase_offset = wrap_angle(p[5] + two_pi * f_c * p[6]);
    fit.delay = p[6];
    const double inv_Qi = 1.0 / fit.Q_l - std::cos(fit.phi0) / fit.Q_c_mag;
    fit.Q_i = inv_Qi > 0.0 ? 1.0 / inv_Qi : std::numeric_limits<double>::infinity();
    fit.rms_residual = std::sqrt(sse / static_cast<double>(n));
    return fit;
}

}  // namespace

ResonanceFit fit_resonance(const std::vector<double>& freqs,
                           const std::vector<Complex>& s11) {
    const std::size_t n = freqs.size();
    if (n != s11.size()) throw std::invalid_argument("freqs and s11 differ in length");
    if (n < 8) throw std::invalid_argument("need at least 8 scan points");
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(freqs[k]) || !std::isfinite(s11[k].real()) ||
            !std::isfinite(s11[k].imag()))
            throw std::invalid_argument("scan contains non-finite values");
        if (k > 0 && !(freqs[k] > freqs[k - 1]))
            throw std::invalid_argument("frequencies must be strictly increasing");
    }

    std::optional<ResonanceFit> best;
    try {
        best = fit_arc(freqs, s11);
    } catch (const std::runtime_error&) {
    }

    // Opposite phasor convention winds the resonance circle the other way;
    // residuals against the mirror image equal residuals of the mapped-back
    // parameters against the original trace, so the two fits compare
    // directly.
    std::vector<Complex> mirrored(s11);
    for (Complex& z : mirrored) z = std::conj(z);
    try {
        ResonanceFit fit = fit_arc(freqs, mirrored);
        fit.phi0 = wrap_angle(-fit.phi0);
        fit.phase_offset = wrap_angle(-fit.phase_offset);
        fit.delay = -fit.delay;
        if (!best || fit.rms_residual < best->rms_residual) best = fit;
    } catch (const std::runtime_error&) {
    }

    if (!best) throw std::runtime_error("no resonance found");
    return *best;
}

ReflectionMap initial_reflection_map(const DeviceModel& model, const PulseSpec& pulse,
                                     const std::vector<double>& voltage_grid,
                                     const std::vector<double>& freq_grid,
                                     std::pair<double, double> reference_window,
                                     const ReflectionMapOptions& options) {
    require_valid(model);
    if (voltage_grid.empty() || freq_grid.empty())
        throw std::invalid_argument("reflection map grids must not be empty");
    if (!(reference_window.second > reference_window.first))
        throw std::invalid_argument("reference window must have positive length");
    if (!(options.dt > 0.0)) throw std::invalid_argument("dt must be > 0");

    const double ramp = 1e-9;
    const double t0 = std::min(pulse.center - 4.0 * pulse.fwhm, reference_window.first);
    const double t_end = std::max(pulse.center + 4.0 * pulse.fwhm, reference_window.second);
    const auto samples =
        static_cast<std::size_t>(std::ceil((t_end - t0) / options.dt - 1e-9)) + 1;

    ReflectionMap map;
    map.voltages = voltage_grid;
    map.frequencies = freq_grid;
    map.intensity.assign(voltage_grid.size(),
                         std::vector<double>(freq_grid.size(), 0.0));

    const auto window_peak = [&](const TemporalMode& mode) {
        double peak = 0.0;
        for (std::size_t k = 0; k < mode.size(); ++k) {
            const double t = mode.time_at(k);
            if (t < reference_window.first || t > reference_window.second) continue;
            peak = std::max(peak, std::norm(mode.samples[k]));
        }
        return peak;
    };

    // A switched-off run reflects the drive unchanged (s_out = -s_in), so its
    // window peak equals the input's; one number per carrier normalizes the
    // whole column.
    std::vector<double> norm(freq_grid.size(), 0.0);
    std::vector<TemporalMode> inputs(freq_grid.size());
    for (std::size_t j = 0; j < freq_grid.size(); ++j) {
        PulseSpec carrier = pulse;
        carrier.carrier_detuning = freq_grid[j] - model.reference_input_frequency;
        inputs[j] = make_gaussian(carrier, {t0, options.dt, samples},
                                  model.reference_input_frequency);
        norm[j] = window_peak(inputs[j]);
        if (!(norm[j] > 0.0))
            throw std::invalid_argument("reference window misses the pulse");
    }

    parallel_for(voltage_grid.size(), options.jobs, [&](std::size_t i) {
        const double flux = voltage_to_flux(voltage_grid[i], model.coupler);
        const ControlSchedule schedule =
            constant_flux_schedule(flux, t0, t0 + (static_cast<double>(samples) - 1.0) *
                                                     options.dt,
                                   ramp);
        for (std::size_t j = 0; j < freq_grid.size(); ++j) {
            const SimulationResult run = simulate(model, inputs[j], schedule);
            map.intensity[i][j] = window_peak(run.output) / norm[j];
        }
    });
    return map;
}

}  // namespace qmem
