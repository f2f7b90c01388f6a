#include "qmem/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qmem {

double waveguide_energy(const TemporalMode& mode) {
    double sum = 0.0;
    for (const Complex& s : mode.samples) sum += std::norm(s);
    return sum * mode.dt;
}

namespace {

void check_resonator(const ResonatorSpec& r, const std::string& field,
                     std::vector<Violation>& out) {
    if (!(r.frequency > 0.0) || !std::isfinite(r.frequency))
        out.push_back({field + ".frequency", "frequency must be > 0"});
    if (r.gamma < 0.0 || !std::isfinite(r.gamma))
        out.push_back({field + ".gamma", "gamma must be >= 0"});
}

}  // namespace

std::vector<Violation> validate_device(const DeviceModel& model) {
    std::vector<Violation> v;
    const ResonatorBank& bank = model.bank;

    check_resonator(bank.common, "bank.common", v);
    if (bank.internal.empty())
        v.push_back({"bank.internal", "at least one internal resonator required"});
    for (std::size_t j = 0; j < bank.internal.size(); ++j) {
        std::ostringstream field;
        field << "bank.internal[" << j << "]";
        check_resonator(bank.internal[j], field.str(), v);
    }
    for (std::size_t j = 1; j < bank.internal.size(); ++j) {
        if (!(bank.internal[j].frequency > bank.internal[j - 1].frequency)) {
            v.push_back({"bank.internal", "internal frequencies strictly increasing"});
            break;
        }
    }
    if (bank.couplings.size() != bank.internal.size())
        v.push_back({"bank.couplings", "one coupling g per internal resonator"});
    for (std::size_t j = 0; j < bank.couplings.size(); ++j) {
        if (!std::isfinite(bank.couplings[j])) {
            std::ostringstream field;
            field << "bank.couplings[" << j << "]";
            v.push_back({field.str(), "coupling must be finite"});
        }
    }

    const CouplerModel& c = model.coupler;
    if (!(c.critical_current > 0.0))
        v.push_back({"coupler.critical_current", "critical current must be > 0"});
    if (!(c.loop_inductance > 0.0))
        v.push_back({"coupler.loop_inductance", "loop inductance must be > 0"});
    if (c.wirebond_inductance < 0.0)
        v.push_back({"coupler.wirebond_inductance", "wirebond inductance must be >= 0"});
    if (c.critical_current > 0.0 && c.loop_inductance > 0.0 &&
        screening_parameter(c) >= 1.0)
        v.push_back({"coupler", "screening parameter beta_L must be < 1 (non-hysteretic)"});
    if (c.kappa_scale < 0.0)
        v.push_back({"coupler.kappa_scale", "kappa_scale must be >= 0"});
    if (c.pull_scale < 0.0)
        v.push_back({"coupler.pull_scale", "pull_scale must be >= 0"});

    // The rotating-frame anchor must sit near the comb; 10 mean spacings of
    // slack on either side. With a single internal resonator the spacing is
    // undefined and the check is skipped.
    if (bank.internal.size() >= 2) {
        const CombStats stats = comb_statistics(bank);
        const double lo = bank.internal.front().frequency - 10.0 * stats.spacing;
        const double hi = bank.internal.back().frequency + 10.0 * stats.spacing;
        if (!(model.reference_input_frequency >= lo && model.reference_input_frequency <= hi))
            v.push_back({"reference_input_frequency",
                         "must lie within [min internal - 10*spacing, max internal + 10*spacing]"});
    }
    return v;
}

void require_valid(const DeviceModel& model) {
    const std::vector<Violation> v = validate_device(model);
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "invalid device model:";
    for (const Violation& item : v) msg << "\n  " << item.field << ": " << item.rule;
    throw std::invalid_argument(msg.str());
}

CombStats comb_statistics(const ResonatorBank& bank) {
    const std::size_t n = bank.internal.size();
    if (n < 2) throw std::invalid_argument("comb undefined: need at least two internal resonators");
    const double span = bank.internal.back().frequency - bank.internal.front().frequency;
    const double mean = span / static_cast<double>(n - 1);
    double worst = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        const double spacing = bank.internal[j].frequency - bank.internal[j - 1].frequency;
        worst = std::max(worst, std::abs(spacing - mean));
    }
    return {mean, worst};
}

}  // namespace qmem
