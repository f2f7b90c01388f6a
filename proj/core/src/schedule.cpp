#include "qmem/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qmem {

void ControlSchedule::append_flux(double t_end, double flux) {
    const double t0 = end_time();
    segments.push_back({t0, t_end, false, flux, {}});
}

void ControlSchedule::append_direct(double t_end, double kappa, double pull) {
    const double t0 = end_time();
    segments.push_back({t0, t_end, true, 0.0, {kappa, pull}});
}

ControlSchedule constant_flux_schedule(double flux, double t_start, double t_end,
                                       double ramp) {
    ControlSchedule s;
    s.ramp = ramp;
    s.segments.push_back({t_start, t_end, false, flux, {}});
    return s;
}

ControlSchedule constant_direct_schedule(double kappa, double pull, double t_start,
                                         double t_end, double ramp) {
    ControlSchedule s;
    s.ramp = ramp;
    s.segments.push_back({t_start, t_end, true, 0.0, {kappa, pull}});
    return s;
}

std::vector<Violation> validate_schedule(const ControlSchedule& schedule) {
    std::vector<Violation> v;
    if (schedule.segments.empty()) {
        v.push_back({"segments", "at least one segment required"});
        return v;
    }
    if (!(schedule.ramp >= 0.0) || !std::isfinite(schedule.ramp))
        v.push_back({"ramp", "ramp must be >= 0"});
    for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
        const ControlSegment& seg = schedule.segments[i];
        std::ostringstream field;
        field << "segments[" << i << "]";
        if (!(seg.t_end > seg.t_start))
            v.push_back({field.str(), "t_end must exceed t_start"});
        else if (schedule.ramp > 0.0 && seg.t_end - seg.t_start < schedule.ramp)
            v.push_back({field.str(), "segment shorter than cross-fade ramp"});
        if (!seg.direct && !std::isfinite(seg.flux))
            v.push_back({field.str(), "flux must be finite"});
        if (seg.direct && (seg.state.kappa < 0.0 || !std::isfinite(seg.state.kappa)))
            v.push_back({field.str(), "direct kappa must be >= 0"});
        if (i > 0) {
            const double gap = seg.t_start - schedule.segments[i - 1].t_end;
            if (std::abs(gap) > 1e-12)
                v.push_back({field.str(), "segments must be contiguous"});
        }
    }
    return v;
}

void require_valid(const ControlSchedule& schedule) {
    const std::vector<Violation> v = validate_schedule(schedule);
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "invalid control schedule:";
    for (const Violation& item : v) msg << "\n  " << item.field << ": " << item.rule;
    throw std::invalid_argument(msg.str());
}

CouplerState segment_state(const ControlSegment& segment, const CouplerModel& model) {
    return segment.direct ? segment.state : coupler_state(segment.flux, model);
}

CouplerState schedule_state(double t, const ControlSchedule& schedule,
                            const CouplerModel& model) {
    const std::vector<ControlSegment>& segs = schedule.segments;
    if (segs.empty() || t < segs.front().t_start - 1e-12 || t > segs.back().t_end + 1e-12)
        throw std::out_of_range("schedule does not cover simulation span");

    std::size_t i = 0;
    while (i + 1 < segs.size() && t >= segs[i].t_end) ++i;

    const double half = 0.5 * schedule.ramp;
    // Cross-fade in (kappa, pull) space around the nearest interior
    // boundary; segment durations >= ramp guarantee at most one applies.
    if (half > 0.0) {
        std::size_t left = segs.size();
        if (i + 1 < segs.size() && t > segs[i].t_end - half) left = i;
        else if (i > 0 && t < segs[i].t_start + half) left = i - 1;
        if (left < segs.size()) {
            const double boundary = segs[left].t_end;
            double x = (t - (boundary - half)) / schedule.ramp;
            x = std::min(1.0, std::max(0.0, x));
            const double w = 0.5 * (1.0 - std::cos(M_PI * x));
            const CouplerState A = segment_state(segs[left], model);
            const CouplerState B = segment_state(segs[left + 1], model);
            return {A.kappa + w * (B.kappa - A.kappa),
                    A.common_pull + w * (B.common_pull - A.common_pull)};
        }
    }
    return segment_state(segs[i], model);
}

}  // namespace qmem
