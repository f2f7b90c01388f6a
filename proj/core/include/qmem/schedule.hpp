#pragma once

#include <vector>

#include "qmem/coupler.hpp"
#include "qmem/model.hpp"

namespace qmem {

/// One piece of a control program: either a flux setpoint (translated
/// through the coupler model at evaluation time) or a direct (kappa, pull)
/// override that bypasses the coupler entirely.
struct ControlSegment {
    double t_start = 0.0;
    double t_end = 0.0;
    bool direct = false;
    double flux = 0.0;     // Phi0, used when !direct
    CouplerState state;    // used when direct
};

/// Piecewise control program for the coupler. Segments must be contiguous
/// and non-overlapping. At each interior boundary the (kappa, pull) pair is
/// cross-faded with a raised-cosine ramp of duration `ramp` centered on the
/// boundary; ramp = 0 gives a hard switch. Every segment must last at least
/// `ramp` so fade windows cannot overlap.
struct ControlSchedule {
    std::vector<ControlSegment> segments;
    double ramp = 1e-9;

    double start_time() const { return segments.empty() ? 0.0 : segments.front().t_start; }
    double end_time() const { return segments.empty() ? 0.0 : segments.back().t_end; }

    /// Appends a flux segment from the current end to `t_end`.
    void append_flux(double t_end, double flux);
    /// Appends a direct (kappa, pull) segment from the current end to `t_end`.
    void append_direct(double t_end, double kappa, double pull);
};

/// Single flux segment covering [t_start, t_end].
ControlSchedule constant_flux_schedule(double flux, double t_start, double t_end,
                                       double ramp = 1e-9);

/// Single direct (kappa, pull) segment covering [t_start, t_end].
ControlSchedule constant_direct_schedule(double kappa, double pull, double t_start,
                                         double t_end, double ramp = 1e-9);

/// Checks schedule invariants (non-empty, positive durations, contiguity,
/// ramp fits inside every segment, kappa >= 0 on direct segments).
std::vector<Violation> validate_schedule(const ControlSchedule& schedule);

/// Throws std::invalid_argument listing all violations.
void require_valid(const ControlSchedule& schedule);

/// Plateau value of one segment (flux segments consult the coupler model).
CouplerState segment_state(const ControlSegment& segment, const CouplerModel& model);

/// (kappa, pull) at time t, cross-faded near interior boundaries. Throws
/// std::out_of_range ("schedule does not cover simulation span") outside
/// [start_time, end_time].
CouplerState schedule_state(double t, const ControlSchedule& schedule,
                            const CouplerModel& model);

}  // namespace qmem
