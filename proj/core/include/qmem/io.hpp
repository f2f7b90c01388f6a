#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmem/calibration.hpp"
#include "qmem/metrics.hpp"
#include "qmem/model.hpp"
#include "qmem/pulses.hpp"
#include "qmem/schedule.hpp"
#include "qmem/spectroscopy.hpp"

namespace qmem {

/// Configuration-level failure (parse error, unknown key, invalid value).
/// The command-line tool maps this to exit code 2; runtime failures exit 1.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Axis values; parsed from an explicit list or a {min, max, count} range.
struct GridSpec {
    std::vector<double> values;
};

struct SolverConfig {
    double dt = 1e-10;
    double ramp = 1e-9;
};

struct ProtocolConfig {
    bool present = false;
    /// NaN means "solve the impedance-matching condition".
    double record_flux = std::numeric_limits<double>::quiet_NaN();
    std::vector<int> cycles = {1};
};

struct ScheduleConfig {
    bool present = false;
    ControlSchedule schedule;
};

struct SweepConfig {
    bool present = false;
    GridSpec rows;  // flux or voltage axis
    GridSpec cols;  // frequency axis
    /// Reference window for pulsed maps; NaNs default to center +/- 1.5 fwhm.
    double window_start = std::numeric_limits<double>::quiet_NaN();
    double window_end = std::numeric_limits<double>::quiet_NaN();
};

struct OutputConfig {
    std::string directory = ".";
    bool csv = true;
    bool json = true;
};

/// One experiment document: device, drive pulse, and the sections the
/// individual commands consume. Unknown keys are rejected on parse.
struct ExperimentConfig {
    DeviceModel device;
    PulseSpec pulse;
    SolverConfig solver;
    ProtocolConfig protocol;
    ScheduleConfig schedule;
    SweepConfig spectroscopy;    // rows = flux
    SweepConfig reflection_map;  // rows = voltage
    OutputConfig outputs;
    std::uint64_t seed = 0;
};

DeviceModel device_from_json_text(const std::string& text);
std::string device_to_json_text(const DeviceModel& model);

ExperimentConfig parse_config(const std::string& json_text);
std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

/// Locale-independent shortest-round-trip decimal rendering of a double.
std::string format_number(double value);

/// Trace CSV: header `t,re_s_in,im_s_in,re_s_out,im_s_out,re_a_c,im_a_c,
/// re_b_1,im_b_1,...`, one row per sample, byte-deterministic.
void write_trace_csv(std::ostream& out, const SimulationResult& result);

/// Schedule CSV sampled at `dt`: header `t,kappa,pull`.
void write_schedule_csv(std::ostream& out, const ControlSchedule& schedule,
                        const CouplerModel& model, double dt);

/// Matrix CSV with axis headers: first row is the column axis, first column
/// the row axis.
void write_map_csv(std::ostream& out, const std::vector<double>& row_axis,
                   const std::vector<double>& col_axis,
                   const std::vector<std::vector<double>>& cells);

/// Correlation trace CSV: header `lag,correlation`.
void write_correlation_csv(std::ostream& out, const FidelityReport& report);

std::string fidelity_report_json(const FidelityReport& report);
std::string decay_fit_json(const DecayFit& fit);
std::string resonance_fit_json(const ResonanceFit& fit);
std::string memory_series_json(const std::vector<MemoryPoint>& points,
                               double revival_period_s);

/// Numeric CSV reader: first line is the header, every following line must
/// hold one number per column.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};
CsvTable read_csv(std::istream& in);

}  // namespace qmem
