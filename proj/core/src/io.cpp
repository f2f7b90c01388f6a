#include "qmem/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace qmem {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

void expect_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) fail(ctx + " must be an object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& ctx) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) known = true;
        if (!known) fail("unknown key \"" + it.key() + "\" in " + ctx);
    }
}

double get_number(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) fail(ctx + " is missing \"" + key + "\"");
    const json& v = j.at(key);
    if (!v.is_number()) fail(ctx + "." + key + " must be a number");
    return v.get<double>();
}

double get_number_or(const json& j, const char* key, double fallback,
                     const std::string& ctx) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) fail(ctx + "." + key + " must be a number");
    return v.get<double>();
}

std::string join_violations(const std::vector<Violation>& violations,
                            const std::string& what) {
    std::string message = "invalid " + what + ":";
    for (const Violation& v : violations) message += " [" + v.field + ": " + v.rule + "]";
    return message;
}

ResonatorSpec parse_resonator(const json& j, const std::string& ctx) {
    expect_object(j, ctx);
    reject_unknown(j, {"frequency", "gamma", "label"}, ctx);
    ResonatorSpec r;
    r.frequency = get_number(j, "frequency", ctx);
    r.gamma = get_number_or(j, "gamma", 0.0, ctx);
    if (j.contains("label")) {
        if (!j.at("label").is_string()) fail(ctx + ".label must be a string");
        r.label = j.at("label").get<std::string>();
    }
    return r;
}

json resonator_json(const ResonatorSpec& r) {
    json j{{"frequency", r.frequency}, {"gamma", r.gamma}};
    if (!r.label.empty()) j["label"] = r.label;
    return j;
}

CouplerModel parse_coupler(const json& j) {
    const std::string ctx = "device.coupler";
    expect_object(j, ctx);
    reject_unknown(j,
                   {"critical_current", "loop_inductance", "wirebond_inductance",
                    "flux_per_volt", "kappa_scale", "pull_scale", "flux_offset",
                    "switchoff_flux"},
                   ctx);
    CouplerModel c;
    c.critical_current = get_number(j, "critical_current", ctx);
    c.loop_inductance = get_number(j, "loop_inductance", ctx);
    c.wirebond_inductance = get_number_or(j, "wirebond_inductance", 0.0, ctx);
    c.flux_per_volt = get_number(j, "flux_per_volt", ctx);
    c.kappa_scale = get_number(j, "kappa_scale", ctx);
    c.pull_scale = get_number(j, "pull_scale", ctx);
    c.flux_offset = get_number_or(j, "flux_offset", 0.0, ctx);
    c.switchoff_flux = get_number_or(j, "switchoff_flux", 0.0, ctx);
    return c;
}

json coupler_json(const CouplerModel& c) {
    return json{{"critical_current", c.critical_current},
                {"loop_inductance", c.loop_inductance},
                {"wirebond_inductance", c.wirebond_inductance},
                {"flux_per_volt", c.flux_per_volt},
                {"kappa_scale", c.kappa_scale},
                {"pull_scale", c.pull_scale},
                {"flux_offset", c.flux_offset},
                {"switchoff_flux", c.switchoff_flux}};
}

DeviceModel parse_device(const json& j) {
    expect_object(j, "device");
    reject_unknown(j, {"common", "internal", "g", "coupler", "reference_input_frequency"},
                   "device");
    if (!j.contains("common")) fail("device is missing \"common\"");
    if (!j.contains("internal")) fail("device is missing \"internal\"");
    if (!j.contains("g")) fail("device is missing \"g\"");
    if (!j.contains("coupler")) fail("device is missing \"coupler\"");

    DeviceModel m;
    m.bank.common = parse_resonator(j.at("common"), "device.common");
    const json& internal = j.at("internal");
    if (!internal.is_array()) fail("device.internal must be an array");
    for (std::size_t i = 0; i < internal.size(); ++i)
        m.bank.internal.push_back(parse_resonator(
            internal[i], "device.internal[" + std::to_string(i) + "]"));
    const json& g = j.at("g");
    if (!g.is_array()) fail("device.g must be an array");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g[i].is_number()) fail("device.g[" + std::to_string(i) + "] must be a number");
        m.bank.couplings.push_back(g[i].get<double>());
    }
    m.coupler = parse_coupler(j.at("coupler"));
    m.reference_input_frequency = get_number(j, "reference_input_frequency", "device");

    const std::vector<Violation> violations = validate_device(m);
    if (!violations.empty()) fail(join_violations(violations, "device"));
    return m;
}

json device_json(const DeviceModel& m) {
    json j;
    j["common"] = resonator_json(m.bank.common);
    json internal = json::array();
    for (const ResonatorSpec& r : m.bank.internal) internal.push_back(resonator_json(r));
    j["internal"] = std::move(internal);
    j["g"] = m.bank.couplings;
    j["coupler"] = coupler_json(m.coupler);
    j["reference_input_frequency"] = m.reference_input_frequency;
    return j;
}

PulseSpec parse_pulse(const json& j) {
    const std::string ctx = "pulse";
    expect_object(j, ctx);
    reject_unknown(j, {"shape", "fwhm", "center", "carrier_detuning", "amplitude"}, ctx);
    PulseSpec p;
    if (j.contains("shape")) {
        if (!j.at("shape").is_string() || j.at("shape").get<std::string>() != "gaussian")
            fail("pulse.shape must be \"gaussian\"");
    }
    p.shape = PulseShape::gaussian;
    p.fwhm = get_number(j, "fwhm", ctx);
    p.center = get_number(j, "center", ctx);
    p.carrier_detuning = get_number_or(j, "carrier_detuning", 0.0, ctx);
    p.amplitude = get_number_or(j, "amplitude", 1.0, ctx);
    if (!(p.fwhm > 0.0)) fail("pulse.fwhm must be > 0");
    return p;
}

GridSpec parse_grid(const json& j, const std::string& ctx) {
    GridSpec grid;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (!j[i].is_number()) fail(ctx + "[" + std::to_string(i) + "] must be a number");
            grid.values.push_back(j[i].get<double>());
        }
        if (grid.values.empty()) fail(ctx + " must not be empty");
        return grid;
    }
    if (!j.is_object()) fail(ctx + " must be an array or a {min, max, count} object");
    reject_unknown(j, {"min", "max", "count"}, ctx);
    const double lo = get_number(j, "min", ctx);
    const double hi = get_number(j, "max", ctx);
    if (!j.contains("count") || !j.at("count").is_number_integer())
        fail(ctx + ".count must be an integer");
    const auto count = j.at("count").get<long long>();
    if (count < 1) fail(ctx + ".count must be >= 1");
    if (count == 1) {
        grid.values.push_back(lo);
        return grid;
    }
    if (!(hi > lo)) fail(ctx + ".max must exceed .min");
    for (long long i = 0; i < count; ++i)
        grid.values.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                       static_cast<double>(count - 1));
    return grid;
}

ControlSchedule parse_schedule(const json& j, double default_ramp) {
    const std::string ctx = "schedule";
    expect_object(j, ctx);
    reject_unknown(j, {"ramp", "segments"}, ctx);
    ControlSchedule schedule;
    schedule.ramp = get_number_or(j, "ramp", default_ramp, ctx);
    if (!j.contains("segments") || !j.at("segments").is_array())
        fail("schedule.segments must be an array");
    const json& segments = j.at("segments");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const std::string sctx = "schedule.segments[" + std::to_string(i) + "]";
        const json& s = segments[i];
        expect_object(s, sctx);
        reject_unknown(s, {"t_start", "t_end", "flux", "kappa", "pull"}, sctx);
        ControlSegment segment;
        segment.t_start = get_number(s, "t_start", sctx);
        segment.t_end = get_number(s, "t_end", sctx);
        const bool has_flux = s.contains("flux");
        const bool has_direct = s.contains("kappa") || s.contains("pull");
        if (has_flux == has_direct)
            fail(sctx + " must set either \"flux\" or \"kappa\"+\"pull\"");
        if (has_flux) {
            segment.flux = get_number(s, "flux", sctx);
        } else {
            segment.direct = true;
            segment.state.kappa = get_number(s, "kappa", sctx);
            segment.state.common_pull = get_number_or(s, "pull", 0.0, sctx);
        }
        schedule.segments.push_back(segment);
    }
    const std::vector<Violation> violations = validate_schedule(schedule);
    if (!violations.empty()) fail(join_violations(violations, "schedule"));
    return schedule;
}

json schedule_json(const ControlSchedule& schedule) {
    json segments = json::array();
    for (const ControlSegment& s : schedule.segments) {
        json item{{"t_start", s.t_start}, {"t_end", s.t_end}};
        if (s.direct) {
            item["kappa"] = s.state.kappa;
            item["pull"] = s.state.common_pull;
        } else {
            item["flux"] = s.flux;
        }
        segments.push_back(std::move(item));
    }
    return json{{"ramp", schedule.ramp}, {"segments", std::move(segments)}};
}

SweepConfig parse_sweep(const json& j, const std::string& ctx, const char* row_key,
                        bool with_window) {
    expect_object(j, ctx);
    if (with_window)
        reject_unknown(j, {row_key, "frequency", "window"}, ctx);
    else
        reject_unknown(j, {row_key, "frequency"}, ctx);
    SweepConfig sweep;
    sweep.present = true;
    if (!j.contains(row_key)) fail(ctx + " is missing \"" + row_key + "\"");
    if (!j.contains("frequency")) fail(ctx + " is missing \"frequency\"");
    sweep.rows = parse_grid(j.at(row_key), ctx + "." + row_key);
    sweep.cols = parse_grid(j.at("frequency"), ctx + ".frequency");
    if (with_window && j.contains("window")) {
        const json& w = j.at("window");
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
            fail(ctx + ".window must be [start, end]");
        sweep.window_start = w[0].get<double>();
        sweep.window_end = w[1].get<double>();
        if (!(sweep.window_end > sweep.window_start))
            fail(ctx + ".window must have positive length");
    }
    return sweep;
}

ExperimentConfig parse_config_json(const json& j, const std::filesystem::path& base) {
    expect_object(j, "config");
    reject_unknown(j,
                   {"device", "pulse", "solver", "protocol", "schedule", "spectroscopy",
                    "reflection_map", "outputs", "seed"},
                   "config");
    if (!j.contains("device")) fail("config is missing \"device\"");

    ExperimentConfig config;
    const json& device = j.at("device");
    if (device.is_string()) {
        std::filesystem::path path(device.get<std::string>());
        if (path.is_relative()) path = base / path;
        std::ifstream in(path);
        if (!in) fail("cannot open device file " + path.string());
        std::stringstream buffer;
        buffer << in.rdbuf();
        config.device = device_from_json_text(buffer.str());
    } else {
        config.device = parse_device(device);
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        expect_object(s, "solver");
        reject_unknown(s, {"dt", "ramp"}, "solver");
        config.solver.dt = get_number_or(s, "dt", config.solver.dt, "solver");
        config.solver.ramp = get_number_or(s, "ramp", config.solver.ramp, "solver");
        if (!(config.solver.dt > 0.0)) fail("solver.dt must be > 0");
        if (config.solver.ramp < 0.0) fail("solver.ramp must be >= 0");
    }

    if (j.contains("pulse")) config.pulse = parse_pulse(j.at("pulse"));

    if (j.contains("protocol")) {
        const json& p = j.at("protocol");
        expect_object(p, "protocol");
        reject_unknown(p, {"record_flux", "cycles"}, "protocol");
        config.protocol.present = true;
        if (p.contains("record_flux")) {
            const json& flux = p.at("record_flux");
            if (flux.is_string()) {
                if (flux.get<std::string>() != "matched")
                    fail("protocol.record_flux must be a number or \"matched\"");
            } else if (flux.is_number()) {
                config.protocol.record_flux = flux.get<double>();
            } else {
                fail("protocol.record_flux must be a number or \"matched\"");
            }
        }
        if (p.contains("cycles")) {
            const json& cycles = p.at("cycles");
            config.protocol.cycles.clear();
            if (cycles.is_number_integer()) {
                config.protocol.cycles.push_back(cycles.get<int>());
            } else if (cycles.is_array()) {
                for (const json& c : cycles) {
                    if (!c.is_number_integer())
                        fail("protocol.cycles entries must be integers");
                    config.protocol.cycles.push_back(c.get<int>());
                }
            } else {
                fail("protocol.cycles must be an integer or an array of integers");
            }
            if (config.protocol.cycles.empty()) fail("protocol.cycles must not be empty");
            for (const int c : config.protocol.cycles)
                if (c < 1) fail("protocol.cycles entries must be >= 1");
        }
    }

    if (j.contains("schedule")) {
        config.schedule.present = true;
        config.schedule.schedule = parse_schedule(j.at("schedule"), config.solver.ramp);
    }

    if (j.contains("spectroscopy"))
        config.spectroscopy = parse_sweep(j.at("spectroscopy"), "spectroscopy", "flux", false);
    if (j.contains("reflection_map"))
        config.reflection_map =
            parse_sweep(j.at("reflection_map"), "reflection_map", "voltage", true);

    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        expect_object(o, "outputs");
        reject_unknown(o, {"directory", "formats"}, "outputs");
        if (o.contains("directory")) {
            if (!o.at("directory").is_string()) fail("outputs.directory must be a string");
            config.outputs.directory = o.at("directory").get<std::string>();
        }
        if (o.contains("formats")) {
            const json& formats = o.at("formats");
            if (!formats.is_array()) fail("outputs.formats must be an array");
            config.outputs.csv = false;
            config.outputs.json = false;
            for (const json& f : formats) {
                if (!f.is_string()) fail("outputs.formats entries must be strings");
                const std::string name = f.get<std::string>();
                if (name == "csv")
                    config.outputs.csv = true;
                else if (name == "json")
                    config.outputs.json = true;
                else
                    fail("outputs.formats entries must be \"csv\" or \"json\"");
            }
            if (!config.outputs.csv && !config.outputs.json)
                fail("outputs.formats must not be empty");
        }
    }

    if (j.contains("seed")) {
        const json& seed = j.at("seed");
        if (!seed.is_number_integer() || seed.get<long long>() < 0)
            fail("seed must be a non-negative integer");
        config.seed = seed.get<std::uint64_t>();
    }
    return config;
}

json parse_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

}  // namespace

DeviceModel device_from_json_text(const std::string& text) {
    return parse_device(parse_text(text, "device json"));
}

std::string device_to_json_text(const DeviceModel& model) {
    return device_json(model).dump(2) + "\n";
}

ExperimentConfig parse_config(const std::string& json_text) {
    return parse_config_json(parse_text(json_text, "config json"),
                             std::filesystem::current_path());
}

std::string serialize_config(const ExperimentConfig& config) {
    json j;
    j["device"] = device_json(config.device);
    if (config.pulse.fwhm > 0.0) {
        j["pulse"] = json{{"shape", "gaussian"},
                          {"fwhm", config.pulse.fwhm},
                          {"center", config.pulse.center},
                          {"carrier_detuning", config.pulse.carrier_detuning},
                          {"amplitude", config.pulse.amplitude}};
    }
    j["solver"] = json{{"dt", config.solver.dt}, {"ramp", config.solver.ramp}};
    if (config.protocol.present) {
        json p;
        if (std::isnan(config.protocol.record_flux))
            p["record_flux"] = "matched";
        else
            p["record_flux"] = config.protocol.record_flux;
        p["cycles"] = config.protocol.cycles;
        j["protocol"] = std::move(p);
    }
    if (config.schedule.present) j["schedule"] = schedule_json(config.schedule.schedule);
    if (config.spectroscopy.present)
        j["spectroscopy"] = json{{"flux", config.spectroscopy.rows.values},
                                 {"frequency", config.spectroscopy.cols.values}};
    if (config.reflection_map.present) {
        json map{{"voltage", config.reflection_map.rows.values},
                 {"frequency", config.reflection_map.cols.values}};
        if (!std::isnan(config.reflection_map.window_start))
            map["window"] = json::array({config.reflection_map.window_start,
                                         config.reflection_map.window_end});
        j["reflection_map"] = std::move(map);
    }
    {
        json formats = json::array();
        if (config.outputs.csv) formats.push_back("csv");
        if (config.outputs.json) formats.push_back("json");
        j["outputs"] = json{{"directory", config.outputs.directory},
                            {"formats", std::move(formats)}};
    }
    j["seed"] = config.seed;
    return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    return parse_config_json(parse_text(buffer.str(), "config json"),
                             parent.empty() ? std::filesystem::path(".") : parent);
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

void append_number(std::string& line, double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    line.append(buf, res.ptr);
}

void append_complex(std::string& line, const Complex& z) {
    line.push_back(',');
    append_number(line, z.real());
    line.push_back(',');
    append_number(line, z.imag());
}

}  // namespace

void write_trace_csv(std::ostream& out, const SimulationResult& result) {
    const std::size_t banks = result.states.empty() ? 0 : result.states.front().b.size();
    std::string line = "t,re_s_in,im_s_in,re_s_out,im_s_out,re_a_c,im_a_c";
    for (std::size_t jj = 1; jj <= banks; ++jj) {
        line += ",re_b_" + std::to_string(jj);
        line += ",im_b_" + std::to_string(jj);
    }
    line.push_back('\n');
    out << line;

    for (std::size_t k = 0; k < result.states.size(); ++k) {
        line.clear();
        append_number(line, result.states[k].t);
        append_complex(line, result.input.samples[k]);
        append_complex(line, result.output.samples[k]);
        append_complex(line, result.states[k].a_c);
        for (const Complex& b : result.states[k].b) append_complex(line, b);
        line.push_back('\n');
        out << line;
    }
}

void write_schedule_csv(std::ostream& out, const ControlSchedule& schedule,
                        const CouplerModel& model, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    require_valid(schedule);
    out << "t,kappa,pull\n";
    const double t0 = schedule.start_time();
    const double t1 = schedule.end_time();
    const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9)) + 1;
    std::string line;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = std::min(t0 + static_cast<double>(k) * dt, t1);
        const CouplerState state = schedule_state(t, schedule, model);
        line.clear();
        append_number(line, t);
        line.push_back(',');
        append_number(line, state.kappa);
        line.push_back(',');
        append_number(line, state.common_pull);
        line.push_back('\n');
        out << line;
    }
}

void write_map_csv(std::ostream& out, const std::vector<double>& row_axis,
                   const std::vector<double>& col_axis,
                   const std::vector<std::vector<double>>& cells) {
    if (cells.size() != row_axis.size())
        throw std::invalid_argument("map rows do not match the row axis");
    std::string line;
    for (const double c : col_axis) {
        line.push_back(',');
        append_number(line, c);
    }
    line.push_back('\n');
    out << line;
    for (std::size_t i = 0; i < row_axis.size(); ++i) {
        if (cells[i].size() != col_axis.size())
            throw std::invalid_argument("map columns do not match the column axis");
        line.clear();
        append_number(line, row_axis[i]);
        for (const double v : cells[i]) {
            line.push_back(',');
            append_number(line, v);
        }
        line.push_back('\n');
        out << line;
    }
}

void write_correlation_csv(std::ostream& out, const FidelityReport& report) {
    out << "lag,correlation\n";
    std::string line;
    for (std::size_t i = 0; i < report.correlation.size(); ++i) {
        line.clear();
        append_number(line, report.first_lag + static_cast<double>(i) * report.lag_step);
        line.push_back(',');
        append_number(line, report.correlation[i]);
        line.push_back('\n');
        out << line;
    }
}

std::string fidelity_report_json(const FidelityReport& report) {
    const json j{{"fidelity", report.F},
                 {"best_lag", report.best_lag},
                 {"response_energy", report.response_energy}};
    return j.dump(2) + "\n";
}

std::string decay_fit_json(const DecayFit& fit) {
    const json j{{"T_decay", fit.T_decay},
                 {"amplitude", fit.amplitude},
                 {"residual_rms", fit.residual_rms},
                 {"Q_eff", fit.Q_eff}};
    return j.dump(2) + "\n";
}

std::string resonance_fit_json(const ResonanceFit& fit) {
    const json j{{"f_r", fit.f_r},
                 {"Q_l", fit.Q_l},
                 {"Q_c_mag", fit.Q_c_mag},
                 {"phi0", fit.phi0},
                 {"Q_i", fit.Q_i},
                 {"amplitude", fit.amplitude},
                 {"phase_offset", fit.phase_offset},
                 {"delay", fit.delay},
                 {"rms_residual", fit.rms_residual}};
    return j.dump(2) + "\n";
}

std::string memory_series_json(const std::vector<MemoryPoint>& points,
                               double revival_period_s) {
    json series = json::array();
    for (const MemoryPoint& p : points)
        series.push_back(json{{"cycles", p.cycles},
                              {"storage_time", p.storage_time},
                              {"release_time", p.release_time},
                              {"fidelity", p.report.F},
                              {"best_lag", p.report.best_lag},
                              {"response_energy", p.report.response_energy}});
    const json j{{"revival_period", revival_period_s}, {"points", std::move(series)}};
    return j.dump(2) + "\n";
}

CsvTable read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("csv is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    CsvTable table;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const std::size_t comma = line.find(',', pos);
        const std::size_t end = comma == std::string::npos ? line.size() : comma;
        table.header.push_back(line.substr(pos, end - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    table.columns.resize(table.header.size());

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t start = 0;
        std::size_t column = 0;
        while (start <= line.size()) {
            const std::size_t comma = line.find(',', start);
            const std::size_t end = comma == std::string::npos ? line.size() : comma;
            if (column >= table.header.size())
                throw ConfigError("csv row " + std::to_string(row) + " has too many fields");
            std::size_t lo = start;
            std::size_t hi = end;
            while (lo < hi && line[lo] == ' ') ++lo;
            while (hi > lo && line[hi - 1] == ' ') --hi;
            double value = 0.0;
            const auto res = std::from_chars(line.data() + lo, line.data() + hi, value);
            if (res.ec != std::errc() || res.ptr != line.data() + hi)
                throw ConfigError("csv row " + std::to_string(row) +
                                  " holds a non-numeric field");
            table.columns[column].push_back(value);
            ++column;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (column != table.header.size())
            throw ConfigError("csv row " + std::to_string(row) + " has too few fields");
    }
    return table;
}

}  // namespace qmem
