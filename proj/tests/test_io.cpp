#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qmem/io.hpp"
#include "qmem/schedule.hpp"
#include "support/testutil.hpp"

using namespace qmem;

namespace {

std::string device_text() {
    return device_to_json_text(testutil::lossy_device(4.3e5));
}

// {"device": <full device>, <extra sections>}
std::string config_text(const std::string& extra) {
    std::string text = "{\"device\": " + device_text();
    if (!extra.empty()) text += ", " + extra;
    text += "}";
    return text;
}

bool config_error_contains(const std::string& text, const std::string& needle) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("device json round-trips bitwise") {
    const DeviceModel dev = testutil::lossy_device(4.3e5);
    const std::string text = device_to_json_text(dev);
    const DeviceModel back = device_from_json_text(text);

    CHECK(back.bank.common.frequency == dev.bank.common.frequency);
    CHECK(back.bank.common.gamma == dev.bank.common.gamma);
    REQUIRE(back.bank.internal.size() == dev.bank.internal.size());
    for (std::size_t j = 0; j < dev.bank.internal.size(); ++j) {
        CHECK(back.bank.internal[j].frequency == dev.bank.internal[j].frequency);
        CHECK(back.bank.internal[j].gamma == dev.bank.internal[j].gamma);
        CHECK(back.bank.internal[j].label == dev.bank.internal[j].label);
        CHECK(back.bank.couplings[j] == dev.bank.couplings[j]);
    }
    CHECK(back.coupler.critical_current == dev.coupler.critical_current);
    CHECK(back.coupler.loop_inductance == dev.coupler.loop_inductance);
    CHECK(back.coupler.wirebond_inductance == dev.coupler.wirebond_inductance);
    CHECK(back.coupler.kappa_scale == dev.coupler.kappa_scale);
    CHECK(back.coupler.pull_scale == dev.coupler.pull_scale);
    CHECK(back.coupler.flux_per_volt == dev.coupler.flux_per_volt);
    CHECK(back.coupler.flux_offset == dev.coupler.flux_offset);
    CHECK(back.coupler.switchoff_flux == dev.coupler.switchoff_flux);
    CHECK(back.reference_input_frequency == dev.reference_input_frequency);

    CHECK(device_to_json_text(back) == text);
}

TEST_CASE("unknown keys are rejected wherever they appear") {
    CHECK_THROWS_WITH_AS((void)parse_config(config_text("\"driver\": 1")),
                         "unknown key \"driver\" in config", ConfigError);

    std::string bad_device = device_text();
    nlohmann::json dev = nlohmann::json::parse(bad_device);
    dev["mystery"] = 1;
    CHECK_THROWS_WITH_AS((void)device_from_json_text(dev.dump()),
                         "unknown key \"mystery\" in device", ConfigError);

    dev = nlohmann::json::parse(device_text());
    dev["coupler"]["ic"] = 2e-7;
    CHECK_THROWS_WITH_AS((void)device_from_json_text(dev.dump()),
                         "unknown key \"ic\" in device.coupler", ConfigError);

    dev = nlohmann::json::parse(device_text());
    dev["internal"][2]["q_factor"] = 1e5;
    CHECK_THROWS_WITH_AS((void)device_from_json_text(dev.dump()),
                         "unknown key \"q_factor\" in device.internal[2]",
                         ConfigError);

    CHECK(config_error_contains(
        config_text("\"pulse\": {\"fwhm\": 1e-9, \"center\": 1e-8, \"width\": 2}"),
        "unknown key \"width\" in pulse"));
    CHECK(config_error_contains(
        config_text("\"outputs\": {\"folder\": \"x\"}"),
        "unknown key \"folder\" in outputs"));
}

TEST_CASE("device validation failures surface as config errors") {
    nlohmann::json dev = nlohmann::json::parse(device_text());
    dev["internal"][0]["gamma"] = -5.0;
    try {
        (void)device_from_json_text(dev.dump());
        FAIL("negative gamma accepted");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.rfind("invalid device:", 0) == 0);
        CHECK(what.find("gamma") != std::string::npos);
    }

    dev = nlohmann::json::parse(device_text());
    dev["internal"][1]["frequency"] = "high";
    CHECK_THROWS_WITH_AS((void)device_from_json_text(dev.dump()),
                         "device.internal[1].frequency must be a number",
                         ConfigError);
}

TEST_CASE("full experiment document parses into typed sections") {
    const std::string text = config_text(
        "\"solver\": {\"dt\": 5e-11, \"ramp\": 2e-9},"
        "\"pulse\": {\"shape\": \"gaussian\", \"fwhm\": 5.7e-8, \"center\": 2.5e-7,"
        " \"carrier_detuning\": 1e6, \"amplitude\": 0.5},"
        "\"protocol\": {\"record_flux\": \"matched\", \"cycles\": [1, 2, 5]},"
        "\"schedule\": {\"ramp\": 1e-9, \"segments\": ["
        "  {\"t_start\": 0, \"t_end\": 1e-6, \"flux\": 0.33},"
        "  {\"t_start\": 1e-6, \"t_end\": 2e-6, \"kappa\": 1e6, \"pull\": -2e6}]},"
        "\"spectroscopy\": {\"flux\": [0.1, 0.2], \"frequency\":"
        " {\"min\": 5.99e9, \"max\": 6.01e9, \"count\": 11}},"
        "\"reflection_map\": {\"voltage\": {\"min\": -0.03, \"max\": 0.03,"
        " \"count\": 3}, \"frequency\": [6e9], \"window\": [1e-7, 4e-7]},"
        "\"outputs\": {\"directory\": \"out\", \"formats\": [\"csv\"]},"
        "\"seed\": 7");
    const ExperimentConfig config = parse_config(text);

    CHECK(config.solver.dt == 5e-11);
    CHECK(config.solver.ramp == 2e-9);
    CHECK(config.pulse.fwhm == 5.7e-8);
    CHECK(config.pulse.amplitude == 0.5);
    CHECK(config.protocol.present);
    CHECK(std::isnan(config.protocol.record_flux));
    CHECK(config.protocol.cycles == std::vector<int>{1, 2, 5});

    REQUIRE(config.schedule.present);
    REQUIRE(config.schedule.schedule.segments.size() == 2);
    CHECK(config.schedule.schedule.segments[0].flux == 0.33);
    CHECK_FALSE(config.schedule.schedule.segments[0].direct);
    CHECK(config.schedule.schedule.segments[1].direct);
    CHECK(config.schedule.schedule.segments[1].state.kappa == 1e6);
    CHECK(config.schedule.schedule.segments[1].state.common_pull == -2e6);

    REQUIRE(config.spectroscopy.present);
    CHECK(config.spectroscopy.rows.values == std::vector<double>{0.1, 0.2});
    REQUIRE(config.spectroscopy.cols.values.size() == 11);
    CHECK(config.spectroscopy.cols.values.front() == 5.99e9);
    CHECK(config.spectroscopy.cols.values.back() == 6.01e9);
    CHECK(config.spectroscopy.cols.values[5] ==
          doctest::Approx(6e9).epsilon(1e-12));

    REQUIRE(config.reflection_map.present);
    CHECK(config.reflection_map.rows.values.size() == 3);
    CHECK(config.reflection_map.window_start == 1e-7);
    CHECK(config.reflection_map.window_end == 4e-7);

    CHECK(config.outputs.directory == "out");
    CHECK(config.outputs.csv);
    CHECK_FALSE(config.outputs.json);
    CHECK(config.seed == 7);

    // serialize -> parse brings back the same document
    const ExperimentConfig again = parse_config(serialize_config(config));
    CHECK(again.solver.dt == config.solver.dt);
    CHECK(again.pulse.fwhm == config.pulse.fwhm);
    CHECK(std::isnan(again.protocol.record_flux));
    CHECK(again.protocol.cycles == config.protocol.cycles);
    REQUIRE(again.schedule.present);
    CHECK(again.schedule.schedule.segments[1].state.kappa == 1e6);
    CHECK(again.spectroscopy.cols.values == config.spectroscopy.cols.values);
    CHECK(again.reflection_map.window_end == config.reflection_map.window_end);
    CHECK(again.outputs.csv == config.outputs.csv);
    CHECK(again.outputs.json == config.outputs.json);
    CHECK(again.seed == config.seed);
    CHECK(again.device.bank.internal[3].frequency ==
          config.device.bank.internal[3].frequency);
}

TEST_CASE("grid specs accept lists and ranges, reject the rest") {
    auto sweep = [](const std::string& flux, const std::string& freq) {
        return config_text("\"spectroscopy\": {\"flux\": " + flux +
                           ", \"frequency\": " + freq + "}");
    };

    const ExperimentConfig single =
        parse_config(sweep("{\"min\": 0.3, \"max\": 0.9, \"count\": 1}", "[6e9]"));
    CHECK(single.spectroscopy.rows.values == std::vector<double>{0.3});

    CHECK_THROWS_WITH_AS(
        (void)parse_config(sweep("{\"min\": 0.1, \"max\": 0.4, \"count\": 0}", "[6e9]")),
        "spectroscopy.flux.count must be >= 1", ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_config(sweep("[0.3]", "{\"min\": 6e9, \"max\": 6e9, \"count\": 2}")),
        "spectroscopy.frequency.max must exceed .min", ConfigError);
    CHECK_THROWS_WITH_AS((void)parse_config(sweep("[]", "[6e9]")),
                         "spectroscopy.flux must not be empty", ConfigError);
    CHECK_THROWS_WITH_AS((void)parse_config(sweep("[0.1, \"x\"]", "[6e9]")),
                         "spectroscopy.flux[1] must be a number", ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_config(sweep("0.3", "[6e9]")),
        "spectroscopy.flux must be an array or a {min, max, count} object",
        ConfigError);
}

TEST_CASE("section level value checks") {
    CHECK_THROWS_WITH_AS(
        (void)parse_config(config_text("\"pulse\": {\"fwhm\": 0, \"center\": 1e-7}")),
        "pulse.fwhm must be > 0", ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_config(config_text("\"protocol\": {\"cycles\": [1, 0]}")),
        "protocol.cycles entries must be >= 1", ConfigError);
    CHECK_THROWS_WITH_AS((void)parse_config(config_text("\"seed\": -3")),
                         "seed must be a non-negative integer", ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_config(config_text(
            "\"outputs\": {\"formats\": [\"yaml\"]}")),
        "outputs.formats entries must be \"csv\" or \"json\"", ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_config(config_text(
            "\"schedule\": {\"segments\": [{\"t_start\": 0, \"t_end\": 1e-6,"
            " \"flux\": 0.3, \"kappa\": 1e6}]}")),
        "schedule.segments[0] must set either \"flux\" or \"kappa\"+\"pull\"",
        ConfigError);
    CHECK(config_error_contains(
        config_text("\"schedule\": {\"segments\": [{\"t_start\": 0, \"t_end\": 1e-6,"
                    " \"flux\": 0.3}, {\"t_start\": 2e-6, \"t_end\": 3e-6,"
                    " \"flux\": 0.1}]}"),
        "invalid schedule:"));
    CHECK(config_error_contains("{\"pulse\": {}}", "config is missing \"device\""));
    CHECK(config_error_contains("not json at all", "config json:"));
}

TEST_CASE("number formatting survives a decimal round trip") {
    const double values[] = {0.0,    1.0,      -1.5,   0.1,   6e9,
                             1e-10,  5e-324,   1.7976931348623157e308,
                             M_PI,   20089856.701176006, -6.000123e9};
    for (const double v : values) {
        const std::string s = format_number(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
        CHECK(s.find(',') == std::string::npos);
        CHECK(s.find(' ') == std::string::npos);
    }
    CHECK(std::signbit(std::strtod(format_number(-0.0).c_str(), nullptr)));
}

TEST_CASE("trace csv layout is byte-exact") {
    SimulationResult r;
    r.input.samples = {Complex(1, 0), Complex(0.5, 0.25), Complex(0, 0)};
    r.output.samples = {Complex(2, 3), Complex(4, 5), Complex(6, 7)};
    r.states.resize(3);
    for (std::size_t k = 0; k < 3; ++k) {
        r.states[k].t = static_cast<double>(k) * 1e-9;
        r.states[k].a_c = Complex(static_cast<double>(k), -static_cast<double>(k));
        r.states[k].b = {Complex(2.0 * static_cast<double>(k), 0.5)};
    }

    std::ostringstream out;
    write_trace_csv(out, r);
    // The writer keeps the sign bit, so the negated zero in row 0 prints as -0.
    CHECK(out.str() ==
          "t,re_s_in,im_s_in,re_s_out,im_s_out,re_a_c,im_a_c,re_b_1,im_b_1\n"
          "0,1,0,2,3,0,-0,0,0.5\n"
          "1e-09,0.5,0.25,4,5,1,-1,2,0.5\n"
          "2e-09,0,0,6,7,2,-2,4,0.5\n");

    std::istringstream in(out.str());
    const CsvTable table = read_csv(in);
    REQUIRE(table.header.size() == 9);
    CHECK(table.header[0] == "t");
    CHECK(table.header[7] == "re_b_1");
    CHECK(table.columns[0] == std::vector<double>{0.0, 1e-9, 2e-9});
    CHECK(table.columns[4] == std::vector<double>{3.0, 5.0, 7.0});
    CHECK(table.columns[8] == std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("schedule and map and correlation csv writers") {
    const ControlSchedule schedule =
        constant_direct_schedule(0.5, -0.25, 0.0, 1e-8, 1e-9);
    const CouplerModel coupler = testutil::ideal_device().coupler;
    std::ostringstream out;
    write_schedule_csv(out, schedule, coupler, 2e-9);
    // Time stamps are k * dt in IEEE arithmetic; 3 * 2e-9 lands one ulp above
    // 6e-9, and shortest round-trip formatting keeps that visible.
    CHECK(out.str() ==
          "t,kappa,pull\n"
          "0,0.5,-0.25\n"
          "2e-09,0.5,-0.25\n"
          "4e-09,0.5,-0.25\n"
          "6.000000000000001e-09,0.5,-0.25\n"
          "8e-09,0.5,-0.25\n"
          "1e-08,0.5,-0.25\n");
    CHECK_THROWS_AS(write_schedule_csv(out, schedule, coupler, 0.0),
                    std::invalid_argument);

    std::ostringstream map;
    write_map_csv(map, {0.1, 0.2}, {1.0, 2.0, 3.0},
                  {{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}});
    CHECK(map.str() ==
          ",1,2,3\n"
          "0.1,1,2,3\n"
          "0.2,4,5,6\n");
    CHECK_THROWS_AS(write_map_csv(map, {0.1}, {1.0}, {{1.0}, {2.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(write_map_csv(map, {0.1}, {1.0, 2.0}, {{1.0}}),
                    std::invalid_argument);

    FidelityReport report;
    report.correlation = {0.25, 1.0, 0.5};
    report.first_lag = -1e-9;
    report.lag_step = 1e-9;
    std::ostringstream corr;
    write_correlation_csv(corr, report);
    CHECK(corr.str() ==
          "lag,correlation\n"
          "-1e-09,0.25\n"
          "0,1\n"
          "1e-09,0.5\n");
}

TEST_CASE("csv reader rejects malformed rows") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_csv(in);
    };
    CHECK_THROWS_WITH_AS((void)parse(""), "csv is empty", ConfigError);
    CHECK_THROWS_WITH_AS((void)parse("a,b\n1\n"), "csv row 2 has too few fields",
                         ConfigError);
    CHECK_THROWS_WITH_AS((void)parse("a,b\n1,2,3\n"),
                         "csv row 2 has too many fields", ConfigError);
    CHECK_THROWS_WITH_AS((void)parse("a,b\n1,2\n3,oops\n"),
                         "csv row 3 holds a non-numeric field", ConfigError);

    const CsvTable relaxed = parse("a,b\r\n\r\n 1 , 2 \r\n");
    CHECK(relaxed.header[1] == "b");
    REQUIRE(relaxed.columns[0].size() == 1);
    CHECK(relaxed.columns[0][0] == 1.0);
    CHECK(relaxed.columns[1][0] == 2.0);
}

TEST_CASE("json report emitters expose every scalar") {
    FidelityReport report;
    report.F = 0.93;
    report.best_lag = 1.37e-7;
    report.response_energy = 0.97;
    nlohmann::json j = nlohmann::json::parse(fidelity_report_json(report));
    CHECK(j.at("fidelity").get<double>() == 0.93);
    CHECK(j.at("best_lag").get<double>() == 1.37e-7);
    CHECK(j.at("response_energy").get<double>() == 0.97);

    DecayFit fit;
    fit.T_decay = 1.144e-5;
    fit.amplitude = 0.9;
    fit.residual_rms = 1e-4;
    fit.Q_eff = 4.3e5;
    j = nlohmann::json::parse(decay_fit_json(fit));
    CHECK(j.at("T_decay").get<double>() == 1.144e-5);
    CHECK(j.at("Q_eff").get<double>() == 4.3e5);

    ResonanceFit res;
    res.f_r = 6e9;
    res.Q_i = 4.3e5;
    j = nlohmann::json::parse(resonance_fit_json(res));
    CHECK(j.at("f_r").get<double>() == 6e9);
    CHECK(j.at("Q_i").get<double>() == 4.3e5);
    CHECK(j.contains("phase_offset"));
    CHECK(j.contains("rms_residual"));

    MemoryPoint point;
    point.cycles = 2;
    point.storage_time = 3.3e-7;
    point.release_time = 7.7e-7;
    point.report = report;
    j = nlohmann::json::parse(memory_series_json({point}, 1.667e-7));
    CHECK(j.at("revival_period").get<double>() == 1.667e-7);
    REQUIRE(j.at("points").size() == 1);
    CHECK(j.at("points")[0].at("cycles").get<int>() == 2);
    CHECK(j.at("points")[0].at("fidelity").get<double>() == 0.93);
}

TEST_CASE("config files resolve device paths next to themselves") {
    testutil::ScratchDir scratch;
    {
        std::ofstream dev(scratch.str() + "/device.json");
        dev << device_text();
    }
    {
        std::ofstream cfg(scratch.str() + "/config.json");
        cfg << "{\"device\": \"device.json\", \"seed\": 11}";
    }
    const ExperimentConfig config = load_config(scratch.str() + "/config.json");
    CHECK(config.device.reference_input_frequency == 6e9);
    CHECK(config.device.bank.internal.size() == 4);
    CHECK(config.seed == 11);

    {
        std::ofstream cfg(scratch.str() + "/broken.json");
        cfg << "{\"device\": \"no-such-device.json\"}";
    }
    try {
        (void)load_config(scratch.str() + "/broken.json");
        FAIL("missing device file accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("cannot open device file", 0) == 0);
    }

    try {
        (void)load_config(scratch.str() + "/absent.json");
        FAIL("missing config accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("cannot open config file", 0) == 0);
    }
}

}  // TEST_SUITE
