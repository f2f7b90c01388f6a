#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qmem/io.hpp"
#include "qmem/model.hpp"
#include "support/testutil.hpp"

using namespace qmem;

namespace {

struct CliResult {
    int code = -1;
    std::string text;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + QMEM_CLI_PATH + "\" " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) result.text += buf;
    const int status = pclose(pipe);
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string preset(const char* name) {
    return std::string(QMEM_PRESET_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("design prints the matched coupling rate") {
    const CliResult r = run_cli("design 4.38e6 6e6");
    CHECK(r.code == 0);
    CHECK(r.text == "2.009e+07\n");

    CHECK(run_cli("design").code != 0);
    CHECK(run_cli("").code != 0);
}

TEST_CASE("validate accepts every shipped preset") {
    for (const char* name :
         {"paper-ideal.json", "paper-disordered.json", "paper-measured.json"}) {
        const CliResult r = run_cli("validate --config \"" + preset(name) + "\"");
        CHECK(r.code == 0);
        CHECK(r.text == "config ok\n");
    }
}

TEST_CASE("config problems exit with status 2") {
    testutil::ScratchDir scratch;

    nlohmann::json cfg = nlohmann::json::parse(read_file(preset("paper-ideal.json")));
    cfg["device"]["internal"][0]["gamma"] = -5.0;
    write_file(scratch.str() + "/bad.json", cfg.dump());
    CliResult r = run_cli("validate --config \"" + scratch.str() + "/bad.json\"");
    CHECK(r.code == 2);
    CHECK(r.text.find("config error:") != std::string::npos);

    write_file(scratch.str() + "/unparsable.json", "{");
    r = run_cli("validate --config \"" + scratch.str() + "/unparsable.json\"");
    CHECK(r.code == 2);

    r = run_cli("validate --config \"" + scratch.str() + "/absent.json\"");
    CHECK(r.code == 2);
}

TEST_CASE("simulate runs the recording protocol and writes a deterministic trace") {
    testutil::ScratchDir scratch;
    const std::string base = "simulate --config \"" + preset("paper-ideal.json") + "\"";

    const CliResult r = run_cli(base + " --out \"" + scratch.str() + "/a\"");
    CHECK(r.code == 0);
    CHECK(r.text.find("simulate:") != std::string::npos);

    const std::string trace = read_file(scratch.str() + "/a/trace.csv");
    CHECK(trace.rfind("t,re_s_in,im_s_in,re_s_out,im_s_out,re_a_c,im_a_c,re_b_1,im_b_1",
                      0) == 0);

    const nlohmann::json summary =
        nlohmann::json::parse(read_file(scratch.str() + "/a/simulate.json"));
    const double e_in = summary.at("input_energy").get<double>();
    const double e_out = summary.at("output_energy").get<double>();
    const double e_left = summary.at("final_stored_energy").get<double>();
    const auto rows =
        static_cast<std::size_t>(std::count(trace.begin(), trace.end(), '\n'));
    CHECK(summary.at("samples").get<std::size_t>() + 1 == rows);
    CHECK(summary.at("samples").get<std::size_t>() > 1000);
    CHECK(e_in > 0.0);
    // lossless device: waveguide balance closes up to sampling error
    CHECK(std::abs(e_out + e_left - e_in) < 1e-3 * e_in);

    const CliResult again = run_cli(base + " --out \"" + scratch.str() + "/b\"");
    CHECK(again.code == 0);
    CHECK(read_file(scratch.str() + "/b/trace.csv") == trace);
}

TEST_CASE("memory reports the revival period and the fidelity series") {
    testutil::ScratchDir scratch;
    const CliResult r = run_cli("memory --config \"" + preset("paper-ideal.json") +
                                "\" --out \"" + scratch.str() + "\"");
    CHECK(r.code == 0);
    CHECK(r.text.find("memory: revival period") != std::string::npos);

    const nlohmann::json series =
        nlohmann::json::parse(read_file(scratch.str() + "/memory.json"));
    const double period = series.at("revival_period").get<double>();
    CHECK(period > 1.5e-7);
    CHECK(period < 1.85e-7);
    REQUIRE(series.at("points").size() == 1);
    CHECK(series.at("points")[0].at("cycles").get<int>() == 1);
    CHECK(series.at("points")[0].at("fidelity").get<double>() > 0.9);

    const std::string corr = read_file(scratch.str() + "/correlation_1.csv");
    CHECK(corr.rfind("lag,correlation", 0) == 0);
}

TEST_CASE("fit recognizes decay series and resonance scans") {
    testutil::ScratchDir scratch;

    {
        std::string csv = "t,fidelity\n";
        for (int k = 0; k < 24; ++k) {
            const double t = 1e-6 + 1e-6 * k;
            csv += format_number(t) + "," +
                   format_number(0.9 * std::exp(-t / 1.144e-5)) + "\n";
        }
        write_file(scratch.str() + "/decay.csv", csv);
    }
    CliResult r = run_cli("fit \"" + scratch.str() + "/decay.csv\" --fref 5.992e9" +
                          " --out \"" + scratch.str() + "/decay\"");
    CHECK(r.code == 0);
    CHECK(r.text.find("fit: T_decay") != std::string::npos);
    nlohmann::json fit =
        nlohmann::json::parse(read_file(scratch.str() + "/decay/fit.json"));
    CHECK(fit.at("T_decay").get<double>() ==
          doctest::Approx(1.144e-5).epsilon(1e-6));
    CHECK(fit.at("Q_eff").get<double>() ==
          doctest::Approx(2.0 * M_PI * 5.992e9 * 1.144e-5).epsilon(1e-6));

    {
        // notched-port reflection with a bit of cable delay
        const double f_r = 6e9, Q_l = 8e4, Q_c = 1e5, phi0 = 0.1, tau = 5e-9;
        std::string csv = "frequency,re_s11,im_s11\n";
        for (int k = 0; k < 201; ++k) {
            const double f = f_r * (1.0 + (k - 100) * 5e-7);
            const Complex dip =
                1.0 - (2.0 * Q_l / Q_c) * std::exp(Complex(0.0, phi0)) /
                          (1.0 + Complex(0.0, 2.0 * Q_l) * (f / f_r - 1.0));
            const Complex z =
                std::exp(Complex(0.0, 0.3 - 2.0 * M_PI * f * tau)) * dip;
            csv += format_number(f) + "," + format_number(z.real()) + "," +
                   format_number(z.imag()) + "\n";
        }
        write_file(scratch.str() + "/scan.csv", csv);
    }
    r = run_cli("fit \"" + scratch.str() + "/scan.csv\" --out \"" + scratch.str() +
                "/scan\"");
    CHECK(r.code == 0);
    CHECK(r.text.find("fit: resonance f_r") != std::string::npos);
    fit = nlohmann::json::parse(read_file(scratch.str() + "/scan/fit.json"));
    CHECK(fit.at("f_r").get<double>() == doctest::Approx(6e9).epsilon(1e-6));
    CHECK(fit.at("Q_l").get<double>() == doctest::Approx(8e4).epsilon(1e-3));

    write_file(scratch.str() + "/one.csv", "only\n1\n2\n");
    r = run_cli("fit \"" + scratch.str() + "/one.csv\"");
    CHECK(r.code == 2);
    CHECK(r.text.find("cannot infer fit type") != std::string::npos);
}

TEST_CASE("spectroscopy sweeps flux rows against frequency columns") {
    testutil::ScratchDir scratch;

    ExperimentConfig config;
    config.device = testutil::lossy_device(5e4);
    config.spectroscopy.present = true;
    config.spectroscopy.rows.values = {0.3, 0.33};
    for (int k = 0; k < 21; ++k)
        config.spectroscopy.cols.values.push_back(5.985e9 + 3e6 * k);
    write_file(scratch.str() + "/scan.json", serialize_config(config));

    const CliResult r = run_cli("spectroscopy --config \"" + scratch.str() +
                                "/scan.json\" --out \"" + scratch.str() + "\"");
    CHECK(r.code == 0);
    CHECK(r.text.find("spectroscopy: 2x21 map") != std::string::npos);

    std::ifstream mag_file(scratch.str() + "/spectroscopy_mag.csv");
    const CsvTable mag = read_csv(mag_file);
    REQUIRE(mag.header.size() == 22);
    REQUIRE(mag.columns[0].size() == 2);
    CHECK(mag.columns[0][0] == 0.3);
    double min_mag = 2.0;
    for (std::size_t j = 1; j < 22; ++j)
        for (const double v : mag.columns[j]) {
            CHECK(v <= 1.0 + 1e-9);
            min_mag = std::min(min_mag, v);
        }
    // The coupler dominates every hybridized linewidth at this Q_i, so the
    // overcoupled dips stay shallow; the map just has to show real structure.
    CHECK(min_mag < 0.95);

    const nlohmann::json summary =
        nlohmann::json::parse(read_file(scratch.str() + "/spectroscopy.json"));
    CHECK(summary.at("min_mag").get<double>() == doctest::Approx(min_mag).epsilon(1e-12));
    const double f_min = summary.at("min_frequency").get<double>();
    CHECK(f_min >= 5.985e9);
    CHECK(f_min <= 6.045e9);
}

TEST_CASE("calibrate locates the matched point on the voltage map") {
    testutil::ScratchDir scratch;

    ExperimentConfig config;
    config.device = testutil::ideal_device();
    config.pulse.fwhm = 5.7e-8;
    config.pulse.center = 2.5e-7;
    config.reflection_map.present = true;
    config.reflection_map.rows.values = {-0.01, 0.0, 0.01};
    config.reflection_map.cols.values = {5.997e9, 6e9, 6.003e9};
    write_file(scratch.str() + "/map.json", serialize_config(config));

    const CliResult r = run_cli("calibrate --config \"" + scratch.str() +
                                "/map.json\" --out \"" + scratch.str() + "\"");
    CHECK(r.code == 0);
    CHECK(r.text.find("calibrate: reflection minimum") != std::string::npos);

    const nlohmann::json summary =
        nlohmann::json::parse(read_file(scratch.str() + "/calibrate.json"));
    CHECK(summary.at("matched_kappa").get<double>() ==
          doctest::Approx(20089856.701176006).epsilon(1e-9));
    // flux bias sits at the matched point, so zero volts wins the map
    CHECK(summary.at("min_voltage").get<double>() == 0.0);
    CHECK(summary.at("min_frequency").get<double>() == 6e9);
    CHECK(summary.at("min_intensity").get<double>() < 0.5);
    CHECK(std::abs(summary.at("matched_voltage").get<double>()) < 5e-4);

    std::ifstream map_file(scratch.str() + "/reflection_map.csv");
    const CsvTable map = read_csv(map_file);
    REQUIRE(map.header.size() == 4);
    REQUIRE(map.columns[0].size() == 3);
}

}  // TEST_SUITE
