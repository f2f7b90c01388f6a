#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qmem/calibration.hpp"
#include "qmem/io.hpp"
#include "qmem/metrics.hpp"
#include "qmem/pulses.hpp"
#include "qmem/spectroscopy.hpp"

namespace {

using namespace qmem;

struct Artifacts {
    std::filesystem::path dir;
    bool csv = true;
    bool json = true;
};

Artifacts artifacts_for(const ExperimentConfig& config, const std::string& out_flag) {
    Artifacts a;
    a.dir = out_flag.empty() ? config.outputs.directory : out_flag;
    a.csv = config.outputs.csv;
    a.json = config.outputs.json;
    std::filesystem::create_directories(a.dir);
    return a;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

TemporalMode pulse_on_grid(const PulseSpec& pulse, double t0, double t_end, double dt,
                           double frame) {
    const auto n = static_cast<std::size_t>(std::ceil((t_end - t0) / dt - 1e-9)) + 1;
    return make_gaussian(pulse, {t0, dt, n}, frame);
}

double resolved_record_flux(const DeviceModel& model, double record_flux) {
    if (!std::isnan(record_flux)) return record_flux;
    const CombStats stats = comb_statistics(model.bank);
    double g_mean = 0.0;
    for (const double g : model.bank.couplings) g_mean += std::abs(g);
    g_mean /= static_cast<double>(model.bank.couplings.size());
    return matched_flux(model, matched_kappa(g_mean, stats.spacing));
}

void require_pulse(const ExperimentConfig& config) {
    if (!(config.pulse.fwhm > 0.0))
        throw ConfigError("this command needs a \"pulse\" section");
}

int cmd_simulate(const std::string& config_path, const std::string& out) {
    const ExperimentConfig config = load_config(config_path);
    const Artifacts art = artifacts_for(config, out);
    const DeviceModel& model = config.device;
    const double f_d = model.reference_input_frequency;

    SimulationResult result;
    if (config.schedule.present) {
        require_pulse(config);
        const ControlSchedule& schedule = config.schedule.schedule;
        const TemporalMode input = pulse_on_grid(
            config.pulse, schedule.start_time(), schedule.end_time(), config.solver.dt, f_d);
        result = simulate(model, input, schedule, config.solver.dt);
    } else if (config.protocol.present) {
        require_pulse(config);
        const double flux = resolved_record_flux(model, config.protocol.record_flux);
        const CombStats stats = comb_statistics(model.bank);
        const double t0 = config.pulse.center - 4.0 * config.pulse.fwhm;
        const double probe_end =
            config.pulse.center + 4.0 * config.pulse.fwhm + 3.0 / stats.spacing;
        const TemporalMode probe_input =
            pulse_on_grid(config.pulse, t0, probe_end, config.solver.dt, f_d);
        const SimulationResult probe =
            simulate(model, probe_input,
                     constant_flux_schedule(flux, t0, probe_input.end_time(),
                                            config.solver.ramp));
        ControlSchedule protocol =
            build_protocol(model, flux, config.protocol.cycles.front(), probe);
        const TemporalMode input =
            pulse_on_grid(config.pulse, t0, protocol.end_time(), config.solver.dt, f_d);
        protocol.segments.back().t_end = input.end_time();
        result = simulate(model, input, protocol, config.solver.dt);
    } else {
        throw ConfigError("simulate needs a \"schedule\" or \"protocol\" section");
    }

    const double e_in = waveguide_energy(result.input);
    const double e_out = waveguide_energy(result.output);
    if (art.csv) {
        std::ofstream trace(art.dir / "trace.csv", std::ios::binary);
        if (!trace) throw std::runtime_error("cannot write trace.csv");
        write_trace_csv(trace, result);
    }
    if (art.json) {
        char buffer[256];
        std::snprintf(buffer, sizeof buffer,
                      "{\n  \"samples\": %zu,\n  \"input_energy\": %.17g,\n"
                      "  \"output_energy\": %.17g,\n  \"final_stored_energy\": %.17g\n}\n",
                      result.states.size(), e_in, e_out,
                      stored_energy(result.states.back()));
        write_text(art.dir / "simulate.json", buffer);
    }
    std::printf("simulate: %zu samples, input energy %.6g, output energy %.6g\n",
                result.states.size(), e_in, e_out);
    return 0;
}

int cmd_spectroscopy(const std::string& config_path, const std::string& out, int jobs) {
    const ExperimentConfig config = load_config(config_path);
    if (!config.spectroscopy.present)
        throw ConfigError("spectroscopy needs a \"spectroscopy\" section");
    const Artifacts art = artifacts_for(config, out);
    const std::vector<double>& flux = config.spectroscopy.rows.values;
    const std::vector<double>& freq = config.spectroscopy.cols.values;

    const auto map = spectroscopy_map(config.device, flux, freq, jobs);
    std::vector<std::vector<double>> mag(map.size()), re(map.size()), im(map.size());
    std::size_t min_i = 0, min_j = 0;
    double min_mag = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < map.size(); ++i) {
        mag[i].resize(freq.size());
        re[i].resize(freq.size());
        im[i].resize(freq.size());
        for (std::size_t j = 0; j < freq.size(); ++j) {
            mag[i][j] = std::abs(map[i][j]);
            re[i][j] = map[i][j].real();
            im[i][j] = map[i][j].imag();
            if (mag[i][j] < min_mag) {
                min_mag = mag[i][j];
                min_i = i;
                min_j = j;
            }
        }
    }
    if (art.csv) {
        for (const auto& [name, cells] :
             {std::pair<const char*, const std::vector<std::vector<double>>*>{
                  "spectroscopy_mag.csv", &mag},
              {"spectroscopy_re.csv", &re},
              {"spectroscopy_im.csv", &im}}) {
            std::ofstream file(art.dir / name, std::ios::binary);
            if (!file) throw std::runtime_error(std::string("cannot write ") + name);
            write_map_csv(file, flux, freq, *cells);
        }
    }
    if (art.json) {
        char buffer[256];
        std::snprintf(buffer, sizeof buffer,
                      "{\n  \"min_mag\": %.17g,\n  \"min_flux\": %.17g,\n"
                      "  \"min_frequency\": %.17g\n}\n",
                      min_mag, flux[min_i], freq[min_j]);
        write_text(art.dir / "spectroscopy.json", buffer);
    }
    std::printf("spectroscopy: %zux%zu map, min |S11| = %.4g at flux %.6g, %.10g Hz\n",
                flux.size(), freq.size(), min_mag, flux[min_i], freq[min_j]);
    return 0;
}

int cmd_calibrate(const std::string& config_path, const std::string& out, int jobs) {
    const ExperimentConfig config = load_config(config_path);
    if (!config.reflection_map.present)
        throw ConfigError("calibrate needs a \"reflection_map\" section");
    require_pulse(config);
    const Artifacts art = artifacts_for(config, out);
    const DeviceModel& model = config.device;

    std::pair<double, double> window{config.reflection_map.window_start,
                                     config.reflection_map.window_end};
    if (std::isnan(window.first)) {
        window.first = config.pulse.center - 1.5 * config.pulse.fwhm;
        window.second = config.pulse.center + 1.5 * config.pulse.fwhm;
    }
    ReflectionMapOptions options;
    options.dt = config.solver.dt;
    options.jobs = jobs;
    const ReflectionMap map =
        initial_reflection_map(model, config.pulse, config.reflection_map.rows.values,
                               config.reflection_map.cols.values, window, options);

    std::size_t min_i = 0, min_j = 0;
    double min_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < map.intensity.size(); ++i)
        for (std::size_t j = 0; j < map.intensity[i].size(); ++j)
            if (map.intensity[i][j] < min_val) {
                min_val = map.intensity[i][j];
                min_i = i;
                min_j = j;
            }

    const CombStats stats = comb_statistics(model.bank);
    double g_mean = 0.0;
    for (const double g : model.bank.couplings) g_mean += std::abs(g);
    g_mean /= static_cast<double>(model.bank.couplings.size());
    const double kappa_star = matched_kappa(g_mean, stats.spacing);
    const double flux_star = matched_flux(model, kappa_star);
    const double voltage_star = flux_to_voltage(flux_star, model.coupler);

    if (art.csv) {
        std::ofstream file(art.dir / "reflection_map.csv", std::ios::binary);
        if (!file) throw std::runtime_error("cannot write reflection_map.csv");
        write_map_csv(file, map.voltages, map.frequencies, map.intensity);
    }
    if (art.json) {
        char buffer[512];
        std::snprintf(buffer, sizeof buffer,
                      "{\n  \"min_intensity\": %.17g,\n  \"min_voltage\": %.17g,\n"
                      "  \"min_frequency\": %.17g,\n  \"matched_kappa\": %.17g,\n"
                      "  \"matched_flux\": %.17g,\n  \"matched_voltage\": %.17g\n}\n",
                      min_val, map.voltages[min_i], map.frequencies[min_j], kappa_star,
                      flux_star, voltage_star);
        write_text(art.dir / "calibrate.json", buffer);
    }
    std::printf(
        "calibrate: reflection minimum %.4g at %.6g V, %.10g Hz; matched kappa %.6g Hz "
        "at flux %.6g (%.6g V)\n",
        min_val, map.voltages[min_i], map.frequencies[min_j], kappa_star, flux_star,
        voltage_star);
    return 0;
}

int cmd_memory(const std::string& config_path, const std::string& out, int jobs,
               double random_disorder, std::optional<std::uint64_t> seed_flag) {
    ExperimentConfig config = load_config(config_path);
    if (!config.protocol.present) throw ConfigError("memory needs a \"protocol\" section");
    require_pulse(config);
    const Artifacts art = artifacts_for(config, out);

    DeviceModel model = config.device;
    if (random_disorder > 0.0) {
        const std::uint64_t seed = seed_flag ? *seed_flag : config.seed;
        model.bank = with_random_disorder(model.bank, random_disorder, seed);
    }

    MemoryOptions options;
    options.dt = config.solver.dt;
    options.ramp = config.solver.ramp;
    options.record_flux = config.protocol.record_flux;
    options.jobs = jobs;

    const std::vector<MemoryPoint> points =
        run_memory_experiment(model, config.pulse, config.protocol.cycles, options);
    const double period = memory_cycle_time(model, config.pulse, options);

    if (art.json) write_text(art.dir / "memory.json", memory_series_json(points, period));
    if (art.csv) {
        for (const MemoryPoint& point : points) {
            const std::string name =
                "correlation_" + std::to_string(point.cycles) + ".csv";
            std::ofstream file(art.dir / name, std::ios::binary);
            if (!file) throw std::runtime_error("cannot write " + name);
            write_correlation_csv(file, point.report);
        }
    }
    std::printf("memory: revival period %.6g s; F(n=%d) = %.6g at lag %.6g s\n", period,
                points.front().cycles, points.front().report.F,
                points.front().report.best_lag);
    return 0;
}

int cmd_fit(const std::string& csv_path, const std::string& out, double f_ref) {
    std::ifstream in(csv_path);
    if (!in) throw ConfigError("cannot open " + csv_path);
    const CsvTable table = read_csv(in);

    const auto column = [&](const std::string& name) -> const std::vector<double>* {
        for (std::size_t i = 0; i < table.header.size(); ++i)
            if (table.header[i] == name) return &table.columns[i];
        return nullptr;
    };

    std::string text;
    std::string summary;
    if (column("re_s11") && column("im_s11") && column("frequency")) {
        const std::vector<double>& freq = *column("frequency");
        const std::vector<double>& re = *column("re_s11");
        const std::vector<double>& im = *column("im_s11");
        std::vector<Complex> s11(freq.size());
        for (std::size_t k = 0; k < freq.size(); ++k) s11[k] = Complex(re[k], im[k]);
        const ResonanceFit fit = fit_resonance(freq, s11);
        text = resonance_fit_json(fit);
        char buffer[256];
        std::snprintf(buffer, sizeof buffer,
                      "fit: resonance f_r %.10g Hz, Q_l %.6g, Q_i %.6g, |Q_c| %.6g",
                      fit.f_r, fit.Q_l, fit.Q_i, fit.Q_c_mag);
        summary = buffer;
    } else if (table.header.size() >= 2) {
        const DecayFit fit = fit_decay(table.columns[0], table.columns[1], f_ref);
        text = decay_fit_json(fit);
        char buffer[256];
        std::snprintf(buffer, sizeof buffer, "fit: T_decay %.6g s, amplitude %.6g",
                      fit.T_decay, fit.amplitude);
        summary = buffer;
    } else {
        throw ConfigError(
            "cannot infer fit type: need frequency/re_s11/im_s11 or two columns");
    }

    if (!out.empty()) {
        std::filesystem::create_directories(out);
        write_text(std::filesystem::path(out) / "fit.json", text);
    }
    std::fputs(text.c_str(), stdout);
    std::printf("%s\n", summary.c_str());
    return 0;
}

int cmd_design(double g, double delta) {
    std::printf("%.4g\n", matched_kappa(g, delta));
    return 0;
}

int cmd_validate(const std::string& config_path) {
    load_config(config_path);
    std::printf("config ok\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimode quantum memory simulator and analysis toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    double random_disorder = 0.0;
    std::optional<std::uint64_t> seed_flag;

    auto* simulate_cmd = app.add_subcommand("simulate", "Integrate one experiment run");
    simulate_cmd->add_option("--config", config_path, "Experiment config (JSON)")
        ->required();
    simulate_cmd->add_option("--out", out_dir, "Output directory");

    auto* spectroscopy_cmd =
        app.add_subcommand("spectroscopy", "CW reflection map over (flux, frequency)");
    spectroscopy_cmd->add_option("--config", config_path)->required();
    spectroscopy_cmd->add_option("--out", out_dir);
    spectroscopy_cmd->add_option("--jobs", jobs, "Worker thread cap");

    auto* calibrate_cmd = app.add_subcommand(
        "calibrate", "Pulsed reflection map over (voltage, frequency) + matched point");
    calibrate_cmd->add_option("--config", config_path)->required();
    calibrate_cmd->add_option("--out", out_dir);
    calibrate_cmd->add_option("--jobs", jobs);

    auto* memory_cmd =
        app.add_subcommand("memory", "Record/store/release fidelity series");
    memory_cmd->add_option("--config", config_path)->required();
    memory_cmd->add_option("--out", out_dir);
    memory_cmd->add_option("--jobs", jobs);
    memory_cmd->add_option("--random-disorder", random_disorder,
                           "Apply uniform random spacing disorder of this width (Hz)");
    memory_cmd->add_option("--seed", seed_flag, "Seed for --random-disorder");

    std::string fit_path;
    double f_ref = 0.0;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a resonance scan or a decay series");
    fit_cmd->add_option("file", fit_path, "CSV input")->required();
    fit_cmd->add_option("--out", out_dir);
    fit_cmd->add_option("--fref", f_ref, "Reference frequency for Q_eff (Hz)");

    double design_g = 0.0, design_delta = 0.0;
    auto* design_cmd =
        app.add_subcommand("design", "Impedance-matched kappa for (g, spacing)");
    design_cmd->add_option("g", design_g, "Coupling rate (Hz)")->required();
    design_cmd->add_option("delta", design_delta, "Comb spacing (Hz)")->required();

    auto* validate_cmd = app.add_subcommand("validate", "Check a config and exit");
    validate_cmd->add_option("--config", config_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate_cmd->parsed()) return cmd_simulate(config_path, out_dir);
        if (spectroscopy_cmd->parsed()) return cmd_spectroscopy(config_path, out_dir, jobs);
        if (calibrate_cmd->parsed()) return cmd_calibrate(config_path, out_dir, jobs);
        if (memory_cmd->parsed())
            return cmd_memory(config_path, out_dir, jobs, random_disorder, seed_flag);
        if (fit_cmd->parsed()) return cmd_fit(fit_path, out_dir, f_ref);
        if (design_cmd->parsed()) return cmd_design(design_g, design_delta);
        if (validate_cmd->parsed()) return cmd_validate(config_path);
    } catch (const qmem::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
