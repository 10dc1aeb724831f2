#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coolsim/device.hpp"
#include "coolsim/harness.hpp"
#include "coolsim/psychophys.hpp"
#include "coolsim/thermo.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Outputs are staged to a temp file and renamed into place, so a failed
// run never leaves a partial file behind.
void atomic_write(const std::string& path, const std::string& content) {
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output path " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, target);
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        atomic_write(path, content);
    }
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("COOLSIM_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 0;
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    json doc;
    in >> doc;
    if (!doc.is_object()) throw std::runtime_error("config file must hold a JSON object");
    return doc;
}

// Config supplies defaults; explicitly given flags win.
template <typename T>
void merge(const json& cfg, const CLI::Option* opt, const char* key, T& var) {
    if (opt->count() == 0 && cfg.contains(key)) {
        var = cfg.at(key).get<T>();
    }
}

double to_kelvin(double value, const std::string& unit) {
    if (unit == "k" || unit == "K") return value;
    if (unit == "c" || unit == "C") return value + 273.15;
    throw CLI::ValidationError("--unit", "unit must be 'c' or 'k'");
}

struct ModelOpts {
    std::string preset = "skin";
    double u = 0.0;
    double t = 3.0;
    std::string unit = "k";
    double body_temp = 0.0;
    double air_temp = 0.0;
    std::string config;
};

int cmd_model(const ModelOpts& o, bool body_temp_set, bool air_temp_set) {
    auto p = coolsim::thermo::preset(o.preset);
    if (body_temp_set) p.body.temperature = to_kelvin(o.body_temp, o.unit);
    if (air_temp_set) p.air.temperature = to_kelvin(o.air_temp, o.unit);

    const auto k_full = coolsim::thermo::cooling_coefficient(p.air, p.nozzle, p.body);
    const auto k_pub = coolsim::thermo::rounded_coefficient(k_full, 3);

    double drop;
    if (o.preset == "skin" && !body_temp_set && !air_temp_set) {
        drop = coolsim::harness::skin_prediction(o.u, o.t);
    } else {
        drop = coolsim::thermo::temperature_drop(k_pub, o.u, o.t, p.body.temperature,
                                                 p.air.temperature);
    }
    const double t_final = p.body.temperature - drop;

    std::printf("preset        : %s\n", o.preset.c_str());
    std::printf("k (full)      : %.10g 1/m\n", k_full.k);
    std::printf("k (published) : %.3f 1/m\n", k_pub.k);
    std::printf("T_f           : %.6f K (%.2f)\n", t_final, t_final);
    std::printf("dT_s          : %.6f K (%.2f)\n", drop, drop);
    return 0;
}

int cmd_exp1(const std::string& scenario_path, const std::string& out_path) {
    coolsim::harness::SensorTransientScenario scn;
    if (!scenario_path.empty()) {
        scn = coolsim::harness::SensorTransientScenario::load(scenario_path);
    }
    const auto series = coolsim::harness::simulate_sensor_transient(scn);
    std::ostringstream csv;
    coolsim::harness::write_transient_csv(csv, series);
    emit(out_path, csv.str());
    return 0;
}

struct Exp2Opts {
    std::string preset = "silicon";
    std::vector<double> velocities = {1.0, 2.0, 3.0};
    double duration = 3.0;
    std::string out = "exp2_comparison.csv";
    std::string svg;
    std::string config;
};

int cmd_exp2(const Exp2Opts& o) {
    const auto report =
        coolsim::harness::run_phantom_experiment(o.preset, o.velocities, o.duration);
    std::ostringstream csv;
    coolsim::harness::write_comparison_csv(csv, report);
    emit(o.out, csv.str());
    if (!o.svg.empty()) {
        std::ostringstream svg;
        coolsim::harness::write_comparison_svg(svg, report);
        atomic_write(o.svg, svg.str());
    }
    return 0;
}

struct PsyRunOpts {
    std::uint64_t seed = default_seed();
    std::uint64_t noise_seed = 0;
    bool noise_seed_set = false;
    double standard = 2.0;
    std::vector<double> comparisons = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
    int trials_per_comparison = 10;
    double stimulus_duration = 2.0;
    double gap_duration = 1.0;
    int break_every = 10;
    double target_jnd = 1.2818;
    double noise_sd = 0.0;
    std::string observer_path;
    std::string out = "trials.csv";
    std::string config;
};

coolsim::psychophys::ObserverModel make_observer(const PsyRunOpts& o, bool noise_sd_set) {
    auto response = coolsim::psychophys::cooling_response_map(o.stimulus_duration);
    if (!o.observer_path.empty()) {
        std::ifstream in(o.observer_path);
        if (!in) throw std::runtime_error("cannot open observer file " + o.observer_path);
        json doc;
        in >> doc;
        return {doc.at("noise_sd").get<double>(), std::move(response)};
    }
    if (noise_sd_set) {
        return {o.noise_sd, std::move(response)};
    }
    return coolsim::psychophys::calibrate_observer(o.target_jnd, o.standard,
                                                   std::move(response))
        .observer;
}

int cmd_psy_run(const PsyRunOpts& o, bool noise_sd_set) {
    coolsim::psychophys::StimulusSchedule schedule;
    schedule.standard = o.standard;
    schedule.comparisons = o.comparisons;
    schedule.trials_per_comparison = o.trials_per_comparison;
    schedule.stimulus_duration = o.stimulus_duration;
    schedule.gap_duration = o.gap_duration;
    schedule.break_every = o.break_every;
    schedule.rng_seed = o.seed;

    // The observer noise stream is seeded independently of the schedule
    // ordering stream.
    const std::uint64_t noise_seed =
        o.noise_seed_set ? o.noise_seed : o.seed ^ 0x9e3779b97f4a7c15ULL;

    const auto observer = make_observer(o, noise_sd_set);
    const auto trials = coolsim::psychophys::build_schedule(schedule);
    const auto records = coolsim::psychophys::run_session(observer, trials, noise_seed);
    std::ostringstream csv;
    coolsim::psychophys::write_trials_csv(csv, records);
    emit(o.out, csv.str());
    return 0;
}

int cmd_psy_fit(const std::string& in_path, const std::string& out_path) {
    std::vector<coolsim::psychophys::TrialRecord> records;
    if (in_path.empty() || in_path == "-") {
        records = coolsim::psychophys::read_trials_csv(std::cin);
    } else {
        std::ifstream in(in_path);
        if (!in) throw std::runtime_error("cannot open trial CSV " + in_path);
        records = coolsim::psychophys::read_trials_csv(in);
    }
    const auto fit = coolsim::psychophys::fit_psychometric(records);
    emit(out_path, coolsim::psychophys::fit_to_json(fit));
    return 0;
}

struct CalibrateOpts {
    double target_jnd = 1.2818;
    double standard = 2.0;
    double stimulus_duration = 2.0;
    std::string out;
    std::string config;
};

int cmd_calibrate(const CalibrateOpts& o) {
    const auto result = coolsim::psychophys::calibrate_observer(
        o.target_jnd, o.standard,
        coolsim::psychophys::cooling_response_map(o.stimulus_duration));
    json doc;
    doc["noise_sd"] = result.observer.noise_sd;
    doc["target_jnd"] = result.target_jnd;
    doc["predicted_jnd"] = result.predicted_jnd;
    doc["response_slope"] = result.response_slope;
    doc["standard_mps"] = o.standard;
    doc["stimulus_duration_s"] = o.stimulus_duration;
    emit(o.out, doc.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coolsim: non-contact cold-airflow display simulator"};
    app.require_subcommand(1);

    ModelOpts model_opts;
    auto* model = app.add_subcommand("model", "Evaluate the cooling model at one point");
    model->add_option("--preset", model_opts.preset, "Body preset: silicon or skin");
    auto* opt_u = model->add_option("--u", model_opts.u, "Flow velocity, m/s")->required();
    model->add_option("--t", model_opts.t, "Exposure duration, s");
    model->add_option("--unit", model_opts.unit, "Temperature unit for overrides: c or k");
    auto* opt_bt = model->add_option("--body-temp", model_opts.body_temp, "Override body temperature");
    auto* opt_at = model->add_option("--air-temp", model_opts.air_temp, "Override cold air temperature");
    model->add_option("--config", model_opts.config, "JSON config with flag defaults");

    std::string exp1_scenario, exp1_out = "exp1_transient.csv";
    auto* exp1 = app.add_subcommand("exp1", "Simulate the sensor transient sweep");
    exp1->add_option("--config", exp1_scenario, "Scenario JSON");
    exp1->add_option("--out", exp1_out, "Output CSV path ('-' for stdout)");

    Exp2Opts exp2_opts;
    auto* exp2 = app.add_subcommand("exp2", "Theoretical vs measured phantom comparison");
    auto* e2_preset = exp2->add_option("--preset", exp2_opts.preset, "Body preset");
    auto* e2_vel = exp2->add_option("--velocities", exp2_opts.velocities, "Velocities, m/s");
    auto* e2_dur = exp2->add_option("--duration", exp2_opts.duration, "Exposure duration, s");
    auto* e2_out = exp2->add_option("--out", exp2_opts.out, "Output CSV path");
    auto* e2_svg = exp2->add_option("--svg", exp2_opts.svg, "Optional SVG plot path");
    exp2->add_option("--config", exp2_opts.config, "JSON config with flag defaults");

    PsyRunOpts psy_opts;
    auto* psy_run = app.add_subcommand("psy-run", "Simulate a constant-stimuli session");
    auto* pr_seed = psy_run->add_option("--seed", psy_opts.seed, "Schedule RNG seed");
    auto* pr_nseed = psy_run->add_option("--noise-seed", psy_opts.noise_seed, "Observer noise seed");
    auto* pr_std = psy_run->add_option("--standard", psy_opts.standard, "Standard stimulus, m/s");
    auto* pr_cmp = psy_run->add_option("--comparisons", psy_opts.comparisons, "Comparison stimuli, m/s");
    auto* pr_tpc = psy_run->add_option("--trials-per-comparison", psy_opts.trials_per_comparison,
                                       "Trials per comparison level");
    auto* pr_sd = psy_run->add_option("--stimulus-duration", psy_opts.stimulus_duration,
                                      "Stimulus duration, s");
    auto* pr_gap = psy_run->add_option("--gap", psy_opts.gap_duration, "Inter-stimulus gap, s");
    auto* pr_brk = psy_run->add_option("--break-every", psy_opts.break_every, "Trials per block");
    auto* pr_tj = psy_run->add_option("--target-jnd", psy_opts.target_jnd,
                                      "Calibration target JND, m/s");
    auto* pr_ns = psy_run->add_option("--noise-sd", psy_opts.noise_sd, "Observer noise SD (skips calibration)");
    auto* pr_obs = psy_run->add_option("--observer", psy_opts.observer_path, "Observer JSON from 'calibrate'");
    auto* pr_out = psy_run->add_option("--out", psy_opts.out, "Output trial CSV path");
    psy_run->add_option("--config", psy_opts.config, "JSON config with flag defaults");

    std::string fit_in, fit_out;
    auto* psy_fit = app.add_subcommand("psy-fit", "Fit a psychometric curve to a trial CSV");
    psy_fit->add_option("--in", fit_in, "Trial CSV path ('-' for stdin)")->required();
    psy_fit->add_option("--out", fit_out, "Fit JSON path (default stdout)");

    CalibrateOpts cal_opts;
    auto* calibrate = app.add_subcommand("calibrate", "Calibrate the simulated observer");
    auto* ca_tj = calibrate->add_option("--target-jnd", cal_opts.target_jnd, "Target JND, m/s");
    auto* ca_std = calibrate->add_option("--standard", cal_opts.standard, "Standard stimulus, m/s");
    auto* ca_dur = calibrate->add_option("--stimulus-duration", cal_opts.stimulus_duration,
                                         "Stimulus duration, s");
    auto* ca_out = calibrate->add_option("--out", cal_opts.out, "Observer JSON path (default stdout)");
    calibrate->add_option("--config", cal_opts.config, "JSON config with flag defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*model) {
            const json cfg = load_config(model_opts.config);
            merge(cfg, model->get_option("--preset"), "preset", model_opts.preset);
            merge(cfg, opt_u, "u", model_opts.u);
            merge(cfg, model->get_option("--t"), "t", model_opts.t);
            merge(cfg, model->get_option("--unit"), "unit", model_opts.unit);
            merge(cfg, opt_bt, "body_temp", model_opts.body_temp);
            merge(cfg, opt_at, "air_temp", model_opts.air_temp);
            return cmd_model(model_opts, opt_bt->count() > 0 || cfg.contains("body_temp"),
                             opt_at->count() > 0 || cfg.contains("air_temp"));
        }
        if (*exp1) return cmd_exp1(exp1_scenario, exp1_out);
        if (*exp2) {
            const json cfg = load_config(exp2_opts.config);
            merge(cfg, e2_preset, "preset", exp2_opts.preset);
            merge(cfg, e2_vel, "velocities", exp2_opts.velocities);
            merge(cfg, e2_dur, "duration", exp2_opts.duration);
            merge(cfg, e2_out, "out", exp2_opts.out);
            merge(cfg, e2_svg, "svg", exp2_opts.svg);
            return cmd_exp2(exp2_opts);
        }
        if (*psy_run) {
            const json cfg = load_config(psy_opts.config);
            merge(cfg, pr_seed, "seed", psy_opts.seed);
            merge(cfg, pr_nseed, "noise_seed", psy_opts.noise_seed);
            merge(cfg, pr_std, "standard", psy_opts.standard);
            merge(cfg, pr_cmp, "comparisons", psy_opts.comparisons);
            merge(cfg, pr_tpc, "trials_per_comparison", psy_opts.trials_per_comparison);
            merge(cfg, pr_sd, "stimulus_duration", psy_opts.stimulus_duration);
            merge(cfg, pr_gap, "gap_duration", psy_opts.gap_duration);
            merge(cfg, pr_brk, "break_every", psy_opts.break_every);
            merge(cfg, pr_tj, "target_jnd", psy_opts.target_jnd);
            merge(cfg, pr_ns, "noise_sd", psy_opts.noise_sd);
            merge(cfg, pr_obs, "observer", psy_opts.observer_path);
            merge(cfg, pr_out, "out", psy_opts.out);
            psy_opts.noise_seed_set = pr_nseed->count() > 0 || cfg.contains("noise_seed");
            return cmd_psy_run(psy_opts, pr_ns->count() > 0 || cfg.contains("noise_sd"));
        }
        if (*psy_fit) return cmd_psy_fit(fit_in, fit_out);
        if (*calibrate) {
            const json cfg = load_config(cal_opts.config);
            merge(cfg, ca_tj, "target_jnd", cal_opts.target_jnd);
            merge(cfg, ca_std, "standard", cal_opts.standard);
            merge(cfg, ca_dur, "stimulus_duration", cal_opts.stimulus_duration);
            merge(cfg, ca_out, "out", cal_opts.out);
            return cmd_calibrate(cal_opts);
        }
    } catch (const coolsim::psychophys::DegenerateDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
