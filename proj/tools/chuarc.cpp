// chuarc: command-line front end for simulation, datasets, training and sweeps.
//
// Exit codes: 0 success, 1 invalid input or configuration, 2 runtime failure.

#include "chuarc/chua.hpp"
#include "chuarc/config.hpp"
#include "chuarc/error.hpp"
#include "chuarc/experiment.hpp"
#include "chuarc/io.hpp"
#include "chuarc/parallel.hpp"
#include "chuarc/plot.hpp"
#include "chuarc/tasks.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace chuarc;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::size_t jobs = default_jobs();
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "experiment config (JSON); defaults apply when omitted")
        ->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "master seed, overrides the config");
    app->add_option("--out", c.out, "output directory, overrides the config");
    app->add_option("--jobs", c.jobs, "worker threads (default: CHUARC_JOBS or all cores)")
        ->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const Common& c) {
    ExperimentConfig cfg = c.config.empty() ? default_config() : load_config(c.config);
    if (c.seed) cfg.master_seed = *c.seed;
    if (!c.out.empty()) cfg.output_dir = c.out;
    cfg.validate();
    return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
}

template <typename Fn>
void emit(const ExperimentConfig& cfg, const std::string& name, Fn&& writer) {
    std::ostringstream os;
    writer(os);
    const std::string path = out_path(cfg, name);
    io::write_file(path, os.str());
    std::cout << "wrote " << path << '\n';
}

void print_report(const MetricsReport& r) {
    std::cout << "validation cases: " << r.n_validation << "  mean NMSE: " << r.mean << "  median NMSE: " << r.median
              << '\n';
    if (r.accuracy) std::cout << "accuracy: " << *r.accuracy << '\n';
    for (std::size_t k = 0; k < r.outputs.size(); ++k)
        std::cout << "output " << k << ": teacher mean " << r.outputs[k].teacher_mean << " std "
                  << r.outputs[k].teacher_std << ", estimate mean " << r.outputs[k].estimate_mean << " std "
                  << r.outputs[k].estimate_std << '\n';
    std::cout << "config digest: " << r.config_digest << "  runtime: " << r.runtime_s << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chua-circuit reservoir computer laboratory"};
    app.require_subcommand(1);

    // simulate
    Common sim_c;
    double sim_t_end = 20e-3;
    double sim_dt = 0.0;
    std::size_t sim_stride = 10;
    SineDrive sim_drive;
    std::optional<double> sim_r;
    auto* sim = app.add_subcommand("simulate", "integrate the circuit and write trace.csv (t,V_CD,V_L)");
    add_common(sim, sim_c);
    sim->add_option("--t-end", sim_t_end, "simulated time in seconds")->check(CLI::PositiveNumber);
    sim->add_option("--dt", sim_dt, "RK4 step (default: reservoir integrator_dt)");
    sim->add_option("--stride", sim_stride, "record every n-th step")->check(CLI::PositiveNumber);
    sim->add_option("--r", sim_r, "variable resistance in ohms");
    sim->add_option("--amplitude", sim_drive.amplitude, "sine drive amplitude in volts (0 = undriven)");
    sim->add_option("--frequency", sim_drive.frequency, "sine drive frequency in Hz");

    // bifurcate
    Common bif_c;
    BifurcationOptions bif;
    std::string bif_param = "r_variable";
    auto* bifc = app.add_subcommand("bifurcate", "extrema scan over one parameter -> bifurcation.csv");
    add_common(bifc, bif_c);
    bifc->add_option("--param", bif_param, "r_variable, c1 or drive_amplitude");
    bifc->add_option("--start", bif.start, "first parameter value");
    bifc->add_option("--stop", bif.stop, "last parameter value");
    bifc->add_option("--steps", bif.steps, "number of parameter values")->check(CLI::PositiveNumber);
    bifc->add_option("--amplitude", bif.drive.amplitude, "sine drive amplitude for r/c1 scans");
    bifc->add_option("--frequency", bif.drive.frequency, "sine drive frequency in Hz");
    bifc->add_option("--horizon", bif.horizon, "seconds per point (0 = automatic)");
    bifc->add_option("--dt", bif.dt, "RK4 step");
    bifc->add_option("--stride", bif.record_stride, "record every n-th step");
    bifc->add_option("--tap", bif.tap, "V_CD or V_L");

    // spectrum
    Common spec_c;
    double spec_t_end = 40e-3;
    double spec_transient = 0.5;
    std::string spec_tap = kTapDiode;
    std::size_t spec_stride = 10;
    auto* spec = app.add_subcommand("spectrum", "DFT magnitude of a steady-state tap -> spectrum.csv");
    add_common(spec, spec_c);
    spec->add_option("--t-end", spec_t_end, "simulated time in seconds")->check(CLI::PositiveNumber);
    spec->add_option("--transient", spec_transient, "leading fraction discarded")->check(CLI::Range(0.0, 0.95));
    spec->add_option("--tap", spec_tap, "V_CD or V_L");
    spec->add_option("--stride", spec_stride, "record every n-th step")->check(CLI::PositiveNumber);

    // dataset
    Common ds_c;
    auto* ds = app.add_subcommand("dataset", "generate the task dataset (CSV, or JSON for LWE)");
    add_common(ds, ds_c);

    // train
    Common tr_c;
    auto* tr = app.add_subcommand("train", "run an experiment: cases.csv, report.json, weights.json");
    add_common(tr, tr_c);

    // eval
    Common ev_c;
    std::string ev_weights;
    auto* ev = app.add_subcommand("eval", "score a saved weight on the configured dataset");
    add_common(ev, ev_c);
    ev->add_option("--weights", ev_weights, "weights.json from train")->required()->check(CLI::ExistingFile);

    // sweep
    Common sw_c;
    std::vector<double> sw_r = {1600.0, 2000.0, 80.0};
    std::vector<double> sw_v = {0.5, 1.0, 0.1};
    double sw_width = 0.6;
    std::vector<std::size_t> sw_masks;
    auto* sw = app.add_subcommand("sweep", "mean NMSE over resistance x center voltage -> sweep.csv, sweep.svg");
    add_common(sw, sw_c);
    sw->add_option("--r", sw_r, "resistance axis: start stop step")->expected(3);
    sw->add_option("--center", sw_v, "center-voltage axis: start stop step")->expected(3);
    sw->add_option("--width", sw_width, "fixed v_max - v_min")->check(CLI::PositiveNumber);
    sw->add_option("--n-mask", sw_masks, "optional n_mask axis values");

    // plot
    std::string pl_csv;
    std::string pl_svg;
    auto* pl = app.add_subcommand("plot", "render an artifact CSV as SVG");
    pl->add_option("csv", pl_csv, "input CSV")->required()->check(CLI::ExistingFile);
    pl->add_option("svg", pl_svg, "output SVG (default: CSV path with .svg)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*sim) {
            ExperimentConfig cfg = resolve(sim_c);
            if (sim_r) cfg.circuit.r_variable = *sim_r;
            cfg.circuit.validate();
            const double dt = sim_dt > 0.0 ? sim_dt : cfg.reservoir.integrator_dt;
            std::optional<DriveSignal> drive;
            if (sim_drive.amplitude != 0.0) drive = sine_drive(sim_drive, sim_t_end, cfg.reservoir.sample_rate);
            const Trace t = integrate(cfg.circuit, CircuitState::initial(), drive ? &*drive : nullptr,
                                      {sim_t_end, dt, sim_stride});
            emit(cfg, "trace.csv", [&](std::ostream& os) { io::write_trace_csv(os, t, config_digest(cfg)); });
        } else if (*bifc) {
            ExperimentConfig cfg = resolve(bif_c);
            bif.parameter = parse_scan_parameter(bif_param);
            bif.circuit = cfg.circuit;
            bif.jobs = bif_c.jobs;
            bif.drive_sample_rate = cfg.reservoir.sample_rate;
            const auto points = bifurcation_scan(bif);
            std::size_t failed = 0;
            for (const auto& p : points)
                if (p.failed) {
                    ++failed;
                    std::cerr << "point " << p.value << " failed: " << p.error << '\n';
                }
            emit(cfg, "bifurcation.csv",
                 [&](std::ostream& os) { io::write_bifurcation_csv(os, points, config_digest(cfg)); });
            if (failed == points.size()) return 2;
        } else if (*spec) {
            ExperimentConfig cfg = resolve(spec_c);
            const double dt = cfg.reservoir.integrator_dt;
            const Trace t = integrate(cfg.circuit, CircuitState::initial(), nullptr, {spec_t_end, dt, spec_stride});
            const auto& ch = t.channel(spec_tap);
            const auto skip = static_cast<std::size_t>(spec_transient * static_cast<double>(ch.size()));
            const Spectrum s = power_spectrum(std::span<const double>(ch).subspan(skip), t.dt);
            emit(cfg, "spectrum.csv", [&](std::ostream& os) { io::write_spectrum_csv(os, s, config_digest(cfg)); });
        } else if (*ds) {
            ExperimentConfig cfg = resolve(ds_c);
            const auto d = tasks::make_dataset(cfg.task, derive_seed(cfg.master_seed, 1));
            const std::string digest = config_digest(cfg);
            if (d.lwe) {
                emit(cfg, "lwe_dataset.json", [&](std::ostream& os) { io::write_lwe_json(os, *d.lwe, digest); });
                emit(cfg, "lwe_key.json", [&](std::ostream& os) { io::write_lwe_key(os, *d.lwe); });
                emit(cfg, "lwe_secret.json", [&](std::ostream& os) { io::write_lwe_secret(os, *d.lwe); });
                std::cout << "kept " << d.lwe->candidates_kept << " of " << d.lwe->candidates_tried
                          << " candidates\n";
            } else {
                emit(cfg, "dataset.csv", [&](std::ostream& os) { io::write_dataset_csv(os, d, digest); });
            }
        } else if (*tr) {
            ExperimentConfig cfg = resolve(tr_c);
            const auto res = run_experiment(cfg, {tr_c.jobs, true});
            print_report(res.report);
            std::cout << "artifacts in " << cfg.output_dir << '\n';
        } else if (*ev) {
            ExperimentConfig cfg = resolve(ev_c);
            const ReadoutWeight w = load_weight(ev_weights, config_digest(cfg));
            const auto res = evaluate(cfg, w, {ev_c.jobs, true});
            print_report(res.report);
        } else if (*sw) {
            ExperimentConfig cfg = resolve(sw_c);
            SweepGrid grid;
            grid.resistances = axis_range(sw_r[0], sw_r[1], sw_r[2]);
            grid.centers = axis_range(sw_v[0], sw_v[1], sw_v[2]);
            grid.width = sw_width;
            grid.n_masks = sw_masks;
            std::cout << "sweeping " << grid.n_cells() << " cells\n";
            const auto cells = run_sweep(cfg, grid, sw_c.jobs);
            const std::string csv = sweep_csv(cells, config_digest(cfg));
            io::write_file(out_path(cfg, "sweep.csv"), csv);
            io::write_file(out_path(cfg, "sweep.svg"), plot::render(csv));
            std::cout << "wrote " << out_path(cfg, "sweep.csv") << " and sweep.svg\n";
        } else if (*pl) {
            if (pl_svg.empty()) pl_svg = fs::path(pl_csv).replace_extension(".svg").string();
            plot::render_plot(pl_csv, pl_svg);
            std::cout << "wrote " << pl_svg << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 1;
    } catch (const InputDomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
