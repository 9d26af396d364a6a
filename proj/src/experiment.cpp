#include "chuarc/experiment.hpp"

#include "chuarc/error.hpp"
#include "chuarc/io.hpp"
#include "chuarc/parallel.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

namespace chuarc {

using nlohmann::json;

std::size_t default_jobs() {
    if (const char* env = std::getenv("CHUARC_JOBS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

StateMatrix simulate_entry(const std::vector<double>& input, bool separate_inputs, const ReservoirConfig& rc,
                           const Mask& mask, const Kernel& kernel, std::uint64_t noise_seed) {
    if (!separate_inputs) return run_case_detailed(input, rc, mask, kernel, noise_seed).states;
    std::vector<StateMatrix> parts;
    parts.reserve(input.size());
    for (std::size_t k = 0; k < input.size(); ++k) {
        const double v[1] = {input[k]};
        parts.push_back(run_case_detailed(v, rc, mask, kernel, derive_seed(noise_seed, k)).states);
    }
    return concat_columns(parts);
}

namespace {

struct Simulation {
    tasks::Dataset dataset;
    ReservoirConfig reservoir;
    std::vector<StateMatrix> states;
};

void write_manifest(const ExperimentConfig& cfg, const std::string& status, const std::vector<std::string>& files,
                    const json& failures) {
    const json m = {{"status", status},
                    {"config_digest", config_digest(cfg)},
                    {"files", files},
                    {"failures", failures},
                    {"config", json::parse(serialize_config(cfg))}};
    io::write_file((std::filesystem::path(cfg.output_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

Simulation simulate_all(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    Simulation sim;
    sim.dataset = tasks::make_dataset(cfg.task, derive_seed(cfg.master_seed, 1));
    sim.reservoir = cfg.resolved_reservoir(sim.dataset.value_max);
    sim.reservoir.seed = derive_seed(cfg.master_seed, 3);
    sim.reservoir.validate();
    const Mask mask = make_mask(sim.reservoir);
    const Kernel kernel = chua_kernel(cfg.circuit, sim.reservoir);

    const std::size_t n = sim.dataset.size();
    sim.states.resize(n);
    std::vector<std::string> errors(n);
    parallel_for(n, opts.jobs, [&](std::size_t i) {
        try {
            sim.states[i] = simulate_entry(sim.dataset.inputs[i], sim.dataset.separate_inputs, sim.reservoir, mask,
                                           kernel, derive_seed(cfg.master_seed, 4, i));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    json failures = json::array();
    for (std::size_t i = 0; i < n; ++i)
        if (!errors[i].empty()) failures.push_back({{"case", i}, {"error", errors[i]}});
    if (!failures.empty()) {
        if (opts.write_artifacts) write_manifest(cfg, "failed", {}, failures);
        throw Error("simulation failed for " + std::to_string(failures.size()) + " of " + std::to_string(n) +
                    " cases; first: case " + failures[0]["case"].dump() + ": " +
                    failures[0]["error"].get<std::string>());
    }
    return sim;
}

Eigen::VectorXd as_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

CaseResult score(std::size_t i, const tasks::Dataset& ds, const Eigen::VectorXd& est, bool validation) {
    CaseResult c;
    c.index = i;
    c.validation = validation;
    c.teacher = ds.teachers[i];
    c.estimate.assign(est.data(), est.data() + est.size());
    c.nmse = nmse_case(c.estimate, c.teacher);
    c.zero_target = std::all_of(c.teacher.begin(), c.teacher.end(), [](double t) { return t == 0.0; });
    if (ds.n_classes > 0) {
        c.label = ds.labels[i];
        c.predicted = tasks::classify(est(0), ds.n_classes);
    }
    return c;
}

MetricsReport summarise(const std::vector<CaseResult>& cases, const tasks::Dataset& ds) {
    MetricsReport r;
    std::vector<int> truth;
    std::vector<int> pred;
    const std::size_t n_out = ds.n_outputs();
    std::vector<std::vector<double>> teach(n_out);
    std::vector<std::vector<double>> est(n_out);
    for (const auto& c : cases) {
        if (!c.validation) {
            ++r.n_train;
            continue;
        }
        ++r.n_validation;
        r.nmse.push_back(c.nmse);
        r.zero_targets += c.zero_target ? 1 : 0;
        if (ds.n_classes > 0) {
            truth.push_back(c.label);
            pred.push_back(c.predicted);
        }
        for (std::size_t k = 0; k < n_out; ++k) {
            teach[k].push_back(c.teacher[k]);
            est[k].push_back(c.estimate[k]);
        }
    }
    double sum = 0.0;
    for (double v : r.nmse) sum += v;
    r.mean = r.nmse.empty() ? 0.0 : sum / static_cast<double>(r.nmse.size());
    r.median = median(r.nmse);
    if (ds.n_classes > 0 && !truth.empty()) {
        r.accuracy = tasks::accuracy(truth, pred);
        r.confusion = tasks::confusion_matrix(truth, pred, ds.n_classes);
    }
    auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
        mean = 0.0;
        sd = 0.0;
        if (v.empty()) return;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        for (double x : v) sd += (x - mean) * (x - mean);
        sd = std::sqrt(sd / static_cast<double>(v.size()));
    };
    for (std::size_t k = 0; k < n_out; ++k) {
        OutputStats s;
        stats(teach[k], s.teacher_mean, s.teacher_std);
        stats(est[k], s.estimate_mean, s.estimate_std);
        r.outputs.push_back(s);
    }
    return r;
}

void write_artifacts(const ExperimentConfig& cfg, const ExperimentResult& res, bool with_weight) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    const std::string digest = res.report.config_digest;
    std::vector<std::string> files = {"cases.csv", "report.json"};
    io::write_file((dir / "cases.csv").string(), cases_csv(res.cases, digest));
    io::write_file((dir / "report.json").string(), report_json(res.report));
    if (with_weight) {
        save_weight(res.weight, (dir / "weights.json").string());
        files.emplace_back("weights.json");
    }
    write_manifest(cfg, "ok", files, json::array());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    Simulation sim = simulate_all(cfg, opts);
    const tasks::Dataset& ds = sim.dataset;
    const std::size_t n = ds.size();

    tasks::Split split;
    if (cfg.validate_on_train) {
        split.train.resize(n);
        std::iota(split.train.begin(), split.train.end(), std::size_t{0});
        split.validation = split.train;
    } else {
        split = tasks::split_dataset(n, cfg.val_fraction, derive_seed(cfg.master_seed, 2));
    }

    ReadoutTrainer trainer(sim.states.front().cols(), static_cast<Eigen::Index>(ds.n_outputs()), cfg.readout);
    for (std::size_t i : split.train) trainer.add(sim.states[i], as_vector(ds.teachers[i]));

    ExperimentResult res;
    res.weight = trainer.solve();
    res.weight.seed = cfg.master_seed;
    res.weight.config_digest = config_digest(cfg);

    std::vector<bool> is_val(n, false);
    for (std::size_t i : split.validation) is_val[i] = true;
    res.cases.reserve(n);
    for (std::size_t i = 0; i < n; ++i) res.cases.push_back(score(i, ds, predict(res.weight, sim.states[i]), is_val[i]));
    if (cfg.validate_on_train)
        for (auto& c : res.cases) c.validation = true;

    res.report = summarise(res.cases, ds);
    if (cfg.validate_on_train) res.report.n_train = n;
    res.report.config_digest = res.weight.config_digest;
    res.dataset = std::move(sim.dataset);
    res.report.runtime_s = seconds_since(t0);
    if (opts.write_artifacts) write_artifacts(cfg, res, true);
    return res;
}

ExperimentResult evaluate(const ExperimentConfig& cfg, const ReadoutWeight& weight, const RunOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    Simulation sim = simulate_all(cfg, opts);
    ExperimentResult res;
    res.weight = weight;
    for (std::size_t i = 0; i < sim.dataset.size(); ++i)
        res.cases.push_back(score(i, sim.dataset, predict(weight, sim.states[i]), true));
    res.report = summarise(res.cases, sim.dataset);
    res.report.config_digest = config_digest(cfg);
    res.dataset = std::move(sim.dataset);
    res.report.runtime_s = seconds_since(t0);
    if (opts.write_artifacts) write_artifacts(cfg, res, false);
    return res;
}

std::string cases_csv(const std::vector<CaseResult>& cases, const std::string& digest) {
    std::ostringstream os;
    if (!digest.empty()) os << "# config_digest=" << digest << '\n';
    const std::size_t n_out = cases.empty() ? 0 : cases.front().teacher.size();
    const bool labelled = !cases.empty() && cases.front().label >= 0;
    os << "index,split";
    for (std::size_t k = 0; k < n_out; ++k) os << ",teacher_" << k;
    for (std::size_t k = 0; k < n_out; ++k) os << ",estimate_" << k;
    os << ",nmse";
    if (labelled) os << ",label,predicted";
    os << '\n';
    for (const auto& c : cases) {
        os << c.index << ',' << (c.validation ? "validation" : "train");
        for (double t : c.teacher) os << ',' << io::fmt(t);
        for (double e : c.estimate) os << ',' << io::fmt(e);
        os << ',' << io::fmt(c.nmse);
        if (labelled) os << ',' << c.label << ',' << c.predicted;
        os << '\n';
    }
    return os.str();
}

std::string report_json(const MetricsReport& r) {
    json outputs = json::array();
    for (const auto& o : r.outputs)
        outputs.push_back({{"teacher_mean", o.teacher_mean},
                           {"teacher_std", o.teacher_std},
                           {"estimate_mean", o.estimate_mean},
                           {"estimate_std", o.estimate_std}});
    json j = {{"mean_nmse", r.mean},
              {"median_nmse", r.median},
              {"nmse", r.nmse},
              {"zero_targets", r.zero_targets},
              {"outputs", outputs},
              {"n_train", r.n_train},
              {"n_validation", r.n_validation},
              {"runtime_s", r.runtime_s},
              {"config_digest", r.config_digest}};
    if (r.accuracy) {
        j["accuracy"] = *r.accuracy;
        j["confusion"] = r.confusion;
    }
    return j.dump(2) + "\n";
}

std::vector<double> axis_range(double start, double stop, double step) {
    if (!(step > 0.0)) throw ConfigError("sweep.step", "must be positive");
    if (stop < start) throw ConfigError("sweep.stop", "must not be below start");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = start + static_cast<double>(i) * step;
    return out;
}

void SweepGrid::validate() const {
    auto monotone = [](const auto& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] > v[i - 1])) return false;
        return true;
    };
    if (resistances.empty()) throw ConfigError("sweep.resistances", "axis is empty");
    if (centers.empty()) throw ConfigError("sweep.centers", "axis is empty");
    if (!monotone(resistances)) throw ConfigError("sweep.resistances", "values must increase strictly");
    if (!monotone(centers)) throw ConfigError("sweep.centers", "values must increase strictly");
    if (!monotone(n_masks)) throw ConfigError("sweep.n_masks", "values must increase strictly");
    if (!(width > 0.0)) throw ConfigError("sweep.width", "must be positive");
    for (double c : centers)
        if (c - 0.5 * width < 0.0) throw ConfigError("sweep.centers", "center minus half width drops below 0 V");
    for (std::size_t m : n_masks)
        if (m < 1) throw ConfigError("sweep.n_masks", "must be at least 1");
}

std::vector<SweepCell> run_sweep(const ExperimentConfig& cfg, const SweepGrid& grid, std::size_t jobs) {
    grid.validate();
    const std::vector<std::size_t> masks =
        grid.n_masks.empty() ? std::vector<std::size_t>{cfg.reservoir.n_mask} : grid.n_masks;
    std::vector<SweepCell> cells;
    for (std::size_t m : masks)
        for (double r : grid.resistances)
            for (double c : grid.centers) cells.push_back({r, c, m, 0.0, false, {}});

    parallel_for(cells.size(), jobs, [&](std::size_t i) {
        SweepCell& cell = cells[i];
        ExperimentConfig c = cfg;
        c.circuit.r_variable = cell.r_ohms;
        c.reservoir.v_min = cell.v_center - 0.5 * grid.width;
        c.reservoir.v_max = cell.v_center + 0.5 * grid.width;
        c.reservoir.n_mask = cell.n_mask;
        c.master_seed = derive_seed(cfg.master_seed, std::bit_cast<std::uint64_t>(cell.r_ohms),
                                    std::bit_cast<std::uint64_t>(cell.v_center), cell.n_mask);
        try {
            cell.mean_nmse = run_experiment(c, {1, false}).report.mean;
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.error = e.what();
            cell.mean_nmse = std::nan("");
        }
    });
    return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells, const std::string& digest) {
    std::ostringstream os;
    if (!digest.empty()) os << "# config_digest=" << digest << '\n';
    for (const auto& c : cells)
        if (c.failed) os << "# failed r_ohms=" << io::fmt(c.r_ohms) << " v_center=" << io::fmt(c.v_center) << ": " << c.error << '\n';
    os << "r_ohms,v_center,mean_nmse,n_mask,status\n";
    for (const auto& c : cells)
        os << io::fmt(c.r_ohms) << ',' << io::fmt(c.v_center) << ',' << io::fmt(c.mean_nmse) << ',' << c.n_mask << ','
           << (c.failed ? "failed" : "ok") << '\n';
    return os.str();
}

std::string weight_json(const ReadoutWeight& w) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.matrix.size()));
    for (Eigen::Index r = 0; r < w.matrix.rows(); ++r)
        for (Eigen::Index c = 0; c < w.matrix.cols(); ++c) flat.push_back(w.matrix(r, c));
    const json j = {{"n_outputs", w.n_outputs()},
                    {"n_channels", w.n_channels()},
                    {"bias", w.bias},
                    {"offset", w.offset},
                    {"lambda", w.lambda},
                    {"seed", w.seed},
                    {"config_digest", w.config_digest},
                    {"matrix", flat}};
    return j.dump(2) + "\n";
}

ReadoutWeight parse_weight(const std::string& text) {
    try {
        const json j = json::parse(text);
        ReadoutWeight w;
        const auto n_out = j.at("n_outputs").get<Eigen::Index>();
        const auto n_ch = j.at("n_channels").get<Eigen::Index>();
        if (n_out < 1 || n_ch < 1) throw ParseError("weight: dimensions must be positive");
        w.bias = j.at("bias").get<bool>();
        w.offset = j.at("offset").get<double>();
        w.lambda = j.at("lambda").get<double>();
        w.seed = j.at("seed").get<std::uint64_t>();
        w.config_digest = j.at("config_digest").get<std::string>();
        const auto flat = j.at("matrix").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(flat.size()) != n_out * (n_ch + 1))
            throw ParseError("weight: matrix holds " + std::to_string(flat.size()) + " numbers, expected " +
                             std::to_string(n_out * (n_ch + 1)));
        w.matrix.resize(n_out, n_ch + 1);
        for (Eigen::Index r = 0; r < n_out; ++r)
            for (Eigen::Index c = 0; c <= n_ch; ++c) w.matrix(r, c) = flat[static_cast<std::size_t>(r * (n_ch + 1) + c)];
        return w;
    } catch (const json::exception& e) {
        throw ParseError(std::string("weight: ") + e.what());
    }
}

void save_weight(const ReadoutWeight& w, const std::string& path) { io::write_file(path, weight_json(w)); }

ReadoutWeight load_weight(const std::string& path, const std::string& active_digest, const WarningSink& warn) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const Error& e) {
        throw ParseError(std::string("weight: ") + e.what());
    }
    ReadoutWeight w = parse_weight(text);
    if (!active_digest.empty() && w.config_digest != active_digest) {
        const std::string msg = "warning: weight '" + path + "' was trained under config " + w.config_digest +
                                ", active config is " + active_digest;
        if (warn)
            warn(msg);
        else
            std::cerr << msg << '\n';
    }
    return w;
}

}  // namespace chuarc
