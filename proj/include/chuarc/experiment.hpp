// Experiment orchestration: dataset -> parallel case simulation -> readout
// training -> validation metrics, parameter sweeps, and weight persistence.
#pragma once

#include "chuarc/config.hpp"
#include "chuarc/readout.hpp"
#include "chuarc/tasks.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace chuarc {

/// Job count from CHUARC_JOBS, else the hardware concurrency (at least 1).
std::size_t default_jobs();

struct CaseResult {
    std::size_t index = 0;
    bool validation = false;
    std::vector<double> teacher;
    std::vector<double> estimate;
    double nmse = 0.0;
    bool zero_target = false;
    int label = -1;
    int predicted = -1;
};

struct OutputStats {
    double teacher_mean = 0.0;
    double teacher_std = 0.0;
    double estimate_mean = 0.0;
    double estimate_std = 0.0;
};

/// Validation-set summary. mean and median are over `nmse`, which lists the
/// validation cases in index order.
struct MetricsReport {
    std::vector<double> nmse;
    double mean = 0.0;
    double median = 0.0;
    std::size_t zero_targets = 0;
    std::optional<double> accuracy;
    std::vector<std::vector<std::size_t>> confusion;
    std::vector<OutputStats> outputs;  // population statistics per output
    std::size_t n_train = 0;
    std::size_t n_validation = 0;
    double runtime_s = 0.0;
    std::string config_digest;
};

struct ExperimentResult {
    MetricsReport report;
    ReadoutWeight weight;
    std::vector<CaseResult> cases;  // every case, index order
    tasks::Dataset dataset;
};

struct RunOptions {
    std::size_t jobs = 1;
    /// Write cases.csv, report.json, weights.json and manifest.json into
    /// cfg.output_dir.
    bool write_artifacts = false;
};

/// Seeds: dataset derive_seed(master, 1), split (master, 2), mask (master, 3),
/// per-case noise (master, 4, case).
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Simulates one dataset entry (separate inputs concatenated column-wise).
StateMatrix simulate_entry(const std::vector<double>& input, bool separate_inputs, const ReservoirConfig& rc,
                           const Mask& mask, const Kernel& kernel, std::uint64_t noise_seed);

/// Runs a trained weight over a fresh dataset built from cfg (same seeds).
ExperimentResult evaluate(const ExperimentConfig& cfg, const ReadoutWeight& weight, const RunOptions& opts = {});

/// Per-case CSV: index,split,teacher_k..,estimate_k..,nmse[,label,predicted].
std::string cases_csv(const std::vector<CaseResult>& cases, const std::string& digest);
std::string report_json(const MetricsReport& r);

/// Inclusive arithmetic axis start, start+step, ... up to stop (within 1e-9
/// of a step).
std::vector<double> axis_range(double start, double stop, double step);

struct SweepGrid {
    std::vector<double> resistances;
    std::vector<double> centers;
    /// v_max - v_min, kept fixed while the center moves.
    double width = 0.6;
    /// Empty keeps the config's n_mask.
    std::vector<std::size_t> n_masks;

    std::size_t n_cells() const { return resistances.size() * centers.size() * std::max<std::size_t>(1, n_masks.size()); }
    void validate() const;
};

struct SweepCell {
    double r_ohms = 0.0;
    double v_center = 0.0;
    std::size_t n_mask = 0;
    double mean_nmse = 0.0;
    bool failed = false;
    std::string error;
};

/// Cells in (n_mask, resistance, center) order. A cell's master seed derives
/// from the sweep seed and the cell's own parameter values, so adding cells
/// leaves the others untouched. Failed cells are recorded and the sweep goes
/// on.
std::vector<SweepCell> run_sweep(const ExperimentConfig& cfg, const SweepGrid& grid, std::size_t jobs = 1);

/// `r_ohms,v_center,mean_nmse,n_mask,status`.
std::string sweep_csv(const std::vector<SweepCell>& cells, const std::string& digest);

void save_weight(const ReadoutWeight& w, const std::string& path);

using WarningSink = std::function<void(const std::string&)>;

/// Throws ParseError on malformed files. When `active_digest` is non-empty
/// and differs from the stored one a warning goes to `warn` (stderr when
/// unset); the weight is returned regardless.
ReadoutWeight load_weight(const std::string& path, const std::string& active_digest = "",
                          const WarningSink& warn = nullptr);

std::string weight_json(const ReadoutWeight& w);
ReadoutWeight parse_weight(const std::string& text);

}  // namespace chuarc
