// Experiment configuration: JSON parsing with defaults, serialisation and the
// digest stamped on every artifact.
#pragma once

#include "chuarc/chua.hpp"
#include "chuarc/pipeline.hpp"
#include "chuarc/readout.hpp"
#include "chuarc/tasks.hpp"

#include <cstdint>
#include <string>

namespace chuarc {

enum class Profile { desk, full };

Profile parse_profile(const std::string& name);
std::string to_string(Profile p);

struct ExperimentConfig {
    Profile profile = Profile::desk;
    ChuaParams circuit{};
    ReservoirConfig reservoir{};
    /// When set, reservoir.f_carrier follows circuit.r_variable and c1.
    bool auto_carrier = true;
    /// task.lwe holds the LWE parameters for the two LWE tasks.
    tasks::TaskSpec task{};
    ReadoutOptions readout{};
    double val_fraction = 0.2;
    /// Train and validate on every case (single-case interpolation checks).
    bool validate_on_train = false;
    std::uint64_t master_seed = 1;
    std::string output_dir = "out";

    /// Applies auto_carrier and the dataset's value range to the reservoir.
    ReservoirConfig resolved_reservoir(double value_max) const;
    void validate() const;
};

/// Defaults for a profile. Desk: 1 MHz sampling, 0.1 us RK4 step, 500 cases.
/// Full: 100 MHz, 10 ns, 2900 cases.
ExperimentConfig default_config(Profile profile = Profile::desk);

/// Missing fields take the profile defaults ("profile" is read first).
/// Throws ParseError on malformed JSON or wrong types and ConfigError with the
/// field path on invariant violations.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON (sorted keys, 2-space indent).
std::string serialize_config(const ExperimentConfig& cfg);

/// 16 hex digits of FNV-1a over the canonical JSON, output_dir excluded.
std::string config_digest(const ExperimentConfig& cfg);

}  // namespace chuarc
