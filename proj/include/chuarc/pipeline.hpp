// Time-multiplexed reservoir front end and back end: normalisation, masking,
// sample hold, amplitude modulation, kernel drive, synchronisation and
// demultiplexing into a state matrix of virtual-neuron activations.
#pragma once

#include "chuarc/chua.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chuarc {

enum class Carrier { square, sine, dc };

Carrier parse_carrier(const std::string& name);
std::string to_string(Carrier c);

/// Which span the carrier periods cover: the whole case, or each message
/// value (so longer messages get proportionally longer drives).
enum class PeriodScope { per_case, per_value };

PeriodScope parse_period_scope(const std::string& name);
std::string to_string(PeriodScope s);

/// Carrier frequency f = omega / (2*pi*R*C1).
double carrier_frequency(double r_variable, double c1, double omega = 0.7);

struct ReservoirConfig {
    double v_min = 0.4;
    double v_max = 1.0;
    double value_max = 1.0;
    std::size_t n_mask = 50;
    double mask_deviation = 0.01;
    std::size_t theta = 10;
    Carrier carrier = Carrier::square;
    double f_carrier = carrier_frequency(1920.0, 10e-9);
    double n_periods = 5.0;
    PeriodScope period_scope = PeriodScope::per_case;
    double sample_rate = 1e6;
    std::size_t n_taps = 2;
    double middle_fraction = 0.8;
    bool use_envelope = false;
    std::uint64_t seed = 1;
    /// RK4 step; must divide the sample period.
    double integrator_dt = 1e-7;
    std::optional<NoiseSpec> noise;

    std::size_t n_channels() const { return n_mask * n_taps; }
    void validate() const;
};

/// Multiplicative per-slot factors, all in [1-d, 1+d].
struct Mask {
    std::vector<double> factors;
};

/// Demultiplexed virtual-neuron activations. Column k*n_mask + j holds tap k
/// under mask j; times[r] is the trace time of row r's mask-0 sample.
struct StateMatrix {
    Eigen::MatrixXd values;
    std::vector<double> times;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

/// Column-wise concatenation for inputs run through the kernel separately.
/// Row counts must match.
StateMatrix concat_columns(std::span<const StateMatrix> parts);

/// Partition of a drive into equal-duration mask slots. Slot s covers samples
/// [start(s), start(s+1)) with start(s) = ceil(s*n_samples/n_slots).
struct SlotLayout {
    std::size_t n_values = 0;   // message values including the trailing dummy
    std::size_t n_keep = 0;     // leading values that are demultiplexed
    std::size_t n_mask = 0;
    std::size_t n_samples = 0;

    std::size_t n_slots() const { return n_values * n_mask; }
    std::size_t start(std::size_t slot) const;
    std::size_t length(std::size_t slot) const { return start(slot + 1) - start(slot); }
};

std::vector<double> normalize(std::span<const double> values, const ReservoirConfig& cfg);
std::vector<double> denormalize(std::span<const double> volts, const ReservoirConfig& cfg);

Mask make_mask(const ReservoirConfig& cfg);

/// out[i*n_mask + j] = message[i] * factors[j].
std::vector<double> multiplex(std::span<const double> message, const Mask& mask);

std::vector<double> sample_hold(std::span<const double> seq, std::size_t theta);

/// Envelope points spread over equal-duration slots and multiplied by the
/// carrier. Duration is n_periods/f_carrier, times the number of message
/// values under PeriodScope::per_value.
DriveSignal modulate(std::span<const double> envelope, const ReservoirConfig& cfg);

double carrier_value(Carrier c, double f_carrier, double t);

/// Layout of the drive that modulate() builds for a message of `n_values`.
SlotLayout slot_layout(std::size_t n_values, std::size_t n_samples, const ReservoirConfig& cfg);

/// Central `middle_fraction` of every kept slot, grouped by mask index. Every
/// slot contributes the same number of samples, set by the shortest slot.
StateMatrix demultiplex(const Trace& trace, const SlotLayout& layout, double middle_fraction);

/// Drops the leading samples whose |V_L| stays below the threshold. Meant for
/// externally recorded traces.
Trace align_trace(const Trace& trace, double threshold = 0.1);

struct Envelope {
    std::vector<double> upper;
    std::vector<double> lower;
};

/// Running max/min over [i - window, i + window]. With window set to a carrier
/// half-period each span covers one full carrier period.
Envelope envelope_extract(std::span<const double> channel, std::size_t window);

/// Maps a drive onto a trace sampled at the drive's rate, sample i taken at
/// the end of drive interval i.
using Kernel = std::function<Trace(const DriveSignal&)>;

Kernel chua_kernel(const ChuaParams& circuit, const ReservoirConfig& cfg);

/// Everything a single case produces on its way to the state matrix.
struct CaseRun {
    std::vector<double> message;  // normalised volts, dummy included
    DriveSignal drive;
    SlotLayout layout;
    Trace trace;
    StateMatrix states;
};

/// Appends the dummy value, then normalise, multiplex, hold, modulate, run
/// the kernel and demultiplex. `noise_seed` seeds the optional drive noise.
CaseRun run_case_detailed(std::span<const double> raw, const ReservoirConfig& cfg, const Mask& mask,
                          const Kernel& kernel, std::uint64_t noise_seed = 0);

StateMatrix run_case(std::span<const double> raw, const ReservoirConfig& cfg, const ChuaParams& circuit,
                     std::uint64_t noise_seed = 0);

}  // namespace chuarc
