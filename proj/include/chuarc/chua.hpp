// Driven Kennedy-style Chua circuit: piecewise-linear diode, state equations,
// fixed-step RK4 integration, and the analysis helpers built on top of it
// (bifurcation scans, spectra, noise injection).
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chuarc {

/// Five-segment odd piecewise-linear Chua diode. Conductances in siemens,
/// breakpoints in volts.
struct DiodePwl {
    double g_inner = 0.0;
    double g_mid = 0.0;
    double g_outer = 0.0;
    double bp_inner = 0.0;
    double bp_outer = 0.0;

    /// Two negative-impedance-converter realisation. Each branch contributes
    /// G = -R2/(R1*R3) with breakpoint Esat*R3/(R2+R3); once saturated the
    /// branch looks like +1/R1.
    static DiodePwl from_nic(double r1a, double r2a, double r3a,
                             double r1b, double r2b, double r3b, double esat);

    /// 220/220/2.2k and 22k/22k/3.3k branches with 8.3 V saturation.
    static DiodePwl kennedy(double esat = 8.3);

    /// Throws ConfigError unless g_inner < g_mid < 0 < g_outer and
    /// 0 < bp_inner < bp_outer.
    void validate() const;
};

struct ChuaParams {
    double r_variable = 1920.0;
    double c1 = 10e-9;
    double c2 = 100e-9;
    double l = 18e-3;
    double r_series = 17.0;
    DiodePwl diode = DiodePwl::kennedy();

    void validate() const;
};

/// Inductor current (A) and the two capacitor voltages (V). Also used to
/// carry time derivatives of the same quantities.
struct CircuitState {
    double i_l = 0.0;
    double v_c2 = 0.0;
    double v_c1 = 0.0;

    /// Small offset on v_c1 so undriven runs leave the origin fixed point.
    static constexpr CircuitState initial() { return {0.0, 0.0, 0.1}; }

    bool finite() const;
    friend bool operator==(const CircuitState&, const CircuitState&) = default;
};

struct DriveSignal {
    std::vector<double> samples;
    double sample_rate = 0.0;

    void validate() const;
    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

inline constexpr const char* kTapDiode = "V_CD";
inline constexpr const char* kTapInductor = "V_L";

/// Sampled multi-tap voltages. channels[k] belongs to tap_names[k]; every
/// channel has the same length and sample i sits at t = i*dt.
struct Trace {
    double dt = 0.0;
    std::vector<std::string> tap_names;
    std::vector<std::vector<double>> channels;
    CircuitState final_state{};

    std::size_t size() const { return channels.empty() ? 0 : channels.front().size(); }
    /// Throws std::out_of_range for unknown taps.
    const std::vector<double>& channel(const std::string& name) const;
    void validate() const;
};

struct NoiseSpec {
    double voltage_density = 0.0;   // V/sqrt(Hz)
    double current_density = 0.0;   // A/sqrt(Hz)
    double bandwidth = 1.0;         // Hz
    std::uint64_t seed = 0;
    /// Converts current noise into an equivalent voltage at the drive; 0
    /// leaves current noise out of the injected signal.
    double source_resistance = 0.0;

    void validate() const;
};

double diode_current(double v, const DiodePwl& d);

/// Time derivatives of (i_l, v_c2, v_c1). The drive and the inductor series
/// resistance only enter dI_l/dt.
CircuitState derivatives(const CircuitState& s, const ChuaParams& p, double v_in);

struct IntegrateOptions {
    double t_end = 0.0;
    double dt = 10e-9;
    /// Keep every n-th step in the trace (step 0 is always kept).
    std::size_t record_stride = 1;
};

/// Classical fixed-step RK4. The drive is zero-order held over each step and
/// reads as zero past its end. The trace has taps V_CD = v_c1 and
/// V_L = v_c2 - r_series*i_l - v_in. Throws IntegrationError on a non-finite
/// state.
Trace integrate(const ChuaParams& p, const CircuitState& init, const DriveSignal* drive,
                const IntegrateOptions& opts);

inline Trace integrate(const ChuaParams& p, const CircuitState& init, double t_end, double dt) {
    return integrate(p, init, nullptr, {t_end, dt, 1});
}

inline Trace integrate(const ChuaParams& p, const CircuitState& init, const DriveSignal& drive,
                       double t_end, double dt) {
    return integrate(p, init, &drive, {t_end, dt, 1});
}

/// Strict local maxima and minima over 3-sample windows, in order of
/// occurrence. A monotone or flat sequence yields its last value.
std::vector<double> local_extrema(std::span<const double> x);

enum class ScanParameter { r_variable, c1, drive_amplitude };

ScanParameter parse_scan_parameter(const std::string& name);
std::string to_string(ScanParameter p);

struct SineDrive {
    double amplitude = 0.0;
    double frequency = 100.0;
};

struct BifurcationOptions {
    ScanParameter parameter = ScanParameter::r_variable;
    double start = 1600.0;
    double stop = 2000.0;
    std::size_t steps = 2;
    ChuaParams circuit{};
    SineDrive drive{};
    std::string tap = kTapDiode;
    CircuitState init = CircuitState::initial();
    /// 0 picks 40 ms undriven, 20 carrier periods driven.
    double horizon = 0.0;
    double transient_fraction = 0.5;
    double dt = 10e-9;
    std::size_t record_stride = 10;
    std::size_t jobs = 1;
    /// Rate of the sampled sine fed to the circuit when driven.
    double drive_sample_rate = 1e6;
};

struct BifurcationPoint {
    double value = 0.0;
    std::vector<double> extrema;
    bool failed = false;
    std::string error;

    double spread() const;
};

/// One integration per parameter value, transient prefix dropped, extrema of
/// the chosen tap collected. Failed points are flagged and the scan goes on.
/// Points come back in parameter order whatever the job count.
std::vector<BifurcationPoint> bifurcation_scan(const BifurcationOptions& opts);

/// Sine drive of the given amplitude and frequency covering `duration`.
DriveSignal sine_drive(const SineDrive& s, double duration, double sample_rate);

struct Spectrum {
    std::vector<double> frequency;  // Hz
    std::vector<double> magnitude;  // |DFT| of the mean-removed channel
    std::size_t n = 0;              // length of the transformed channel

    /// Energy recovered from the one-sided magnitudes; equals the time-domain
    /// energy of the mean-removed channel.
    double energy() const;
};

/// One-sided DFT magnitudes (bins 0..n/2) with spacing 1/(n*dt).
Spectrum power_spectrum(std::span<const double> channel, double dt);

double noise_rms(const NoiseSpec& n);

/// Adds white Gaussian noise with RMS noise_rms(n).
DriveSignal inject_noise(const DriveSignal& signal, const NoiseSpec& n);

/// 10*log10(P_signal/P_noise) with noise = noisy - clean. Infinity when the
/// two are identical.
double snr_db(std::span<const double> clean, std::span<const double> noisy);

}  // namespace chuarc
