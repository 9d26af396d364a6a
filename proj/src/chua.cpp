#include "chuarc/chua.hpp"

#include "chuarc/error.hpp"
#include "chuarc/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace chuarc {

DiodePwl DiodePwl::from_nic(double r1a, double r2a, double r3a,
                            double r1b, double r2b, double r3b, double esat) {
    const double ga = -r2a / (r1a * r3a);
    const double gb = -r2b / (r1b * r3b);
    const double bpa = esat * r3a / (r2a + r3a);
    const double bpb = esat * r3b / (r2b + r3b);
    // Branch with the smaller breakpoint saturates first.
    const bool a_first = bpa < bpb;
    const double g_first_sat = a_first ? 1.0 / r1a : 1.0 / r1b;
    const double g_second_sat = a_first ? 1.0 / r1b : 1.0 / r1a;
    const double g_second = a_first ? gb : ga;

    DiodePwl d;
    d.g_inner = ga + gb;
    d.g_mid = g_first_sat + g_second;
    d.g_outer = g_first_sat + g_second_sat;
    d.bp_inner = std::min(bpa, bpb);
    d.bp_outer = std::max(bpa, bpb);
    return d;
}

DiodePwl DiodePwl::kennedy(double esat) {
    return from_nic(220.0, 220.0, 2200.0, 22e3, 22e3, 3300.0, esat);
}

void DiodePwl::validate() const {
    if (!(g_inner < g_mid)) throw ConfigError("diode.g_inner", "must be below g_mid");
    if (!(g_mid < 0.0)) throw ConfigError("diode.g_mid", "must be negative");
    if (!(g_outer > 0.0)) throw ConfigError("diode.g_outer", "must be positive");
    if (!(bp_inner > 0.0)) throw ConfigError("diode.bp_inner", "must be positive");
    if (!(bp_outer > bp_inner)) throw ConfigError("diode.bp_outer", "must exceed bp_inner");
}

void ChuaParams::validate() const {
    if (!(r_variable > 0.0)) throw ConfigError("circuit.r_variable", "must be positive");
    if (!(c1 > 0.0)) throw ConfigError("circuit.c1", "must be positive");
    if (!(c2 > 0.0)) throw ConfigError("circuit.c2", "must be positive");
    if (!(l > 0.0)) throw ConfigError("circuit.l", "must be positive");
    if (!(r_series >= 0.0)) throw ConfigError("circuit.r_series", "must be non-negative");
    diode.validate();
}

bool CircuitState::finite() const {
    return std::isfinite(i_l) && std::isfinite(v_c2) && std::isfinite(v_c1);
}

void DriveSignal::validate() const {
    if (!(sample_rate > 0.0)) throw ConfigError("drive.sample_rate", "must be positive");
    if (samples.empty()) throw ConfigError("drive.samples", "must not be empty");
}

const std::vector<double>& Trace::channel(const std::string& name) const {
    for (std::size_t k = 0; k < tap_names.size(); ++k)
        if (tap_names[k] == name) return channels[k];
    throw std::out_of_range("unknown tap '" + name + "'");
}

void Trace::validate() const {
    if (!(dt > 0.0)) throw ConfigError("trace.dt", "must be positive");
    if (tap_names.size() != channels.size())
        throw ConfigError("trace.tap_names", "one name per channel required");
    for (const auto& c : channels)
        if (c.size() != size()) throw ConfigError("trace.channels", "channels differ in length");
}

void NoiseSpec::validate() const {
    if (!(voltage_density >= 0.0)) throw ConfigError("noise.voltage_density", "must be non-negative");
    if (!(current_density >= 0.0)) throw ConfigError("noise.current_density", "must be non-negative");
    if (!(bandwidth > 0.0)) throw ConfigError("noise.bandwidth", "must be positive");
    if (!(source_resistance >= 0.0))
        throw ConfigError("noise.source_resistance", "must be non-negative");
}

double diode_current(double v, const DiodePwl& d) {
    const double a = std::abs(v);
    double i;
    if (a <= d.bp_inner) {
        i = d.g_inner * a;
    } else if (a <= d.bp_outer) {
        i = d.g_inner * d.bp_inner + d.g_mid * (a - d.bp_inner);
    } else {
        i = d.g_inner * d.bp_inner + d.g_mid * (d.bp_outer - d.bp_inner) +
            d.g_outer * (a - d.bp_outer);
    }
    return v < 0.0 ? -i : i;
}

CircuitState derivatives(const CircuitState& s, const ChuaParams& p, double v_in) {
    const double coupling = (s.v_c2 - s.v_c1) / p.r_variable;
    return {
        (-s.v_c2 - p.r_series * s.i_l - v_in) / p.l,
        (s.i_l - coupling) / p.c2,
        (coupling - diode_current(s.v_c1, p.diode)) / p.c1,
    };
}

namespace {

CircuitState axpy(const CircuitState& s, double h, const CircuitState& k) {
    return {s.i_l + h * k.i_l, s.v_c2 + h * k.v_c2, s.v_c1 + h * k.v_c1};
}

CircuitState rk4_step(const CircuitState& s, const ChuaParams& p, double v_in, double dt) {
    const CircuitState k1 = derivatives(s, p, v_in);
    const CircuitState k2 = derivatives(axpy(s, 0.5 * dt, k1), p, v_in);
    const CircuitState k3 = derivatives(axpy(s, 0.5 * dt, k2), p, v_in);
    const CircuitState k4 = derivatives(axpy(s, dt, k3), p, v_in);
    const double w = dt / 6.0;
    return {
        s.i_l + w * (k1.i_l + 2.0 * k2.i_l + 2.0 * k3.i_l + k4.i_l),
        s.v_c2 + w * (k1.v_c2 + 2.0 * k2.v_c2 + 2.0 * k3.v_c2 + k4.v_c2),
        s.v_c1 + w * (k1.v_c1 + 2.0 * k2.v_c1 + 2.0 * k3.v_c1 + k4.v_c1),
    };
}

/// Maps integration step k onto the held drive sample.
class HeldDrive {
public:
    HeldDrive(const DriveSignal* drive, double dt) : drive_(drive) {
        if (!drive_) return;
        const double ratio = 1.0 / (drive_->sample_rate * dt);
        const double rounded = std::round(ratio);
        if (rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-9 * rounded)
            steps_per_sample_ = static_cast<std::size_t>(rounded);
        scale_ = dt * drive_->sample_rate;
    }

    double at(std::size_t step) const {
        if (!drive_) return 0.0;
        std::size_t idx;
        if (steps_per_sample_ > 0) {
            idx = step / steps_per_sample_;
        } else {
            idx = static_cast<std::size_t>(std::floor(static_cast<double>(step) * scale_ * (1.0 + 1e-12)));
        }
        return idx < drive_->samples.size() ? drive_->samples[idx] : 0.0;
    }

private:
    const DriveSignal* drive_ = nullptr;
    std::size_t steps_per_sample_ = 0;
    double scale_ = 0.0;
};

}  // namespace

Trace integrate(const ChuaParams& p, const CircuitState& init, const DriveSignal* drive,
                const IntegrateOptions& opts) {
    p.validate();
    if (!(opts.dt > 0.0)) throw ConfigError("integrate.dt", "must be positive");
    if (!(opts.t_end >= 0.0)) throw ConfigError("integrate.t_end", "must be non-negative");
    if (opts.record_stride == 0) throw ConfigError("integrate.record_stride", "must be positive");
    if (drive) drive->validate();
    if (!init.finite()) throw IntegrationError(0, "initial state is not finite");

    const auto n_steps = static_cast<std::size_t>(std::llround(opts.t_end / opts.dt));
    const HeldDrive held(drive, opts.dt);

    Trace trace;
    trace.dt = opts.dt * static_cast<double>(opts.record_stride);
    trace.tap_names = {kTapDiode, kTapInductor};
    trace.channels.resize(2);
    const std::size_t n_rec = n_steps / opts.record_stride + 1;
    trace.channels[0].reserve(n_rec);
    trace.channels[1].reserve(n_rec);

    auto record = [&](const CircuitState& s, double v_in) {
        trace.channels[0].push_back(s.v_c1);
        trace.channels[1].push_back(s.v_c2 - p.r_series * s.i_l - v_in);
    };

    CircuitState s = init;
    record(s, held.at(0));
    for (std::size_t k = 0; k < n_steps; ++k) {
        s = rk4_step(s, p, held.at(k), opts.dt);
        if (!s.finite()) throw IntegrationError(k + 1, "state became non-finite");
        if ((k + 1) % opts.record_stride == 0) record(s, held.at(k + 1));
    }
    trace.final_state = s;
    return trace;
}

std::vector<double> local_extrema(std::span<const double> x) {
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const bool is_max = x[i] > x[i - 1] && x[i] > x[i + 1];
        const bool is_min = x[i] < x[i - 1] && x[i] < x[i + 1];
        if (is_max || is_min) out.push_back(x[i]);
    }
    if (out.empty() && !x.empty()) out.push_back(x.back());
    return out;
}

ScanParameter parse_scan_parameter(const std::string& name) {
    if (name == "r_variable") return ScanParameter::r_variable;
    if (name == "c1") return ScanParameter::c1;
    if (name == "drive_amplitude") return ScanParameter::drive_amplitude;
    throw ConfigError("bifurcation.parameter", "unknown parameter '" + name + "'");
}

std::string to_string(ScanParameter p) {
    switch (p) {
        case ScanParameter::r_variable: return "r_variable";
        case ScanParameter::c1: return "c1";
        case ScanParameter::drive_amplitude: return "drive_amplitude";
    }
    return "unknown";
}

double BifurcationPoint::spread() const {
    if (extrema.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(extrema.begin(), extrema.end());
    return *hi - *lo;
}

DriveSignal sine_drive(const SineDrive& s, double duration, double sample_rate) {
    DriveSignal d;
    d.sample_rate = sample_rate;
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(duration * sample_rate)));
    d.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        d.samples[i] = s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency * t);
    }
    return d;
}

std::vector<BifurcationPoint> bifurcation_scan(const BifurcationOptions& opts) {
    if (opts.steps < 2) throw ConfigError("bifurcation.steps", "at least 2 required");
    if (!std::isfinite(opts.start) || !std::isfinite(opts.stop) || opts.start == opts.stop)
        throw ConfigError("bifurcation.range", "must be a finite non-empty interval");
    if (!(opts.transient_fraction >= 0.0 && opts.transient_fraction < 1.0))
        throw ConfigError("bifurcation.transient_fraction", "must lie in [0, 1)");
    if (opts.tap != kTapDiode && opts.tap != kTapInductor)
        throw ConfigError("bifurcation.tap", "unknown tap '" + opts.tap + "'");
    opts.circuit.validate();

    const bool driven = opts.parameter == ScanParameter::drive_amplitude || opts.drive.amplitude != 0.0;
    if (driven && !(opts.drive.frequency > 0.0))
        throw ConfigError("bifurcation.drive.frequency", "must be positive");
    const double horizon =
        opts.horizon > 0.0 ? opts.horizon : (driven ? 20.0 / opts.drive.frequency : 40e-3);

    std::vector<BifurcationPoint> points(opts.steps);
    parallel_for(opts.steps, opts.jobs, [&](std::size_t i) {
        const double value = opts.start + (opts.stop - opts.start) * static_cast<double>(i) /
                                              static_cast<double>(opts.steps - 1);
        BifurcationPoint& pt = points[i];
        pt.value = value;
        try {
            ChuaParams circuit = opts.circuit;
            SineDrive drive = opts.drive;
            switch (opts.parameter) {
                case ScanParameter::r_variable: circuit.r_variable = value; break;
                case ScanParameter::c1: circuit.c1 = value; break;
                case ScanParameter::drive_amplitude: drive.amplitude = value; break;
            }
            std::optional<DriveSignal> signal;
            if (driven) signal = sine_drive(drive, horizon, opts.drive_sample_rate);
            const Trace tr = integrate(circuit, opts.init, signal ? &*signal : nullptr,
                                       {horizon, opts.dt, opts.record_stride});
            const auto& ch = tr.channel(opts.tap);
            const auto skip = static_cast<std::size_t>(opts.transient_fraction * static_cast<double>(ch.size()));
            pt.extrema = local_extrema(std::span<const double>(ch).subspan(skip));
        } catch (const std::exception& e) {
            pt.failed = true;
            pt.error = e.what();
            pt.extrema.clear();
        }
    });
    return points;
}

double Spectrum::energy() const {
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < magnitude.size(); ++k) {
        const double m2 = magnitude[k] * magnitude[k];
        const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
        sum += unpaired ? m2 : 2.0 * m2;
    }
    return sum / static_cast<double>(n);
}

Spectrum power_spectrum(std::span<const double> channel, double dt) {
    if (channel.size() < 2) throw InputDomainError("power_spectrum needs at least 2 samples");
    if (!(dt > 0.0)) throw ConfigError("spectrum.dt", "must be positive");
    const std::size_t n = channel.size();
    double mean = 0.0;
    for (double v : channel) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> centred(channel.begin(), channel.end());
    for (double& v : centred) v -= mean;

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> bins;
    fft.fwd(bins, centred);

    Spectrum s;
    s.n = n;
    const std::size_t half = n / 2 + 1;
    s.frequency.resize(half);
    s.magnitude.resize(half);
    const double df = 1.0 / (static_cast<double>(n) * dt);
    for (std::size_t k = 0; k < half; ++k) {
        s.frequency[k] = static_cast<double>(k) * df;
        s.magnitude[k] = std::abs(bins[k]);
    }
    return s;
}

double noise_rms(const NoiseSpec& n) {
    const double current_as_voltage = n.current_density * n.source_resistance;
    const double density = std::hypot(n.voltage_density, current_as_voltage);
    return density * std::sqrt(n.bandwidth);
}

DriveSignal inject_noise(const DriveSignal& signal, const NoiseSpec& n) {
    signal.validate();
    n.validate();
    DriveSignal out = signal;
    const double rms = noise_rms(n);
    if (rms == 0.0) return out;
    std::mt19937_64 rng(n.seed);
    std::normal_distribution<double> gauss(0.0, rms);
    for (double& v : out.samples) v += gauss(rng);
    return out;
}

double snr_db(std::span<const double> clean, std::span<const double> noisy) {
    if (clean.size() != noisy.size()) throw DimensionError("snr_db: length mismatch");
    double ps = 0.0;
    double pn = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        ps += clean[i] * clean[i];
        const double d = noisy[i] - clean[i];
        pn += d * d;
    }
    if (pn == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(ps / pn);
}

}  // namespace chuarc
