#include "chuarc/pipeline.hpp"

#include "chuarc/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>

namespace chuarc {

Carrier parse_carrier(const std::string& name) {
    if (name == "square") return Carrier::square;
    if (name == "sine") return Carrier::sine;
    if (name == "dc") return Carrier::dc;
    throw ConfigError("reservoir.carrier", "unknown carrier '" + name + "'");
}

std::string to_string(Carrier c) {
    switch (c) {
        case Carrier::square: return "square";
        case Carrier::sine: return "sine";
        case Carrier::dc: return "dc";
    }
    return "unknown";
}

PeriodScope parse_period_scope(const std::string& name) {
    if (name == "case") return PeriodScope::per_case;
    if (name == "value") return PeriodScope::per_value;
    throw ConfigError("reservoir.period_scope", "expected 'case' or 'value', got '" + name + "'");
}

std::string to_string(PeriodScope s) { return s == PeriodScope::per_case ? "case" : "value"; }

double carrier_frequency(double r_variable, double c1, double omega) {
    return omega / (2.0 * std::numbers::pi * r_variable * c1);
}

void ReservoirConfig::validate() const {
    if (!(v_min < v_max)) throw ConfigError("reservoir.v_min", "must be below v_max");
    if (!(value_max > 0.0)) throw ConfigError("reservoir.value_max", "must be positive");
    if (n_mask < 1) throw ConfigError("reservoir.n_mask", "must be at least 1");
    if (!(mask_deviation >= 0.0 && mask_deviation < 1.0))
        throw ConfigError("reservoir.mask_deviation", "must lie in [0, 1)");
    if (theta < 1) throw ConfigError("reservoir.theta", "must be at least 1");
    if (!(f_carrier > 0.0)) throw ConfigError("reservoir.f_carrier", "must be positive");
    if (!(n_periods > 0.0)) throw ConfigError("reservoir.n_periods", "must be positive");
    if (!(sample_rate > 0.0)) throw ConfigError("reservoir.sample_rate", "must be positive");
    if (sample_rate < 2.0 * f_carrier)
        throw ConfigError("reservoir.sample_rate", "must be at least twice f_carrier");
    if (n_taps != 2) throw ConfigError("reservoir.n_taps", "the kernel exposes exactly 2 taps");
    if (!(middle_fraction > 0.0 && middle_fraction <= 1.0))
        throw ConfigError("reservoir.middle_fraction", "must lie in (0, 1]");
    if (!(integrator_dt > 0.0)) throw ConfigError("reservoir.integrator_dt", "must be positive");
    if (noise) noise->validate();
}

StateMatrix concat_columns(std::span<const StateMatrix> parts) {
    if (parts.empty()) throw DimensionError("concat_columns: nothing to concatenate");
    const Eigen::Index rows = parts.front().rows();
    Eigen::Index cols = 0;
    for (const auto& p : parts) {
        if (p.rows() != rows) throw DimensionError("concat_columns: row counts differ");
        cols += p.cols();
    }
    StateMatrix out;
    out.values.resize(rows, cols);
    out.times = parts.front().times;
    Eigen::Index c = 0;
    for (const auto& p : parts) {
        out.values.middleCols(c, p.cols()) = p.values;
        c += p.cols();
    }
    return out;
}

std::size_t SlotLayout::start(std::size_t slot) const {
    const std::size_t s = n_slots();
    return (slot * n_samples + s - 1) / s;
}

std::vector<double> normalize(std::span<const double> values, const ReservoirConfig& cfg) {
    std::vector<double> out;
    out.reserve(values.size());
    const double span = cfg.v_max - cfg.v_min;
    for (double x : values) {
        if (!(x >= 0.0 && x <= cfg.value_max))
            throw InputDomainError("normalize: value " + std::to_string(x) + " outside [0, " +
                                   std::to_string(cfg.value_max) + "]");
        out.push_back(cfg.v_min + (x / cfg.value_max) * span);
    }
    return out;
}

std::vector<double> denormalize(std::span<const double> volts, const ReservoirConfig& cfg) {
    std::vector<double> out;
    out.reserve(volts.size());
    for (double v : volts) out.push_back((v - cfg.v_min) / (cfg.v_max - cfg.v_min) * cfg.value_max);
    return out;
}

Mask make_mask(const ReservoirConfig& cfg) {
    Mask m;
    m.factors.assign(cfg.n_mask, 1.0);
    if (cfg.mask_deviation == 0.0) return m;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(1.0 - cfg.mask_deviation, 1.0 + cfg.mask_deviation);
    for (double& f : m.factors) f = u(rng);
    return m;
}

std::vector<double> multiplex(std::span<const double> message, const Mask& mask) {
    std::vector<double> out;
    out.reserve(message.size() * mask.factors.size());
    for (double v : message)
        for (double f : mask.factors) out.push_back(v * f);
    return out;
}

std::vector<double> sample_hold(std::span<const double> seq, std::size_t theta) {
    if (theta < 1) throw ConfigError("theta", "must be at least 1");
    std::vector<double> out;
    out.reserve(seq.size() * theta);
    for (double v : seq) out.insert(out.end(), theta, v);
    return out;
}

double carrier_value(Carrier c, double f_carrier, double t) {
    switch (c) {
        case Carrier::square: {
            const double phase = f_carrier * t - std::floor(f_carrier * t);
            return phase < 0.5 ? 1.0 : -1.0;
        }
        case Carrier::sine: return std::sin(2.0 * std::numbers::pi * f_carrier * t);
        case Carrier::dc: return 1.0;
    }
    return 0.0;
}

namespace {

std::size_t drive_samples(std::size_t n_values, const ReservoirConfig& cfg) {
    double duration = cfg.n_periods / cfg.f_carrier;
    if (cfg.period_scope == PeriodScope::per_value) duration *= static_cast<double>(n_values);
    return static_cast<std::size_t>(std::llround(duration * cfg.sample_rate));
}

}  // namespace

DriveSignal modulate(std::span<const double> envelope, const ReservoirConfig& cfg) {
    if (envelope.empty()) throw InputDomainError("modulate: empty envelope");
    if (!(cfg.f_carrier > 0.0)) throw ConfigError("reservoir.f_carrier", "must be positive");
    if (cfg.sample_rate < 2.0 * cfg.f_carrier)
        throw ConfigError("reservoir.sample_rate", "must be at least twice f_carrier");

    const std::size_t per_value = cfg.n_mask * cfg.theta;
    const std::size_t n_values = std::max<std::size_t>(1, envelope.size() / std::max<std::size_t>(1, per_value));
    const std::size_t n = drive_samples(n_values, cfg);
    if (n == 0) throw ConfigError("reservoir.sample_rate", "drive would contain no samples");

    DriveSignal d;
    d.sample_rate = cfg.sample_rate;
    d.samples.resize(n);
    const std::size_t e = envelope.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = (i * e) / n;
        const double t = static_cast<double>(i) / cfg.sample_rate;
        d.samples[i] = envelope[idx] * carrier_value(cfg.carrier, cfg.f_carrier, t);
    }
    return d;
}

SlotLayout slot_layout(std::size_t n_values, std::size_t n_samples, const ReservoirConfig& cfg) {
    SlotLayout l;
    l.n_values = n_values;
    l.n_keep = n_values > 0 ? n_values - 1 : 0;
    l.n_mask = cfg.n_mask;
    l.n_samples = n_samples;
    return l;
}

StateMatrix demultiplex(const Trace& trace, const SlotLayout& layout, double middle_fraction) {
    if (!(middle_fraction > 0.0 && middle_fraction <= 1.0))
        throw ConfigError("middle_fraction", "must lie in (0, 1]");
    if (layout.n_mask == 0 || layout.n_values == 0 || layout.n_keep == 0 || layout.n_keep > layout.n_values)
        throw LayoutError("demultiplex: layout has no slots to keep");
    if (trace.size() != layout.n_samples)
        throw LayoutError("demultiplex: trace has " + std::to_string(trace.size()) +
                          " samples, layout expects " + std::to_string(layout.n_samples));
    if (layout.n_samples < layout.n_slots())
        throw LayoutError("demultiplex: " + std::to_string(layout.n_slots()) + " slots but only " +
                          std::to_string(layout.n_samples) + " samples");

    std::size_t min_len = layout.n_samples;
    for (std::size_t s = 0; s < layout.n_slots(); ++s) min_len = std::min(min_len, layout.length(s));
    const auto take = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(middle_fraction * static_cast<double>(min_len) + 1e-9)));

    const std::size_t n_taps = trace.channels.size();
    const auto rows = static_cast<Eigen::Index>(layout.n_keep * take);
    const auto cols = static_cast<Eigen::Index>(layout.n_mask * n_taps);
    StateMatrix out;
    out.values.resize(rows, cols);
    out.times.resize(static_cast<std::size_t>(rows));

    for (std::size_t v = 0; v < layout.n_keep; ++v) {
        for (std::size_t j = 0; j < layout.n_mask; ++j) {
            const std::size_t slot = v * layout.n_mask + j;
            const std::size_t first = layout.start(slot) + (layout.length(slot) - take) / 2;
            for (std::size_t r = 0; r < take; ++r) {
                const auto row = static_cast<Eigen::Index>(v * take + r);
                for (std::size_t k = 0; k < n_taps; ++k)
                    out.values(row, static_cast<Eigen::Index>(k * layout.n_mask + j)) =
                        trace.channels[k][first + r];
                if (j == 0) out.times[static_cast<std::size_t>(row)] = static_cast<double>(first + r) * trace.dt;
            }
        }
    }
    return out;
}

Trace align_trace(const Trace& trace, double threshold) {
    const auto& vl = trace.channel(kTapInductor);
    std::size_t first = 0;
    while (first < vl.size() && std::abs(vl[first]) < threshold) ++first;
    if (first == vl.size()) throw NoSignalError("align_trace: no sample reaches the threshold");
    Trace out = trace;
    for (auto& ch : out.channels) ch.erase(ch.begin(), ch.begin() + static_cast<std::ptrdiff_t>(first));
    return out;
}

Envelope envelope_extract(std::span<const double> channel, std::size_t window) {
    if (window < 1) throw ConfigError("envelope.window", "must be at least 1");
    const std::size_t n = channel.size();
    Envelope env;
    env.upper.resize(n);
    env.lower.resize(n);
    // Monotonic deques over the sliding span [i - window, i + window].
    std::deque<std::size_t> hi;
    std::deque<std::size_t> lo;
    std::size_t pushed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t right = std::min(n - 1, i + window);
        for (; pushed <= right; ++pushed) {
            while (!hi.empty() && channel[hi.back()] <= channel[pushed]) hi.pop_back();
            hi.push_back(pushed);
            while (!lo.empty() && channel[lo.back()] >= channel[pushed]) lo.pop_back();
            lo.push_back(pushed);
        }
        const std::size_t left = i >= window ? i - window : 0;
        while (hi.front() < left) hi.pop_front();
        while (lo.front() < left) lo.pop_front();
        env.upper[i] = channel[hi.front()];
        env.lower[i] = channel[lo.front()];
    }
    return env;
}

Kernel chua_kernel(const ChuaParams& circuit, const ReservoirConfig& cfg) {
    const double ratio = 1.0 / (cfg.sample_rate * cfg.integrator_dt);
    const double stride = std::round(ratio);
    if (stride < 1.0 || std::abs(ratio - stride) > 1e-9 * stride)
        throw ConfigError("reservoir.integrator_dt", "must divide the sample period");
    circuit.validate();
    return [circuit, dt = cfg.integrator_dt, stride = static_cast<std::size_t>(stride)](const DriveSignal& drive) {
        IntegrateOptions opts;
        opts.dt = dt;
        opts.record_stride = stride;
        opts.t_end = static_cast<double>(drive.samples.size() * stride) * dt;
        Trace tr = integrate(circuit, CircuitState::initial(), &drive, opts);
        // Sample 0 is the initial state; sample i+1 closes drive interval i.
        for (auto& ch : tr.channels) ch.erase(ch.begin());
        return tr;
    };
}

CaseRun run_case_detailed(std::span<const double> raw, const ReservoirConfig& cfg, const Mask& mask,
                          const Kernel& kernel, std::uint64_t noise_seed) {
    cfg.validate();
    if (raw.empty()) throw InputDomainError("run_case: empty input");
    if (mask.factors.size() != cfg.n_mask) throw DimensionError("run_case: mask size differs from n_mask");

    std::vector<double> with_dummy(raw.begin(), raw.end());
    with_dummy.push_back(0.0);

    CaseRun run;
    run.message = normalize(with_dummy, cfg);
    const auto envelope = sample_hold(multiplex(run.message, mask), cfg.theta);
    run.drive = modulate(envelope, cfg);
    if (cfg.noise) {
        NoiseSpec n = *cfg.noise;
        n.seed = noise_seed;
        run.drive = inject_noise(run.drive, n);
    }
    run.layout = slot_layout(with_dummy.size(), run.drive.samples.size(), cfg);
    run.trace = kernel(run.drive);
    if (cfg.use_envelope) {
        const auto window = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(cfg.sample_rate / (2.0 * cfg.f_carrier))));
        for (auto& ch : run.trace.channels) ch = envelope_extract(ch, window).upper;
    }
    run.states = demultiplex(run.trace, run.layout, cfg.middle_fraction);
    return run;
}

StateMatrix run_case(std::span<const double> raw, const ReservoirConfig& cfg, const ChuaParams& circuit,
                     std::uint64_t noise_seed) {
    return run_case_detailed(raw, cfg, make_mask(cfg), chua_kernel(circuit, cfg), noise_seed).states;
}

}  // namespace chuarc
