#include "chuarc/config.hpp"

#include "chuarc/error.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace chuarc {

using nlohmann::json;

Profile parse_profile(const std::string& name) {
    if (name == "desk") return Profile::desk;
    if (name == "full") return Profile::full;
    throw ConfigError("profile", "unknown profile '" + name + "' (desk, full)");
}

std::string to_string(Profile p) { return p == Profile::desk ? "desk" : "full"; }

ReservoirConfig ExperimentConfig::resolved_reservoir(double value_max) const {
    ReservoirConfig r = reservoir;
    if (auto_carrier) r.f_carrier = carrier_frequency(circuit.r_variable, circuit.c1);
    r.value_max = value_max;
    return r;
}

void ExperimentConfig::validate() const {
    circuit.validate();
    resolved_reservoir(1.0).validate();
    task.validate();
    if (!validate_on_train && !(val_fraction > 0.0 && val_fraction < 1.0))
        throw ConfigError("val_fraction", "must lie strictly between 0 and 1");
    if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

ExperimentConfig default_config(Profile profile) {
    ExperimentConfig c;
    c.profile = profile;
    if (profile == Profile::full) {
        c.reservoir.sample_rate = 100e6;
        c.reservoir.integrator_dt = 1e-8;
        c.task.n_cases = 2900;
    } else {
        c.reservoir.sample_rate = 1e6;
        c.reservoir.integrator_dt = 1e-7;
        c.task.n_cases = 500;
    }
    return c;
}

namespace {

// Reads fields of one JSON object, remembering the path for error messages
// and rejecting keys nobody asked for.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ParseError(where() + ": expected an object");
    }

    ~Reader() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, _] : obj_.items())
            if (!seen_.count(key)) throw ConfigError(field(key), "unknown field");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return obj_.contains(key) && !obj_.at(key).is_null();
    }

    template <typename T>
    void get(const std::string& key, T& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ParseError("expected a boolean");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ParseError("expected a string");
            } else if constexpr (std::is_unsigned_v<T>) {
                if (!v.is_number_unsigned()) throw ParseError("expected a non-negative integer");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) throw ParseError("expected an integer");
            } else {
                if (!v.is_number()) throw ParseError("expected a number");
            }
            out = v.get<T>();
        } catch (const ParseError& e) {
            throw ParseError(field(key) + ": " + e.what());
        }
    }

    const json& child(const std::string& key) {
        seen_.insert(key);
        return obj_.at(key);
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string where() const { return path_.empty() ? "<root>" : path_; }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename E, typename ParseFn>
void get_enum(Reader& r, const std::string& key, E& out, ParseFn parse) {
    std::string name;
    if (!r.has(key)) return;
    r.get(key, name);
    try {
        out = parse(name);
    } catch (const ConfigError& e) {
        throw ConfigError(r.field(key), e.what());
    }
}

void read_diode(const json& j, DiodePwl& d) {
    Reader r(j, "circuit.diode");
    if (r.has("esat")) {
        double esat = 0.0;
        r.get("esat", esat);
        d = DiodePwl::kennedy(esat);
    }
    r.get("g_inner", d.g_inner);
    r.get("g_mid", d.g_mid);
    r.get("g_outer", d.g_outer);
    r.get("bp_inner", d.bp_inner);
    r.get("bp_outer", d.bp_outer);
}

void read_circuit(const json& j, ChuaParams& c) {
    Reader r(j, "circuit");
    r.get("r_variable", c.r_variable);
    r.get("c1", c.c1);
    r.get("c2", c.c2);
    r.get("l", c.l);
    r.get("r_series", c.r_series);
    if (r.has("diode")) read_diode(r.child("diode"), c.diode);
}

void read_noise(const json& j, NoiseSpec& n) {
    Reader r(j, "reservoir.noise");
    r.get("voltage_density", n.voltage_density);
    r.get("current_density", n.current_density);
    r.get("bandwidth", n.bandwidth);
    r.get("source_resistance", n.source_resistance);
}

void read_reservoir(const json& j, ExperimentConfig& cfg) {
    Reader r(j, "reservoir");
    ReservoirConfig& rc = cfg.reservoir;
    r.get("v_min", rc.v_min);
    r.get("v_max", rc.v_max);
    r.get("n_mask", rc.n_mask);
    r.get("mask_deviation", rc.mask_deviation);
    r.get("theta", rc.theta);
    get_enum(r, "carrier", rc.carrier, parse_carrier);
    if (r.has("f_carrier")) {
        const json& f = r.child("f_carrier");
        if (f.is_string() && f.get<std::string>() == "auto") {
            cfg.auto_carrier = true;
        } else {
            r.get("f_carrier", rc.f_carrier);
            cfg.auto_carrier = false;
        }
    }
    r.get("n_periods", rc.n_periods);
    get_enum(r, "period_scope", rc.period_scope, parse_period_scope);
    r.get("sample_rate", rc.sample_rate);
    r.get("n_taps", rc.n_taps);
    r.get("middle_fraction", rc.middle_fraction);
    r.get("use_envelope", rc.use_envelope);
    r.get("integrator_dt", rc.integrator_dt);
    if (r.has("noise")) {
        NoiseSpec n;
        read_noise(r.child("noise"), n);
        rc.noise = n;
    }
}

void read_lwe(const json& j, lwe::LweParams& p) {
    Reader r(j, "lwe");
    r.get("q", p.q);
    r.get("n", p.n);
    r.get("m", p.m);
    r.get("n_samples", p.n_samples);
    r.get("s", p.s);
    if (r.has("error")) {
        Reader e(r.child("error"), "lwe.error");
        std::string kind = "uniform";
        e.get("kind", kind);
        if (kind == "uniform") {
            lwe::UniformInt u;
            if (const auto* prev = std::get_if<lwe::UniformInt>(&p.error)) u = *prev;
            e.get("lo", u.lo);
            e.get("hi", u.hi);
            p.error = u;
        } else if (kind == "gaussian") {
            lwe::RoundedGaussian g;
            if (const auto* prev = std::get_if<lwe::RoundedGaussian>(&p.error)) g = *prev;
            e.get("alpha", g.alpha);
            p.error = g;
        } else {
            throw ConfigError("lwe.error.kind", "unknown error distribution '" + kind + "' (uniform, gaussian)");
        }
    }
}

tasks::DecryptTarget parse_decrypt_target(const std::string& s) {
    if (s == "raw") return tasks::DecryptTarget::raw;
    if (s == "bit") return tasks::DecryptTarget::bit;
    throw ConfigError("task.decrypt_target", "unknown target '" + s + "' (raw, bit)");
}

void read_task(const json& j, tasks::TaskSpec& t) {
    Reader r(j, "task");
    get_enum(r, "kind", t.kind, tasks::parse_task_kind);
    r.get("n_cases", t.n_cases);
    r.get("x_min", t.x_min);
    r.get("x_max", t.x_max);
    r.get("modulo_base", t.modulo_base);
    r.get("poly_mod_base", t.poly_mod_base);
    r.get("inner_radius", t.inner_radius);
    r.get("outer_min", t.outer_min);
    r.get("outer_max", t.outer_max);
    r.get("pair_max", t.pair_max);
    get_enum(r, "decrypt_target", t.decrypt_target, parse_decrypt_target);
}

void read_readout(const json& j, ReadoutOptions& o) {
    Reader r(j, "readout");
    r.get("bias", o.bias);
    r.get("offset", o.offset);
    r.get("lambda", o.lambda);
}

json to_json_cfg(const ExperimentConfig& c, bool with_output) {
    const auto& d = c.circuit.diode;
    const auto& rc = c.reservoir;
    json j;
    j["profile"] = to_string(c.profile);
    j["circuit"] = {{"r_variable", c.circuit.r_variable},
                    {"c1", c.circuit.c1},
                    {"c2", c.circuit.c2},
                    {"l", c.circuit.l},
                    {"r_series", c.circuit.r_series},
                    {"diode",
                     {{"g_inner", d.g_inner},
                      {"g_mid", d.g_mid},
                      {"g_outer", d.g_outer},
                      {"bp_inner", d.bp_inner},
                      {"bp_outer", d.bp_outer}}}};
    json res = {{"v_min", rc.v_min},
                {"v_max", rc.v_max},
                {"n_mask", rc.n_mask},
                {"mask_deviation", rc.mask_deviation},
                {"theta", rc.theta},
                {"carrier", to_string(rc.carrier)},
                {"n_periods", rc.n_periods},
                {"period_scope", to_string(rc.period_scope)},
                {"sample_rate", rc.sample_rate},
                {"n_taps", rc.n_taps},
                {"middle_fraction", rc.middle_fraction},
                {"use_envelope", rc.use_envelope},
                {"integrator_dt", rc.integrator_dt}};
    if (c.auto_carrier)
        res["f_carrier"] = "auto";
    else
        res["f_carrier"] = rc.f_carrier;
    if (rc.noise)
        res["noise"] = {{"voltage_density", rc.noise->voltage_density},
                        {"current_density", rc.noise->current_density},
                        {"bandwidth", rc.noise->bandwidth},
                        {"source_resistance", rc.noise->source_resistance}};
    else
        res["noise"] = nullptr;
    j["reservoir"] = res;

    const auto& t = c.task;
    j["task"] = {{"kind", tasks::to_string(t.kind)},
                 {"n_cases", t.n_cases},
                 {"x_min", t.x_min},
                 {"x_max", t.x_max},
                 {"modulo_base", t.modulo_base},
                 {"poly_mod_base", t.poly_mod_base},
                 {"inner_radius", t.inner_radius},
                 {"outer_min", t.outer_min},
                 {"outer_max", t.outer_max},
                 {"pair_max", t.pair_max},
                 {"decrypt_target", t.decrypt_target == tasks::DecryptTarget::bit ? "bit" : "raw"}};
    const auto& p = t.lwe;
    json err;
    if (const auto* g = std::get_if<lwe::RoundedGaussian>(&p.error))
        err = {{"kind", "gaussian"}, {"alpha", g->alpha}};
    else {
        const auto& u = std::get<lwe::UniformInt>(p.error);
        err = {{"kind", "uniform"}, {"lo", u.lo}, {"hi", u.hi}};
    }
    j["lwe"] = {{"q", p.q}, {"n", p.n}, {"m", p.m}, {"n_samples", p.n_samples}, {"s", p.s}, {"error", err}};
    j["readout"] = {{"bias", c.readout.bias}, {"offset", c.readout.offset}, {"lambda", c.readout.lambda}};
    j["val_fraction"] = c.val_fraction;
    j["validate_on_train"] = c.validate_on_train;
    j["master_seed"] = c.master_seed;
    if (with_output) j["output_dir"] = c.output_dir;
    return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config: top level must be an object");

    Profile profile = Profile::desk;
    if (j.contains("profile")) {
        if (!j["profile"].is_string()) throw ParseError("profile: expected a string");
        profile = parse_profile(j["profile"].get<std::string>());
    }
    ExperimentConfig cfg = default_config(profile);
    {
        Reader r(j, "");
        r.has("profile");
        if (r.has("circuit")) read_circuit(r.child("circuit"), cfg.circuit);
        if (r.has("reservoir")) read_reservoir(r.child("reservoir"), cfg);
        if (r.has("task")) read_task(r.child("task"), cfg.task);
        if (r.has("lwe")) read_lwe(r.child("lwe"), cfg.task.lwe);
        if (r.has("readout")) read_readout(r.child("readout"), cfg.readout);
        r.get("val_fraction", cfg.val_fraction);
        r.get("validate_on_train", cfg.validate_on_train);
        r.get("master_seed", cfg.master_seed);
        r.get("output_dir", cfg.output_dir);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) { return to_json_cfg(cfg, true).dump(2) + "\n"; }

std::string config_digest(const ExperimentConfig& cfg) {
    const std::string text = to_json_cfg(cfg, false).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace chuarc
