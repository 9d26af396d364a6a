#include "chuarc/io.hpp"

#include "chuarc/error.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace chuarc::io {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

namespace {

void digest_line(std::ostream& os, const std::string& digest) {
    if (!digest.empty()) os << "# config_digest=" << digest << '\n';
}

void row(std::ostream& os, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) os << ',';
        os << fmt(v);
        first = false;
    }
    os << '\n';
}

}  // namespace

void write_trace_csv(std::ostream& os, const Trace& trace, const std::string& digest) {
    digest_line(os, digest);
    const auto& cd = trace.channel(kTapDiode);
    const auto& vl = trace.channel(kTapInductor);
    os << "t,V_CD,V_L\n";
    for (std::size_t i = 0; i < trace.size(); ++i) row(os, {static_cast<double>(i) * trace.dt, cd[i], vl[i]});
}

void write_bifurcation_csv(std::ostream& os, const std::vector<BifurcationPoint>& points, const std::string& digest) {
    digest_line(os, digest);
    os << "param,extremum_value\n";
    for (const auto& p : points) {
        if (p.failed) {
            os << "# failed param=" << fmt(p.value) << ": " << p.error << '\n';
            continue;
        }
        for (double e : p.extrema) row(os, {p.value, e});
    }
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s, const std::string& digest) {
    digest_line(os, digest);
    os << "freq_hz,magnitude\n";
    for (std::size_t i = 0; i < s.frequency.size(); ++i) row(os, {s.frequency[i], s.magnitude[i]});
}

void write_state_csv(std::ostream& os, const StateMatrix& x, const std::string& digest) {
    digest_line(os, digest);
    os << 't';
    for (Eigen::Index c = 0; c < x.cols(); ++c) os << ",ch_" << c;
    os << '\n';
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        os << fmt(static_cast<std::size_t>(r) < x.times.size() ? x.times[r] : 0.0);
        for (Eigen::Index c = 0; c < x.cols(); ++c) os << ',' << fmt(x.values(r, c));
        os << '\n';
    }
}

void write_dataset_csv(std::ostream& os, const tasks::Dataset& ds, const std::string& digest) {
    using tasks::TaskKind;
    digest_line(os, digest);
    switch (ds.kind) {
        case TaskKind::polynomial:
        case TaskKind::modulo:
        case TaskKind::poly_mod:
            os << "x,y_teacher\n";
            for (std::size_t i = 0; i < ds.size(); ++i) row(os, {ds.raw[i][0], ds.teachers[i][0]});
            break;
        case TaskKind::pair_sum:
        case TaskKind::pair_product:
        case TaskKind::pair_modlin:
            os << "x1,x2,sum,product,modlin\n";
            for (const auto& r : ds.raw) row(os, {r[0], r[1], r[2], r[3], r[4]});
            break;
        case TaskKind::circles:
            os << "x,y,class\n";
            for (const auto& r : ds.raw) os << fmt(r[0]) << ',' << fmt(r[1]) << ',' << static_cast<int>(r[2]) << '\n';
            break;
        case TaskKind::lwe_encrypt:
        case TaskKind::lwe_decrypt:
            throw ConfigError("task.kind", "LWE datasets are written as JSON");
    }
}

void write_lwe_json(std::ostream& os, const lwe::LweDataset& ds, const std::string& digest) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : ds.cases) {
        nlohmann::json j = {{"phi", c.phi},
                            {"decrypt_value", c.decrypt_value},
                            {"u", c.u},
                            {"v", c.v},
                            {"a_samples", c.a_samples},
                            {"b_samples", c.b_samples},
                            {"q", ds.params.q},
                            {"s", ds.params.s},
                            {"m", ds.params.m},
                            {"n_samples", ds.params.n_samples},
                            {"public_a", ds.key.a},
                            {"public_b", ds.key.b},
                            {"seed", ds.seed}};
        if (!digest.empty()) j["config_digest"] = digest;
        arr.push_back(std::move(j));
    }
    os << arr.dump(1) << '\n';
}

void write_lwe_key(std::ostream& os, const lwe::LweDataset& ds) {
    const nlohmann::json j = {
        {"params", {{"q", ds.params.q}, {"n", ds.params.n}, {"m", ds.params.m}, {"n_samples", ds.params.n_samples}}},
        {"public_a", ds.key.a},
        {"public_b", ds.key.b}};
    os << j.dump(2) << '\n';
}

void write_lwe_secret(std::ostream& os, const lwe::LweDataset& ds) {
    os << nlohmann::json{{"s", ds.params.s}, {"q", ds.params.q}}.dump(2) << '\n';
}

void write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw Error("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> Table::numeric(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw ParseError("csv: no column '" + name + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        const std::string& cell = r[static_cast<std::size_t>(c)];
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
            throw ParseError("csv: column '" + name + "' holds non-numeric '" + cell + "'");
        out.push_back(v);
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Table parse_csv(const std::string& text) {
    Table t;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line.substr(line.find_first_not_of("# ") == std::string::npos
                                                 ? line.size()
                                                 : line.find_first_not_of("# ")));
            continue;
        }
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw ParseError("csv: line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                             " fields, header has " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw ParseError("csv: no header line");
    return t;
}

}  // namespace chuarc::io
