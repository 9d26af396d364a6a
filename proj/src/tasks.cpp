#include "chuarc/tasks.hpp"

#include "chuarc/error.hpp"
#include "chuarc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace chuarc::tasks {

namespace {

struct KindName {
    TaskKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {TaskKind::circles, "circles"},           {TaskKind::polynomial, "polynomial"},
    {TaskKind::modulo, "modulo"},             {TaskKind::poly_mod, "poly-mod"},
    {TaskKind::pair_sum, "pair-sum"},         {TaskKind::pair_product, "pair-product"},
    {TaskKind::pair_modlin, "pair-modlin"},   {TaskKind::lwe_encrypt, "lwe-encrypt"},
    {TaskKind::lwe_decrypt, "lwe-decrypt"},
};

}  // namespace

TaskKind parse_task_kind(const std::string& name) {
    for (const auto& kn : kKindNames)
        if (name == kn.name) return kn.kind;
    throw ConfigError("task.kind", "unknown task '" + name + "'");
}

std::string to_string(TaskKind k) {
    for (const auto& kn : kKindNames)
        if (kn.kind == k) return kn.name;
    return "unknown";
}

void TaskSpec::validate() const {
    if (n_cases < 1) throw ConfigError("task.n_cases", "must be at least 1");
    if (!(x_min >= 0.0 && x_min < x_max)) throw ConfigError("task.x_min", "need 0 <= x_min < x_max");
    if (!(modulo_base > 0.0)) throw ConfigError("task.modulo_base", "must be positive");
    if (!(poly_mod_base > 0.0)) throw ConfigError("task.poly_mod_base", "must be positive");
    if (!(inner_radius > 0.0 && inner_radius < outer_min && outer_min < outer_max))
        throw ConfigError("task.inner_radius", "need 0 < inner_radius < outer_min < outer_max");
    if (!(pair_max > 0.0)) throw ConfigError("task.pair_max", "must be positive");
    if (kind == TaskKind::lwe_encrypt || kind == TaskKind::lwe_decrypt) lwe.validate();
}

double polynomial_teacher(double x) {
    return x * (x - 4.0) * (x - 3.0) * (x - 2.0) * (x - 1.0) * (x + 1.0) * (x + 2.0) * (x + 3.0) * (x + 10.0);
}

double modulo_teacher(double x, double base) {
    if (!(base > 0.0)) throw InputDomainError("modulo: base must be positive");
    const double r = std::fmod(x, base);
    return r < 0.0 ? r + base : r;
}

double poly_mod_teacher(double x, double base) { return modulo_teacher(polynomial_teacher(x), base); }

PairTeachers pair_teachers(double x1, double x2, double max_value) {
    if (!(x1 >= 0.0 && x1 <= max_value && x2 >= 0.0 && x2 <= max_value))
        throw InputDomainError("pair task inputs must lie in [0, " + std::to_string(max_value) + "]");
    return {x1 + x2, x1 * x2, modulo_teacher(2.0 * x2 - x1, 3.0)};
}

std::vector<LabeledPoint> concentric_circles(std::size_t n_points, std::uint64_t seed, double inner_radius,
                                             double outer_min, double outer_max) {
    if (n_points < 2) throw ConfigError("task.n_cases", "circles need at least 2 points");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<LabeledPoint> pts;
    pts.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const int cls = i % 2 == 0 ? 1 : 0;
        const double u = u01(rng);
        const double r = cls == 1 ? inner_radius * std::sqrt(u)
                                  : std::sqrt(outer_min * outer_min + u * (outer_max * outer_max - outer_min * outer_min));
        const double angle = 2.0 * std::numbers::pi * u01(rng);
        pts.push_back({r * std::cos(angle), r * std::sin(angle), cls});
    }
    return pts;
}

int classify(double estimate, std::size_t n_classes) {
    const double lo = 1.0;
    const double hi = static_cast<double>(n_classes);
    const double nearest = std::clamp(std::round(estimate), lo, hi);
    return static_cast<int>(nearest) - 1;
}

std::vector<LabeledPoint> decision_surface(const GridSpec& grid, const std::function<int(double, double)>& model) {
    if (grid.nx < 1 || grid.ny < 1) throw ConfigError("grid", "needs at least one point per axis");
    std::vector<LabeledPoint> out;
    out.reserve(grid.nx * grid.ny);
    auto axis = [](double lo, double hi, std::size_t n, std::size_t i) {
        return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    for (std::size_t iy = 0; iy < grid.ny; ++iy) {
        for (std::size_t ix = 0; ix < grid.nx; ++ix) {
            const double x = axis(grid.x_min, grid.x_max, grid.nx, ix);
            const double y = axis(grid.y_min, grid.y_max, grid.ny, iy);
            out.push_back({x, y, model(x, y)});
        }
    }
    return out;
}

Split split_dataset(std::size_t n, double val_fraction, std::uint64_t seed) {
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw ConfigError("val_fraction", "must lie strictly between 0 and 1");
    const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * val_fraction));
    if (n_val == 0 || n_val >= n)
        throw ConfigError("val_fraction", "split of " + std::to_string(n) + " cases leaves one side empty");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<std::size_t> d(0, i);
        std::swap(idx[i], idx[d(rng)]);
    }
    Split s;
    s.validation.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
    s.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
    std::sort(s.validation.begin(), s.validation.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const int> truth, std::span<const int> predicted,
                                                       std::size_t n_classes) {
    if (truth.size() != predicted.size()) throw DimensionError("confusion_matrix: length mismatch");
    std::vector<std::vector<std::size_t>> m(n_classes, std::vector<std::size_t>(n_classes, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto t = static_cast<std::size_t>(truth[i]);
        const auto p = static_cast<std::size_t>(predicted[i]);
        if (t >= n_classes || p >= n_classes) throw InputDomainError("confusion_matrix: class out of range");
        ++m[t][p];
    }
    return m;
}

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw DimensionError("accuracy: length mismatch");
    if (truth.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

void regression(Dataset& ds, const TaskSpec& spec, double (*teacher)(const TaskSpec&, double)) {
    ds.value_max = spec.x_max;
    for (double x : linspace(spec.x_min, spec.x_max, spec.n_cases)) {
        ds.inputs.push_back({x});
        ds.teachers.push_back({teacher(spec, x)});
        ds.raw.push_back({x});
    }
}

void pairs(Dataset& ds, const TaskSpec& spec, std::uint64_t seed) {
    const auto side = static_cast<std::size_t>(std::floor(spec.pair_max)) + 1;
    std::vector<std::pair<double, double>> grid;
    grid.reserve(side * side);
    for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = 0; b < side; ++b) grid.emplace_back(static_cast<double>(a), static_cast<double>(b));
    if (spec.n_cases < grid.size()) {
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < spec.n_cases; ++i) {
            std::uniform_int_distribution<std::size_t> d(i, grid.size() - 1);
            std::swap(grid[i], grid[d(rng)]);
        }
        grid.resize(spec.n_cases);
    }
    ds.value_max = spec.pair_max;
    for (const auto& [x1, x2] : grid) {
        const PairTeachers t = pair_teachers(x1, x2, spec.pair_max);
        const double y = spec.kind == TaskKind::pair_sum       ? t.sum
                         : spec.kind == TaskKind::pair_product ? t.product
                                                               : t.modlin;
        ds.inputs.push_back({x1, x2});
        ds.teachers.push_back({y});
        ds.raw.push_back({x1, x2, t.sum, t.product, t.modlin});
    }
}

}  // namespace

Dataset make_dataset(const TaskSpec& spec, std::uint64_t seed) {
    spec.validate();
    Dataset ds;
    ds.kind = spec.kind;
    ds.seed = seed;
    switch (spec.kind) {
        case TaskKind::polynomial:
            regression(ds, spec, [](const TaskSpec&, double x) { return polynomial_teacher(x); });
            break;
        case TaskKind::modulo:
            regression(ds, spec, [](const TaskSpec& s, double x) { return modulo_teacher(x, s.modulo_base); });
            break;
        case TaskKind::poly_mod:
            regression(ds, spec, [](const TaskSpec& s, double x) { return poly_mod_teacher(x, s.poly_mod_base); });
            break;
        case TaskKind::circles: {
            const auto pts = concentric_circles(spec.n_cases, seed, spec.inner_radius, spec.outer_min, spec.outer_max);
            ds.value_max = 2.0 * spec.outer_max;
            ds.separate_inputs = true;
            ds.n_classes = 2;
            for (const auto& p : pts) {
                ds.inputs.push_back({p.x + spec.outer_max, p.y + spec.outer_max});
                ds.teachers.push_back({class_teacher(p.cls)});
                ds.raw.push_back({p.x, p.y, static_cast<double>(p.cls)});
                ds.labels.push_back(p.cls);
            }
            break;
        }
        case TaskKind::pair_sum:
        case TaskKind::pair_product:
        case TaskKind::pair_modlin: pairs(ds, spec, seed); break;
        case TaskKind::lwe_encrypt:
        case TaskKind::lwe_decrypt: {
            ds.lwe = lwe::generate_testcases(spec.lwe, spec.n_cases, seed);
            ds.value_max = static_cast<double>(spec.lwe.q - 1);
            for (const auto& tc : ds.lwe->cases) {
                if (spec.kind == TaskKind::lwe_encrypt) {
                    auto buf = lwe::build_input_buffer(tc);
                    buf.pop_back();  // the reservoir appends its own dummy
                    ds.inputs.push_back(std::move(buf));
                    ds.teachers.push_back({static_cast<double>(tc.u), static_cast<double>(tc.v)});
                } else {
                    ds.inputs.push_back({static_cast<double>(tc.u), static_cast<double>(tc.v)});
                    if (spec.decrypt_target == DecryptTarget::bit) {
                        ds.teachers.push_back({class_teacher(tc.phi)});
                        ds.labels.push_back(tc.phi);
                    } else {
                        ds.teachers.push_back({static_cast<double>(tc.decrypt_value)});
                    }
                }
                ds.raw.push_back({static_cast<double>(tc.phi), static_cast<double>(tc.u),
                                  static_cast<double>(tc.v), static_cast<double>(tc.decrypt_value)});
            }
            if (spec.kind == TaskKind::lwe_decrypt && spec.decrypt_target == DecryptTarget::bit) ds.n_classes = 2;
            break;
        }
    }
    return ds;
}

}  // namespace chuarc::tasks
