// Benchmark datasets and teacher functions.
#pragma once

#include "chuarc/lwe.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chuarc::tasks {

enum class TaskKind {
    circles,
    polynomial,
    modulo,
    poly_mod,
    pair_sum,
    pair_product,
    pair_modlin,
    lwe_encrypt,
    lwe_decrypt,
};

TaskKind parse_task_kind(const std::string& name);
std::string to_string(TaskKind k);

/// What the decryption task is trained to output.
enum class DecryptTarget { raw, bit };

struct TaskSpec {
    TaskKind kind = TaskKind::polynomial;
    std::size_t n_cases = 500;
    // regression
    double x_min = 0.1;
    double x_max = 3.0;
    double modulo_base = 1.3;
    double poly_mod_base = 50.0;
    // circles
    double inner_radius = 1.0;
    double outer_min = 1.5;
    double outer_max = 2.5;
    // two-input
    double pair_max = 40.0;
    // lwe
    lwe::LweParams lwe{};
    DecryptTarget decrypt_target = DecryptTarget::raw;

    void validate() const;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

struct LabeledPoint {
    double x = 0.0;
    double y = 0.0;
    int cls = 0;
};

/// Reservoir-ready dataset. inputs[i] lies in [0, value_max]; when
/// `separate_inputs` is set each value of inputs[i] is driven through the
/// kernel on its own and the state matrices are concatenated column-wise.
struct Dataset {
    TaskKind kind = TaskKind::polynomial;
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> teachers;
    /// Untransformed task coordinates for CSV export (x; x1,x2; x,y).
    std::vector<std::vector<double>> raw;
    /// Class labels for classification tasks, empty otherwise.
    std::vector<int> labels;
    std::size_t n_classes = 0;
    double value_max = 1.0;
    bool separate_inputs = false;
    std::uint64_t seed = 0;
    std::optional<lwe::LweDataset> lwe;

    std::size_t size() const { return inputs.size(); }
    std::size_t n_outputs() const { return teachers.empty() ? 0 : teachers.front().size(); }
};

double polynomial_teacher(double x);
double modulo_teacher(double x, double base);
double poly_mod_teacher(double x, double base = 50.0);

struct PairTeachers {
    double sum = 0.0;
    double product = 0.0;
    double modlin = 0.0;
};

/// Throws InputDomainError outside [0, 40].
PairTeachers pair_teachers(double x1, double x2, double max_value = 40.0);

/// Alternating classes: class 1 area-uniform in the disk of radius
/// `inner_radius`, class 0 area-uniform in the [outer_min, outer_max] annulus.
std::vector<LabeledPoint> concentric_circles(std::size_t n_points, std::uint64_t seed, double inner_radius = 1.0,
                                             double outer_min = 1.5, double outer_max = 2.5);

/// Teacher value for a class: class + 1.
inline double class_teacher(int cls) { return static_cast<double>(cls) + 1.0; }

/// Nearest teacher value, clamped to the known classes, mapped back to a class.
int classify(double estimate, std::size_t n_classes = 2);

struct GridSpec {
    double x_min = -2.5;
    double x_max = 2.5;
    double y_min = -2.5;
    double y_max = 2.5;
    std::size_t nx = 40;
    std::size_t ny = 40;
};

/// Evaluates `model` on a regular nx*ny grid, row-major in y then x.
std::vector<LabeledPoint> decision_surface(const GridSpec& grid, const std::function<int(double, double)>& model);

/// Random disjoint partition with round(n*val_fraction) validation indices.
/// Both index lists come back sorted.
Split split_dataset(std::size_t n, double val_fraction, std::uint64_t seed);

/// counts[true][predicted].
std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const int> truth, std::span<const int> predicted,
                                                       std::size_t n_classes);

double accuracy(std::span<const int> truth, std::span<const int> predicted);

/// Builds the dataset for a task; reproducible from (spec, seed).
Dataset make_dataset(const TaskSpec& spec, std::uint64_t seed);

}  // namespace chuarc::tasks
