// Linear readout: accumulated correlation training, prediction and the
// error metrics used to score it.
#pragma once

#include "chuarc/pipeline.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace chuarc {

struct ReadoutOptions {
    bool bias = true;
    double offset = 0.0;
    double lambda = 0.0;
};

/// n_outputs x (n_channels + 1); column 0 is the bias weight (zero when the
/// readout was trained without bias).
struct ReadoutWeight {
    Eigen::MatrixXd matrix;
    bool bias = true;
    double offset = 0.0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::string config_digest;

    Eigen::Index n_outputs() const { return matrix.rows(); }
    Eigen::Index n_channels() const { return matrix.cols() - 1; }
};

/// Streams training cases into XX = sum p p^T and YY = sum y p^T, where p is
/// a state row with the offset added and a leading 1 when bias is on.
class ReadoutTrainer {
public:
    ReadoutTrainer(Eigen::Index n_channels, Eigen::Index n_outputs, ReadoutOptions opts = {});

    void add(const StateMatrix& x, const Eigen::VectorXd& teacher);

    /// Minimum-norm least-squares solve of (XX + lambda*I') W^T = YY^T, with
    /// the bias row and column left out of I'.
    ReadoutWeight solve() const;

    std::size_t n_cases() const { return n_cases_; }
    const Eigen::MatrixXd& xx() const { return xx_; }
    const Eigen::MatrixXd& yy() const { return yy_; }

private:
    Eigen::Index n_channels_;
    Eigen::Index n_outputs_;
    ReadoutOptions opts_;
    Eigen::MatrixXd xx_;
    Eigen::MatrixXd yy_;
    std::size_t n_cases_ = 0;
};

ReadoutWeight train_readout(std::span<const StateMatrix> cases, std::span<const Eigen::VectorXd> teachers,
                            const ReadoutOptions& opts = {});

/// Per-row estimates W [1; row + offset], averaged over the rows.
Eigen::VectorXd predict(const ReadoutWeight& w, const StateMatrix& x);

struct NmseReport {
    std::vector<double> scores;
    std::vector<bool> zero_target;  // score forced to the cap by a zero target
    double mean = 0.0;
    double median = 0.0;
};

/// Normalised squared error of one case: sum (e - t)^2 / (n * sum t^2) over
/// the n outputs, capped. A zero target yields the cap.
double nmse_case(std::span<const double> estimate, std::span<const double> target, double cap = 1.0);

NmseReport nmse(std::span<const Eigen::VectorXd> estimates, std::span<const Eigen::VectorXd> targets,
                double cap = 1.0);

/// Scalar convenience form, one output per case.
NmseReport nmse(std::span<const double> estimates, std::span<const double> targets, double cap = 1.0);

/// RMSE divided by the population standard deviation of the targets.
double nrmse(std::span<const double> estimates, std::span<const double> targets);

double median(std::vector<double> v);

}  // namespace chuarc
