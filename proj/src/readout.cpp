#include "chuarc/readout.hpp"

#include "chuarc/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace chuarc {

ReadoutTrainer::ReadoutTrainer(Eigen::Index n_channels, Eigen::Index n_outputs, ReadoutOptions opts)
    : n_channels_(n_channels), n_outputs_(n_outputs), opts_(opts) {
    if (n_channels < 1) throw DimensionError("readout: need at least one channel");
    if (n_outputs < 1) throw DimensionError("readout: need at least one output");
    if (!(opts.lambda >= 0.0)) throw ConfigError("readout.lambda", "must be non-negative");
    const Eigen::Index d = n_channels + (opts.bias ? 1 : 0);
    xx_ = Eigen::MatrixXd::Zero(d, d);
    yy_ = Eigen::MatrixXd::Zero(n_outputs, d);
}

void ReadoutTrainer::add(const StateMatrix& x, const Eigen::VectorXd& teacher) {
    if (x.cols() != n_channels_)
        throw DimensionError("readout: case has " + std::to_string(x.cols()) + " channels, expected " +
                             std::to_string(n_channels_));
    if (teacher.size() != n_outputs_)
        throw DimensionError("readout: teacher has " + std::to_string(teacher.size()) + " outputs, expected " +
                             std::to_string(n_outputs_));
    const Eigen::Index d = xx_.rows();
    Eigen::MatrixXd p(x.rows(), d);
    if (opts_.bias) p.col(0).setOnes();
    p.rightCols(n_channels_) = x.values.array() + opts_.offset;

    xx_.noalias() += p.transpose() * p;
    yy_.noalias() += teacher * p.colwise().sum();
    ++n_cases_;
}

ReadoutWeight ReadoutTrainer::solve() const {
    if (n_cases_ == 0) throw DimensionError("readout: no training cases");
    Eigen::MatrixXd a = xx_;
    const Eigen::Index lead = opts_.bias ? 1 : 0;
    for (Eigen::Index i = lead; i < a.rows(); ++i) a(i, i) += opts_.lambda;

    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    const Eigen::MatrixXd wt = cod.solve(yy_.transpose());

    ReadoutWeight w;
    w.bias = opts_.bias;
    w.offset = opts_.offset;
    w.lambda = opts_.lambda;
    w.matrix = Eigen::MatrixXd::Zero(n_outputs_, n_channels_ + 1);
    if (opts_.bias) {
        w.matrix = wt.transpose();
    } else {
        w.matrix.rightCols(n_channels_) = wt.transpose();
    }
    return w;
}

ReadoutWeight train_readout(std::span<const StateMatrix> cases, std::span<const Eigen::VectorXd> teachers,
                            const ReadoutOptions& opts) {
    if (cases.empty()) throw DimensionError("train_readout: empty case list");
    if (cases.size() != teachers.size()) throw DimensionError("train_readout: one teacher per case required");
    ReadoutTrainer trainer(cases.front().cols(), teachers.front().size(), opts);
    for (std::size_t i = 0; i < cases.size(); ++i) trainer.add(cases[i], teachers[i]);
    return trainer.solve();
}

Eigen::VectorXd predict(const ReadoutWeight& w, const StateMatrix& x) {
    if (x.cols() != w.n_channels())
        throw DimensionError("predict: state matrix has " + std::to_string(x.cols()) + " channels, weight expects " +
                             std::to_string(w.n_channels()));
    if (x.rows() == 0) throw DimensionError("predict: state matrix has no rows");
    // Mean of affine per-row estimates equals the estimate of the mean row.
    const Eigen::VectorXd mean_row = (x.values.colwise().mean().array() + w.offset).transpose();
    return w.matrix.col(0) + w.matrix.rightCols(w.n_channels()) * mean_row;
}

double nmse_case(std::span<const double> estimate, std::span<const double> target, double cap) {
    if (estimate.size() != target.size() || target.empty()) throw DimensionError("nmse: length mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double e = estimate[i] - target[i];
        num += e * e;
        den += target[i] * target[i];
    }
    if (den == 0.0) return cap;
    return std::min(cap, num / (static_cast<double>(target.size()) * den));
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

void summarise(NmseReport& r) {
    double sum = 0.0;
    for (double s : r.scores) sum += s;
    r.mean = r.scores.empty() ? 0.0 : sum / static_cast<double>(r.scores.size());
    r.median = median(r.scores);
}

}  // namespace

NmseReport nmse(std::span<const Eigen::VectorXd> estimates, std::span<const Eigen::VectorXd> targets, double cap) {
    if (estimates.size() != targets.size()) throw DimensionError("nmse: estimate/target counts differ");
    NmseReport r;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& e = estimates[i];
        const auto& t = targets[i];
        r.scores.push_back(nmse_case({e.data(), static_cast<std::size_t>(e.size())},
                                     {t.data(), static_cast<std::size_t>(t.size())}, cap));
        r.zero_target.push_back(t.squaredNorm() == 0.0);
    }
    summarise(r);
    return r;
}

NmseReport nmse(std::span<const double> estimates, std::span<const double> targets, double cap) {
    if (estimates.size() != targets.size()) throw DimensionError("nmse: estimate/target counts differ");
    NmseReport r;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        r.scores.push_back(nmse_case(estimates.subspan(i, 1), targets.subspan(i, 1), cap));
        r.zero_target.push_back(targets[i] == 0.0);
    }
    summarise(r);
    return r;
}

double nrmse(std::span<const double> estimates, std::span<const double> targets) {
    if (estimates.size() != targets.size()) throw DimensionError("nrmse: length mismatch");
    if (targets.size() < 2) throw MetricError("nrmse: at least two targets required");
    const auto n = static_cast<double>(targets.size());
    double mean = 0.0;
    for (double t : targets) mean += t;
    mean /= n;
    double var = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        var += (targets[i] - mean) * (targets[i] - mean);
        const double e = estimates[i] - targets[i];
        sq += e * e;
    }
    const double sigma = std::sqrt(var / n);
    if (sigma == 0.0) throw MetricError("nrmse: targets have zero spread");
    return std::sqrt(sq / n) / sigma;
}

}  // namespace chuarc
