// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Benchmarks run at desk scale (1 MHz sampling, 0.1 us RK4 step).

#include "chuarc/chua.hpp"
#include "chuarc/config.hpp"
#include "chuarc/experiment.hpp"
#include "chuarc/io.hpp"
#include "chuarc/lwe.hpp"
#include "chuarc/parallel.hpp"
#include "chuarc/pipeline.hpp"
#include "chuarc/readout.hpp"
#include "chuarc/tasks.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace chuarc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

int failures = 0;
double poly_mean_nmse = std::nan("");

void criterion(int id, const char* name, const std::function<void(Outcome&)>& body, double time_limit_s = 0.0) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << "[exception: " << e.what() << "] ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit_s > 0.0 && secs > time_limit_s) {
        o.pass = false;
        o.detail << "[runtime " << secs << " s over " << time_limit_s << " s] ";
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %2d  %-34s %s(%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.str().c_str(),
                secs);
    std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

ExperimentConfig desk(tasks::TaskKind kind, std::size_t n_cases) {
    ExperimentConfig c = default_config(Profile::desk);
    c.task.kind = kind;
    c.task.n_cases = n_cases;
    c.master_seed = 2024;
    return c;
}

double nic(double v, double r1, double r2, double r3) {
    const double g = -r2 / (r1 * r3);
    const double bp = 8.3 * r3 / (r2 + r3);
    if (std::abs(v) <= bp) return g * v;
    const double sgn = v < 0 ? -1.0 : 1.0;
    return sgn * g * bp + (v - sgn * bp) / r1;
}

Kernel passthrough() {
    return [](const DriveSignal& d) {
        Trace t;
        t.dt = 1.0 / d.sample_rate;
        t.tap_names = {kTapDiode, kTapInductor};
        t.channels = {d.samples, d.samples};
        return t;
    };
}

}  // namespace

int main() {
    const std::size_t jobs = default_jobs();
    std::printf("acceptance suite, %zu worker(s)\n", jobs);

    criterion(1, "LWE exact oracles", [](Outcome& o) {
        using namespace lwe;
        const std::vector<std::int64_t> a29 = {0, 4, 20, 21, 11};
        const std::vector<std::int64_t> b29 = {1, 15, 17, 0, 5};
        const Ciphertext c = encrypt_samples(a29, b29, 1, 29);
        o.require(c.u == 27 && c.v == 23, "q=29 encryption -> (27,23)");
        const Decryption d1 = decrypt_bit(27, 23, 11, 29);
        o.require(d1.raw == 16 && d1.bit == 1, "(27,23) s=11 -> raw 16, bit 1");
        o.require(decrypt_bit(11, 9, 11, 29).bit == 0, "(11,9) -> bit 0");
        const std::vector<std::int64_t> a7 = {4, 2, 6, 0, 6};
        const std::vector<std::int64_t> b7 = {2, 5, 5, 0, 6};
        const Ciphertext c0 = encrypt_samples(a7, b7, 0, 7);
        const Ciphertext c1 = encrypt_samples(a7, b7, 1, 7);
        o.require(c0.u == 4 && c0.v == 4, "q=7 phi=0 -> (4,4)");
        o.require(c1.u == 4 && c1.v == 0, "q=7 phi=1 -> (4,0) with flooring");
        const Decryption e0 = decrypt_bit(4, 4, 2, 7);
        const Decryption e1 = decrypt_bit(4, 0, 2, 7);
        o.require(e0.raw == 3 && e0.bit == 0, "(4,4) -> raw 3, bit 0");
        o.require(e1.raw == 6 && e1.bit == 1, "(4,0) -> raw 6, bit 1");
        o.detail << "(27,23)->16/1 (11,9)->0 (4,4)->3/0 (4,0)->6/1 ";
    }, 1.0);

    criterion(2, "normalisation 0..6 -> 0.1..0.5 V", [](Outcome& o) {
        ReservoirConfig c;
        c.v_min = 0.1;
        c.v_max = 0.5;
        c.value_max = 6.0;
        const std::vector<double> x = {0, 1, 2, 3, 4, 5, 6};
        const std::vector<double> expect = {0.100, 0.167, 0.233, 0.300, 0.367, 0.433, 0.500};
        const auto v = normalize(x, c);
        for (std::size_t i = 0; i < x.size(); ++i) {
            o.require(std::round(v[i] * 1000.0) / 1000.0 == expect[i], "value " + std::to_string(i));
            o.detail << io::fmt(std::round(v[i] * 1000.0) / 1000.0) << ' ';
        }
    }, 1.0);

    criterion(3, "NMSE anchor and cap", [](Outcome& o) {
        const double anchor = nmse_case(std::vector<double>{0.02}, std::vector<double>{0.01});
        o.require(anchor == 1.0, "0.02 vs 0.01 must give exactly 1");
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> u(-1e3, 1e3);
        std::uniform_real_distribution<double> scale(-8.0, 8.0);
        std::size_t bad = 0;
        for (int i = 0; i < 100000; ++i) {
            const double e = u(rng) * std::pow(10.0, scale(rng));
            const double t = u(rng) * std::pow(10.0, scale(rng));
            const double s = nmse_case(std::vector<double>{e, t}, std::vector<double>{t, e});
            const double s1 = nmse_case(std::vector<double>{e}, std::vector<double>{t});
            if (!(s >= 0.0 && s <= 1.0 && s1 >= 0.0 && s1 <= 1.0)) ++bad;
        }
        o.require(bad == 0, "scores outside [0, 1]");
        o.require(nmse_case(std::vector<double>{1.0}, std::vector<double>{0.0}) == 1.0, "zero target -> cap");
        o.detail << "anchor=" << anchor << " cap violations=" << bad << "/100000 ";
    });

    criterion(4, "single-case interpolation", [](Outcome& o) {
        ExperimentConfig c = desk(tasks::TaskKind::lwe_encrypt, 1);
        c.validate_on_train = true;
        const ExperimentResult r = run_experiment(c);
        const auto& cs = r.cases.front();
        for (std::size_t k = 0; k < cs.teacher.size(); ++k) {
            const double err = rel(cs.estimate[k], cs.teacher[k]);
            o.require(err <= 1e-6, "output " + std::to_string(k) + " relative error " + std::to_string(err));
            o.detail << "teacher " << cs.teacher[k] << " estimate " << io::fmt(cs.estimate[k]) << "; ";
        }
    }, 60.0);

    criterion(5, "benchmarks (desk scale)", [jobs](Outcome& o) {
        const auto circles = run_experiment(desk(tasks::TaskKind::circles, 1000), {jobs, false}).report;
        const auto poly = run_experiment(desk(tasks::TaskKind::polynomial, 1000), {jobs, false}).report;
        const auto mod = run_experiment(desk(tasks::TaskKind::modulo, 1000), {jobs, false}).report;
        poly_mean_nmse = poly.mean;
        o.require(circles.accuracy && *circles.accuracy >= 0.95, "circles accuracy >= 0.95");
        o.require(poly.mean <= 0.3, "polynomial mean <= 0.3");
        o.require(poly.median <= 0.1, "polynomial median <= 0.1");
        o.require(mod.mean <= 0.35, "mod(x,1.3) mean <= 0.35");
        o.detail << "circles acc=" << (circles.accuracy ? *circles.accuracy : -1.0) << " poly mean=" << poly.mean
                 << " median=" << poly.median << " mod mean=" << mod.mean << " (1000 cases each, n_mask=50) ";
    }, 900.0);

    criterion(6, "LWE estimates collapse to the mean", [jobs](Outcome& o) {
        const auto r = run_experiment(desk(tasks::TaskKind::lwe_encrypt, 1000), {jobs, false}).report;
        const char* names[] = {"u", "v"};
        for (std::size_t k = 0; k < r.outputs.size(); ++k) {
            const auto& s = r.outputs[k];
            o.require(s.estimate_std < 0.25 * s.teacher_std, std::string(names[k]) + " spread ratio < 0.25");
            o.require(std::abs(s.estimate_mean - s.teacher_mean) <= 1.0, std::string(names[k]) + " mean within 1");
            o.detail << names[k] << ": est mean " << s.estimate_mean << " (teacher " << s.teacher_mean
                     << ") std ratio " << s.estimate_std / s.teacher_std << "; ";
        }
        o.require(std::isfinite(poly_mean_nmse), "polynomial reference from criterion 5");
        o.require(r.mean > poly_mean_nmse, "LWE mean NMSE must exceed polynomial mean NMSE");
        o.detail << "LWE mean NMSE " << r.mean << " vs polynomial " << poly_mean_nmse << " ";
    });

    criterion(7, "dynamical regimes", [jobs](Outcome& o) {
        BifurcationOptions undriven;
        undriven.parameter = ScanParameter::r_variable;
        undriven.start = 1600.0;
        undriven.stop = 2000.0;
        undriven.steps = 2;
        undriven.dt = 1e-7;
        undriven.jobs = jobs;
        const auto pts = bifurcation_scan(undriven);
        const auto [lo, hi] = std::minmax_element(pts[0].extrema.begin(), pts[0].extrema.end());
        o.require(*hi > 1.0 && *lo < -1.0, "R=1.6k visits beyond +-1 V");
        o.require(pts[1].spread() < 10e-3, "R=2.0k extrema spread < 10 mV");
        o.detail << "R=1.6k V_CD extrema [" << *lo << ", " << *hi << "]; R=2.0k spread " << pts[1].spread() * 1e3
                 << " mV; ";

        BifurcationOptions amp;
        amp.parameter = ScanParameter::drive_amplitude;
        amp.circuit.r_variable = 1950.0;
        amp.start = 0.05;
        amp.stop = 0.8;
        amp.steps = 16;
        amp.drive = {0.0, 100.0};
        amp.dt = 1e-7;
        amp.jobs = jobs;
        const auto scan = bifurcation_scan(amp);
        std::vector<double> inc;
        for (std::size_t i = 1; i < scan.size(); ++i) inc.push_back(scan[i].spread() - scan[i - 1].spread());
        const auto big = std::max_element(inc.begin(), inc.end());
        const double med = median(inc);
        const double at = scan[static_cast<std::size_t>(big - inc.begin()) + 1].value;
        o.require(*big > 5.0 * std::max(med, 1e-9), "largest spread increase > 5x median increase");
        o.detail << "R=1.95k drive scan: jump of " << *big << " V at " << at << " V amplitude (median step " << med
                 << " V)";
    });

    criterion(8, "numerical soundness", [](Outcome& o) {
        ChuaParams p;
        const double t_end = 1e-4;
        const double h = 4e-7;
        const CircuitState init{0.0, 0.0, 0.01};  // stays within the inner diode segment
        auto final = [&](double dt) { return integrate(p, init, t_end, dt).final_state; };
        const CircuitState ref = final(h / 8);
        auto err = [&](const CircuitState& s) {
            return std::abs(s.v_c1 - ref.v_c1) + std::abs(s.v_c2 - ref.v_c2) + 1e3 * std::abs(s.i_l - ref.i_l);
        };
        const double order = std::log2(err(final(h)) / err(final(h / 2)));
        o.require(order >= 3.5 && order <= 4.5, "RK4 order in [3.5, 4.5]");

        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> v(-10.0, 10.0);
        std::uniform_real_distribution<double> i(-5e-3, 5e-3);
        double worst = 0.0;
        for (int n = 0; n < 1000; ++n) {
            const CircuitState s{i(rng), v(rng), v(rng)};
            const double vin = 0.1 * v(rng);
            const double f = nic(s.v_c1, 220, 220, 2200) + nic(s.v_c1, 22e3, 22e3, 3300);
            const CircuitState d = derivatives(s, p, vin);
            worst = std::max({worst, rel(d.i_l, (-s.v_c2 - p.r_series * s.i_l - vin) / p.l),
                              rel(d.v_c2, (s.i_l - (s.v_c2 - s.v_c1) / p.r_variable) / p.c2),
                              rel(d.v_c1, ((s.v_c2 - s.v_c1) / p.r_variable - f) / p.c1)});
        }
        o.require(worst < 1e-12, "derivative oracle < 1e-12");

        const Trace tr = integrate(p, CircuitState::initial(), 4e-3, 1e-7);
        const auto& x = tr.channel(kTapDiode);
        const Spectrum s = power_spectrum(x, tr.dt);
        double mean = 0.0;
        for (double y : x) mean += y;
        mean /= static_cast<double>(x.size());
        double energy = 0.0;
        for (double y : x) energy += (y - mean) * (y - mean);
        const double parseval = rel(s.energy(), energy);
        o.require(parseval < 1e-9, "Parseval < 1e-9");
        o.detail << "order=" << order << " derivative rel err=" << worst << " Parseval rel err=" << parseval << " ";
    });

    criterion(9, "pipeline algebra", [](Outcome& o) {
        ReservoirConfig c;
        c.n_mask = 4;
        const Mask m = make_mask(c);
        const std::vector<double> msg(11, 0.7);
        bool laws = multiplex(msg, m).size() == 44;
        for (std::size_t theta : {1u, 3u, 10u}) laws = laws && sample_hold(multiplex(msg, m), theta).size() == 44 * theta;
        o.require(laws, "mux/hold lengths");

        ReservoirConfig id;
        id.n_mask = 1;
        id.mask_deviation = 0.0;
        id.theta = 1;
        id.carrier = Carrier::dc;
        id.middle_fraction = 1.0;
        id.value_max = 6.0;
        const std::vector<double> raw = {2.0, 5.0, 0.5};
        const CaseRun run = run_case_detailed(raw, id, make_mask(id), passthrough());
        const auto volts = normalize(std::vector<double>{2.0, 5.0, 0.5, 0.0}, id);
        bool exact = true;
        for (Eigen::Index r = 0; r < run.states.rows(); ++r) {
            const auto v = static_cast<std::size_t>(r) * 3 / static_cast<std::size_t>(run.states.rows());
            exact = exact && run.states.values(r, 0) == volts[v];
        }
        o.require(exact, "identity pipeline passthrough");

        SlotLayout l{3, 2, 4, 125};
        Trace t;
        t.dt = 1.0;
        t.tap_names = {kTapDiode, kTapInductor};
        t.channels.assign(2, std::vector<double>(125));
        for (std::size_t s = 0; s < l.n_slots(); ++s)
            for (std::size_t i = l.start(s); i < l.start(s + 1); ++i)
                t.channels[0][i] = t.channels[1][i] = static_cast<double>(s % 4);
        const StateMatrix x = demultiplex(t, l, 0.8);
        bool pure = x.cols() == 8;
        for (Eigen::Index j = 0; j < 8; ++j) pure = pure && (x.values.col(j).array() == double(j % 4)).all();
        o.require(pure, "labelled demultiplex");

        StateMatrix a;
        a.values.resize(3, 2);
        a.values << 0.3, 1.2, 0.7, -0.4, 1.1, 0.5;
        StateMatrix b;
        b.values.resize(3, 2);
        b.values << -0.2, 0.9, 0.4, 0.1, 1.5, -1.0;
        const std::vector<StateMatrix> cases = {a, b};
        const std::vector<Eigen::VectorXd> teach = {Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, -1.0)};
        const ReadoutWeight w = train_readout(cases, teach);
        Eigen::MatrixXd P(6, 3);
        Eigen::VectorXd y(6);
        for (int r = 0; r < 3; ++r) {
            P.row(r) << 1.0, a.values(r, 0), a.values(r, 1);
            P.row(r + 3) << 1.0, b.values(r, 0), b.values(r, 1);
            y(r) = 2.0;
            y(r + 3) = -1.0;
        }
        const Eigen::VectorXd oracle = (P.transpose() * P).ldlt().solve(P.transpose() * y);
        const double diff = (w.matrix.row(0).transpose() - oracle).cwiseAbs().maxCoeff();
        o.require(diff < 1e-9, "readout vs dense least squares");
        o.detail << "mux=44, passthrough exact, demux pure, readout diff=" << diff << " ";
    });

    criterion(10, "determinism across worker counts", [](Outcome& o) {
        const fs::path root = fs::temp_directory_path() / "chuarc_acceptance_det";
        fs::remove_all(root);
        std::vector<std::string> csvs;
        std::vector<std::string> sweeps;
        ExperimentConfig c = desk(tasks::TaskKind::circles, 120);
        c.reservoir.noise = NoiseSpec{6.6e-9, 0.0, 1e5, 0, 0.0};
        ExperimentConfig sc = desk(tasks::TaskKind::polynomial, 40);
        sc.reservoir.n_mask = 10;
        SweepGrid g;
        g.resistances = {1840.0, 1920.0};
        g.centers = {0.6, 0.7, 0.8};
        for (std::size_t j : {1u, 2u, 8u}) {
            c.output_dir = (root / ("jobs" + std::to_string(j))).string();
            run_experiment(c, {j, true});
            csvs.push_back(io::read_file(c.output_dir + "/cases.csv"));
            sweeps.push_back(sweep_csv(run_sweep(sc, g, j), config_digest(sc)));
        }
        const bool same = csvs[0] == csvs[1] && csvs[0] == csvs[2];
        const bool same_sweep = sweeps[0] == sweeps[1] && sweeps[0] == sweeps[2];
        o.require(same, "experiment cases.csv identical for 1/2/8 workers");
        o.require(same_sweep, "sweep CSV identical for 1/2/8 workers");
        o.detail << "cases.csv " << csvs[0].size() << " bytes x3 identical=" << same << ", sweep CSV identical="
                 << same_sweep << " ";
        fs::remove_all(root);
    });

    std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ALL PASS" : "FAILED", failures);
    return failures == 0 ? 0 : 1;
}
