// Acceptance gate: every release-blocking behaviour in one binary, one line
// per criterion. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "idfrit/cli.hpp"
#include "idfrit/discretize.hpp"
#include "idfrit/errors.hpp"
#include "idfrit/fractional.hpp"
#include "idfrit/freq.hpp"
#include "idfrit/sim.hpp"
#include "idfrit/transfer_function.hpp"
#include "idfrit/tuning.hpp"

namespace {

using namespace idfrit;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        num += d * d;
        den += b[i] * b[i];
    }
    return std::sqrt(num) / std::sqrt(den);
}

// Random stable discrete plant of order 1..5: poles drawn inside radius 0.9,
// zeros inside radius 1.1 (non-minimum-phase allowed), real or conjugate.
std::vector<std::complex<double>> random_roots(std::mt19937_64& rng, int count,
                                               double max_radius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::complex<double>> roots;
    while (static_cast<int>(roots.size()) < count) {
        const double radius = max_radius * (0.05 + 0.95 * u(rng));
        const double angle = std::numbers::pi * u(rng);
        const bool want_pair = u(rng) < 0.6 && static_cast<int>(roots.size()) + 2 <= count;
        if (want_pair) {
            const std::complex<double> r = std::polar(radius, angle);
            roots.push_back(r);
            roots.push_back(std::conj(r));
        } else {
            roots.emplace_back(u(rng) < 0.5 ? radius : -radius, 0.0);
        }
    }
    return roots;
}

DiscreteTF random_stable_plant(std::mt19937_64& rng, double ts) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int order = 1 + static_cast<int>(u(rng) * 5.0);
    FactoredZ f;
    f.poles = random_roots(rng, order, 0.9);
    const int zero_count = std::max(0, order - 1 - static_cast<int>(u(rng) * 2.0));
    f.zeros = random_roots(rng, zero_count, 1.1);
    f.gain = 0.2 + 1.8 * u(rng);
    return DiscreteTF::from_factored(std::move(f), ts);
}

DiscreteTF random_biproper_controller(std::mt19937_64& rng, double ts) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FactoredZ f;
    f.zeros = {std::complex<double>(1.6 * u(rng) - 0.8, 0.0)};
    f.poles = {std::complex<double>(1.6 * u(rng) - 0.8, 0.0)};
    f.gain = 0.2 + 1.8 * u(rng);
    return DiscreteTF::from_factored(std::move(f), ts);
}

double peak_circle_gain(const DiscreteTF& g) {
    double peak = 0.0;
    for (int i = 0; i <= 1024; ++i) {
        const double w = std::numbers::pi * i / 1024.0;
        peak = std::max(peak, std::abs(tf_eval(g, std::polar(1.0, w))));
    }
    return peak;
}

// Loop gain scaled to a sub-unity circle peak: closed-loop stability follows
// from the small-gain argument, so every sampled loop is a valid instance.
DiscreteTF scaled_for_stability(const DiscreteTF& p, const DiscreteTF& c_raw) {
    return tf_scale(c_raw, 0.7 / peak_circle_gain(tf_mul(p, c_raw)));
}

ExperimentData collect_step_data(const DiscreteTF& p, const DiscreteTF& c, std::size_t n,
                                 double ts) {
    Signal r = step_signal(n + 1, ts);
    auto [u, y] = closed_loop_sim(p, c, r);
    return ExperimentData(r, u, y);
}

struct Gate {
    int failures = 0;

    void line(int idx, bool ok, const std::string& what) {
        std::printf("[%s] %d. %s\n", ok ? "PASS" : "FAIL", idx, what.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }

    template <typename Fn>
    void criterion(int idx, Fn&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            line(idx, false, std::string("exception: ") + e.what());
        }
    }
};

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

// Shared Example-1 state, built once for criteria 3/4/6.
struct Example1 {
    cli::TuneConfig fo = cli::preset("example1-fo");
    cli::TuneConfig io = cli::preset("example1-io");
    DiscreteTF pz;
    ExperimentData data;
    Signal m_ref;

    Example1()
        : pz(tustin(RationalTF(fo.plant->num, fo.plant->den), fo.ts)),
          data(make_data()),
          m_ref(impulse_response(build_reference_model(fo.reference).closed_loop,
                                 fo.horizon_samples())) {}

    ExperimentData make_data() const {
        DiscreteTF c0 = build_controller(fo.controller_template().with_theta(fo.theta0));
        return collect_step_data(pz, c0, fo.horizon_samples(), fo.ts);
    }
};

const std::vector<double> kEx1ThetaStarFO = {1.3239, 1.0370, 1.1010, 0.23253, 1.5465};
const std::vector<double> kEx1ThetaStarIO = {0.80397, 1.2125, 0.33528};

}  // namespace

int main() {
    Gate gate;
    const int hw_threads = std::max(1u, std::thread::hardware_concurrency());

    // 1. Restoring the closed-loop impulse response from one-shot data:
    //    fictitious reference + triangular Toeplitz solve against the exact
    //    transfer-function impulse response, 50 random stable loops.
    gate.criterion(1, [&] {
        const auto t0 = Clock::now();
        const double kTol = 1e-6;
        const std::size_t kN = 300;
        const double ts = 0.01;
        std::mt19937_64 rng(101);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            DiscreteTF p = random_stable_plant(rng, ts);
            DiscreteTF c = scaled_for_stability(p, random_biproper_controller(rng, ts));
            ExperimentData data = collect_step_data(p, c, kN, ts);
            Signal rt = fictitious_reference(c, data);
            Signal restored = toeplitz_solve(rt, data.y);
            Signal truth = impulse_response(tf_feedback_unity(tf_mul(p, c)), kN);
            worst = std::max(worst, rel_l2(restored.samples, truth.samples));
        }
        const double dt = seconds_since(t0);
        gate.line(1, worst <= kTol && dt <= 10.0,
                  fmt("impulse restoration, 50 random loops: max rel l2 %.2e (tol %.0e), %.1f s "
                      "(limit 10 s)",
                      worst, kTol, dt));
    });

    // 2. The restored loop reproduces the logged output for any invertible
    //    candidate controller, not only the generator.
    gate.criterion(2, [&] {
        const double kTol = 1e-7;
        const std::size_t kN = 300;
        const double ts = 0.01;
        std::mt19937_64 rng(202);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            DiscreteTF p = random_stable_plant(rng, ts);
            DiscreteTF c_gen = scaled_for_stability(p, random_biproper_controller(rng, ts));
            DiscreteTF c_cand = scaled_for_stability(p, random_biproper_controller(rng, ts));
            ExperimentData data = collect_step_data(p, c_gen, kN, ts);
            Signal rt = fictitious_reference(c_cand, data);
            Signal back = lfilter(tf_feedback_unity(tf_mul(p, c_cand)), rt);
            worst = std::max(worst, rel_l2(back.samples, data.y.samples));
        }
        gate.line(2, worst <= kTol,
                  fmt("candidate-loop output identity, 20 random pairs: max rel l2 %.2e "
                      "(tol %.0e)",
                      worst, kTol));
    });

    Example1 ex1;

    // 3. Example-1 replication at the published optimum and initial point.
    gate.criterion(3, [&] {
        const auto t0 = Clock::now();
        ControllerSpec tmpl = ex1.fo.controller_template();
        const double j_star = loss_J(kEx1ThetaStarFO, tmpl, ex1.data, ex1.m_ref);
        const double j_init = loss_J(ex1.fo.theta0, tmpl, ex1.data, ex1.m_ref);
        DiscreteTF loop = tf_mul(ex1.pz, build_controller(tmpl.with_theta(kEx1ThetaStarFO)));
        Crossover cr = gain_crossover(loop, default_band(ex1.fo.ts));
        const double pm = phase_margin(loop);
        const double dt = seconds_since(t0);
        const bool ok = j_star >= 4.2744e-2 / 2.0 && j_star <= 4.2744e-2 * 2.0 &&
                        std::abs(j_init - 988.20) <= 0.10 * 988.20 &&
                        std::abs(cr.omega_c - 1.0135) <= 0.05 * 1.0135 &&
                        std::abs(pm - 79.4165) <= 2.0 && dt <= 60.0;
        gate.line(3, ok,
                  fmt("worked example 1 at published optimum: J* %.4e (x/÷2 of 4.2744e-2), "
                      "J0 %.2f (988.20±10%%), omega_c %.4f (1.0135±5%%), pm %.4f "
                      "(79.4165±2°), %.1f s (limit 60 s)",
                      j_star, j_init, cr.omega_c, pm, dt));
    });

    // 4. Fresh tuning runs for both controller structures, plus the
    //    gain-robustness comparison that motivates the fractional structure:
    //    overshoot spread across plant-gain factors {0.5, 1, 1.5}.
    std::vector<double> theta_fo_fresh, theta_io_fresh;
    gate.criterion(4, [&] {
        const auto t0 = Clock::now();
        auto run = [&](const cli::TuneConfig& cfg) {
            ControllerSpec tmpl = cfg.controller_template();
            const double thr = default_J_threshold(ex1.data, ex1.m_ref);
            return tune(tmpl, ex1.data, ex1.m_ref, cfg.bounds, cfg.pso, thr, hw_threads);
        };
        TuneResult fo = run(ex1.fo);
        TuneResult io = run(ex1.io);
        theta_fo_fresh = fo.theta_star;
        theta_io_fresh = io.theta_star;

        Signal r = step_signal(ex1.fo.horizon_samples() + 1, ex1.fo.ts);
        auto spread = [&](const cli::TuneConfig& cfg, const std::vector<double>& theta) {
            DiscreteTF c = build_controller(cfg.controller_template().with_theta(theta));
            auto rows = gain_robustness_report(ex1.pz, c, {0.5, 1.0, 1.5}, r);
            double lo = rows[0].overshoot_percent, hi = lo;
            for (const auto& row : rows) {
                lo = std::min(lo, row.overshoot_percent);
                hi = std::max(hi, row.overshoot_percent);
            }
            return hi - lo;
        };
        const double fo_spread = spread(ex1.fo, fo.theta_star);
        const double io_spread = spread(ex1.io, io.theta_star);
        const double dt = seconds_since(t0);
        const bool ok = fo.J_star <= 0.1 && io.J_star <= 2.0 && fo_spread < io_spread &&
                        dt <= 900.0;
        gate.line(4, ok,
                  fmt("fresh tuning: J* FO %.4e (≤0.1), IO %.4f (≤2.0); overshoot spread "
                      "FO %.2f%% < IO %.2f%%; %.0f s (limit 900 s)",
                      fo.J_star, io.J_star, fo_spread, io_spread, dt));
    });

    // 5. Example-2 replication: published optimum, iso-damping baseline, and
    //    the baseline's crossover under plant-gain scaling.
    gate.criterion(5, [&] {
        const auto t0 = Clock::now();
        cli::TuneConfig cfg = cli::preset("example2");
        DiscreteTF pz = tustin(RationalTF(cfg.plant->num, cfg.plant->den), cfg.ts);
        ControllerSpec tmpl = cfg.controller_template();
        auto measure = [&](const std::vector<double>& theta, double gain) {
            DiscreteTF loop = tf_mul(tf_scale(pz, gain), build_controller(tmpl.with_theta(theta)));
            Crossover cr = gain_crossover(loop, default_band(cfg.ts));
            return std::make_pair(cr.omega_c, phase_margin(loop));
        };
        const std::vector<double> theta_star = {0.88086, 3.8808, 0.47498};
        const std::vector<double> theta_iso = {1.76, 4.7872, 0.81};
        auto [wc_star, pm_star] = measure(theta_star, 1.0);
        auto [wc_iso, pm_iso] = measure(theta_iso, 1.0);
        auto [wc_hi, pm_hi] = measure(theta_iso, 1.5);
        auto [wc_lo, pm_lo] = measure(theta_iso, 0.5);
        (void)pm_hi;
        (void)pm_lo;
        const double dt = seconds_since(t0);
        const bool ok = std::abs(pm_star - 60.1370) <= 2.0 &&
                        std::abs(wc_star - 12.0696) <= 0.05 * 12.0696 &&
                        std::abs(pm_iso - 67.7359) <= 2.0 &&
                        std::abs(wc_iso - 12.7008) <= 0.05 * 12.7008 &&
                        std::abs(wc_hi - 18.9349) <= 0.05 * 18.9349 &&
                        std::abs(wc_lo - 6.8977) <= 0.05 * 6.8977 && dt <= 60.0;
        gate.line(5, ok,
                  fmt("worked example 2: optimum %.4f rad/s / %.4f° (12.0696±5%% / "
                      "60.1370±2°); baseline %.4f / %.4f° (12.7008±5%% / 67.7359±2°); "
                      "scaled crossovers %.4f, %.4f (18.9349, 6.8977 ±5%%); %.1f s",
                      wc_star, pm_star, wc_iso, pm_iso, wc_hi, wc_lo, dt));
    });

    // 6. Flat phase: both reference loops hold the slope bound, and the
    //    fractional structure beats the integer one at the published optima.
    gate.criterion(6, [&] {
        auto ref_slope = [&](const cli::TuneConfig& cfg) {
            ReferenceModel m = build_reference_model(cfg.reference);
            Crossover cr = gain_crossover(m.open_loop, default_band(cfg.reference.ts));
            return flatness_metric(m.open_loop, cr.omega_c);
        };
        const double s1 = ref_slope(ex1.fo);
        const double s2 = ref_slope(cli::preset("example2"));

        auto loop_slope = [&](const cli::TuneConfig& cfg, const std::vector<double>& theta) {
            DiscreteTF loop =
                tf_mul(ex1.pz, build_controller(cfg.controller_template().with_theta(theta)));
            Crossover cr = gain_crossover(loop, default_band(cfg.ts));
            return flatness_metric(loop, cr.omega_c);
        };
        const double fo_slope = loop_slope(ex1.fo, kEx1ThetaStarFO);
        const double io_slope = loop_slope(ex1.io, kEx1ThetaStarIO);
        const bool ok = std::abs(s1) <= 3.0 && std::abs(s2) <= 3.0 &&
                        std::abs(fo_slope) < std::abs(io_slope);
        gate.line(6, ok,
                  fmt("flat phase: reference slopes %+.4f, %+.4f °/decade (|.|≤3); tuned "
                      "loops FO %+.4f vs IO %+.4f °/decade (|FO|<|IO|)",
                      s1, s2, fo_slope, io_slope));
    });

    // 7. Time- and frequency-domain forms of the loss agree once the
    //    sequences have decayed; an impulse reference makes them equal.
    gate.criterion(7, [&] {
        const std::size_t n = 512;
        const double ts = 0.01;
        std::mt19937_64 rng(707);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> t(n), m(n);
        double et = 1.0, em = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            t[k] = et * u(rng);
            m[k] = 0.5 * em * u(rng);
            et *= 0.9;
            em *= 0.85;
        }
        Signal ts_sig(t, ts), ms_sig(m, ts);
        SpectralCheck step_case =
            spectral_loss_check(ts_sig, ms_sig, step_signal(n, ts));
        SpectralCheck impulse_case =
            spectral_loss_check(ts_sig, ms_sig, impulse_signal(n, ts));
        const bool ok = step_case.relative_gap <= 0.02 && impulse_case.relative_gap <= 1e-6;
        gate.line(7, ok,
                  fmt("spectral consistency at N=512: step-reference gap %.4f%% (≤2%%), "
                      "impulse-reference gap %.2e (≤1e-6)",
                      100.0 * step_case.relative_gap, impulse_case.relative_gap));
    });

    // 8. The screen separates stable from unstable restored impulses.
    gate.criterion(8, [&] {
        const std::size_t kN = 400;
        const double ts = 0.01;
        std::mt19937_64 rng(808);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        auto impulse_of = [&](double radius) {
            FactoredZ f;
            const double angle = std::numbers::pi * 0.9 * u(rng) + 0.01;
            f.poles = {std::polar(radius, angle), std::polar(radius, -angle)};
            f.gain = 0.5 + 1.5 * u(rng);
            return impulse_response(DiscreteTF::from_factored(std::move(f), ts), kN);
        };
        int stable_ok = 0, unstable_ok = 0;
        for (int i = 0; i < 20; ++i) {
            Verdict v = stability_screen(impulse_of(0.3 + 0.65 * u(rng)), 0.0, 1.0);
            stable_ok += v == Verdict::likely_bibo ? 1 : 0;
        }
        for (int i = 0; i < 20; ++i) {
            Verdict v = stability_screen(impulse_of(1.01 + 0.14 * u(rng)), 0.0, 1.0);
            unstable_ok += v != Verdict::likely_bibo ? 1 : 0;
        }
        gate.line(8, stable_ok >= 19 && unstable_ok >= 19,
                  fmt("screening: %d/20 stable loops likely_bibo, %d/20 unstable loops "
                      "flagged (≥19 each)",
                      stable_ok, unstable_ok));
    });

    // 9. Identical config and seed give byte-identical report bodies for any
    //    thread count.
    gate.criterion(9, [&] {
        cli::TuneConfig cfg = ex1.fo;
        cfg.pso.swarm_size = 12;
        cfg.pso.max_iters = 15;
        cli::TuneRun one = cli::run_tune(cfg, ex1.data, 1);
        cli::TuneRun four = cli::run_tune(cfg, ex1.data, 4);
        const bool ok = !one.canonical_body.empty() && one.canonical_body == four.canonical_body;
        gate.line(9, ok,
                  fmt("determinism: report bodies of 1-thread and 4-thread runs %s (%zu bytes)",
                      ok ? "identical" : "DIFFER", one.canonical_body.size()));
    });

    if (gate.failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", gate.failures);
    }
    return gate.failures;
}
