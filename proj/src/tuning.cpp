#include "idfrit/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>
#include <utility>

#include "idfrit/discretize.hpp"
#include "idfrit/errors.hpp"
#include "idfrit/freq.hpp"

namespace idfrit {

ControllerStructure structure_from_name(const std::string& name) {
    if (name == "iopid") return ControllerStructure::IOPID;
    if (name == "fopid") return ControllerStructure::FOPID;
    if (name == "fopi") return ControllerStructure::FOPI;
    throw ConfigError("unknown controller structure: " + name);
}

std::string structure_name(ControllerStructure s) {
    switch (s) {
        case ControllerStructure::IOPID: return "iopid";
        case ControllerStructure::FOPID: return "fopid";
        case ControllerStructure::FOPI: return "fopi";
    }
    throw Error("unreachable");
}

std::size_t theta_dimension(ControllerStructure s) {
    switch (s) {
        case ControllerStructure::IOPID: return 3;
        case ControllerStructure::FOPID: return 5;
        case ControllerStructure::FOPI: return 3;
    }
    throw Error("unreachable");
}

ControllerSpec ControllerSpec::with_theta(std::vector<double> t) const {
    ControllerSpec out = *this;
    out.theta = std::move(t);
    return out;
}

void SearchBounds::validate(std::size_t dim) const {
    if (lower.size() != dim || upper.size() != dim)
        throw Error("bound dimension does not match the controller structure");
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(lower[i] <= upper[i])) throw Error("lower bound exceeds upper bound");
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw Error("bounds must be finite");
    }
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::likely_bibo: return "likely_bibo";
        case Verdict::suspect: return "suspect";
        case Verdict::rejected: return "rejected";
    }
    throw Error("unreachable");
}

namespace {

void check_exponent(double e) {
    if (!(e >= 0.0 && e <= 2.0)) throw Error("fractional exponent outside [0, 2]");
}

void check_gain(double k) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw Error("controller gain must be nonnegative");
}

}  // namespace

DiscreteTF build_controller(const ControllerSpec& spec) {
    if (spec.theta.size() != theta_dimension(spec.structure))
        throw Error("theta dimension does not match the controller structure");
    if (!(spec.tau > 0.0)) throw Error("filter time constant must be positive");
    if (!(spec.ts > 0.0)) throw Error("sampling time must be positive");
    const double tau = spec.tau;

    RationalTF c({0.0}, {1.0});
    switch (spec.structure) {
        case ControllerStructure::IOPID: {
            // Kp + Ki/s + Kd s/(τs+1) over the common denominator s(τs+1).
            const double kp = spec.theta[0], ki = spec.theta[1], kd = spec.theta[2];
            check_gain(kp);
            check_gain(ki);
            check_gain(kd);
            c = RationalTF({kp * tau + kd, kp + ki * tau, ki}, {tau, 1.0, 0.0});
            break;
        }
        case ControllerStructure::FOPID: {
            // Kfp + Kfi/s^λ + Kfd s^μ/(1 + τ s^μ), with A ≈ s^λ and B ≈ s^μ
            // substituted once and the expression flattened symbolically.
            const double kfp = spec.theta[0], kfi = spec.theta[1], lam = spec.theta[2];
            const double kfd = spec.theta[3], mu = spec.theta[4];
            check_gain(kfp);
            check_gain(kfi);
            check_gain(kfd);
            check_exponent(lam);
            check_exponent(mu);
            const RationalTF a = power_approx(lam, spec.oust);
            const RationalTF b = power_approx(mu, spec.oust);
            const Polynomial dd = poly_add(b.den, poly_scale(b.num, tau));
            Polynomial num = poly_add(
                poly_add(poly_scale(poly_mul(a.num, dd), kfp), poly_scale(poly_mul(a.den, dd), kfi)),
                poly_scale(poly_mul(b.num, a.num), kfd));
            c = RationalTF(std::move(num), poly_mul(a.num, dd));
            break;
        }
        case ControllerStructure::FOPI: {
            // Kfp + Kfi/s^λ with one shared approximant A ≈ s^λ.
            const double kfp = spec.theta[0], kfi = spec.theta[1], lam = spec.theta[2];
            check_gain(kfp);
            check_gain(kfi);
            check_exponent(lam);
            const RationalTF a = power_approx(lam, spec.oust);
            c = RationalTF(poly_add(poly_scale(a.num, kfp), poly_scale(a.den, kfi)), a.num);
            break;
        }
    }
    if (c.num.is_zero()) throw NotBiproper("controller is identically zero");
    if (!c.proper()) throw NonProperResult("controller parameterization is improper");
    DiscreteTF cz = tustin(c, spec.ts);
    if (!cz.biproper()) throw NotBiproper("discretized controller lost its feedthrough");
    return cz;
}

double loss_J(const std::vector<double>& theta, const ControllerSpec& spec_template,
              const ExperimentData& data, const Signal& m_ref) {
    try {
        const DiscreteTF c = build_controller(spec_template.with_theta(theta));
        const Signal rt = fictitious_reference(c, data);
        for (double v : rt.samples)
            if (std::abs(v) > kOverflowGuard) return kLossPenalty;

        const Signal t = toeplitz_solve(rt, data.y);
        for (double v : t.samples)
            if (std::abs(v) > kOverflowGuard) return kLossPenalty;

        const Signal yhat = toeplitz_mul(data.r, t);
        const Signal yref = toeplitz_mul(data.r, m_ref);
        double j = 0.0;
        for (std::size_t k = 0; k < yhat.size(); ++k) {
            const double d = yhat[k] - yref[k];
            j += d * d;
        }
        if (!std::isfinite(j)) return kLossPenalty;
        return j;
    } catch (const Error&) {
        return kLossPenalty;
    }
}

namespace {

class Uniform01 {
public:
    explicit Uniform01(std::uint64_t seed) : rng_(seed) {}
    // 53-bit mantissa draw; bit-identical across platforms, unlike
    // std::uniform_real_distribution.
    double operator()() {
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 rng_;
};

void reflect_into(double& x, double& v, double lo, double hi) {
    if (lo == hi) {
        x = lo;
        v = 0.0;
        return;
    }
    for (int guard = 0; guard < 16 && (x < lo || x > hi); ++guard) {
        if (x < lo) {
            x = lo + (lo - x);
            v = -v;
        } else if (x > hi) {
            x = hi - (x - hi);
            v = -v;
        }
    }
    x = std::clamp(x, lo, hi);
}

void evaluate_swarm(const std::function<double(const std::vector<double>&)>& loss,
                    const std::vector<std::vector<double>>& pos, std::vector<double>& J,
                    int threads) {
    const std::size_t n = pos.size();
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) J[i] = loss(pos[i]);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = static_cast<std::size_t>(w); i < n;
                 i += static_cast<std::size_t>(threads))
                J[i] = loss(pos[i]);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

PsoOutcome pso_minimize(const std::function<double(const std::vector<double>&)>& loss,
                        const SearchBounds& bounds, const PsoSettings& settings, int threads) {
    const std::size_t dim = bounds.lower.size();
    bounds.validate(dim);
    if (settings.swarm_size < 1 || settings.max_iters < 0) throw Error("degenerate swarm settings");
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads < 1) threads = 1;
    }

    const std::size_t n = static_cast<std::size_t>(settings.swarm_size);
    Uniform01 u(settings.seed);

    std::vector<std::vector<double>> pos(n, std::vector<double>(dim));
    std::vector<std::vector<double>> vel(n, std::vector<double>(dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double range = bounds.upper[d] - bounds.lower[d];
            pos[i][d] = bounds.lower[d] + u() * range;
            vel[i][d] = (2.0 * u() - 1.0) * range;
        }
    }

    std::vector<double> J(n);
    evaluate_swarm(loss, pos, J, threads);

    std::vector<std::vector<double>> pbest = pos;
    std::vector<double> pbest_J = J;
    std::size_t g = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (pbest_J[i] < pbest_J[g]) g = i;

    PsoOutcome out;
    out.theta_star = pbest[g];
    out.J_star = pbest_J[g];
    out.history.push_back(out.J_star);

    int stall = 0;
    for (int it = 0; it < settings.max_iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < dim; ++d) {
                const double r1 = u(), r2 = u();
                vel[i][d] = settings.inertia * vel[i][d] +
                            settings.cognitive * r1 * (pbest[i][d] - pos[i][d]) +
                            settings.social * r2 * (out.theta_star[d] - pos[i][d]);
                pos[i][d] += vel[i][d];
                reflect_into(pos[i][d], vel[i][d], bounds.lower[d], bounds.upper[d]);
            }
        }
        evaluate_swarm(loss, pos, J, threads);

        const double prev = out.J_star;
        for (std::size_t i = 0; i < n; ++i) {
            if (J[i] < pbest_J[i]) {
                pbest_J[i] = J[i];
                pbest[i] = pos[i];
            }
            if (pbest_J[i] < out.J_star) {
                out.J_star = pbest_J[i];
                out.theta_star = pbest[i];
            }
        }
        out.history.push_back(out.J_star);

        if (settings.stall_iters > 0) {
            stall = (prev - out.J_star) < settings.stall_tol ? stall + 1 : 0;
            if (stall >= settings.stall_iters) break;
        }
    }
    return out;
}

Verdict stability_screen(const Signal& restored_impulse, double J, double J_threshold) {
    if (J >= kLossPenalty) return Verdict::rejected;

    const std::size_t n = restored_impulse.size();
    const std::size_t tail = std::max<std::size_t>(1, n / 10);
    const std::size_t head = std::max<std::size_t>(1, n / 2);

    double total_e = 0.0, tail_e = 0.0, head_max = 0.0, tail_max = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = restored_impulse[k];
        total_e += v * v;
        if (k >= n - tail) {
            tail_e += v * v;
            tail_max = std::max(tail_max, std::abs(v));
        }
        if (k < head) head_max = std::max(head_max, std::abs(v));
    }
    const double ratio = total_e > 0.0 ? std::sqrt(tail_e / total_e) : 0.0;

    if (ratio > 0.3 || tail_max > head_max || J >= J_threshold) return Verdict::suspect;
    return Verdict::likely_bibo;
}

double default_J_threshold(const ExperimentData& data, const Signal& m_ref) {
    const Signal yref = toeplitz_mul(data.r, m_ref);
    double e = 0.0;
    for (double v : yref.samples) e += v * v;
    return 10.0 * e;
}

TuneResult tune(const ControllerSpec& spec_template, const ExperimentData& data,
                const Signal& m_ref, const SearchBounds& bounds, const PsoSettings& settings,
                double J_threshold, int threads) {
    if (m_ref.size() != data.r.size()) throw BadData("reference model horizon mismatch");
    auto loss = [&](const std::vector<double>& theta) {
        return loss_J(theta, spec_template, data, m_ref);
    };
    PsoOutcome p = pso_minimize(loss, bounds, settings, threads);

    TuneResult result;
    result.theta_star = p.theta_star;
    result.J_star = p.J_star;
    result.history = std::move(p.history);
    try {
        const DiscreteTF c = build_controller(spec_template.with_theta(result.theta_star));
        const Signal rt = fictitious_reference(c, data);
        result.restored_impulse = toeplitz_solve(rt, data.y);
    } catch (const Error&) {
        result.restored_impulse = Signal(std::vector<double>(data.r.size(), 0.0), data.r.ts);
        result.verdict = Verdict::rejected;
        return result;
    }
    result.verdict = stability_screen(result.restored_impulse, result.J_star, J_threshold);
    return result;
}

std::vector<RobustnessRow> gain_robustness_report(const DiscreteTF& p, const DiscreteTF& c,
                                                  const std::vector<double>& gains,
                                                  const Signal& r) {
    std::vector<RobustnessRow> rows;
    for (double g : gains) {
        const DiscreteTF pg = tf_scale(p, g);
        RobustnessRow row;
        row.gain = g;

        const auto [u, y] = closed_loop_sim(pg, c, r);
        double setpoint = r[r.size() - 1];
        if (setpoint == 0.0) setpoint = r[0];
        const StepMetrics m = step_metrics(y, setpoint);
        row.overshoot_percent = m.overshoot_percent;
        row.settling_time = m.settling_time;

        try {
            const DiscreteTF l = tf_mul(pg, c);
            const Crossover cr = gain_crossover(l, default_band(l.ts));
            row.omega_c = cr.omega_c;
            row.phase_margin = phase_margin(l);
        } catch (const NoCrossing&) {
            row.omega_c = std::nan("");
            row.phase_margin = std::nan("");
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace idfrit
