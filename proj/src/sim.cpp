#include "idfrit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "idfrit/errors.hpp"
#include "realization.hpp"

namespace idfrit {

namespace detail {

namespace {

bool is_real_root(const std::complex<double>& r) {
    return std::abs(r.imag()) <= 1e-9 * (1.0 + std::abs(r));
}

struct PoleGroup {
    // Two pole slots for biquads, one for a first-order tail section.
    std::vector<std::complex<double>> poles;
    std::vector<std::complex<double>> zeros;

    std::complex<double> rep() const { return poles.front(); }
    std::size_t zero_capacity() const { return poles.size() - zeros.size(); }
};

Section section_from_group(const PoleGroup& g) {
    Section s;
    if (g.poles.size() == 2) {
        const auto &p1 = g.poles[0], &p2 = g.poles[1];
        s.a1 = -(p1 + p2).real();
        s.a2 = (p1 * p2).real();
        if (g.zeros.size() == 2) {
            s.b0 = 1.0;
            s.b1 = -(g.zeros[0] + g.zeros[1]).real();
            s.b2 = (g.zeros[0] * g.zeros[1]).real();
        } else if (g.zeros.size() == 1) {
            s.b1 = 1.0;
            s.b2 = -g.zeros[0].real();
        } else {
            s.b2 = 1.0;
        }
    } else {
        s.a1 = -g.poles[0].real();
        if (g.zeros.size() == 1) {
            s.b0 = 1.0;
            s.b1 = -g.zeros[0].real();
        } else {
            s.b1 = 1.0;
        }
    }
    return s;
}

}  // namespace

Cascade build_cascade(const FactoredZ& f) {
    std::vector<std::complex<double>> pole_pairs, real_poles, zero_pairs, real_zeros;
    for (const auto& p : f.poles) {
        if (is_real_root(p))
            real_poles.push_back(p.real());
        else if (p.imag() > 0.0)
            pole_pairs.push_back(p);
    }
    for (const auto& z : f.zeros) {
        if (is_real_root(z))
            real_zeros.push_back(z.real());
        else if (z.imag() > 0.0)
            zero_pairs.push_back(z);
    }
    if (2 * pole_pairs.size() + real_poles.size() != f.poles.size() ||
        2 * zero_pairs.size() + real_zeros.size() != f.zeros.size())
        throw Error("factored roots are not closed under conjugation");

    // Pole groups: conjugate pairs as biquads, then real poles two per
    // section (magnitude-sorted), one leftover as a first-order tail.
    std::sort(real_poles.begin(), real_poles.end(),
              [](const auto& a, const auto& b) { return std::abs(a) < std::abs(b); });
    std::vector<PoleGroup> groups;
    for (const auto& p : pole_pairs) groups.push_back({{p, std::conj(p)}, {}});
    for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2)
        groups.push_back({{real_poles[i], real_poles[i + 1]}, {}});
    if (real_poles.size() % 2 == 1) groups.push_back({{real_poles.back()}, {}});

    // Zeros join the group with the nearest pole: conjugate zero pairs need
    // two free slots, real zeros one. Nearest pairing keeps sections close
    // to allpass, which is what lets near-unit-circle chains run long
    // horizons without overflow.
    auto nearest_group = [&groups](std::complex<double> z, std::size_t need) -> PoleGroup* {
        PoleGroup* best = nullptr;
        double best_d = std::numeric_limits<double>::infinity();
        for (auto& g : groups) {
            if (g.zero_capacity() < need) continue;
            const double d = std::abs(z - g.rep());
            if (d < best_d) {
                best_d = d;
                best = &g;
            }
        }
        return best;
    };
    for (const auto& z : zero_pairs) {
        PoleGroup* g = nearest_group(z, 2);
        if (!g) throw Error("factored form has more zeros than poles");
        g->zeros.push_back(z);
        g->zeros.push_back(std::conj(z));
    }
    std::sort(real_zeros.begin(), real_zeros.end(),
              [](const auto& a, const auto& b) { return std::abs(a) < std::abs(b); });
    for (const auto& z : real_zeros) {
        PoleGroup* g = nearest_group(z, 1);
        if (!g) throw Error("factored form has more zeros than poles");
        g->zeros.push_back(z);
    }

    std::sort(groups.begin(), groups.end(), [](const PoleGroup& a, const PoleGroup& b) {
        auto mx = [](const PoleGroup& g) {
            double m = 0.0;
            for (const auto& p : g.poles) m = std::max(m, std::abs(p));
            return m;
        };
        return mx(a) < mx(b);
    });

    Cascade c;
    c.gain = f.gain;
    for (const auto& g : groups) c.sections.push_back(section_from_group(g));
    return c;
}

Realization::Realization(const DiscreteTF& g) : feedthrough_(g.feedthrough()) {
    if (g.factored && !g.factored->poles.empty()) {
        cascade_mode_ = true;
        cascade_ = build_cascade(*g.factored);
        cstate_.assign(cascade_.sections.size(), {0.0, 0.0});
        return;
    }
    const auto& nc = g.num.coeffs();
    const auto& dc = g.den.coeffs();
    const double a0 = dc.front();
    a_.resize(dc.size());
    for (std::size_t i = 0; i < dc.size(); ++i) a_[i] = dc[i] / a0;
    b_.assign(dc.size(), 0.0);
    const std::size_t pad = dc.size() - nc.size();
    for (std::size_t i = 0; i < nc.size(); ++i) b_[pad + i] = nc[i] / a0;
    dstate_.assign(dc.size() - 1, 0.0);
}

double Realization::peek_zero_input() const {
    if (cascade_mode_) {
        double x = 0.0;
        for (std::size_t i = 0; i < cascade_.sections.size(); ++i)
            x = cascade_.sections[i].b0 * x + cstate_[i][0];
        return x;
    }
    return dstate_.empty() ? 0.0 : dstate_[0];
}

double Realization::step(double x) {
    if (cascade_mode_) {
        x *= cascade_.gain;
        for (std::size_t i = 0; i < cascade_.sections.size(); ++i) {
            const Section& s = cascade_.sections[i];
            auto& st = cstate_[i];
            const double y = s.b0 * x + st[0];
            st[0] = s.b1 * x - s.a1 * y + st[1];
            st[1] = s.b2 * x - s.a2 * y;
            x = y;
        }
        return x;
    }
    const double y = b_[0] * x + (dstate_.empty() ? 0.0 : dstate_[0]);
    for (std::size_t i = 0; i + 1 < dstate_.size(); ++i)
        dstate_[i] = b_[i + 1] * x - a_[i + 1] * y + dstate_[i + 1];
    if (!dstate_.empty()) dstate_.back() = b_.back() * x - a_.back() * y;
    return y;
}

}  // namespace detail

Signal::Signal(std::vector<double> s, double ts_) : samples(std::move(s)), ts(ts_) {
    if (samples.empty()) throw BadData("signal must contain at least one sample");
    if (!(ts > 0.0)) throw BadData("signal sampling time must be positive");
    for (double v : samples)
        if (!std::isfinite(v)) throw BadData("signal contains a non-finite sample");
}

Signal step_signal(std::size_t n_samples, double ts, double amplitude) {
    return Signal(std::vector<double>(n_samples, amplitude), ts);
}

Signal impulse_signal(std::size_t n_samples, double ts, double amplitude) {
    std::vector<double> s(n_samples, 0.0);
    s[0] = amplitude;
    return Signal(std::move(s), ts);
}

ExperimentData::ExperimentData(Signal r_, Signal u_, Signal y_)
    : r(std::move(r_)), u(std::move(u_)), y(std::move(y_)) {
    if (r.size() != u.size() || r.size() != y.size())
        throw BadData("record signals must share one horizon");
    if (r.ts != u.ts || r.ts != y.ts) throw BadData("record signals must share one sampling time");
    if (r.samples[0] == 0.0)
        throw BadData("first reference sample must be nonzero (fictitious reference undefined)");
}

Signal impulse_response(const DiscreteTF& g, std::size_t n) {
    detail::Realization f(g);
    std::vector<double> out(n + 1, 0.0);
    out[0] = f.step(1.0);
    for (std::size_t k = 1; k <= n; ++k) out[k] = f.step(0.0);
    return Signal(std::move(out), g.ts);
}

Signal lfilter(const DiscreteTF& g, const Signal& u) {
    if (g.ts != u.ts) throw Error("sampling time mismatch");
    detail::Realization f(g);
    std::vector<double> out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = f.step(u[k]);
    return Signal(std::move(out), u.ts);
}

Signal toeplitz_mul(const Signal& first_col, const Signal& v) {
    if (first_col.size() != v.size()) throw BadData("operands must share one horizon");
    if (first_col.ts != v.ts) throw BadData("operands must share one sampling time");
    const std::size_t n = v.size();
    std::vector<double> out(n, 0.0);
    const double* fc = first_col.samples.data();
    const double* vv = v.samples.data();
    for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t tau = 0; tau <= t; ++tau) acc += fc[tau] * vv[t - tau];
        out[t] = acc;
    }
    return Signal(std::move(out), v.ts);
}

Signal toeplitz_solve(const Signal& first_col, const Signal& rhs) {
    if (first_col.size() != rhs.size()) throw BadData("operands must share one horizon");
    if (first_col.ts != rhs.ts) throw BadData("operands must share one sampling time");
    const std::size_t n = rhs.size();
    double mx = 0.0;
    for (double v : first_col.samples) mx = std::max(mx, std::abs(v));
    if (std::abs(first_col[0]) < 1e-12 * mx)
        throw SingularLeadingSample("leading sample too small for forward substitution");

    std::vector<double> x(n, 0.0);
    const double* fc = first_col.samples.data();
    const double f0 = fc[0];
    for (std::size_t t = 0; t < n; ++t) {
        double acc = rhs[t];
        for (std::size_t tau = 1; tau <= t; ++tau) acc -= fc[tau] * x[t - tau];
        x[t] = acc / f0;
        if (!std::isfinite(x[t])) throw BadData("forward substitution overflowed");
    }
    return Signal(std::move(x), rhs.ts);
}

Signal fictitious_reference(const DiscreteTF& c, const ExperimentData& data) {
    if (c.ts != data.r.ts) throw Error("sampling time mismatch");
    if (!c.biproper())
        throw ControllerNotInvertible("controller must be biproper to invert causally");
    const Signal cu = lfilter(tf_inverse(c), data.u);
    std::vector<double> out(cu.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = cu[k] + data.y[k];
    return Signal(std::move(out), data.r.ts);
}

std::pair<Signal, Signal> closed_loop_sim(const DiscreteTF& p, const DiscreteTF& c,
                                          const Signal& r) {
    if (p.ts != c.ts || p.ts != r.ts) throw Error("sampling time mismatch");
    detail::Realization fp(p), fc(c);
    const double dp = fp.feedthrough(), dc = fc.feedthrough();
    const double denom = 1.0 + dp * dc;
    if (std::abs(denom) <= 1e-12 * (1.0 + std::abs(dp * dc)))
        throw AlgebraicLoopSingular("1 + dp*dc vanishes; same-sample loop has no solution");

    std::vector<double> us(r.size()), ys(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double sp = fp.peek_zero_input();
        const double sc = fc.peek_zero_input();
        const double u = (dc * (r[k] - sp) + sc) / denom;
        const double y = fp.step(u);
        fc.step(r[k] - y);
        us[k] = u;
        ys[k] = y;
    }
    return {Signal(std::move(us), r.ts), Signal(std::move(ys), r.ts)};
}

StepMetrics step_metrics(const Signal& y, double setpoint) {
    if (setpoint == 0.0) throw Error("step metrics need a nonzero setpoint");
    const std::size_t n = y.size();
    const std::size_t tail = std::max<std::size_t>(1, n / 20);
    double ss = 0.0, lo = y[n - tail], hi = y[n - tail];
    for (std::size_t k = n - tail; k < n; ++k) {
        ss += y[k];
        lo = std::min(lo, y[k]);
        hi = std::max(hi, y[k]);
    }
    ss /= static_cast<double>(tail);

    StepMetrics m;
    m.steady_state = ss;
    m.not_settled = (hi - lo) > 0.01 * std::abs(setpoint);

    double peak = y[0];
    for (double v : y.samples) peak = std::max(peak, v);
    m.overshoot_percent = ss != 0.0 ? std::max(0.0, 100.0 * (peak - ss) / std::abs(ss)) : 0.0;

    const double band = 0.02 * std::abs(ss);
    std::size_t last_outside = 0;
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(y[k] - ss) > band) {
            last_outside = k;
            any = true;
        }
    }
    m.settling_time = any ? static_cast<double>(last_outside) * y.ts : 0.0;
    return m;
}

}  // namespace idfrit
