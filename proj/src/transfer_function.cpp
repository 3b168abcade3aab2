#include "idfrit/transfer_function.hpp"

#include <cmath>
#include <utility>

#include "idfrit/errors.hpp"

namespace idfrit {

RationalTF::RationalTF(Polynomial n, Polynomial d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw Error("zero denominator");
}

DiscreteTF::DiscreteTF(Polynomial n, Polynomial d, double ts_)
    : num(std::move(n)), den(std::move(d)), ts(ts_) {
    if (den.is_zero()) throw Error("zero denominator");
    if (ts <= 0.0) throw Error("sampling time must be positive");
    if (num.degree() > den.degree())
        throw NonProperResult("improper discrete transfer function");
}

DiscreteTF DiscreteTF::from_factored(FactoredZ f, double ts_) {
    if (f.zeros.size() > f.poles.size())
        throw NonProperResult("factored form has more zeros than poles");
    DiscreteTF g(poly_from_roots(f.zeros, f.gain), poly_from_roots(f.poles, 1.0), ts_);
    g.factored = std::move(f);
    return g;
}

double DiscreteTF::feedthrough() const {
    if (!biproper()) return 0.0;
    return num.leading() / den.leading();
}

namespace {

void require_same_ts(const DiscreteTF& a, const DiscreteTF& b) {
    if (a.ts != b.ts) throw Error("sampling time mismatch");
}

}  // namespace

DiscreteTF tf_mul(const DiscreteTF& a, const DiscreteTF& b) {
    require_same_ts(a, b);
    if (a.factored && b.factored) {
        FactoredZ f;
        f.zeros = a.factored->zeros;
        f.zeros.insert(f.zeros.end(), b.factored->zeros.begin(), b.factored->zeros.end());
        f.poles = a.factored->poles;
        f.poles.insert(f.poles.end(), b.factored->poles.begin(), b.factored->poles.end());
        f.gain = a.factored->gain * b.factored->gain;
        return DiscreteTF::from_factored(std::move(f), a.ts);
    }
    return DiscreteTF(poly_mul(a.num, b.num), poly_mul(a.den, b.den), a.ts);
}

DiscreteTF tf_add(const DiscreteTF& a, const DiscreteTF& b) {
    require_same_ts(a, b);
    Polynomial n = poly_add(poly_mul(a.num, b.den), poly_mul(b.num, a.den));
    return DiscreteTF(std::move(n), poly_mul(a.den, b.den), a.ts);
}

DiscreteTF tf_inverse(const DiscreteTF& g) {
    if (g.num.is_zero()) throw NonInvertible("cannot invert a zero transfer function");
    if (!g.biproper())
        throw NonProperResult("inverse of a strictly proper system is improper");
    if (g.factored) {
        FactoredZ f;
        f.zeros = g.factored->poles;
        f.poles = g.factored->zeros;
        f.gain = 1.0 / g.factored->gain;
        return DiscreteTF::from_factored(std::move(f), g.ts);
    }
    return DiscreteTF(g.den, g.num, g.ts);
}

DiscreteTF tf_scale(const DiscreteTF& g, double k) {
    DiscreteTF out(poly_scale(g.num, k), g.den, g.ts);
    if (g.factored && k != 0.0) {
        out.factored = g.factored;
        out.factored->gain *= k;
    }
    return out;
}

RationalTF tf_mul(const RationalTF& a, const RationalTF& b) {
    return RationalTF(poly_mul(a.num, b.num), poly_mul(a.den, b.den));
}

RationalTF tf_add(const RationalTF& a, const RationalTF& b) {
    Polynomial n = poly_add(poly_mul(a.num, b.den), poly_mul(b.num, a.den));
    return RationalTF(std::move(n), poly_mul(a.den, b.den));
}

RationalTF tf_inverse(const RationalTF& g) {
    if (g.num.is_zero()) throw NonInvertible("cannot invert a zero transfer function");
    return RationalTF(g.den, g.num);
}

DiscreteTF tf_feedback_unity(const DiscreteTF& open_loop) {
    Polynomial den_cl = poly_add(open_loop.den, open_loop.num);
    if (den_cl.is_zero()) throw DegenerateLoop("1 + L vanishes identically");
    return DiscreteTF(open_loop.num, std::move(den_cl), open_loop.ts);
}

RationalTF tf_feedback_unity(const RationalTF& open_loop) {
    Polynomial den_cl = poly_add(open_loop.den, open_loop.num);
    if (den_cl.is_zero()) throw DegenerateLoop("1 + L vanishes identically");
    return RationalTF(open_loop.num, std::move(den_cl));
}

namespace {

constexpr double kPoleHitFloor = 1e-300;

}  // namespace

std::complex<double> tf_eval(const RationalTF& g, std::complex<double> s) {
    std::complex<double> d = g.den.eval(s);
    if (std::abs(d) < kPoleHitFloor) throw PoleHit("evaluation point is a pole");
    return g.num.eval(s) / d;
}

std::complex<double> tf_eval(const DiscreteTF& g, std::complex<double> z) {
    if (g.factored) {
        // Factored evaluation: immune to the cancellation that makes the
        // expanded coefficients useless for clustered roots near z = 1.
        std::complex<double> n = g.factored->gain, d = 1.0;
        for (const auto& r : g.factored->zeros) n *= (z - r);
        for (const auto& r : g.factored->poles) d *= (z - r);
        if (std::abs(d) < kPoleHitFloor) throw PoleHit("evaluation point is a pole");
        return n / d;
    }
    std::complex<double> d = g.den.eval(z);
    if (std::abs(d) < kPoleHitFloor) throw PoleHit("evaluation point is a pole");
    return g.num.eval(z) / d;
}

std::vector<std::complex<double>> poles(const DiscreteTF& g) {
    if (g.factored) return g.factored->poles;
    if (g.den.degree() < 1) return {};
    return poly_roots(g.den);
}

}  // namespace idfrit
