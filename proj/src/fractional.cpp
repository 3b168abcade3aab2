#include "idfrit/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "idfrit/discretize.hpp"
#include "idfrit/errors.hpp"

namespace idfrit {

namespace {

std::vector<FracTerm> merge_terms(std::vector<FracTerm> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const FracTerm& a, const FracTerm& b) { return a.exponent < b.exponent; });
    std::vector<FracTerm> out;
    for (const auto& t : terms) {
        if (!out.empty() && std::abs(t.exponent - out.back().exponent) <= 1e-12) {
            out.back().coeff += t.coeff;
        } else {
            out.push_back(t);
        }
    }
    std::erase_if(out, [](const FracTerm& t) { return t.coeff == 0.0; });
    return out;
}

}  // namespace

FracTF::FracTF(std::vector<FracTerm> num, std::vector<FracTerm> den)
    : num_terms(merge_terms(std::move(num))), den_terms(merge_terms(std::move(den))) {
    if (den_terms.empty()) throw Error("fractional transfer function needs a nonzero denominator");
}

void ReferenceModelSpec::validate() const {
    if (!(phi_m_deg > 0.0 && phi_m_deg < 180.0))
        throw Error("phase margin target must lie in (0, 180) degrees");
    if (!(omega_c > 0.0)) throw Error("crossover target must be positive");
    if (!(oust.omega_b < omega_c && omega_c < oust.omega_h))
        throw Error("crossover target must lie inside the approximation band");
    if (!(ts > 0.0)) throw Error("sampling time must be positive");
    if (oust.order < 1) throw Error("approximation order must be at least 1");
    if (!(oust.omega_b > 0.0 && oust.omega_h > oust.omega_b))
        throw Error("approximation band must satisfy 0 < omega_b < omega_h");
}

FracTF bitf(const ReferenceModelSpec& spec) {
    spec.validate();
    const double g = spec.gamma();
    return FracTF({{std::pow(spec.omega_c, g), 0.0}}, {{1.0, g}});
}

RationalTF oustaloup(double alpha, const OustaloupSettings& s) {
    if (std::abs(alpha) >= 1.0)
        throw AlphaOutOfRange("fractional exponent must satisfy |alpha| < 1");
    if (alpha == 0.0) return RationalTF({1.0}, {1.0});

    const int n = s.order;
    const double mu = s.omega_h / s.omega_b;
    Polynomial num{std::pow(s.omega_h, alpha)};
    Polynomial den{1.0};
    for (int k = -n; k <= n; ++k) {
        const double base = (k + n + 0.5) / (2.0 * n + 1.0);
        const double half = 0.5 * alpha / (2.0 * n + 1.0);
        const double wz = s.omega_b * std::pow(mu, base - half);
        const double wp = s.omega_b * std::pow(mu, base + half);
        num = poly_mul(num, Polynomial{1.0, wz});
        den = poly_mul(den, Polynomial{1.0, wp});
    }
    return RationalTF(std::move(num), std::move(den));
}

ExponentSplit split_exponent(double alpha) {
    if (!std::isfinite(alpha)) throw Error("exponent must be finite");
    double n = std::floor(alpha);
    double f = alpha - n;
    if (f > 0.5) {
        n += 1.0;
        f -= 1.0;
    }
    return {static_cast<int>(n), f};
}

RationalTF power_approx(double alpha, const OustaloupSettings& s) {
    const ExponentSplit sp = split_exponent(alpha);
    RationalTF frac = oustaloup(sp.fractional, s);
    if (sp.integer > 0) {
        std::vector<double> shift(static_cast<std::size_t>(sp.integer) + 1, 0.0);
        shift[0] = 1.0;
        return RationalTF(poly_mul(frac.num, Polynomial(shift)), frac.den);
    }
    if (sp.integer < 0) {
        std::vector<double> shift(static_cast<std::size_t>(-sp.integer) + 1, 0.0);
        shift[0] = 1.0;
        return RationalTF(frac.num, poly_mul(frac.den, Polynomial(shift)));
    }
    return frac;
}

namespace {

// Σ cᵢ·approx(s^{αᵢ}) flattened over the common denominator of the shared
// per-exponent approximants.
RationalTF sum_terms(const std::vector<FracTerm>& terms,
                     const std::map<double, RationalTF>& approx) {
    Polynomial num{};
    Polynomial den{1.0};
    for (const auto& t : terms) {
        const RationalTF& a = approx.at(t.exponent);
        num = poly_add(poly_mul(num, a.den), poly_scale(poly_mul(a.num, den), t.coeff));
        den = poly_mul(den, a.den);
    }
    return RationalTF(std::move(num), std::move(den));
}

}  // namespace

RationalTF f2i(const FracTF& g, const OustaloupSettings& s) {
    std::map<double, RationalTF> approx;
    for (const auto& t : g.num_terms)
        if (!approx.count(t.exponent)) approx.emplace(t.exponent, power_approx(t.exponent, s));
    for (const auto& t : g.den_terms)
        if (!approx.count(t.exponent)) approx.emplace(t.exponent, power_approx(t.exponent, s));

    RationalTF n = sum_terms(g.num_terms, approx);
    RationalTF d = sum_terms(g.den_terms, approx);
    if (d.num.is_zero()) throw Error("fractional denominator approximates to zero");
    return RationalTF(poly_mul(n.num, d.den), poly_mul(n.den, d.num));
}

ReferenceModel build_reference_model(const ReferenceModelSpec& spec) {
    spec.validate();
    const RationalTF l_s = f2i(bitf(spec), spec.oust);
    const RationalTF m_s = tf_feedback_unity(l_s);

    DiscreteTF l_z = tustin(l_s, spec.ts);
    DiscreteTF m_z = tustin(m_s, spec.ts);

    std::vector<double> radii;
    for (const auto& p : poles(m_z)) radii.push_back(std::abs(p));
    std::sort(radii.begin(), radii.end());

    const double limit = 1.0 - 1e-9;
    if (!radii.empty() && radii.back() >= limit) {
        std::ostringstream msg;
        msg << "reference model has poles at radii";
        for (double r : radii)
            if (r >= limit) msg << " " << r;
        throw ReferenceModelUnstable(msg.str());
    }
    return {std::move(l_z), std::move(m_z), std::move(radii)};
}

}  // namespace idfrit
