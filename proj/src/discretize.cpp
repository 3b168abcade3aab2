#include "idfrit/discretize.hpp"

#include <cmath>
#include <complex>
#include <utility>

#include "idfrit/errors.hpp"

namespace idfrit {

DiscreteTF tustin(const RationalTF& g, double ts) {
    if (!(ts > 0.0)) throw Error("sampling time must be positive");
    if (!g.proper()) throw NonProperResult("bilinear substitution of an improper system");
    if (g.num.is_zero()) return DiscreteTF({0.0}, {1.0}, ts);

    const double c = 2.0 / ts;
    std::vector<std::complex<double>> s_zeros =
        g.num.degree() >= 1 ? poly_roots(g.num) : std::vector<std::complex<double>>{};
    std::vector<std::complex<double>> s_poles =
        g.den.degree() >= 1 ? poly_roots(g.den) : std::vector<std::complex<double>>{};

    for (const auto& r : s_poles)
        if (std::abs(std::complex<double>(c) - r) <= 1e-12 * c)
            throw DegenerateDenominator("continuous pole at 2/ts collapses the substitution");
    for (const auto& r : s_zeros)
        if (std::abs(std::complex<double>(c) - r) <= 1e-9 * c)
            throw DegenerateDenominator("continuous zero at 2/ts maps outside the plane");

    FactoredZ f;
    std::complex<double> gain = g.num.leading() / g.den.leading();
    for (const auto& r : s_zeros) {
        f.zeros.push_back((c + r) / (c - r));
        gain *= (c - r);
    }
    for (const auto& r : s_poles) {
        f.poles.push_back((c + r) / (c - r));
        gain /= (c - r);
    }
    // Relative degree maps to zeros at the Nyquist point z = −1.
    for (int i = g.num.degree(); i < g.den.degree(); ++i) f.zeros.emplace_back(-1.0, 0.0);
    f.gain = gain.real();
    return DiscreteTF::from_factored(std::move(f), ts);
}

DiscreteTF c2d_f2i(const FracTF& g, const OustaloupSettings& s, double ts) {
    return tustin(f2i(g, s), ts);
}

}  // namespace idfrit
