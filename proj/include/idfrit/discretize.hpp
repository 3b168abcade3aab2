#pragma once

#include "idfrit/fractional.hpp"
#include "idfrit/transfer_function.hpp"

namespace idfrit {

/**
 * @brief Tustin (bilinear) discretization s = (2/ts)(z−1)/(z+1).
 *
 * Implemented on the factored form: every continuous root r maps exactly to
 * (2/ts + r)/(2/ts − r) and the relative degree contributes zeros at z = −1;
 * the overall gain is gain_s · ∏(2/ts − zero_i) / ∏(2/ts − pole_i). This is
 * the same rational substitution as clearing (z+1)^d from the expanded
 * binomial form, evaluated in the numerically stable direction. The result
 * keeps its factors and satisfies the warp identity
 * G_d(e^{jωts}) = G_c(j(2/ts)tan(ωts/2)).
 */
DiscreteTF tustin(const RationalTF& g, double ts);

/// Fractional-to-integer approximation followed by Tustin: the single entry
/// point for reference models and fractional controllers.
DiscreteTF c2d_f2i(const FracTF& g, const OustaloupSettings& s, double ts);

}  // namespace idfrit
