#pragma once

#include <vector>

#include "idfrit/transfer_function.hpp"

namespace idfrit {

/// One addend of a fractional polynomial: coeff · s^exponent.
struct FracTerm {
    double coeff = 0.0;
    double exponent = 0.0;
};

/// Fractional-order transfer function Σ aᵢ s^{αᵢ} / Σ bⱼ s^{βⱼ}.
/// Terms with equal exponents are merged on construction.
struct FracTF {
    std::vector<FracTerm> num_terms;
    std::vector<FracTerm> den_terms;

    FracTF(std::vector<FracTerm> num, std::vector<FracTerm> den);
};

/// Oustaloup recursive-filter settings: N zero-pole pairs per side
/// (2N+1 first-order factors in total), valid over (omega_b, omega_h).
struct OustaloupSettings {
    int order = 5;
    double omega_b = 1e-4;
    double omega_h = 1e4;
};

/// Flat-phase reference model specification. gamma is derived from the
/// phase margin: gamma = 2(1 − phi_m/180°).
struct ReferenceModelSpec {
    double phi_m_deg = 80.0;
    double omega_c = 1.0;
    OustaloupSettings oust;
    double ts = 0.01;

    double gamma() const { return 2.0 * (1.0 - phi_m_deg / 180.0); }
    void validate() const;
};

/// Bode ideal transfer function (omega_c / s)^gamma as a FracTF.
FracTF bitf(const ReferenceModelSpec& spec);

/// Rational approximation of s^alpha, |alpha| < 1, over the settings band.
/// alpha = 0 returns unity exactly. Numerator and denominator are expanded
/// from the 2N+1 exact first-order factors.
RationalTF oustaloup(double alpha, const OustaloupSettings& s);

/// Split alpha = n + f with integer n and |f| minimal (ties resolved toward
/// f ∈ [0,1)), so every Oustaloup call stays in its accurate range.
struct ExponentSplit {
    int integer = 0;
    double fractional = 0.0;
};
ExponentSplit split_exponent(double alpha);

/// Rational approximation of a full fractional power s^alpha (any finite
/// alpha) as s^n · oustaloup(f).
RationalTF power_approx(double alpha, const OustaloupSettings& s);

/// Integer-order approximation of a fractional transfer function: every
/// distinct exponent gets one shared approximant, then the term sums are
/// flattened over a common denominator. Exact on integer-only inputs.
RationalTF f2i(const FracTF& g, const OustaloupSettings& s);

/// Discretized flat-phase open loop and its closed loop. The closed loop is
/// formed in the s-domain (the bilinear substitution commutes with unity
/// feedback), where the root chains stay well separated; mapping the closed
/// loop's s-domain roots directly avoids the ill-conditioned z-domain
/// polynomial addition.
struct ReferenceModel {
    DiscreteTF open_loop;   // L_flat(z)
    DiscreteTF closed_loop; // M_ref(z)
    std::vector<double> pole_radii;
};

/// Builds M_ref(z) and verifies every pole modulus < 1 − 1e-9.
/// Throws ReferenceModelUnstable listing offending radii otherwise.
ReferenceModel build_reference_model(const ReferenceModelSpec& spec);

}  // namespace idfrit
