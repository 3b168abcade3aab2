#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "idfrit/polynomial.hpp"

namespace idfrit {

/// Continuous-time rational transfer function num(s)/den(s).
struct RationalTF {
    Polynomial num;
    Polynomial den;

    RationalTF(Polynomial n, Polynomial d);

    bool proper() const { return num.degree() <= den.degree(); }
    bool biproper() const { return num.degree() == den.degree(); }
};

/// Factored companion data for a discrete transfer function:
/// gain · ∏(z − zeros_i) / ∏(z − poles_i). Kept alongside the expanded
/// polynomials because clustered roots near z = 1 are not recoverable from
/// expanded coefficients in double precision, while the factored form
/// simulates and evaluates exactly where the polynomial form blows up.
struct FactoredZ {
    std::vector<std::complex<double>> zeros;
    std::vector<std::complex<double>> poles;
    double gain = 1.0;
};

/**
 * @brief Discrete-time transfer function num(z)/den(z) at sampling time ts.
 *
 * Proper by construction (throws NonProperResult otherwise); ts > 0.
 * When built from a factored form the factors are retained and preferred by
 * simulation, evaluation and pole queries.
 */
struct DiscreteTF {
    Polynomial num;
    Polynomial den;
    double ts = 0.0;
    std::optional<FactoredZ> factored;

    DiscreteTF(Polynomial n, Polynomial d, double ts_);

    /// Expands the factors into num/den and validates properness.
    static DiscreteTF from_factored(FactoredZ f, double ts_);

    bool biproper() const { return num.degree() == den.degree(); }
    bool strictly_proper() const { return num.degree() < den.degree(); }

    /// Direct feedthrough: ratio of leading coefficients when biproper, 0 otherwise.
    double feedthrough() const;
};

DiscreteTF tf_mul(const DiscreteTF& a, const DiscreteTF& b);
DiscreteTF tf_add(const DiscreteTF& a, const DiscreteTF& b);
DiscreteTF tf_inverse(const DiscreteTF& g);
DiscreteTF tf_scale(const DiscreteTF& g, double k);

RationalTF tf_mul(const RationalTF& a, const RationalTF& b);
RationalTF tf_add(const RationalTF& a, const RationalTF& b);
RationalTF tf_inverse(const RationalTF& g);

/// Unity-feedback closed loop L/(1+L) = num_L/(den_L + num_L).
DiscreteTF tf_feedback_unity(const DiscreteTF& open_loop);
RationalTF tf_feedback_unity(const RationalTF& open_loop);

std::complex<double> tf_eval(const RationalTF& g, std::complex<double> s);
std::complex<double> tf_eval(const DiscreteTF& g, std::complex<double> z);

/// Denominator roots with multiplicity (factored poles when available).
std::vector<std::complex<double>> poles(const DiscreteTF& g);

}  // namespace idfrit
