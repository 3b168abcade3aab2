#pragma once

#include <complex>
#include <vector>

namespace idfrit {

/**
 * @brief Real polynomial with coefficients stored highest degree first.
 *
 * Constructors trim leading coefficients whose magnitude is below 1e-12
 * relative to the largest coefficient, so the leading coefficient of a
 * nonzero polynomial is always meaningful. The zero polynomial is {0}.
 */
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}
    explicit Polynomial(std::vector<double> coeffs);
    Polynomial(std::initializer_list<double> coeffs)
        : Polynomial(std::vector<double>(coeffs)) {}

    const std::vector<double>& coeffs() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
    double leading() const { return coeffs_.front(); }

    std::complex<double> eval(std::complex<double> x) const;
    double eval(double x) const;

    bool operator==(const Polynomial& other) const { return coeffs_ == other.coeffs_; }

private:
    std::vector<double> coeffs_;
};

Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
Polynomial poly_add(const Polynomial& a, const Polynomial& b);
Polynomial poly_scale(const Polynomial& a, double k);

/// All complex roots of p (degree ≥ 1), via balanced companion-matrix
/// eigenvalues. Conjugate symmetry of complex roots is exact.
std::vector<std::complex<double>> poly_roots(const Polynomial& p);

/// Expand a factored form gain·∏(x − r_i) back to real coefficients.
/// Roots must be closed under conjugation; imaginary residue is discarded
/// after conjugate pairing.
Polynomial poly_from_roots(const std::vector<std::complex<double>>& roots, double gain);

}  // namespace idfrit
