#include "idfrit/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "idfrit/errors.hpp"

namespace idfrit {

namespace {

constexpr double kTrimRel = 1e-12;

std::vector<double> trimmed(std::vector<double> c) {
    if (c.empty()) return {0.0};
    double mx = 0.0;
    for (double v : c) mx = std::max(mx, std::abs(v));
    if (mx == 0.0) return {0.0};
    std::size_t first = 0;
    while (first + 1 < c.size() && std::abs(c[first]) <= kTrimRel * mx) ++first;
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(first));
    return c;
}

// In-place Parlett-Reinsch balancing (radix-2 diagonal similarity). Eigen's
// solver does not balance, and companion matrices of coefficient chains
// spanning many decades need it before eigenvalue extraction is trustworthy.
void balance(Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    const double radix = 2.0, sq = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0, s = c + r;
            while (c < g) {
                f *= radix;
                c *= sq;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sq;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(trimmed(std::move(coeffs))) {
    for (double v : coeffs_) {
        if (!std::isfinite(v)) throw Error("polynomial coefficient is not finite");
    }
}

std::complex<double> Polynomial::eval(std::complex<double> x) const {
    std::complex<double> acc = 0.0;
    for (double c : coeffs_) acc = acc * x + c;
    return acc;
}

double Polynomial::eval(double x) const {
    double acc = 0.0;
    for (double c : coeffs_) acc = acc * x + c;
    return acc;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial{};
    const auto& ca = a.coeffs();
    const auto& cb = b.coeffs();
    std::vector<double> out(ca.size() + cb.size() - 1, 0.0);
    for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t j = 0; j < cb.size(); ++j) out[i + j] += ca[i] * cb[j];
    return Polynomial(std::move(out));
}

Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
    const auto& ca = a.coeffs();
    const auto& cb = b.coeffs();
    std::vector<double> out(std::max(ca.size(), cb.size()), 0.0);
    for (std::size_t i = 0; i < ca.size(); ++i) out[out.size() - ca.size() + i] += ca[i];
    for (std::size_t i = 0; i < cb.size(); ++i) out[out.size() - cb.size() + i] += cb[i];
    return Polynomial(std::move(out));
}

Polynomial poly_scale(const Polynomial& a, double k) {
    std::vector<double> out = a.coeffs();
    for (double& v : out) v *= k;
    return Polynomial(std::move(out));
}

std::vector<std::complex<double>> poly_roots(const Polynomial& p) {
    if (p.is_zero()) throw Error("roots of the zero polynomial are undefined");
    std::vector<double> c = p.coeffs();

    // Factor out roots at the origin exactly (trailing zero coefficients).
    std::size_t zeros_at_origin = 0;
    double mx = 0.0;
    for (double v : c) mx = std::max(mx, std::abs(v));
    while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * mx) {
        c.pop_back();
        ++zeros_at_origin;
    }

    std::vector<std::complex<double>> roots(zeros_at_origin, 0.0);
    const int n = static_cast<int>(c.size()) - 1;
    if (n < 1) return roots;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) a(0, j) = -c[static_cast<std::size_t>(j) + 1] / c[0];
    for (int i = 1; i < n; ++i) a(i, i - 1) = 1.0;
    balance(a);

    Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw Error("companion eigenvalue iteration failed");
    for (int i = 0; i < n; ++i) roots.push_back(es.eigenvalues()[i]);
    return roots;
}

Polynomial poly_from_roots(const std::vector<std::complex<double>>& roots, double gain) {
    // Split into conjugate pairs and (numerically) real roots so every
    // partial product has real coefficients.
    std::vector<std::complex<double>> upper;
    std::vector<double> real_roots;
    for (const auto& r : roots) {
        const double tol = 1e-9 * (1.0 + std::abs(r));
        if (std::abs(r.imag()) <= tol) {
            real_roots.push_back(r.real());
        } else if (r.imag() > 0.0) {
            upper.push_back(r);
        }
    }
    std::size_t lower_count = roots.size() - real_roots.size() - upper.size();
    if (lower_count != upper.size())
        throw Error("root set is not closed under conjugation");

    std::vector<double> c{gain};
    auto mul_in = [&c](const std::vector<double>& f) {
        std::vector<double> out(c.size() + f.size() - 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < f.size(); ++j) out[i + j] += c[i] * f[j];
        c = std::move(out);
    };
    for (const auto& r : upper)
        mul_in({1.0, -2.0 * r.real(), r.real() * r.real() + r.imag() * r.imag()});
    for (double r : real_roots) mul_in({1.0, -r});
    return Polynomial(std::move(c));
}

}  // namespace idfrit
