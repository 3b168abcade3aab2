#include "idfrit/freq.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "idfrit/errors.hpp"

namespace idfrit {

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo) || n < 2) throw Error("degenerate frequency grid");
    std::vector<double> g(static_cast<std::size_t>(n));
    const double step = std::log10(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::pow(10.0, step * i);
    g.back() = hi;
    return g;
}

std::pair<double, double> default_band(double ts) {
    if (!(ts > 0.0)) throw Error("sampling time must be positive");
    return {1e-2, 0.99 * std::numbers::pi / ts};
}

namespace {

std::complex<double> eval_at(const DiscreteTF& g, double omega) {
    return tf_eval(g, std::exp(std::complex<double>(0.0, omega * g.ts)));
}

double unwrap_step(double raw_deg, double prev_deg) {
    return raw_deg - 360.0 * std::round((raw_deg - prev_deg) / 360.0);
}

}  // namespace

std::vector<BodePoint> bode(const DiscreteTF& g, const std::vector<double>& grid) {
    std::vector<BodePoint> out;
    out.reserve(grid.size());
    double prev = 0.0;
    bool first = true;
    for (double w : grid) {
        const std::complex<double> h = eval_at(g, w);
        BodePoint p;
        p.omega = w;
        p.magnitude_db = 20.0 * std::log10(std::max(std::abs(h), 1e-300));
        const double raw = std::arg(h) * 180.0 / std::numbers::pi;
        p.phase_deg = first ? raw : unwrap_step(raw, prev);
        prev = p.phase_deg;
        first = false;
        out.push_back(p);
    }
    return out;
}

Crossover gain_crossover(const DiscreteTF& l, std::pair<double, double> band) {
    const int n = 400;
    const std::vector<double> grid = log_grid(band.first, band.second, n);
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        f[i] = std::log10(std::max(std::abs(eval_at(l, grid[i])), 1e-300));

    int count = 0;
    double omega_c = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const bool exact = f[i] == 0.0;
        const bool change = f[i] * f[i + 1] < 0.0;
        if (!exact && !change) continue;
        ++count;
        if (count > 1) continue;
        if (exact) {
            omega_c = grid[i];
            continue;
        }
        double lo = grid[i], hi = grid[i + 1];
        double flo = f[i];
        while (hi - lo > 1e-6 * lo) {
            const double mid = std::sqrt(lo * hi);
            const double fm = std::log10(std::max(std::abs(eval_at(l, mid)), 1e-300));
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((flo < 0.0) != (fm < 0.0)) {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        omega_c = 0.5 * (lo + hi);
    }
    if (f.back() == 0.0) ++count;  // endpoint touch counts as a crossing
    if (count == 0) throw NoCrossing("loop gain never crosses unity in the band");
    return {omega_c, count > 1};
}

double phase_margin(const DiscreteTF& l) {
    const auto band = default_band(l.ts);
    const Crossover cr = gain_crossover(l, band);
    const auto pts = bode(l, log_grid(band.first, cr.omega_c, 400));
    return 180.0 + pts.back().phase_deg;
}

double flatness_metric(const DiscreteTF& l, double omega_c, double half_decade) {
    if (!(half_decade > 1.0)) throw Error("flatness window must span more than a point");
    const double nyq = 0.999 * std::numbers::pi / l.ts;
    const double lo = omega_c / half_decade;
    const double hi = std::min(omega_c * half_decade, nyq);
    if (!(hi > lo)) throw Error("flatness window is empty");
    const auto pts = bode(l, log_grid(lo, hi, 21));

    double sx = 0.0, sy = 0.0;
    for (const auto& p : pts) {
        sx += std::log10(p.omega);
        sy += p.phase_deg;
    }
    const double mx = sx / static_cast<double>(pts.size());
    const double my = sy / static_cast<double>(pts.size());
    double num = 0.0, den = 0.0;
    for (const auto& p : pts) {
        const double dx = std::log10(p.omega) - mx;
        num += dx * (p.phase_deg - my);
        den += dx * dx;
    }
    return num / den;
}

namespace {

void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace

SpectralCheck spectral_loss_check(const Signal& t_impulse, const Signal& m_ref, const Signal& r) {
    if (t_impulse.size() != m_ref.size() || t_impulse.size() != r.size())
        throw BadData("operands must share one horizon");
    const std::size_t n = t_impulse.size();

    std::vector<double> diff(n);
    for (std::size_t k = 0; k < n; ++k) diff[k] = t_impulse[k] - m_ref[k];

    const Signal conv = toeplitz_mul(Signal(diff, r.ts), r);
    SpectralCheck out;
    for (double v : conv.samples) out.time_J += v * v;

    std::size_t m = 1;
    while (m < 2 * n) m <<= 1;
    std::vector<std::complex<double>> A(m, 0.0), R(m, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        A[k] = diff[k];
        R[k] = r[k];
    }
    fft_inplace(A);
    fft_inplace(R);
    for (std::size_t k = 0; k < m; ++k) {
        const double mag = std::abs(A[k] * R[k]);
        out.freq_J += mag * mag;
    }
    out.freq_J /= static_cast<double>(m);

    out.relative_gap =
        std::abs(out.time_J - out.freq_J) / std::max({out.time_J, out.freq_J, 1e-300});
    return out;
}

}  // namespace idfrit
