#pragma once

#include <vector>

#include "idfrit/sim.hpp"
#include "idfrit/transfer_function.hpp"

namespace idfrit {

struct BodePoint {
    double omega = 0.0;
    double magnitude_db = 0.0;
    double phase_deg = 0.0;  // unwrapped along the grid
};

/// Log-spaced grid of n points over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

/// Default analysis band [1e-2, 0.99·π/ts] rad/s.
std::pair<double, double> default_band(double ts);

/// Frequency response at z = e^{jωts}; phase unwrapped by ±360° continuity.
std::vector<BodePoint> bode(const DiscreteTF& g, const std::vector<double>& grid);

struct Crossover {
    double omega_c = 0.0;
    bool multiple = false;  // more than one |L| = 1 crossing in band
};

/// Lowest gain crossover in the band: sign change of log|L| on a 400-point
/// log grid, refined by bisection to 1e-6 relative tolerance.
/// Throws NoCrossing when |L| never crosses 1.
Crossover gain_crossover(const DiscreteTF& l, std::pair<double, double> band);

/// 180° plus the unwrapped open-loop phase at the gain crossover.
double phase_margin(const DiscreteTF& l);

/// Least-squares slope (degrees per decade) of the unwrapped phase over 21
/// points in [omega_c/half_decade, omega_c·half_decade]. Zero for an ideal
/// flat-phase loop.
double flatness_metric(const DiscreteTF& l, double omega_c,
                       double half_decade = 3.1622776601683795);

struct SpectralCheck {
    double time_J = 0.0;
    double freq_J = 0.0;
    double relative_gap = 0.0;
};

/// Consistency check between the time-domain loss ‖(t − m_ref) ⊛ r‖² and its
/// frequency-domain form (1/M)Σ|T − M|²·|R|² over a zero-padded DFT. The two
/// agree up to truncation of the convolution tail, so the gap is small once
/// the sequences have decayed.
SpectralCheck spectral_loss_check(const Signal& t_impulse, const Signal& m_ref,
                                  const Signal& r);

}  // namespace idfrit
