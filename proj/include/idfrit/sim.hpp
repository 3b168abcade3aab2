#pragma once

#include <utility>
#include <vector>

#include "idfrit/transfer_function.hpp"

namespace idfrit {

/// Uniformly sampled finite real signal, indices 0..N.
struct Signal {
    std::vector<double> samples;
    double ts = 0.0;

    Signal() = default;
    Signal(std::vector<double> s, double ts_);

    std::size_t size() const { return samples.size(); }
    double operator[](std::size_t i) const { return samples[i]; }
};

Signal step_signal(std::size_t n_samples, double ts, double amplitude = 1.0);
Signal impulse_signal(std::size_t n_samples, double ts, double amplitude = 1.0);

/// One-shot closed-loop record (r, u, y) with a common horizon and ts.
/// The first reference sample must be nonzero or the fictitious reference
/// is undefined.
struct ExperimentData {
    Signal r;
    Signal u;
    Signal y;

    ExperimentData(Signal r_, Signal u_, Signal y_);
};

/// First N+1 impulse-response samples of g from zero initial conditions.
Signal impulse_response(const DiscreteTF& g, std::size_t n);

/// Filters u through g from zero initial state (truncated convolution with
/// the impulse response). Uses the cascade realization when g carries its
/// factors, the direct-form difference equation otherwise.
Signal lfilter(const DiscreteTF& g, const Signal& u);

/// Truncated causal convolution out_t = Σ_{τ≤t} first_col_τ · v_{t−τ}
/// (lower-triangular Toeplitz matrix–vector product).
Signal toeplitz_mul(const Signal& first_col, const Signal& v);

/// Forward substitution for the lower-triangular Toeplitz system
/// Tpl(first_col) · x = rhs. Throws SingularLeadingSample when
/// |first_col[0]| < 1e-12 · max|first_col|.
Signal toeplitz_solve(const Signal& first_col, const Signal& rhs);

/// Fictitious reference r̃ = C⁻¹u + y. Requires a biproper (causally
/// invertible) controller. The inverse system may be internally unstable;
/// the finite-horizon sequence is still exactly defined.
Signal fictitious_reference(const DiscreteTF& c, const ExperimentData& data);

/// Per-sample unity-feedback simulation: e = r − y, u = C(e), y = P(u).
/// The same-sample algebraic loop of two biproper blocks is solved through
/// their direct feedthroughs.
std::pair<Signal, Signal> closed_loop_sim(const DiscreteTF& p, const DiscreteTF& c,
                                          const Signal& r);

struct StepMetrics {
    double overshoot_percent = 0.0;
    double settling_time = 0.0;
    double steady_state = 0.0;
    bool not_settled = false;  // final-5% spread exceeds 1% of setpoint
};

/// Overshoot relative to the mean of the final 5% of samples; settling time
/// is the last instant outside the 2% band.
StepMetrics step_metrics(const Signal& y, double setpoint);

}  // namespace idfrit
