#pragma once

// Internal per-sample filter realizations. Factored systems run as a cascade
// of first/second-order sections (transposed direct form II); the pole-zero
// pairing keeps each section's dynamics tame where the expanded high-order
// difference equation overflows. Not part of the public interface.

#include <array>
#include <complex>
#include <vector>

#include "idfrit/transfer_function.hpp"

namespace idfrit::detail {

struct Section {
    // (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2); first-order
    // sections keep b2 = a2 = 0.
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

struct Cascade {
    double gain = 1.0;
    std::vector<Section> sections;
};

Cascade build_cascade(const FactoredZ& f);

/// Stateful single-sample filter for a DiscreteTF (cascade when factors are
/// available, full-order transposed direct form II otherwise).
class Realization {
public:
    explicit Realization(const DiscreteTF& g);

    /// Output this sample would take if the current input were zero.
    double peek_zero_input() const;
    /// Commit input x, advance the state, return the output sample.
    double step(double x);
    double feedthrough() const { return feedthrough_; }

private:
    bool cascade_mode_ = false;
    Cascade cascade_;
    std::vector<std::array<double, 2>> cstate_;

    std::vector<double> b_, a_;  // direct form, a_[0] == 1
    std::vector<double> dstate_;

    double feedthrough_ = 0.0;
};

}  // namespace idfrit::detail
