#pragma once

#include <functional>
#include <string>
#include <vector>

#include "idfrit/fractional.hpp"
#include "idfrit/sim.hpp"

namespace idfrit {

enum class ControllerStructure { IOPID, FOPID, FOPI };

ControllerStructure structure_from_name(const std::string& name);
std::string structure_name(ControllerStructure s);
std::size_t theta_dimension(ControllerStructure s);

/**
 * @brief Controller parameterization.
 *
 * theta layouts: IOPID [Kp, Ki, Kd]; FOPID [Kfp, Kfi, lambda, Kfd, mu];
 * FOPI [Kfp, Kfi, lambda]. tau is the derivative/integral filter time
 * constant (defaults to ts). oust is unused for IOPID.
 */
struct ControllerSpec {
    ControllerStructure structure = ControllerStructure::IOPID;
    std::vector<double> theta;
    double tau = 0.0;
    double ts = 0.0;
    OustaloupSettings oust;

    ControllerSpec with_theta(std::vector<double> t) const;
};

struct SearchBounds {
    std::vector<double> lower;
    std::vector<double> upper;

    void validate(std::size_t dim) const;
};

struct PsoSettings {
    int swarm_size = 40;
    int max_iters = 150;
    double inertia = 0.729;
    double cognitive = 1.49445;
    double social = 1.49445;
    std::uint64_t seed = 1;
    double stall_tol = 0.0;  // 0 disables early stall exit
    int stall_iters = 0;
};

enum class Verdict { likely_bibo, suspect, rejected };

std::string verdict_name(Verdict v);

struct TuneResult {
    std::vector<double> theta_star;
    double J_star = 0.0;
    Signal restored_impulse;
    Verdict verdict = Verdict::rejected;
    std::vector<double> history;  // best J after init and after each iteration
};

/**
 * @brief Discretized controller for a parameter vector.
 *
 * Fractional structures are composed by expression rather than flattened
 * term sums: each distinct fractional power gets one shared approximant
 * (s^λ → A, s^μ → B) and the derivative filter denominator is 1 + τB.
 * Summing independently approximated powers instead moves the filter
 * resonance into the right half-plane and destabilizes loops that the
 * exact fractional controller stabilizes. Throws NotBiproper when theta
 * degenerates (for example all gains zero).
 */
DiscreteTF build_controller(const ControllerSpec& spec);

constexpr double kLossPenalty = 1e18;
constexpr double kOverflowGuard = 1e12;

/// Model-reference loss: restore the closed-loop impulse response from data
/// through the fictitious reference, then compare the estimated and desired
/// loop outputs over the horizon. Invalid or overflowing θ returns the
/// penalty value instead of throwing, keeping the search total.
double loss_J(const std::vector<double>& theta, const ControllerSpec& spec_template,
              const ExperimentData& data, const Signal& m_ref);

struct PsoOutcome {
    std::vector<double> theta_star;
    double J_star = 0.0;
    std::vector<double> history;
};

/// Global-best PSO with reflective bound handling. All random draws happen
/// on the calling thread in a fixed order; workers only evaluate the loss,
/// and results are gathered by particle index, so the outcome for a given
/// seed is identical for any thread count.
PsoOutcome pso_minimize(const std::function<double(const std::vector<double>&)>& loss,
                        const SearchBounds& bounds, const PsoSettings& settings,
                        int threads = 0);

/// Heuristic BIBO screen on the restored impulse response: growth in the
/// tail (energy ratio or late peak) or a large loss marks the loop suspect;
/// penalty-valued losses are rejected outright.
Verdict stability_screen(const Signal& restored_impulse, double J, double J_threshold);

/// Default screening threshold: ten times the squared horizon norm of the
/// reference-model output under the logged reference input.
double default_J_threshold(const ExperimentData& data, const Signal& m_ref);

/// Full tuning pipeline: PSO over loss_J, then restored impulse, loss and
/// verdict recomputed at θ*.
TuneResult tune(const ControllerSpec& spec_template, const ExperimentData& data,
                const Signal& m_ref, const SearchBounds& bounds,
                const PsoSettings& settings, double J_threshold, int threads = 0);

struct RobustnessRow {
    double gain = 1.0;
    double overshoot_percent = 0.0;
    double settling_time = 0.0;
    double omega_c = 0.0;   // NaN if no crossover
    double phase_margin = 0.0;
};

/// Validation-only report: closed-loop step metrics and open-loop frequency
/// metrics of g·P·C for each plant gain factor.
std::vector<RobustnessRow> gain_robustness_report(const DiscreteTF& p, const DiscreteTF& c,
                                                  const std::vector<double>& gains,
                                                  const Signal& r);

}  // namespace idfrit
