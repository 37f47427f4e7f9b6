// classical.hpp: Classical analogue: coupling toggled on and off at random times
//
// Two unit-mass oscillators, H0 = Σ p²/2 + w²x²/2, with gamma x_a x_b added during the
// "coupled" segments. Segments are integrated exactly through the 2x2 normal-mode
// decomposition, so every segment map is symplectic and conserves its own Hamiltonian.
// The recorded energy is the uncoupled H0 at each toggle instant; since the dynamics is
// linear, log H0 performs a random walk and <H0> grows exponentially.

#pragma once

#include "qratchet/fit.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace qratchet::classical {

struct ExponentialHold {};
struct UniformHold {
    double lo{0.5};
    double hi{1.5};
};
// Every hold equals mean_hold; no randomness.
struct FixedHold {};
using HoldLaw = std::variant<ExponentialHold, UniformHold, FixedHold>;

struct ClassicalParams {
    double omega_a{1.0};
    double omega_b{2.0};
    double gamma{0.3};
    double mean_hold{1.0};
    HoldLaw hold_law{ExponentialHold{}};
    std::uint64_t seed{0};

    // Throws UnstableCoupling if gamma² >= w_a² w_b², InvalidArgument otherwise.
    void validate() const;
};

struct ClassicalState {
    double x_a{1.0};
    double p_a{0.0};
    double x_b{1.0};
    double p_b{0.0};

    Eigen::Vector4d vector() const { return {x_a, p_a, x_b, p_b}; }
    static ClassicalState from_vector(const Eigen::Vector4d& v) { return {v(0), v(1), v(2), v(3)}; }
    bool finite() const;
};

double uncoupled_energy(const ClassicalState& s, const ClassicalParams& params);
double coupled_energy(const ClassicalState& s, const ClassicalParams& params);

// Exact linear segment maps on (x_a, p_a, x_b, p_b). Built once per parameter set.
class SegmentPropagator {
public:
    explicit SegmentPropagator(const ClassicalParams& params);

    Eigen::Matrix4d map(bool coupled, double duration) const;
    double mode_frequency(int k) const { return mode_freq_[k]; }

private:
    double omega_a_;
    double omega_b_;
    Eigen::Matrix2d modes_;  // columns: normal-mode directions in (x_a, x_b)
    std::array<double, 2> mode_freq_;
};

ClassicalState evolve_segment(const ClassicalState& s, const ClassicalParams& params, bool coupled, double duration);

// Hold time number `counter` of trajectory `stream`.
double draw_hold(const HoldLaw& law, double mean_hold, std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

struct TrajectoryStats {
    // Index 0 is the initial state, index k the state right after toggle k.
    std::vector<double> energies;
    std::vector<double> log_energies;
    // Energy of the Hamiltonian that was active during the segment ending at toggle k
    // (index 0 uses the uncoupled one).
    std::vector<double> active_energies;
    std::size_t toggle_count{0};
};

// Starts uncoupled. Holds come from stream `trajectory` of params.seed.
TrajectoryStats run_toggle_trajectory(const ClassicalParams& params, std::size_t n_toggles,
                                      const ClassicalState& initial = {}, std::uint64_t trajectory = 0);

std::vector<TrajectoryStats> run_toggle_ensemble(const ClassicalParams& params, std::size_t n_trajectories,
                                                 std::size_t n_toggles, const ClassicalState& initial = {},
                                                 unsigned threads = 1);

struct FreqSwitchParams {
    double omega{1.0};
    double omega_prime{2.0};
    double mean_hold{1.0};
    HoldLaw hold_law{ExponentialHold{}};
    std::uint64_t seed{0};

    void validate() const;
};

// Single oscillator alternating between omega (first) and omega_prime. The recorded
// energy is p²/2 + omega² x²/2.
TrajectoryStats run_freq_switch_trajectory(const FreqSwitchParams& params, std::size_t n_switches, double x0 = 1.0,
                                           double p0 = 0.0, std::uint64_t trajectory = 0);

std::vector<TrajectoryStats> run_freq_switch_ensemble(const FreqSwitchParams& params, std::size_t n_trajectories,
                                                      std::size_t n_switches, double x0 = 1.0, double p0 = 0.0,
                                                      unsigned threads = 1);

// Per-toggle ensemble aggregates.
struct LognormalDiagnostics {
    std::vector<double> mean_log_e;
    std::vector<double> var_log_e;
    std::vector<double> mean_e;
    // <E> / exp(<log E>)
    std::vector<double> ratio;
    // exp(var/2), what ratio equals when log E is normal
    std::vector<double> predicted_ratio;
    // Delta-method standard error of ratio - predicted_ratio
    std::vector<double> difference_stderr;
};

// Requires at least 100 trajectories of equal length.
LognormalDiagnostics lognormal_diagnostics(std::span<const TrajectoryStats> ensemble);

struct WalkSummary {
    LineFit var_fit;       // var(log E) against toggle
    LineFit log_mean_fit;  // log <E> against toggle
    LineFit drift_fit;     // <log E> against toggle
    double diffusion{0.0};  // half the var(log E) slope, per toggle
    double drift{0.0};      // slope of <log E>, per toggle
};

WalkSummary summarize_walk(const LognormalDiagnostics& diag);

}  // namespace qratchet::classical
