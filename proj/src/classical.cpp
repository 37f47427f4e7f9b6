// classical.cpp: Exact segment maps, toggle/switch trajectories, log-normal diagnostics

#include "qratchet/classical.hpp"

#include "qratchet/errors.hpp"
#include "qratchet/random.hpp"

#include <cmath>
#include <string>
#include <thread>

namespace qratchet::classical {

namespace {

Eigen::Matrix2d rotation(double omega, double dt) {
    const double c = std::cos(omega * dt);
    const double s = std::sin(omega * dt);
    Eigen::Matrix2d m;
    m << c, s / omega,
        -omega * s, c;
    return m;
}

template <class Fn>
std::vector<TrajectoryStats> run_parallel(std::size_t n, unsigned threads, Fn make) {
    std::vector<TrajectoryStats> out(n);
    auto work = [&](std::size_t worker, std::size_t workers) {
        for (std::size_t i = worker; i < n; i += workers) out[i] = make(i);
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    }
    return out;
}

void validate_hold(const HoldLaw& law, double mean_hold) {
    if (!(mean_hold > 0.0) || !std::isfinite(mean_hold)) throw InvalidArgument("mean_hold must be positive and finite");
    if (const auto* u = std::get_if<UniformHold>(&law); u && !(u->lo >= 0.0 && u->hi > u->lo)) {
        throw InvalidArgument("uniform hold range needs 0 <= lo < hi");
    }
}

void record(TrajectoryStats& stats, double energy, double active) {
    stats.energies.push_back(energy);
    stats.log_energies.push_back(std::log(energy));
    stats.active_energies.push_back(active);
}

}  // namespace

void ClassicalParams::validate() const {
    if (!(omega_a > 0.0) || !(omega_b > 0.0) || !std::isfinite(omega_a) || !std::isfinite(omega_b)) {
        throw InvalidArgument("classical frequencies must be positive and finite");
    }
    if (!std::isfinite(gamma)) throw InvalidArgument("gamma must be finite");
    if (gamma * gamma >= omega_a * omega_a * omega_b * omega_b) {
        throw UnstableCoupling("gamma^2 = " + std::to_string(gamma * gamma) +
                               " must be below (omega_a omega_b)^2 for a positive-definite stiffness matrix");
    }
    validate_hold(hold_law, mean_hold);
}

void FreqSwitchParams::validate() const {
    if (!(omega > 0.0) || !(omega_prime > 0.0) || !std::isfinite(omega) || !std::isfinite(omega_prime)) {
        throw InvalidArgument("switching frequencies must be positive and finite");
    }
    validate_hold(hold_law, mean_hold);
}

bool ClassicalState::finite() const {
    return std::isfinite(x_a) && std::isfinite(p_a) && std::isfinite(x_b) && std::isfinite(p_b);
}

double uncoupled_energy(const ClassicalState& s, const ClassicalParams& params) {
    return 0.5 * (s.p_a * s.p_a + s.p_b * s.p_b) +
           0.5 * (params.omega_a * params.omega_a * s.x_a * s.x_a + params.omega_b * params.omega_b * s.x_b * s.x_b);
}

double coupled_energy(const ClassicalState& s, const ClassicalParams& params) {
    return uncoupled_energy(s, params) + params.gamma * s.x_a * s.x_b;
}

SegmentPropagator::SegmentPropagator(const ClassicalParams& params)
    : omega_a_(params.omega_a), omega_b_(params.omega_b) {
    params.validate();
    Eigen::Matrix2d stiffness;
    stiffness << params.omega_a * params.omega_a, params.gamma,
        params.gamma, params.omega_b * params.omega_b;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(stiffness);
    modes_ = solver.eigenvectors();
    mode_freq_ = {std::sqrt(solver.eigenvalues()(0)), std::sqrt(solver.eigenvalues()(1))};
}

Eigen::Matrix4d SegmentPropagator::map(bool coupled, double duration) const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    if (!coupled) {
        m.block<2, 2>(0, 0) = rotation(omega_a_, duration);
        m.block<2, 2>(2, 2) = rotation(omega_b_, duration);
        return m;
    }
    // P sends (x_a, p_a, x_b, p_b) to (q_1, pi_1, q_2, pi_2), q = R^T x, pi = R^T p.
    Eigen::Matrix4d P = Eigen::Matrix4d::Zero();
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i) {
            P(2 * k, 2 * i) = modes_(i, k);
            P(2 * k + 1, 2 * i + 1) = modes_(i, k);
        }
    m.block<2, 2>(0, 0) = rotation(mode_freq_[0], duration);
    m.block<2, 2>(2, 2) = rotation(mode_freq_[1], duration);
    return P.transpose() * m * P;
}

ClassicalState evolve_segment(const ClassicalState& s, const ClassicalParams& params, bool coupled, double duration) {
    const SegmentPropagator prop(params);
    return ClassicalState::from_vector(prop.map(coupled, duration) * s.vector());
}

double draw_hold(const HoldLaw& law, double mean_hold, std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    if (std::holds_alternative<FixedHold>(law)) return mean_hold;
    const double u = random::draw_uniform(seed, stream, counter);
    if (const auto* uni = std::get_if<UniformHold>(&law)) return uni->lo + (uni->hi - uni->lo) * u;
    return -mean_hold * std::log1p(-u);
}

TrajectoryStats run_toggle_trajectory(const ClassicalParams& params, std::size_t n_toggles,
                                      const ClassicalState& initial, std::uint64_t trajectory) {
    const SegmentPropagator prop(params);
    if (!initial.finite()) throw InvalidArgument("initial classical state is not finite");
    TrajectoryStats stats;
    stats.toggle_count = n_toggles;
    stats.energies.reserve(n_toggles + 1);
    stats.log_energies.reserve(n_toggles + 1);
    stats.active_energies.reserve(n_toggles + 1);

    Eigen::Vector4d state = initial.vector();
    record(stats, uncoupled_energy(initial, params), uncoupled_energy(initial, params));
    bool coupled = false;
    for (std::size_t k = 0; k < n_toggles; ++k) {
        const double hold = draw_hold(params.hold_law, params.mean_hold, params.seed, trajectory, k);
        state = prop.map(coupled, hold) * state;
        const ClassicalState s = ClassicalState::from_vector(state);
        record(stats, uncoupled_energy(s, params), coupled ? coupled_energy(s, params) : uncoupled_energy(s, params));
        coupled = !coupled;
    }
    return stats;
}

std::vector<TrajectoryStats> run_toggle_ensemble(const ClassicalParams& params, std::size_t n_trajectories,
                                                 std::size_t n_toggles, const ClassicalState& initial,
                                                 unsigned threads) {
    params.validate();
    return run_parallel(n_trajectories, threads,
                        [&](std::size_t i) { return run_toggle_trajectory(params, n_toggles, initial, i); });
}

TrajectoryStats run_freq_switch_trajectory(const FreqSwitchParams& params, std::size_t n_switches, double x0,
                                           double p0, std::uint64_t trajectory) {
    params.validate();
    if (!std::isfinite(x0) || !std::isfinite(p0)) throw InvalidArgument("initial oscillator state is not finite");
    auto energy = [](double w, const Eigen::Vector2d& v) { return 0.5 * v(1) * v(1) + 0.5 * w * w * v(0) * v(0); };

    TrajectoryStats stats;
    stats.toggle_count = n_switches;
    Eigen::Vector2d state(x0, p0);
    record(stats, energy(params.omega, state), energy(params.omega, state));
    bool primed = false;
    for (std::size_t k = 0; k < n_switches; ++k) {
        const double w = primed ? params.omega_prime : params.omega;
        const double hold = draw_hold(params.hold_law, params.mean_hold, params.seed, trajectory, k);
        state = rotation(w, hold) * state;
        record(stats, energy(params.omega, state), energy(w, state));
        primed = !primed;
    }
    return stats;
}

std::vector<TrajectoryStats> run_freq_switch_ensemble(const FreqSwitchParams& params, std::size_t n_trajectories,
                                                      std::size_t n_switches, double x0, double p0,
                                                      unsigned threads) {
    params.validate();
    return run_parallel(n_trajectories, threads,
                        [&](std::size_t i) { return run_freq_switch_trajectory(params, n_switches, x0, p0, i); });
}

LognormalDiagnostics lognormal_diagnostics(std::span<const TrajectoryStats> ensemble) {
    if (ensemble.empty()) throw InvalidArgument("lognormal_diagnostics: empty ensemble");
    if (ensemble.size() < 100) {
        throw InvalidArgument("lognormal_diagnostics: need at least 100 trajectories, got " +
                              std::to_string(ensemble.size()));
    }
    const std::size_t steps = ensemble.front().energies.size();
    for (const auto& t : ensemble) {
        if (t.energies.size() != steps) throw InvalidArgument("lognormal_diagnostics: trajectories differ in length");
    }
    const double n = static_cast<double>(ensemble.size());

    LognormalDiagnostics d;
    for (std::size_t k = 0; k < steps; ++k) {
        double mean_u = 0.0;
        for (const auto& t : ensemble) mean_u += t.log_energies[k];
        mean_u /= n;

        // Work with u' = u - <u> and E' = E e^{-<u>}; the ratio and the variance are
        // invariant under that shift and the moments stay O(1).
        double mean_e_shifted = 0.0, var_u = 0.0;
        for (const auto& t : ensemble) {
            const double du = t.log_energies[k] - mean_u;
            mean_e_shifted += std::exp(du);
            var_u += du * du;
        }
        mean_e_shifted /= n;
        var_u /= n;
        const double predicted = std::exp(0.5 * var_u);

        // Delta method on d = m_E' exp(-m_u') - exp((m_uu' - m_u'^2) / 2) with sample means
        // (m_E', m_u', m_uu'); at m_u' = 0 the gradient is (1, -m_E', -predicted/2).
        const Eigen::Vector3d grad(1.0, -mean_e_shifted, -0.5 * predicted);
        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        const Eigen::Vector3d centre(mean_e_shifted, 0.0, var_u);
        for (const auto& t : ensemble) {
            const double du = t.log_energies[k] - mean_u;
            const Eigen::Vector3d z = Eigen::Vector3d(std::exp(du), du, du * du) - centre;
            cov += z * z.transpose();
        }
        cov /= (n - 1.0);
        const double se = std::sqrt(std::max(0.0, grad.dot(cov * grad) / n));

        d.mean_log_e.push_back(mean_u);
        d.var_log_e.push_back(var_u);
        d.mean_e.push_back(mean_e_shifted * std::exp(mean_u));
        d.ratio.push_back(mean_e_shifted);
        d.predicted_ratio.push_back(predicted);
        d.difference_stderr.push_back(se);
    }
    return d;
}

WalkSummary summarize_walk(const LognormalDiagnostics& diag) {
    std::vector<double> toggle(diag.var_log_e.size()), log_mean(diag.mean_e.size());
    for (std::size_t k = 0; k < toggle.size(); ++k) {
        toggle[k] = static_cast<double>(k);
        log_mean[k] = std::log(diag.mean_e[k]);
    }
    WalkSummary s;
    s.var_fit = fit_line(toggle, diag.var_log_e);
    s.log_mean_fit = fit_line(toggle, log_mean);
    s.drift_fit = fit_line(toggle, diag.mean_log_e);
    s.diffusion = 0.5 * s.var_fit.slope;
    s.drift = s.drift_fit.slope;
    return s;
}

}  // namespace qratchet::classical
