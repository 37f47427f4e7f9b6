#include "support.hpp"

#include "qratchet/classical.hpp"
#include "qratchet/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace qratchet;
using namespace qratchet::classical;
using testing_support::Gen;

namespace {

// Reference integrator: classical RK4 on x'' = -K x with small steps.
Eigen::Vector4d rk4(const ClassicalParams& p, bool coupled, const Eigen::Vector4d& s0, double t) {
    const double gamma = coupled ? p.gamma : 0.0;
    auto f = [&](const Eigen::Vector4d& s) {
        return Eigen::Vector4d(s(1), -p.omega_a * p.omega_a * s(0) - gamma * s(2), s(3),
                               -p.omega_b * p.omega_b * s(2) - gamma * s(0));
    };
    const int steps = 20000;
    const double h = t / steps;
    Eigen::Vector4d s = s0;
    for (int i = 0; i < steps; ++i) {
        const auto k1 = f(s), k2 = f(s + 0.5 * h * k1), k3 = f(s + 0.5 * h * k2), k4 = f(s + h * k3);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return s;
}

Eigen::Matrix4d symplectic_form() {
    Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
    j(0, 1) = 1.0;
    j(1, 0) = -1.0;
    j(2, 3) = 1.0;
    j(3, 2) = -1.0;
    return j;
}

TrajectoryStats synthetic(const std::vector<double>& logs) {
    TrajectoryStats t;
    for (double u : logs) {
        t.log_energies.push_back(u);
        t.energies.push_back(std::exp(u));
        t.active_energies.push_back(std::exp(u));
    }
    t.toggle_count = logs.size() - 1;
    return t;
}

}  // namespace

TEST_CASE("segment maps agree with direct integration") {
    Gen gen(51);
    for (int trial = 0; trial < 6; ++trial) {
        ClassicalParams p{gen.uniform(0.5, 2.0), gen.uniform(0.5, 2.0), 0.0};
        p.gamma = gen.uniform(-0.8, 0.8) * p.omega_a * p.omega_b;
        const SegmentPropagator prop(p);
        const Eigen::Vector4d s0(gen.normal(), gen.normal(), gen.normal(), gen.normal());
        const double t = gen.uniform(0.1, 4.0);
        for (bool coupled : {false, true}) {
            CHECK((prop.map(coupled, t) * s0 - rk4(p, coupled, s0, t)).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("segment maps are symplectic and conserve their Hamiltonian") {
    Gen gen(52);
    const Eigen::Matrix4d j = symplectic_form();
    for (int trial = 0; trial < 20; ++trial) {
        const ClassicalParams p{gen.uniform(0.5, 2.0), gen.uniform(0.5, 2.0), gen.uniform(-0.2, 0.2)};
        const SegmentPropagator prop(p);
        const double t = gen.uniform(0.0, 10.0);
        for (bool coupled : {false, true}) {
            const auto m = prop.map(coupled, t);
            CHECK((m.transpose() * j * m - j).cwiseAbs().maxCoeff() < 1e-12);
        }
        const ClassicalState s{gen.normal(), gen.normal(), gen.normal(), gen.normal()};
        const auto on = evolve_segment(s, p, true, t);
        const auto off = evolve_segment(s, p, false, t);
        CHECK(coupled_energy(on, p) == doctest::Approx(coupled_energy(s, p)).epsilon(1e-12));
        CHECK(uncoupled_energy(off, p) == doctest::Approx(uncoupled_energy(s, p)).epsilon(1e-12));
    }
}

TEST_CASE("coupled mode frequencies") {
    const ClassicalParams p{1.0, 2.0, 0.3};
    const SegmentPropagator prop(p);
    // Eigenvalues of [[1, 0.3], [0.3, 4]]
    const double half = 0.5 * std::sqrt(9.0 + 4.0 * 0.09);
    CHECK(prop.mode_frequency(0) == doctest::Approx(std::sqrt(2.5 - half)));
    CHECK(prop.mode_frequency(1) == doctest::Approx(std::sqrt(2.5 + half)));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((ClassicalParams{1.0, 2.0, 2.0}.validate()), UnstableCoupling);
    CHECK_THROWS_AS((ClassicalParams{1.0, 2.0, -2.5}.validate()), UnstableCoupling);
    CHECK_THROWS_AS((ClassicalParams{0.0, 2.0, 0.1}.validate()), InvalidArgument);
    ClassicalParams p;
    p.mean_hold = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.hold_law = UniformHold{1.0, 0.5};
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    CHECK_THROWS_AS((FreqSwitchParams{1.0, -2.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS(run_toggle_trajectory({}, 3, {std::nan(""), 0, 0, 0}), InvalidArgument);
}

TEST_CASE("hold-time laws") {
    double sum = 0.0, sum2 = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const double h = draw_hold(ExponentialHold{}, 1.5, 7, 0, k);
        CHECK(h >= 0.0);
        sum += h;
        sum2 += h * h;
    }
    const double mean = sum / n;
    // Exponential: sd = mean, so the standard error of the mean is 1.5/sqrt(n).
    CHECK(std::abs(mean - 1.5) < 5.0 * 1.5 / std::sqrt(double(n)));
    CHECK(sum2 / n - mean * mean == doctest::Approx(2.25).epsilon(0.03));

    for (int k = 0; k < 1000; ++k) {
        const double h = draw_hold(UniformHold{0.2, 0.4}, 1.0, 1, 2, k);
        CHECK(h >= 0.2);
        CHECK(h < 0.4);
    }
    CHECK(draw_hold(FixedHold{}, 0.7, 1, 2, 3) == 0.7);
    CHECK(draw_hold(ExponentialHold{}, 1.0, 1, 2, 3) == draw_hold(ExponentialHold{}, 1.0, 1, 2, 3));
    CHECK(draw_hold(ExponentialHold{}, 1.0, 1, 2, 3) != draw_hold(ExponentialHold{}, 1.0, 1, 3, 3));
}

TEST_CASE("uncoupled toggling with zero coupling keeps the energy") {
    const ClassicalParams p{1.0, 2.0, 0.0};
    const auto t = run_toggle_trajectory(p, 50);
    REQUIRE(t.energies.size() == 51);
    for (double e : t.energies) CHECK(e == doctest::Approx(t.energies[0]).epsilon(1e-12));
    CHECK(t.energies[0] == doctest::Approx(0.5 * (1.0 + 4.0)));
}

TEST_CASE("energy only changes across coupled segments") {
    const ClassicalParams p{1.0, 2.0, 0.3};
    const auto t = run_toggle_trajectory(p, 20, {}, 4);
    // Segment k (ending at toggle k+1) is coupled for odd k.
    for (std::size_t k = 0; k < 20; k += 2) {
        CHECK(t.energies[k + 1] == doctest::Approx(t.energies[k]).epsilon(1e-12));
    }
    for (std::size_t k = 1; k < 20; k += 2) {
        CHECK(t.active_energies[k + 1] > 0.0);
    }
}

TEST_CASE("trajectories are reproducible and independent of the thread count") {
    const ClassicalParams p{1.0, 2.0, 0.3, 1.0, ExponentialHold{}, 99};
    const auto one = run_toggle_ensemble(p, 40, 30, {}, 1);
    const auto four = run_toggle_ensemble(p, 40, 30, {}, 4);
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].energies == four[i].energies);
    CHECK(one[3].energies == run_toggle_trajectory(p, 30, {}, 3).energies);
    CHECK(one[3].energies != one[4].energies);
}

TEST_CASE("equal switching frequencies keep the energy") {
    const FreqSwitchParams p{1.3, 1.3};
    const auto t = run_freq_switch_trajectory(p, 40, 0.5, -0.2);
    for (double e : t.energies) CHECK(e == doctest::Approx(t.energies[0]).epsilon(1e-12));
    const auto ens = run_freq_switch_ensemble({1.0, 2.0}, 8, 10, 1.0, 0.0, 2);
    CHECK(ens[5].energies == run_freq_switch_trajectory({1.0, 2.0}, 10, 1.0, 0.0, 5).energies);
}

TEST_CASE("lognormal diagnostics on exactly lognormal data") {
    Gen gen(53);
    const std::size_t n = 4000;
    std::vector<TrajectoryStats> ens;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = gen.normal();
        ens.push_back(synthetic({0.0, 0.1 * z + 3.0, 0.5 * z - 1.0}));
    }
    const auto d = lognormal_diagnostics(ens);
    REQUIRE(d.ratio.size() == 3);
    CHECK(d.var_log_e[0] == 0.0);
    CHECK(d.ratio[0] == doctest::Approx(1.0));
    for (std::size_t k = 1; k < 3; ++k) {
        CHECK(std::abs(d.ratio[k] - d.predicted_ratio[k]) < 4.0 * d.difference_stderr[k]);
        CHECK(d.difference_stderr[k] > 0.0);
    }
    CHECK(d.var_log_e[2] == doctest::Approx(0.25).epsilon(0.1));
    CHECK(d.mean_log_e[1] == doctest::Approx(3.0).epsilon(0.01));
    CHECK(d.mean_e[1] == doctest::Approx(std::exp(3.0 + 0.005)).epsilon(0.01));
}

TEST_CASE("lognormal diagnostics flag a non-lognormal spread") {
    // log E uniform on [-1.5, 1.5]: <e^u> = sinh(1.5)/1.5 = 1.4195 vs exp(var/2) = exp(0.375) = 1.4550
    Gen gen(54);
    std::vector<TrajectoryStats> ens;
    for (int i = 0; i < 20000; ++i) ens.push_back(synthetic({0.0, gen.uniform(-1.5, 1.5)}));
    const auto d = lognormal_diagnostics(ens);
    CHECK(std::abs(d.ratio[1] - d.predicted_ratio[1]) > 4.0 * d.difference_stderr[1]);
}

TEST_CASE("lognormal diagnostics input checks") {
    std::vector<TrajectoryStats> few(50, synthetic({0.0, 1.0}));
    CHECK_THROWS_AS(lognormal_diagnostics(few), InvalidArgument);
    CHECK_THROWS_AS(lognormal_diagnostics({}), InvalidArgument);
    std::vector<TrajectoryStats> ragged(120, synthetic({0.0, 1.0}));
    ragged[7] = synthetic({0.0});
    CHECK_THROWS_AS(lognormal_diagnostics(ragged), InvalidArgument);
}

TEST_CASE("walk summary fits") {
    LognormalDiagnostics d;
    for (int k = 0; k <= 10; ++k) {
        d.var_log_e.push_back(0.02 * k);
        d.mean_log_e.push_back(0.5 + 0.001 * k);
        d.mean_e.push_back(std::exp(0.5 + 0.011 * k));
    }
    const auto w = summarize_walk(d);
    CHECK(w.diffusion == doctest::Approx(0.01));
    CHECK(w.drift == doctest::Approx(0.001));
    CHECK(w.log_mean_fit.slope == doctest::Approx(0.011));
    CHECK(w.var_fit.r_squared == doctest::Approx(1.0));
}
