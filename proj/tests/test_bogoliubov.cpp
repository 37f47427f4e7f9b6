#include "support.hpp"

#include "qratchet/bogoliubov.hpp"
#include "qratchet/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qratchet;
using namespace qratchet::bogoliubov;
using dynamics::Coupling;
using testing_support::Gen;

namespace {

// Square roots of the eigenvalues of [[wa², gamma], [gamma, wb²]], paired with the bare
// frequency each one continues from.
std::pair<double, double> stiffness_roots(double wa, double wb, double gamma) {
    const double mean = 0.5 * (wa * wa + wb * wb);
    const double half = 0.5 * std::sqrt((wa * wa - wb * wb) * (wa * wa - wb * wb) + 4.0 * gamma * gamma);
    const double lo = std::sqrt(mean - half), hi = std::sqrt(mean + half);
    return wa <= wb ? std::pair{lo, hi} : std::pair{hi, lo};
}

ModelParams random_stable(Gen& gen) {
    for (;;) {
        ModelParams p{gen.uniform(0.3, 3.0), gen.uniform(0.3, 3.0), gen.uniform(-0.6, 0.6), Coupling::SpinBoson};
        if (4.0 * p.g * p.g < 0.8 * p.omega_a * p.omega_b) return p;
    }
}

}  // namespace

TEST_CASE("fig1 normal-mode frequencies") {
    const ModelParams p{1.0, 2.0, 0.2};
    const auto m = sb_normal_modes(p);
    CHECK(m.gamma == doctest::Approx(2.0 * 0.2 * std::sqrt(2.0)));
    CHECK(m.omega_A == doctest::Approx(0.94703645432045558).epsilon(1e-14));
    CHECK(m.omega_B == doctest::Approx(2.0256164380721589).epsilon(1e-14));
    CHECK(m.theta == doctest::Approx(0.5 * std::atan(2.0 * m.gamma / 3.0)).epsilon(1e-14));
    CHECK(std::exp(m.chi) == doctest::Approx(std::sqrt(m.omega_A / 1.0)));
    CHECK(std::exp(m.chi_prime) == doctest::Approx(std::sqrt(m.omega_B / 2.0)));
}

TEST_CASE("literal closed form differs and fails to diagonalize") {
    const ModelParams p{1.0, 2.0, 0.2};
    const auto printed = sb_normal_modes_printed(p);
    CHECK(printed.omega_A * printed.omega_A == doctest::Approx(1.025915586885841).epsilon(1e-12));
    CHECK(validate_diagonalization(printed, p).cross_term_residual > 1e-2);
    // With g = 0 both forms coincide.
    const ModelParams free{1.0, 2.0, 0.0};
    CHECK(sb_normal_modes_printed(free).omega_A == doctest::Approx(1.0));
}

TEST_CASE("normal modes agree with the stiffness eigenvalues for random parameters") {
    Gen gen(31);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_stable(gen);
        const auto m = sb_normal_modes(p);
        const auto [wA, wB] = stiffness_roots(p.omega_a, p.omega_b, 2.0 * p.g * std::sqrt(p.omega_a * p.omega_b));
        CHECK(m.omega_A == doctest::Approx(wA).epsilon(1e-12));
        CHECK(m.omega_B == doctest::Approx(wB).epsilon(1e-12));
        CHECK(m.theta > -std::numbers::pi / 4 - 1e-15);
        CHECK(m.theta <= std::numbers::pi / 4 + 1e-15);
        const auto rep = validate_diagonalization(m, p);
        CHECK(rep.residual() < 1e-10);
    }
}

TEST_CASE("degenerate and uncoupled limits") {
    const auto deg = sb_normal_modes({1.5, 1.5, 0.1});
    CHECK(deg.theta == doctest::Approx(std::numbers::pi / 4));
    CHECK(validate_diagonalization(deg, {1.5, 1.5, 0.1}).residual() < 1e-12);
    const auto none = sb_normal_modes({2.0, 1.0, 0.0});
    CHECK(none.theta == 0.0);
    CHECK(none.omega_A == doctest::Approx(2.0));
    CHECK(none.omega_B == doctest::Approx(1.0));
    // Mode A keeps following w_a when w_a > w_b.
    CHECK(sb_normal_modes({2.0, 1.0, 0.01}).omega_A == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("stability boundary and coupling kind") {
    // gamma² < wa² wb²  <=>  g < sqrt(wa wb) / 2
    CHECK_NOTHROW(sb_normal_modes({1.0, 2.0, 0.7}));
    CHECK_THROWS_AS(sb_normal_modes({1.0, 2.0, 0.71}), UnstableCoupling);
    CHECK_THROWS_AS(sb_normal_modes({1.0, 2.0, -0.71}), UnstableCoupling);
    CHECK_THROWS_AS(sb_normal_modes({1.0, 2.0, 0.2, Coupling::JaynesCummings}), InvalidArgument);
}

TEST_CASE("truncated spectrum reproduces the normal-mode ladder") {
    const ModelParams p{1.0, 2.0, 0.2};
    const auto rep = validate_diagonalization(sb_normal_modes(p), p, fock::SpaceSpec{21, 21});
    REQUIRE(rep.spectrum_gap_mismatch);
    CHECK(*rep.spectrum_gap_mismatch < 1e-6);
    CHECK(*rep.ground_energy == doctest::Approx(-0.013673553803692864).epsilon(1e-10));
    CHECK(*rep.ground_energy_mismatch < 1e-10);
}

TEST_CASE("Heisenberg coefficients keep the commutator") {
    Gen gen(32);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_stable(gen);
        const auto c = heisenberg_coeffs(sb_normal_modes(p), gen.uniform(0.0, 50.0));
        CHECK(std::abs(c.commutator_error_a()) < 1e-10);
        CHECK(std::abs(c.commutator_error_b()) < 1e-10);
    }
}

TEST_CASE("Heisenberg maps form a one-parameter group") {
    Gen gen(33);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = sb_normal_modes(random_stable(gen));
        const double t1 = gen.uniform(0.0, 5.0), t2 = gen.uniform(0.0, 5.0);
        const auto m1 = evolution_matrix(heisenberg_coeffs(m, t1));
        const auto m2 = evolution_matrix(heisenberg_coeffs(m, t2));
        const auto m12 = evolution_matrix(heisenberg_coeffs(m, t1 + t2));
        CHECK((m1 * m2 - m12).cwiseAbs().maxCoeff() < 1e-11);
    }
    const auto id = evolution_matrix(heisenberg_coeffs(sb_normal_modes({}), 0.0));
    CHECK((id - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("analytic single-contact occupations match exact evolution") {
    // Exact evolution at 40 levels: fig1 parameters, |2,1>, t = 4.
    const auto c = heisenberg_coeffs(sb_normal_modes({1.0, 2.0, 0.2}), 4.0);
    const auto n = number_via_coeffs(2, 1, c);
    CHECK(n.mean_n_a == doctest::Approx(1.9227001131788937).epsilon(1e-10));
    CHECK(n.mean_n_b == doctest::Approx(1.1074721964623617).epsilon(1e-10));

    Gen gen(34);
    for (int trial = 0; trial < 5; ++trial) {
        ModelParams p{gen.uniform(0.7, 2.0), gen.uniform(0.7, 2.0), gen.uniform(-0.1, 0.1)};
        const double t = gen.uniform(0.5, 6.0);
        const std::size_t na = gen.below(3), nb = gen.below(3);
        const auto analytic = number_via_coeffs(na, nb, heisenberg_coeffs(sb_normal_modes(p), t));
        const auto audit = support_audit(p, {30, 30}, t, na, nb);
        CHECK(analytic.mean_n_a == doctest::Approx(audit.mean_n_a).epsilon(1e-8));
        CHECK(analytic.mean_n_b == doctest::Approx(audit.mean_n_b).epsilon(1e-8));
    }
}

TEST_CASE("support audit at fig1 parameters") {
    const auto audit = support_audit({1.0, 2.0, 0.2}, {40, 40}, 4.0, 2, 1);
    CHECK(audit.threshold == 3);
    CHECK(audit.mass_a_above == doctest::Approx(8.7236e-3).epsilon(1e-4));
    CHECK(audit.mass_b_above == doctest::Approx(1.0319e-3).epsilon(1e-4));
    CHECK(audit.mass_total_above == doctest::Approx(1.9337e-2).epsilon(1e-4));
    CHECK(audit.mass_total_above >= audit.mass_a_above);
}

TEST_CASE("JC rotation removes the cross term") {
    Gen gen(35);
    for (int trial = 0; trial < 30; ++trial) {
        const ModelParams p{gen.uniform(0.3, 3.0), gen.uniform(0.3, 3.0), gen.uniform(-1.0, 1.0),
                            Coupling::JaynesCummings};
        const double psi = jc_rotation(p);
        CHECK(std::abs(jc_cross_term(p, psi)) < 1e-12);
        CHECK(psi > -std::numbers::pi / 4 - 1e-15);
        CHECK(psi <= std::numbers::pi / 4 + 1e-15);
    }
    CHECK(jc_rotation({1.0, 1.0, 0.3, Coupling::JaynesCummings}) == doctest::Approx(std::numbers::pi / 4));
    CHECK(jc_rotation({1.0, 2.0, 0.0, Coupling::JaynesCummings}) == 0.0);
}
