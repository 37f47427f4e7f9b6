// bogoliubov.hpp: Analytic normal modes of the coupled oscillators
//
// With a = (sqrt(w) x + i p / sqrt(w)) / sqrt(2), the spin-boson coupling
// g (a† + a)(b† + b) is gamma x_a x_b with gamma = 2 g sqrt(w_a w_b). The position-space
// stiffness matrix [[w_a^2, gamma], [gamma, w_b^2]] is rotated by theta,
//
//   tan 2theta = 2 gamma / (w_b^2 - w_a^2),   theta in (-pi/4, pi/4],
//
// and each rotated coordinate is re-quantized at its own frequency, which mixes creation
// and annihilation operators (squeezing). Mode A is the one that tends to w_a as g -> 0.
//
// Operator ordering used by the 4x4 matrices in this module: (a, b, a†, b†).

#pragma once

#include "qratchet/dynamics.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>

namespace qratchet::bogoliubov {

using Complex = std::complex<double>;
using dynamics::ModelParams;

struct NormalModes {
    double theta{0.0};
    double omega_A{0.0};
    double omega_B{0.0};
    // e^chi = sqrt(w_A/w_a), e^phi = sqrt(w_A/w_b), e^phi' = sqrt(w_B/w_a), e^chi' = sqrt(w_B/w_b)
    double chi{0.0};
    double phi{0.0};
    double phi_prime{0.0};
    double chi_prime{0.0};
    // Bare frequencies and position-space coupling the modes were built from.
    double omega_a{0.0};
    double omega_b{0.0};
    double gamma{0.0};
};

// Coefficients of the evolved creation operators,
//   U a† U† = alpha1 a† + alpha2 a + alpha3 b† + alpha4 b,   U = exp(-iHt),
// and likewise beta for b†.
struct HeisenbergCoeffs {
    std::array<Complex, 4> alpha{};
    std::array<Complex, 4> beta{};
    double t{0.0};

    // |a1|^2 - |a2|^2 + |a3|^2 - |a4|^2 - 1, i.e. the drift of [a, a†] = 1.
    double commutator_error_a() const;
    double commutator_error_b() const;
};

double position_coupling(const ModelParams& params);

// Throws UnstableCoupling when a squared normal-mode frequency is not positive,
// InvalidArgument for a JC model.
NormalModes sb_normal_modes(const ModelParams& params);

// Same mixing angle, but with the squared frequencies taken from the literal closed form
// that carries "g sin 2theta" instead of "gamma sin 2theta". Kept for side-by-side
// reporting; its diagonalization residual is not small unless g = 0.
NormalModes sb_normal_modes_printed(const ModelParams& params);

// Ξ~ = S Ξ with Ξ = (a, b, a†, b†).
Eigen::Matrix4d transform_matrix(const NormalModes& modes);

// Coefficients of H = ½ Ξ† M Ξ + const.
Eigen::Matrix4d quadratic_form(const ModelParams& params);

struct DiagonalizationReport {
    // Largest off-diagonal entry of T† M T, T = S^{-1}.
    double cross_term_residual{0.0};
    // Largest |diag(T† M T) - (w_A, w_B, w_A, w_B)|.
    double frequency_residual{0.0};
    // Largest |S eta S^T - eta|, eta = diag(1, 1, -1, -1).
    double canonical_residual{0.0};
    // Filled only when a truncated space was supplied.
    std::optional<double> spectrum_gap_mismatch;
    std::optional<double> ground_energy_mismatch;
    std::optional<double> ground_energy;

    double residual() const { return std::max({cross_term_residual, frequency_residual, canonical_residual}); }
};

DiagonalizationReport validate_diagonalization(const NormalModes& modes, const ModelParams& params,
                                               const std::optional<fock::SpaceSpec>& spectrum_space = std::nullopt);

HeisenbergCoeffs heisenberg_coeffs(const NormalModes& modes, double t);

// Full 4x4 map U Ξ U† = M Ξ rebuilt from the two rows carried in coeffs.
Eigen::Matrix4cd evolution_matrix(const HeisenbergCoeffs& coeffs);

struct NumberExpectation {
    double mean_n_a{0.0};
    double mean_n_b{0.0};
};

// <a†a>, <b†b> at time t for the initial Fock state |n_a, n_b>.
NumberExpectation number_via_coeffs(std::size_t n_a, std::size_t n_b, const HeisenbergCoeffs& coeffs);

// Probability mass above n_a + n_b after one exact contact from |n_a, n_b>.
struct SupportAudit {
    std::size_t threshold{0};
    double mass_a_above{0.0};
    double mass_b_above{0.0};
    double mass_total_above{0.0};
    double mean_n_a{0.0};
    double mean_n_b{0.0};
};

SupportAudit support_audit(const ModelParams& params, const fock::SpaceSpec& spec, double t, std::size_t n_a,
                           std::size_t n_b);

// JC mixing angle: a~ = a cos(psi) + b sin(psi), b~ = -a sin(psi) + b cos(psi),
// tan 2psi = 2g / (w_a - w_b), psi in (-pi/4, pi/4]; pi/4 when w_a = w_b and g != 0.
double jc_rotation(const ModelParams& params);
// Coefficient of a~† b~ left in the JC Hamiltonian after rotating by psi.
double jc_cross_term(const ModelParams& params, double psi);

}  // namespace qratchet::bogoliubov
