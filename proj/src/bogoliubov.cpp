// bogoliubov.cpp: Normal modes, Heisenberg coefficients and their numeric cross-checks

#include "qratchet/bogoliubov.hpp"

#include "qratchet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace qratchet::bogoliubov {

namespace {

const Eigen::Vector4d kEta(1.0, 1.0, -1.0, -1.0);

void require_sb(const ModelParams& params, const char* where) {
    params.validate();
    if (params.coupling != dynamics::Coupling::SpinBoson) {
        throw InvalidArgument(std::string(where) + ": requires spin-boson coupling");
    }
}

double mixing_angle(double wa2, double wb2, double gamma) {
    if (wb2 == wa2) return gamma == 0.0 ? 0.0 : std::numbers::pi / 4.0;
    return 0.5 * std::atan(2.0 * gamma / (wb2 - wa2));
}

NormalModes assemble(const ModelParams& params, double theta, double gamma, double omega_A2, double omega_B2) {
    if (!(omega_A2 > 0.0) || !(omega_B2 > 0.0)) {
        throw UnstableCoupling("normal mode frequency squared is not positive (omega_A^2 = " +
                               std::to_string(omega_A2) + ", omega_B^2 = " + std::to_string(omega_B2) +
                               "); coupling too strong for these frequencies");
    }
    NormalModes m;
    m.theta = theta;
    m.omega_A = std::sqrt(omega_A2);
    m.omega_B = std::sqrt(omega_B2);
    m.omega_a = params.omega_a;
    m.omega_b = params.omega_b;
    m.gamma = gamma;
    m.chi = 0.5 * std::log(m.omega_A / params.omega_a);
    m.phi = 0.5 * std::log(m.omega_A / params.omega_b);
    m.phi_prime = 0.5 * std::log(m.omega_B / params.omega_a);
    m.chi_prime = 0.5 * std::log(m.omega_B / params.omega_b);
    return m;
}

}  // namespace

double HeisenbergCoeffs::commutator_error_a() const {
    return std::norm(alpha[0]) - std::norm(alpha[1]) + std::norm(alpha[2]) - std::norm(alpha[3]) - 1.0;
}

double HeisenbergCoeffs::commutator_error_b() const {
    return std::norm(beta[2]) - std::norm(beta[3]) + std::norm(beta[0]) - std::norm(beta[1]) - 1.0;
}

double position_coupling(const ModelParams& params) { return 2.0 * params.g * std::sqrt(params.omega_a * params.omega_b); }

NormalModes sb_normal_modes(const ModelParams& params) {
    require_sb(params, "sb_normal_modes");
    const double wa2 = params.omega_a * params.omega_a;
    const double wb2 = params.omega_b * params.omega_b;
    const double gamma = position_coupling(params);
    const double theta = mixing_angle(wa2, wb2, gamma);
    const double c2 = std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta);
    const double omega_A2 = 0.5 * (wa2 + wb2) + 0.5 * (wa2 - wb2) * c2 - gamma * s2;
    const double omega_B2 = 0.5 * (wa2 + wb2) + 0.5 * (wb2 - wa2) * c2 + gamma * s2;
    return assemble(params, theta, gamma, omega_A2, omega_B2);
}

NormalModes sb_normal_modes_printed(const ModelParams& params) {
    require_sb(params, "sb_normal_modes_printed");
    const double wa2 = params.omega_a * params.omega_a;
    const double wb2 = params.omega_b * params.omega_b;
    const double gamma = position_coupling(params);
    const double theta = mixing_angle(wa2, wb2, gamma);
    const double c2 = std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta);
    const double omega_A2 = 0.5 * (wa2 + wb2) + 0.5 * (wa2 - wb2) * c2 - params.g * s2;
    const double omega_B2 = 0.5 * (wa2 + wb2) + 0.5 * (wb2 - wa2) * c2 + params.g * s2;
    return assemble(params, theta, gamma, omega_A2, omega_B2);
}

Eigen::Matrix4d transform_matrix(const NormalModes& m) {
    const double c = std::cos(m.theta);
    const double s = std::sin(m.theta);
    const double chA = c * std::cosh(m.chi), shA = c * std::sinh(m.chi);
    const double chP = s * std::cosh(m.phi), shP = s * std::sinh(m.phi);
    const double chPp = s * std::cosh(m.phi_prime), shPp = s * std::sinh(m.phi_prime);
    const double chB = c * std::cosh(m.chi_prime), shB = c * std::sinh(m.chi_prime);
    Eigen::Matrix4d S;
    //       a       b      a†     b†
    S << chA,  -chP,  shA,  -shP,   // A~
         chPp,  chB,  shPp,  shB,   // B~
         shA,  -shP,  chA,  -chP,   // A~†
         shPp,  shB,  chPp,  chB;   // B~†
    return S;
}

Eigen::Matrix4d quadratic_form(const ModelParams& params) {
    const double wa = params.omega_a, wb = params.omega_b, g = params.g;
    Eigen::Matrix4d M;
    if (params.coupling == dynamics::Coupling::SpinBoson) {
        M << wa, g, 0, g,
             g, wb, g, 0,
             0, g, wa, g,
             g, 0, g, wb;
    } else {
        M << wa, g, 0, 0,
             g, wb, 0, 0,
             0, 0, wa, g,
             0, 0, g, wb;
    }
    return M;
}

DiagonalizationReport validate_diagonalization(const NormalModes& modes, const ModelParams& params,
                                               const std::optional<fock::SpaceSpec>& spectrum_space) {
    DiagonalizationReport report;
    const Eigen::Matrix4d S = transform_matrix(modes);
    const Eigen::Matrix4d T = S.inverse();
    const Eigen::Matrix4d D = T.transpose() * quadratic_form(params) * T;
    const Eigen::Vector4d target(modes.omega_A, modes.omega_B, modes.omega_A, modes.omega_B);
    for (int i = 0; i < 4; ++i) {
        report.frequency_residual = std::max(report.frequency_residual, std::abs(D(i, i) - target(i)));
        for (int j = 0; j < 4; ++j)
            if (i != j) report.cross_term_residual = std::max(report.cross_term_residual, std::abs(D(i, j)));
    }
    report.canonical_residual =
        (S * kEta.asDiagonal() * S.transpose() - Eigen::Matrix4d(kEta.asDiagonal())).cwiseAbs().maxCoeff();

    if (spectrum_space) {
        const fock::Operator h = dynamics::build_hamiltonian(params, *spectrum_space);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix().real(), Eigen::EigenvaluesOnly);
        const Eigen::VectorXd& e = solver.eigenvalues();
        const double lo = std::min(modes.omega_A, modes.omega_B);
        const double hi = std::max(modes.omega_A, modes.omega_B);
        // Lowest gap is the softer mode; the stiffer one is the nearest of the next few gaps.
        const double gap_lo = e(1) - e(0);
        double nearest_hi = std::numeric_limits<double>::infinity();
        const Eigen::Index probe = std::min<Eigen::Index>(e.size(), 12);
        for (Eigen::Index k = 1; k < probe; ++k) nearest_hi = std::min(nearest_hi, std::abs(e(k) - e(0) - hi));
        report.spectrum_gap_mismatch = std::max(std::abs(gap_lo - lo), nearest_hi);
        report.ground_energy = e(0);
        report.ground_energy_mismatch =
            std::abs(e(0) - 0.5 * (modes.omega_A + modes.omega_B - params.omega_a - params.omega_b));
    }
    return report;
}

HeisenbergCoeffs heisenberg_coeffs(const NormalModes& modes, double t) {
    const Eigen::Matrix4cd S = transform_matrix(modes).cast<Complex>();
    const Eigen::Matrix4cd S_inv = transform_matrix(modes).inverse().cast<Complex>();
    Eigen::Vector4cd phases;
    phases << std::polar(1.0, modes.omega_A * t), std::polar(1.0, modes.omega_B * t),
        std::polar(1.0, -modes.omega_A * t), std::polar(1.0, -modes.omega_B * t);
    const Eigen::Matrix4cd M = S_inv * phases.asDiagonal() * S;

    HeisenbergCoeffs out;
    out.t = t;
    // rows: 2 = a†, 3 = b†; columns (a, b, a†, b†) -> order (a†, a, b†, b)
    out.alpha = {M(2, 2), M(2, 0), M(2, 3), M(2, 1)};
    out.beta = {M(3, 2), M(3, 0), M(3, 3), M(3, 1)};
    return out;
}

Eigen::Matrix4cd evolution_matrix(const HeisenbergCoeffs& c) {
    const auto& al = c.alpha;
    const auto& be = c.beta;
    Eigen::Matrix4cd M;
    // U a U† is the adjoint of U a† U†: conjugate, and swap a <-> a†, b <-> b†.
    M << std::conj(al[0]), std::conj(al[2]), std::conj(al[1]), std::conj(al[3]),
         std::conj(be[0]), std::conj(be[2]), std::conj(be[1]), std::conj(be[3]),
         al[1], al[3], al[0], al[2],
         be[1], be[3], be[0], be[2];
    return M;
}

NumberExpectation number_via_coeffs(std::size_t n_a, std::size_t n_b, const HeisenbergCoeffs& coeffs) {
    // <psi(t)| a†a |psi(t)> needs U† a† U, the inverse map.
    const Eigen::Matrix4cd back = evolution_matrix(coeffs).inverse();
    const double na = static_cast<double>(n_a);
    const double nb = static_cast<double>(n_b);
    // For a Fock product state only <a†a>, <aa†>, <b†b>, <bb†> survive.
    auto occupation = [&](Eigen::Index row) {
        return std::norm(back(row, 2)) * na + std::norm(back(row, 0)) * (na + 1.0) +
               std::norm(back(row, 3)) * nb + std::norm(back(row, 1)) * (nb + 1.0);
    };
    return {occupation(2), occupation(3)};
}

SupportAudit support_audit(const ModelParams& params, const fock::SpaceSpec& spec, double t, std::size_t n_a,
                           std::size_t n_b) {
    using fock::Factor;
    spec.validate();
    const auto rho0 = fock::tensor_state(fock::fock_state(Factor::A, n_a, spec.levels_a),
                                         fock::fock_state(Factor::B, n_b, spec.levels_b));
    const auto rho = dynamics::evolve(rho0, dynamics::propagator(dynamics::build_hamiltonian(params, spec), t));

    SupportAudit audit;
    audit.threshold = n_a + n_b;
    for (std::size_t i = 0; i < spec.levels_a; ++i)
        for (std::size_t j = 0; j < spec.levels_b; ++j) {
            const auto k = static_cast<Eigen::Index>(spec.index(i, j));
            const double p = rho.matrix()(k, k).real();
            if (i > audit.threshold) audit.mass_a_above += p;
            if (j > audit.threshold) audit.mass_b_above += p;
            if (i + j > audit.threshold) audit.mass_total_above += p;
            audit.mean_n_a += p * static_cast<double>(i);
            audit.mean_n_b += p * static_cast<double>(j);
        }
    return audit;
}

double jc_rotation(const ModelParams& params) {
    params.validate();
    if (params.coupling != dynamics::Coupling::JaynesCummings) {
        throw InvalidArgument("jc_rotation: requires Jaynes-Cummings coupling");
    }
    if (params.g == 0.0) return 0.0;
    if (params.omega_a == params.omega_b) return std::numbers::pi / 4.0;
    return 0.5 * std::atan(2.0 * params.g / (params.omega_a - params.omega_b));
}

double jc_cross_term(const ModelParams& params, double psi) {
    return 0.5 * std::sin(2.0 * psi) * (params.omega_b - params.omega_a) + params.g * std::cos(2.0 * psi);
}

}  // namespace qratchet::bogoliubov
