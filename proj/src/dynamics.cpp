// dynamics.cpp: Hamiltonian builders, propagators, truncation guard

#include "qratchet/dynamics.hpp"

#include "qratchet/errors.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

namespace qratchet::dynamics {

using fock::Factor;
using fock::Matrix;

std::string to_string(Coupling c) { return c == Coupling::SpinBoson ? "sb" : "jc"; }

void ModelParams::validate() const {
    if (!(omega_a > 0.0) || !std::isfinite(omega_a)) throw InvalidArgument("omega_a must be positive and finite");
    if (!(omega_b > 0.0) || !std::isfinite(omega_b)) throw InvalidArgument("omega_b must be positive and finite");
    if (!std::isfinite(g)) throw InvalidArgument("g must be finite");
}

double Propagator::unitarity_error() const {
    const Matrix& u = unitary.matrix();
    return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

Operator free_hamiltonian(const ModelParams& params, const SpaceSpec& spec) {
    params.validate();
    spec.validate();
    return params.omega_a * fock::embed(fock::number(Factor::A, spec.levels_a), spec) +
           params.omega_b * fock::embed(fock::number(Factor::B, spec.levels_b), spec);
}

Operator interaction(const ModelParams& params, const SpaceSpec& spec) {
    params.validate();
    spec.validate();
    const Operator a = fock::annihilation(Factor::A, spec.levels_a);
    const Operator b = fock::annihilation(Factor::B, spec.levels_b);
    if (params.coupling == Coupling::SpinBoson) {
        return params.g * fock::tensor(a + a.adjoint(), b + b.adjoint());
    }
    return params.g * (fock::tensor(a.adjoint(), b) + fock::tensor(a, b.adjoint()));
}

Operator build_hamiltonian(const ModelParams& params, const SpaceSpec& spec) {
    return free_hamiltonian(params, spec) + interaction(params, spec);
}

Operator total_number(const SpaceSpec& spec) {
    return fock::embed(fock::number(Factor::A, spec.levels_a), spec) +
           fock::embed(fock::number(Factor::B, spec.levels_b), spec);
}

Propagator propagator(const Operator& hamiltonian, double t) {
    const Matrix& h = hamiltonian.matrix();
    const double herm = hamiltonian.hermiticity_error();
    if (herm > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
        throw InvalidArgument("propagator: Hamiltonian is not Hermitian (error " + std::to_string(herm) + ")");
    }
    const Eigen::Index n = h.rows();
    if (t == 0.0) return {Operator(hamiltonian.shape(), Matrix::Identity(n, n)), t};
    Matrix u;
    if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.real());
        if (solver.info() != Eigen::Success) throw InvalidArgument("propagator: eigendecomposition failed");
        const Eigen::MatrixXd& v = solver.eigenvectors();
        Eigen::VectorXcd phases(n);
        for (Eigen::Index k = 0; k < n; ++k) phases(k) = std::polar(1.0, -solver.eigenvalues()(k) * t);
        const Matrix vc = v.cast<fock::Complex>();
        u = (vc * phases.asDiagonal()) * vc.transpose();
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
        if (solver.info() != Eigen::Success) throw InvalidArgument("propagator: eigendecomposition failed");
        const Matrix& v = solver.eigenvectors();
        Eigen::VectorXcd phases(n);
        for (Eigen::Index k = 0; k < n; ++k) phases(k) = std::polar(1.0, -solver.eigenvalues()(k) * t);
        u = (v * phases.asDiagonal()) * v.adjoint();
    }
    return {Operator(hamiltonian.shape(), std::move(u)), t};
}

DensityMatrix evolve(const DensityMatrix& rho, const Propagator& u, const fock::Tolerances& tol) {
    if (!(rho.shape() == u.unitary.shape())) {
        throw SpaceMismatch("evolve: state and propagator live on different spaces");
    }
    Matrix out;
    out.noalias() = u.unitary.matrix() * rho.matrix();
    Matrix result;
    result.noalias() = out * u.unitary.matrix().adjoint();
    return DensityMatrix::normalized(rho.shape(), std::move(result), tol);
}

TailReport TruncationGuard::check(const DensityMatrix& rho_a, const DensityMatrix& rho_b) const {
    TailReport report;
    const auto top_a = static_cast<Eigen::Index>(rho_a.dim() - 1);
    const auto top_b = static_cast<Eigen::Index>(rho_b.dim() - 1);
    report.top_a = std::max(0.0, rho_a.matrix()(top_a, top_a).real());
    report.top_b = std::max(0.0, rho_b.matrix()(top_b, top_b).real());
    if (report.mass() > hard) {
        std::ostringstream msg;
        msg << "population " << report.mass() << " on the top Fock level exceeds " << hard
            << "; raise the cutoff";
        throw TruncationOverflow(msg.str(), report.mass());
    }
    report.warned = report.mass() > warn;
    return report;
}

std::shared_ptr<const Propagator> PropagatorCache::get(const ModelParams& params, const SpaceSpec& spec, double t) {
    const Key key{params.omega_a, params.omega_b, params.g, static_cast<int>(params.coupling),
                  spec.levels_a, spec.levels_b, t};
    {
        std::shared_lock lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    auto built = std::make_shared<const Propagator>(propagator(build_hamiltonian(params, spec), t));
    std::unique_lock lock(mutex_);
    return entries_.emplace(key, std::move(built)).first->second;
}

std::size_t PropagatorCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

}  // namespace qratchet::dynamics
