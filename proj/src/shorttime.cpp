// shorttime.cpp

#include "qratchet/shorttime.hpp"

#include "qratchet/dynamics.hpp"
#include "qratchet/errors.hpp"

#include <cmath>
#include <limits>

namespace qratchet::shorttime {

using fock::Factor;

namespace {

double variance(const DensityMatrix& rho, const Operator& v) {
    const double mean = fock::expectation(rho, v).real();
    return fock::expectation(rho, v * v).real() - mean * mean;
}

}  // namespace

void BipartiteFactors::validate(double tol) const {
    if (h_a.factor() != Factor::A || v_a.factor() != Factor::A || rho_a.factor() != Factor::A) {
        throw SpaceMismatch("BipartiteFactors: h_a, v_a, rho_a must live on A");
    }
    if (h_b.factor() != Factor::B || v_b.factor() != Factor::B || rho_b.factor() != Factor::B) {
        throw SpaceMismatch("BipartiteFactors: h_b, v_b, rho_b must live on B");
    }
    if (h_a.dim() != v_a.dim() || h_a.dim() != rho_a.dim() || h_b.dim() != v_b.dim() || h_b.dim() != rho_b.dim()) {
        throw SpaceMismatch("BipartiteFactors: operator and state dimensions differ within a factor");
    }
    for (const Operator* op : {&h_a, &v_a, &h_b, &v_b}) {
        if (op->hermiticity_error() > tol) throw InvalidArgument("BipartiteFactors: operator is not Hermitian");
    }
}

BipartiteFactors oscillator_factors(double omega_a, double omega_b, double g, DensityMatrix rho_a,
                                    DensityMatrix rho_b) {
    const std::size_t la = rho_a.dim();
    const std::size_t lb = rho_b.dim();
    const double root = std::sqrt(std::abs(g));
    const double sign = g < 0.0 ? -1.0 : 1.0;
    BipartiteFactors f{omega_a * fock::number(Factor::A, la),
                       root * fock::position(Factor::A, la, omega_a),
                       omega_b * fock::number(Factor::B, lb),
                       sign * root * fock::position(Factor::B, lb, omega_b),
                       std::move(rho_a),
                       std::move(rho_b)};
    f.validate();
    return f;
}

Operator double_commutator(const Operator& v, const Operator& h) {
    const Operator inner = h * v - v * h;
    return v * inner - inner * v;
}

DeltaH delta_h_direct(const BipartiteFactors& factors, double t) {
    factors.validate();
    if (t == 0.0) return {};
    const fock::SpaceSpec spec{factors.rho_a.dim(), factors.rho_b.dim()};
    const Operator free = fock::embed(factors.h_a, spec) + fock::embed(factors.h_b, spec);
    const Operator coupling = fock::tensor(factors.v_a, factors.v_b);
    const Operator h = free + coupling;

    const DensityMatrix rho0 = fock::tensor_state(factors.rho_a, factors.rho_b);
    const DensityMatrix rho_t = dynamics::evolve(rho0, dynamics::propagator(h, t));
    const DensityMatrix product =
        fock::tensor_state(fock::partial_trace(rho_t, Factor::A), fock::partial_trace(rho_t, Factor::B));

    auto delta = [&](const Operator& op) {
        return fock::expectation(product, op).real() - fock::expectation(rho_t, op).real();
    };
    DeltaH out{delta(h), delta(coupling), delta(free)};
    const double scale = 1.0 + std::abs(fock::expectation(rho_t, h).real());
    if (std::abs(out.total - out.coupling) > 1e-10 * scale) {
        throw InvariantViolation("delta_h_direct: Tr[Δrho H] = " + std::to_string(out.total) +
                                 " but Tr[Δrho V_A⊗V_B] = " + std::to_string(out.coupling));
    }
    return out;
}

double delta_h_series(const BipartiteFactors& factors) {
    factors.validate();
    const double var_a = variance(factors.rho_a, factors.v_a);
    const double var_b = variance(factors.rho_b, factors.v_b);
    const double curv_a = fock::expectation(factors.rho_a, double_commutator(factors.v_a, factors.h_a)).real();
    const double curv_b = fock::expectation(factors.rho_b, double_commutator(factors.v_b, factors.h_b)).real();
    return 0.5 * (var_a * curv_b + var_b * curv_a);
}

std::vector<double> default_t_grid() { return {1e-3, 3e-3, 1e-2}; }

SeriesComparison series_vs_direct(const BipartiteFactors& factors, std::span<const double> t_grid) {
    SeriesComparison out;
    out.c2_series = delta_h_series(factors);
    Eigen::MatrixXd design(0, 2);
    Eigen::VectorXd rhs(0);
    for (double t : t_grid) {
        SeriesRow row;
        row.t = t;
        row.direct = t == 0.0 ? 0.0 : delta_h_direct(factors, t).total;
        row.series = out.c2_series * t * t;
        row.ratio = row.series != 0.0 ? row.direct / row.series : std::numeric_limits<double>::quiet_NaN();
        out.rows.push_back(row);
        if (t != 0.0) {
            design.conservativeResize(design.rows() + 1, Eigen::NoChange);
            rhs.conservativeResize(rhs.size() + 1);
            design.row(design.rows() - 1) << t * t, t * t * t;
            rhs(rhs.size() - 1) = row.direct;
        }
    }
    if (design.rows() >= 2) {
        // Unit-norm columns; otherwise the t³ column looks rank-deficient to the pivoting QR.
        const Eigen::Vector2d scale = design.colwise().norm().transpose();
        const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
        const Eigen::Vector2d coef = scaled.colPivHouseholderQr().solve(rhs).cwiseQuotient(scale);
        out.c2_fitted = coef(0);
        out.c3_fitted = coef(1);
    } else if (design.rows() == 1) {
        out.c2_fitted = rhs(0) / design(0, 0);
    }
    return out;
}

double richardson_remainder(const BipartiteFactors& factors, double t) {
    return (delta_h_direct(factors, 2.0 * t).total - 4.0 * delta_h_direct(factors, t).total) / (t * t * t);
}

}  // namespace qratchet::shorttime
