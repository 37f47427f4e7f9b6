// fock.cpp: Truncated Fock-space operators, states and reductions

#include "qratchet/fock.hpp"

#include "qratchet/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace qratchet::fock {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_levels(std::size_t levels, const char* where) {
    if (levels < 2) {
        throw InvalidArgument(std::string(where) + ": need at least 2 levels, got " +
                              std::to_string(levels));
    }
}

void require_same_shape(const Shape& lhs, const Shape& rhs, const char* where) {
    if (!(lhs == rhs)) {
        throw SpaceMismatch(std::string(where) + ": operands live on " + to_string(lhs.factor) + "(" +
                            std::to_string(lhs.dim()) + ") and " + to_string(rhs.factor) + "(" +
                            std::to_string(rhs.dim()) + ")");
    }
}

double hermiticity_error_of(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace

std::string to_string(Factor f) {
    switch (f) {
        case Factor::A: return "A";
        case Factor::B: return "B";
        case Factor::AB: return "AB";
    }
    return "?";
}

void SpaceSpec::validate() const {
    if (levels_a < 2 || levels_b < 2) {
        throw InvalidArgument("SpaceSpec: levels_a and levels_b must be >= 2 (got " +
                              std::to_string(levels_a) + ", " + std::to_string(levels_b) + ")");
    }
}

std::size_t SpaceSpec::levels(Factor f) const {
    switch (f) {
        case Factor::A: return levels_a;
        case Factor::B: return levels_b;
        case Factor::AB: return dim();
    }
    return 0;
}

Shape Shape::single(Factor f, std::size_t levels) {
    switch (f) {
        case Factor::A: return {Factor::A, {levels, 1}};
        case Factor::B: return {Factor::B, {1, levels}};
        case Factor::AB: break;
    }
    throw InvalidArgument("Shape::single: factor must be A or B");
}

// ------------------------------------------------------------------ Operator

Operator::Operator(Shape shape, Matrix matrix) : shape_(shape), matrix_(std::move(matrix)) {
    const auto d = idx(shape_.dim());
    if (matrix_.rows() != d || matrix_.cols() != d) {
        throw SpaceMismatch("Operator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                            std::to_string(matrix_.cols()) + ", factor " + to_string(shape_.factor) +
                            " needs dimension " + std::to_string(d));
    }
}

double Operator::hermiticity_error() const { return hermiticity_error_of(matrix_); }

Operator Operator::operator+(const Operator& rhs) const {
    require_same_shape(shape_, rhs.shape_, "Operator::operator+");
    return {shape_, matrix_ + rhs.matrix_};
}

Operator Operator::operator-(const Operator& rhs) const {
    require_same_shape(shape_, rhs.shape_, "Operator::operator-");
    return {shape_, matrix_ - rhs.matrix_};
}

Operator Operator::operator*(const Operator& rhs) const {
    require_same_shape(shape_, rhs.shape_, "Operator::operator*");
    return {shape_, matrix_ * rhs.matrix_};
}

// ------------------------------------------------------------- DensityMatrix

DensityMatrix DensityMatrix::from_matrix(Shape shape, Matrix matrix, const Tolerances& tol) {
    const auto d = idx(shape.dim());
    if (matrix.rows() != d || matrix.cols() != d) {
        throw SpaceMismatch("DensityMatrix: matrix size does not match factor " + to_string(shape.factor));
    }
    const double herm = hermiticity_error_of(matrix);
    if (herm > tol.hermiticity) {
        throw InvalidState("DensityMatrix: not Hermitian (max |rho - rho^dagger| = " + std::to_string(herm) + ")");
    }
    const double tr_err = std::abs(matrix.trace() - Complex(1.0, 0.0));
    if (tr_err > tol.trace) {
        throw InvalidState("DensityMatrix: trace differs from 1 by " + std::to_string(tr_err));
    }
    DensityMatrix rho(shape, std::move(matrix));
    rho.check_positive(tol);
    return rho;
}

DensityMatrix DensityMatrix::normalized(Shape shape, Matrix matrix, const Tolerances& tol) {
    const auto d = idx(shape.dim());
    if (matrix.rows() != d || matrix.cols() != d) {
        throw SpaceMismatch("DensityMatrix: matrix size does not match factor " + to_string(shape.factor));
    }
    const double herm = hermiticity_error_of(matrix);
    if (herm > tol.hermiticity) {
        throw InvalidState("DensityMatrix: Hermiticity drift " + std::to_string(herm) + " exceeds tolerance");
    }
    const Complex tr = matrix.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > tol.trace) {
        throw InvalidState("DensityMatrix: trace drift " + std::to_string(std::abs(tr - 1.0)) +
                           " exceeds tolerance");
    }
    Matrix repaired = (matrix + matrix.adjoint()) * 0.5;
    repaired /= repaired.trace().real();
    return {shape, std::move(repaired)};
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw InvalidState("DensityMatrix: eigenvalue computation failed");
    }
    return solver.eigenvalues().minCoeff();
}

void DensityMatrix::check_positive(const Tolerances& tol) const {
    const double lowest = min_eigenvalue();
    if (lowest < tol.eigenvalue_floor) {
        throw InvalidState("DensityMatrix: eigenvalue " + std::to_string(lowest) + " below floor " +
                           std::to_string(tol.eigenvalue_floor));
    }
}

// ----------------------------------------------------------------- Operators

Operator annihilation(Factor f, std::size_t levels) {
    require_levels(levels, "annihilation");
    Matrix m = Matrix::Zero(idx(levels), idx(levels));
    for (std::size_t n = 1; n < levels; ++n) {
        m(idx(n - 1), idx(n)) = std::sqrt(static_cast<double>(n));
    }
    return {Shape::single(f, levels), std::move(m)};
}

Operator creation(Factor f, std::size_t levels) { return annihilation(f, levels).adjoint(); }

Operator number(Factor f, std::size_t levels) {
    require_levels(levels, "number");
    Matrix m = Matrix::Zero(idx(levels), idx(levels));
    for (std::size_t n = 0; n < levels; ++n) {
        m(idx(n), idx(n)) = static_cast<double>(n);
    }
    return {Shape::single(f, levels), std::move(m)};
}

Operator identity(Factor f, std::size_t levels) {
    require_levels(levels, "identity");
    return {Shape::single(f, levels), Matrix::Identity(idx(levels), idx(levels))};
}

Operator position(Factor f, std::size_t levels, double omega) {
    if (!(omega > 0.0)) throw InvalidArgument("position: omega must be > 0");
    const Operator a = annihilation(f, levels);
    return (1.0 / std::sqrt(2.0 * omega)) * (a + a.adjoint());
}

Operator momentum(Factor f, std::size_t levels, double omega) {
    if (!(omega > 0.0)) throw InvalidArgument("momentum: omega must be > 0");
    const Operator a = annihilation(f, levels);
    return Complex(0.0, std::sqrt(omega / 2.0)) * (a.adjoint() - a);
}

Operator embed(const Operator& op, const SpaceSpec& spec) {
    spec.validate();
    const std::size_t d = op.dim();
    switch (op.factor()) {
        case Factor::A:
            if (d != spec.levels_a) throw SpaceMismatch("embed: operator on A has dimension " + std::to_string(d));
            return {Shape::bipartite(spec),
                    Eigen::kroneckerProduct(op.matrix(), Matrix::Identity(idx(spec.levels_b), idx(spec.levels_b)))};
        case Factor::B:
            if (d != spec.levels_b) throw SpaceMismatch("embed: operator on B has dimension " + std::to_string(d));
            return {Shape::bipartite(spec),
                    Eigen::kroneckerProduct(Matrix::Identity(idx(spec.levels_a), idx(spec.levels_a)), op.matrix())};
        case Factor::AB: break;
    }
    throw SpaceMismatch("embed: operator already lives on AB");
}

Operator tensor(const Operator& on_a, const Operator& on_b) {
    if (on_a.factor() != Factor::A || on_b.factor() != Factor::B) {
        throw SpaceMismatch("tensor: expected an operator on A and an operator on B");
    }
    const SpaceSpec spec{on_a.dim(), on_b.dim()};
    return {Shape::bipartite(spec), Eigen::kroneckerProduct(on_a.matrix(), on_b.matrix())};
}

// -------------------------------------------------------------------- States

DensityMatrix tensor_state(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                           const std::optional<SpaceSpec>& expected) {
    if (rho_a.factor() != Factor::A || rho_b.factor() != Factor::B) {
        throw SpaceMismatch("tensor_state: expected a state on A and a state on B");
    }
    const SpaceSpec spec{rho_a.dim(), rho_b.dim()};
    if (expected && !(*expected == spec)) {
        throw SpaceMismatch("tensor_state: marginals have " + std::to_string(spec.levels_a) + "x" +
                            std::to_string(spec.levels_b) + " levels, expected " +
                            std::to_string(expected->levels_a) + "x" + std::to_string(expected->levels_b));
    }
    Matrix product = Eigen::kroneckerProduct(rho_a.matrix(), rho_b.matrix());
    return DensityMatrix::normalized(Shape::bipartite(spec), std::move(product));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Factor keep, const Tolerances& tol) {
    if (rho.factor() != Factor::AB) throw SpaceMismatch("partial_trace: input must live on AB");
    const SpaceSpec spec = rho.shape().levels;
    const Matrix& m = rho.matrix();
    const auto la = idx(spec.levels_a);
    const auto lb = idx(spec.levels_b);

    if (keep == Factor::A) {
        Matrix out = Matrix::Zero(la, la);
        for (Eigen::Index i = 0; i < la; ++i)
            for (Eigen::Index k = 0; k < la; ++k) {
                Complex acc{};
                for (Eigen::Index j = 0; j < lb; ++j) acc += m(i * lb + j, k * lb + j);
                out(i, k) = acc;
            }
        return DensityMatrix::normalized(Shape::single(Factor::A, spec.levels_a), std::move(out), tol);
    }
    if (keep == Factor::B) {
        Matrix out = Matrix::Zero(lb, lb);
        for (Eigen::Index i = 0; i < la; ++i) out += m.block(i * lb, i * lb, lb, lb);
        return DensityMatrix::normalized(Shape::single(Factor::B, spec.levels_b), std::move(out), tol);
    }
    throw SpaceMismatch("partial_trace: keep must be A or B");
}

DensityMatrix fock_state(Factor f, std::size_t n, std::size_t levels) {
    require_levels(levels, "fock_state");
    if (n >= levels) {
        throw InvalidArgument("fock_state: n = " + std::to_string(n) + " outside 0.." + std::to_string(levels - 1));
    }
    Matrix m = Matrix::Zero(idx(levels), idx(levels));
    m(idx(n), idx(n)) = 1.0;
    return DensityMatrix::normalized(Shape::single(f, levels), std::move(m));
}

double coherent_tail_mass(Complex z, std::size_t levels) {
    // Sum the Poisson tail directly; 1 - (head sum) would lose everything below 1e-16.
    const double mean = std::norm(z);
    double term = std::exp(-mean);  // P(0)
    for (std::size_t n = 1; n <= levels; ++n) term *= mean / static_cast<double>(n);
    // term is now P(levels)
    double tail = 0.0;
    for (std::size_t n = levels + 1;; ++n) {
        tail += term;
        if (term == 0.0 || (static_cast<double>(n) > mean && term < tail * 1e-17)) break;
        term *= mean / static_cast<double>(n);
    }
    return tail;
}

DensityMatrix coherent_state(Factor f, Complex z, std::size_t levels, double max_tail) {
    require_levels(levels, "coherent_state");
    const double tail = coherent_tail_mass(z, levels);
    if (tail > max_tail) {
        throw TruncationOverflow("coherent_state: |z|^2 = " + std::to_string(std::norm(z)) + " leaves mass " +
                                     std::to_string(tail) + " above the cutoff of " + std::to_string(levels) +
                                     " levels",
                                 tail);
    }
    Eigen::VectorXcd psi(idx(levels));
    psi(0) = std::exp(-std::norm(z) / 2.0);
    for (std::size_t n = 1; n < levels; ++n) {
        psi(idx(n)) = psi(idx(n - 1)) * z / std::sqrt(static_cast<double>(n));
    }
    psi.normalize();
    return DensityMatrix::normalized(Shape::single(f, levels), psi * psi.adjoint());
}

// --------------------------------------------------------------- Observables

Complex expectation(const DensityMatrix& rho, const Operator& op) {
    require_same_shape(rho.shape(), op.shape(), "expectation");
    // Tr(rho op) = sum_ij rho_ij op_ji, without forming the product.
    return rho.matrix().transpose().cwiseProduct(op.matrix()).sum();
}

double purity(const DensityMatrix& rho) {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return rho.matrix().cwiseAbs2().sum();
}

std::vector<double> number_distribution(const DensityMatrix& rho) {
    if (rho.factor() == Factor::AB) throw SpaceMismatch("number_distribution: state must live on A or B");
    std::vector<double> dist(rho.dim());
    for (std::size_t n = 0; n < dist.size(); ++n) dist[n] = rho.matrix()(idx(n), idx(n)).real();
    return dist;
}

double max_offdiagonal(const Matrix& m) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (i != j) worst = std::max(worst, std::abs(m(i, j)));
    return worst;
}

}  // namespace qratchet::fock
