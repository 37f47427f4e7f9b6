// fock.hpp: Truncated Fock-space linear algebra for a pair of oscillators A and B
//
// Composite basis ordering is A-major: |n_a, n_b> sits at index n_a * levels_b + n_b.
// Every object carries the factor it lives on so that mixing A, B and AB operands is
// caught at the call site instead of producing a silently wrong matrix product.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace qratchet::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

enum class Factor { A, B, AB };

std::string to_string(Factor f);

// Retained levels per oscillator (cutoff + 1).
struct SpaceSpec {
    std::size_t levels_a{21};
    std::size_t levels_b{21};

    // Throws InvalidArgument unless both counts are >= 2.
    void validate() const;

    std::size_t dim() const { return levels_a * levels_b; }
    std::size_t levels(Factor f) const;
    std::size_t index(std::size_t n_a, std::size_t n_b) const { return n_a * levels_b + n_b; }

    friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;
};

// Validation thresholds applied to density matrices.
struct Tolerances {
    double hermiticity{1e-10};
    double trace{1e-10};
    double eigenvalue_floor{-1e-8};
};

// Shape of a factor: a single-oscillator object on A is stored as A ⊗ (1-dim),
// so the same (levels_a, levels_b) pair describes all three cases.
struct Shape {
    Factor factor{Factor::AB};
    SpaceSpec levels{};

    static Shape single(Factor f, std::size_t levels);
    static Shape bipartite(const SpaceSpec& spec) { return {Factor::AB, spec}; }

    std::size_t dim() const { return levels.dim(); }
    friend bool operator==(const Shape&, const Shape&) = default;
};

class Operator {
public:
    Operator(Shape shape, Matrix matrix);

    Factor factor() const { return shape_.factor; }
    const Shape& shape() const { return shape_; }
    const Matrix& matrix() const { return matrix_; }
    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

    Operator adjoint() const { return {shape_, matrix_.adjoint()}; }
    double hermiticity_error() const;

    Operator operator+(const Operator& rhs) const;
    Operator operator-(const Operator& rhs) const;
    Operator operator*(const Operator& rhs) const;
    Operator operator-() const { return {shape_, -matrix_}; }
    friend Operator operator*(Complex s, const Operator& op) { return {op.shape_, s * op.matrix_}; }
    friend Operator operator*(double s, const Operator& op) { return {op.shape_, s * op.matrix_}; }

private:
    Shape shape_;
    Matrix matrix_;
};

class DensityMatrix {
public:
    // Full validation: Hermiticity, unit trace, eigenvalue floor.
    static DensityMatrix from_matrix(Shape shape, Matrix matrix, const Tolerances& tol = {});

    // Output path for evolution and reduction. Checks that Hermiticity and trace drift
    // are inside tolerance, then re-Hermitizes and renormalizes the trace. Negative
    // eigenvalues are not touched; call check_positive() where that matters.
    static DensityMatrix normalized(Shape shape, Matrix matrix, const Tolerances& tol = {});

    Factor factor() const { return shape_.factor; }
    const Shape& shape() const { return shape_; }
    const Matrix& matrix() const { return matrix_; }
    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

    double min_eigenvalue() const;
    // Throws InvalidState when the smallest eigenvalue is below tol.eigenvalue_floor.
    void check_positive(const Tolerances& tol = {}) const;

private:
    DensityMatrix(Shape shape, Matrix matrix) : shape_(shape), matrix_(std::move(matrix)) {}

    Shape shape_;
    Matrix matrix_;
};

// Ladder and quadrature operators on a single factor.
Operator annihilation(Factor f, std::size_t levels);
Operator creation(Factor f, std::size_t levels);
Operator number(Factor f, std::size_t levels);
Operator identity(Factor f, std::size_t levels);
// x = (a + a†)/sqrt(2 omega), unit mass.
Operator position(Factor f, std::size_t levels, double omega);
// p = i sqrt(omega/2) (a† - a)
Operator momentum(Factor f, std::size_t levels, double omega);

// op ⊗ I (op on A) or I ⊗ op (op on B).
Operator embed(const Operator& op, const SpaceSpec& spec);
// X_A ⊗ Y_B
Operator tensor(const Operator& on_a, const Operator& on_b);

DensityMatrix tensor_state(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                           const std::optional<SpaceSpec>& expected = std::nullopt);
DensityMatrix partial_trace(const DensityMatrix& rho, Factor keep, const Tolerances& tol = {});

DensityMatrix fock_state(Factor f, std::size_t n, std::size_t levels);
// Truncated, renormalized coherent state. Throws TruncationOverflow when the Poisson
// mass beyond the cutoff exceeds max_tail.
DensityMatrix coherent_state(Factor f, Complex z, std::size_t levels, double max_tail = 1e-10);
// 1 - sum_{n<levels} e^{-|z|^2} |z|^{2n} / n!
double coherent_tail_mass(Complex z, std::size_t levels);

Complex expectation(const DensityMatrix& rho, const Operator& op);
double purity(const DensityMatrix& rho);
std::vector<double> number_distribution(const DensityMatrix& rho);

// Largest |m_ij| with i != j.
double max_offdiagonal(const Matrix& m);

}  // namespace qratchet::fock
