// Shared generators and helpers for the unit tests.

#pragma once

#include "qratchet/fock.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace testing_support {

using namespace qratchet;

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }

    fock::Matrix complex_matrix(Eigen::Index n) {
        fock::Matrix m(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {normal(), normal()};
        return m;
    }

    // Full-rank random state G G† / Tr.
    fock::DensityMatrix density(fock::Shape shape) {
        const auto g = complex_matrix(static_cast<Eigen::Index>(shape.dim()));
        fock::Matrix rho = g * g.adjoint();
        rho /= rho.trace().real();
        rho = 0.5 * (rho + rho.adjoint());
        return fock::DensityMatrix::from_matrix(shape, rho);
    }

    fock::DensityMatrix density(fock::Factor f, std::size_t levels) {
        return density(fock::Shape::single(f, levels));
    }

    // Random state whose weight sits on low levels, so truncation effects stay tiny.
    fock::DensityMatrix low_density(fock::Factor f, std::size_t levels, std::size_t support) {
        fock::Matrix g = fock::Matrix::Zero(static_cast<Eigen::Index>(levels), static_cast<Eigen::Index>(levels));
        const auto s = static_cast<Eigen::Index>(support);
        g.topLeftCorner(s, s) = complex_matrix(s);
        fock::Matrix rho = g * g.adjoint();
        rho /= rho.trace().real();
        rho = 0.5 * (rho + rho.adjoint());
        return fock::DensityMatrix::from_matrix(fock::Shape::single(f, levels), rho);
    }
};

inline double max_abs(const fock::Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing_support
