// shorttime.hpp: Energy injected by marginalization at short contact times
//
// For H = H_A + H_B + V_A ⊗ V_B and a product initial state, the energy change caused by
// replacing rho(t) with rho_A(t) ⊗ rho_B(t) is
//
//   ΔH = Tr[Δrho H] = Tr[Δrho (V_A ⊗ V_B)]
//      = t²/2 { Var_A(V_A) <[V_B,[H_B,V_B]]>_B + Var_B(V_B) <[V_A,[H_A,V_A]]>_A } + O(t³).
//
// delta_h_direct evaluates the left side by exact evolution; delta_h_series evaluates the
// t² coefficient from single-factor expectations only.

#pragma once

#include "qratchet/fock.hpp"

#include <span>
#include <vector>

namespace qratchet::shorttime {

using fock::DensityMatrix;
using fock::Operator;

struct BipartiteFactors {
    Operator h_a;
    Operator v_a;
    Operator h_b;
    Operator v_b;
    DensityMatrix rho_a;
    DensityMatrix rho_b;

    // Factors on the right sides, matching dimensions, Hermitian operators.
    void validate(double tol = 1e-10) const;
};

// Oscillators with H = w n (per factor) and coupling g x_A x_B, split as
// V_A = sqrt|g| x_A, V_B = sign(g) sqrt|g| x_B.
BipartiteFactors oscillator_factors(double omega_a, double omega_b, double g, DensityMatrix rho_a,
                                    DensityMatrix rho_b);

struct DeltaH {
    double total{0.0};     // Tr[Δrho H]
    double coupling{0.0};  // Tr[Δrho (V_A ⊗ V_B)]
    double free{0.0};      // Tr[Δrho (H_A + H_B)], zero up to round-off
};

// Throws InvariantViolation if total and coupling disagree by more than 1e-10 (1 + |<H>|).
DeltaH delta_h_direct(const BipartiteFactors& factors, double t);

// Quadratic coefficient c2 with ΔH = c2 t² + O(t³).
double delta_h_series(const BipartiteFactors& factors);

// [V, [H, V]]
Operator double_commutator(const Operator& v, const Operator& h);

struct SeriesRow {
    double t{0.0};
    double direct{0.0};
    double series{0.0};  // c2 t²
    double ratio{0.0};   // direct / series; NaN when series is zero
};

struct SeriesComparison {
    std::vector<SeriesRow> rows;
    double c2_series{0.0};
    // Least-squares fit direct(t) = c2 t² + c3 t³ over the nonzero grid points.
    double c2_fitted{0.0};
    double c3_fitted{0.0};
};

std::vector<double> default_t_grid();

SeriesComparison series_vs_direct(const BipartiteFactors& factors, std::span<const double> t_grid);

// (direct(2t) - 4 direct(t)) / t³; bounded as t -> 0 iff the remainder is O(t³).
double richardson_remainder(const BipartiteFactors& factors, double t);

}  // namespace qratchet::shorttime
