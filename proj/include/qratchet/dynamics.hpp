// dynamics.hpp: Coupled-oscillator Hamiltonians and exact evolution over one contact
//
//   H = omega_a a†a + omega_b b†b + V
//   V_SB = g (a† + a)(b† + b)        (spin-boson, has counter-rotating terms)
//   V_JC = g (a† b + b† a)           (Jaynes-Cummings, conserves a†a + b†b)
//
// The coupling is a square pulse: g is on for the contact duration and off otherwise.

#pragma once

#include "qratchet/fock.hpp"

#include <map>
#include <memory>
#include <shared_mutex>
#include <tuple>

namespace qratchet::dynamics {

using fock::DensityMatrix;
using fock::Operator;
using fock::SpaceSpec;

enum class Coupling { SpinBoson, JaynesCummings };

std::string to_string(Coupling c);

struct ModelParams {
    double omega_a{1.0};
    double omega_b{2.0};
    double g{0.2};
    Coupling coupling{Coupling::SpinBoson};

    // Frequencies must be positive and finite. The SB stability condition lives in
    // bogoliubov::sb_normal_modes.
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// exp(-i H t) on AB.
struct Propagator {
    Operator unitary;
    double t{0.0};

    double unitarity_error() const;
};

Operator free_hamiltonian(const ModelParams& params, const SpaceSpec& spec);
Operator interaction(const ModelParams& params, const SpaceSpec& spec);
Operator build_hamiltonian(const ModelParams& params, const SpaceSpec& spec);
// a†a + b†b
Operator total_number(const SpaceSpec& spec);

// Eigendecomposition route. Real symmetric H (both couplings here) goes through the
// real solver, which is several times faster at the sizes we use.
Propagator propagator(const Operator& hamiltonian, double t);

DensityMatrix evolve(const DensityMatrix& rho, const Propagator& u, const fock::Tolerances& tol = {});

// Population sitting on the top Fock level of each marginal.
struct TailReport {
    double top_a{0.0};
    double top_b{0.0};
    double mass() const { return top_a + top_b; }
    bool warned{false};
};

struct TruncationGuard {
    double warn{1e-6};
    double hard{1e-3};

    // Throws TruncationOverflow when the combined top-level population exceeds `hard`;
    // flags a warning above `warn`.
    TailReport check(const DensityMatrix& rho_a, const DensityMatrix& rho_b) const;
};

// Thread-safe memo of propagators keyed by (params, spec, t). Lookups take a shared
// lock; the expensive build happens outside any lock and the first insert wins.
class PropagatorCache {
public:
    std::shared_ptr<const Propagator> get(const ModelParams& params, const SpaceSpec& spec, double t);
    std::size_t size() const;

private:
    using Key = std::tuple<double, double, double, int, std::size_t, std::size_t, double>;
    mutable std::shared_mutex mutex_;
    std::map<Key, std::shared_ptr<const Propagator>> entries_;
};

}  // namespace qratchet::dynamics
