// ratchet.hpp: Repeated encounters with marginalization between contacts
//
// One encounter: rho = rho_a ⊗ rho_b, evolve for the contact time, then keep only
// Tr_B rho(t) and Tr_A rho(t) for the next encounter. Chain mode feeds one pair back into
// itself; ensemble mode keeps a pool of each and re-pairs them with a random matching
// every round.

#pragma once

#include "qratchet/dynamics.hpp"
#include "qratchet/fit.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace qratchet::ratchet {

using dynamics::ModelParams;
using fock::DensityMatrix;
using fock::SpaceSpec;

struct FockInit {
    std::size_t n{0};
};
struct CoherentInit {
    std::complex<double> z{};
};
using InitialState = std::variant<FockInit, CoherentInit>;

DensityMatrix prepare(fock::Factor f, const InitialState& init, std::size_t levels);

struct ChainMode {};
struct EnsembleMode {
    std::size_t pool_size{2};
    std::uint64_t seed{0};
};
using Mode = std::variant<ChainMode, EnsembleMode>;

struct ProtocolSpec {
    ModelParams params{};
    SpaceSpec spec{};
    double contact_time{4.0};
    std::size_t n_encounters{25};
    Mode mode{ChainMode{}};
    InitialState initial_a{FockInit{2}};
    InitialState initial_b{FockInit{1}};
    dynamics::TruncationGuard guard{};
    fock::Tolerances tolerances{};
    // Worker threads for ensemble rounds; results do not depend on it.
    unsigned threads{1};

    // Also runs the spin-boson stability check (UnstableCoupling).
    void validate() const;

    // w_a=1, w_b=2, g=0.2, t=4, |2>|1>, 21 levels, 25 encounters
    static ProtocolSpec fig1();
    // fig1 with w_b=3, g=0.5, t=15; needs more levels than fig1 (see README)
    static ProtocolSpec fig2b();
};

struct EncounterRecord {
    std::size_t index{0};  // 1-based
    double mean_n_a{0.0};
    double mean_n_b{0.0};
    double free_energy{0.0};         // <w_a a†a + w_b b†b> after contact
    double interaction_energy{0.0};  // <V> on the product state at encounter start
    double purity_a{0.0};
    double purity_b{0.0};
    std::vector<double> dist_a;
    std::vector<double> dist_b;
    double tail_mass{0.0};
    bool truncation_warning{false};

    // Energy bookkeeping. <H> is conserved during contact; the jump happens when
    // rho(t) is replaced by the product of its marginals.
    double energy_start{0.0};        // <H> on rho_a ⊗ rho_b entering the contact
    double energy_contact_end{0.0};  // <H> on rho(t)
    double energy_reproduct{0.0};    // <H> on rho_a(t) ⊗ rho_b(t)
    double delta_free{0.0};          // Tr[Δrho H0], Δrho = rho_a(t) ⊗ rho_b(t) - rho(t)
    double delta_interaction{0.0};   // Tr[Δrho V]
};

// Operators reused across encounters.
struct Observables {
    fock::Operator free;
    fock::Operator coupling;
    fock::Operator hamiltonian;

    static Observables make(const ModelParams& params, const SpaceSpec& spec);
};

struct EncounterResult {
    DensityMatrix rho_a;
    DensityMatrix rho_b;
    EncounterRecord record;
};

EncounterResult run_encounter(const DensityMatrix& rho_a, const DensityMatrix& rho_b, const dynamics::Propagator& u,
                              const Observables& obs, const dynamics::TruncationGuard& guard = {},
                              const fock::Tolerances& tol = {});

// Called with each record as soon as it is produced, so partial results survive a
// TruncationOverflow thrown later in the run.
using RecordSink = std::function<void(const EncounterRecord&)>;

// Deterministic. Throws TruncationOverflow carrying the 1-based encounter index.
std::vector<EncounterRecord> run_chain(const ProtocolSpec& protocol, const RecordSink& sink = {});

// One record per round, averaged over the pool (truncation_warning is "any").
// Reproducible from the seed for any thread count.
std::vector<EncounterRecord> run_ensemble(const ProtocolSpec& protocol, const RecordSink& sink = {});

// Dispatches on protocol.mode.
std::vector<EncounterRecord> run(const ProtocolSpec& protocol, const RecordSink& sink = {});

// Uniform random permutation for one round: B-partner of A-slot i.
std::vector<std::size_t> random_matching(std::size_t pool_size, std::uint64_t seed, std::uint64_t round);

// Half-open index range [first, last).
struct FitRange {
    std::size_t first{0};
    std::size_t last{0};
};

// Drops n = 0, 1 and the top quarter of levels.
FitRange default_fit_range(std::size_t levels);

// Least-squares line through (n, log P(n)) over the range.
LineFit fit_exponential(std::span<const double> dist, FitRange range);

struct GrowthFit {
    LineFit n_a;
    LineFit n_b;
};

// <n> against encounter index, skipping the first `transient` encounters.
GrowthFit fit_linear_growth(std::span<const EncounterRecord> records, std::size_t transient = 5);

}  // namespace qratchet::ratchet
