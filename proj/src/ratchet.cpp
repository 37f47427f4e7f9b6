// ratchet.cpp: Encounter protocol, chain and ensemble drivers, fits

#include "qratchet/ratchet.hpp"

#include "qratchet/bogoliubov.hpp"
#include "qratchet/errors.hpp"
#include "qratchet/random.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <optional>
#include <thread>

namespace qratchet::ratchet {

using fock::Factor;

namespace {

dynamics::PropagatorCache& propagator_cache() {
    static dynamics::PropagatorCache cache;
    return cache;
}

double mean_of(const std::vector<double>& dist) {
    double acc = 0.0;
    for (std::size_t n = 0; n < dist.size(); ++n) acc += static_cast<double>(n) * dist[n];
    return acc;
}

double real_expectation(const DensityMatrix& rho, const fock::Operator& op) { return fock::expectation(rho, op).real(); }

void accumulate(std::vector<double>& into, const std::vector<double>& from) {
    if (into.empty()) into.assign(from.size(), 0.0);
    for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
}

EncounterRecord pool_average(const std::vector<EncounterRecord>& pairs, std::size_t index) {
    EncounterRecord avg;
    avg.index = index;
    for (const auto& r : pairs) {
        avg.mean_n_a += r.mean_n_a;
        avg.mean_n_b += r.mean_n_b;
        avg.free_energy += r.free_energy;
        avg.interaction_energy += r.interaction_energy;
        avg.purity_a += r.purity_a;
        avg.purity_b += r.purity_b;
        accumulate(avg.dist_a, r.dist_a);
        accumulate(avg.dist_b, r.dist_b);
        avg.tail_mass += r.tail_mass;
        avg.truncation_warning = avg.truncation_warning || r.truncation_warning;
        avg.energy_start += r.energy_start;
        avg.energy_contact_end += r.energy_contact_end;
        avg.energy_reproduct += r.energy_reproduct;
        avg.delta_free += r.delta_free;
        avg.delta_interaction += r.delta_interaction;
    }
    const double n = static_cast<double>(pairs.size());
    for (double* field : {&avg.mean_n_a, &avg.mean_n_b, &avg.free_energy, &avg.interaction_energy, &avg.purity_a,
                          &avg.purity_b, &avg.tail_mass, &avg.energy_start, &avg.energy_contact_end,
                          &avg.energy_reproduct, &avg.delta_free, &avg.delta_interaction}) {
        *field /= n;
    }
    for (double& p : avg.dist_a) p /= n;
    for (double& p : avg.dist_b) p /= n;
    return avg;
}

[[noreturn]] void rethrow_at(const TruncationOverflow& e, std::size_t encounter) {
    throw TruncationOverflow("encounter " + std::to_string(encounter) + ": " + e.what(), e.tail_mass(), encounter);
}

}  // namespace

DensityMatrix prepare(Factor f, const InitialState& init, std::size_t levels) {
    if (const auto* fock_init = std::get_if<FockInit>(&init)) return fock::fock_state(f, fock_init->n, levels);
    return fock::coherent_state(f, std::get<CoherentInit>(init).z, levels);
}

void ProtocolSpec::validate() const {
    params.validate();
    spec.validate();
    if (!(contact_time >= 0.0) || !std::isfinite(contact_time)) {
        throw InvalidArgument("contact_time must be finite and non-negative");
    }
    if (n_encounters < 1) throw InvalidArgument("n_encounters must be >= 1");
    if (const auto* ens = std::get_if<EnsembleMode>(&mode); ens && ens->pool_size < 1) {
        throw InvalidArgument("pool_size must be >= 1");
    }
    if (!(guard.warn >= 0.0) || !(guard.hard >= guard.warn)) {
        throw InvalidArgument("truncation guard needs 0 <= warn <= hard");
    }
    if (threads < 1) throw InvalidArgument("threads must be >= 1");
    if (params.coupling == dynamics::Coupling::SpinBoson) bogoliubov::sb_normal_modes(params);
}

ProtocolSpec ProtocolSpec::fig1() {
    ProtocolSpec p;
    p.params = {1.0, 2.0, 0.2, dynamics::Coupling::SpinBoson};
    p.spec = {21, 21};
    p.contact_time = 4.0;
    p.n_encounters = 25;
    p.initial_a = FockInit{2};
    p.initial_b = FockInit{1};
    return p;
}

ProtocolSpec ProtocolSpec::fig2b() {
    ProtocolSpec p = fig1();
    p.params.omega_b = 3.0;
    p.params.g = 0.5;
    p.contact_time = 15.0;
    return p;
}

Observables Observables::make(const ModelParams& params, const SpaceSpec& spec) {
    fock::Operator free = dynamics::free_hamiltonian(params, spec);
    fock::Operator coupling = dynamics::interaction(params, spec);
    fock::Operator hamiltonian = dynamics::build_hamiltonian(params, spec);
    return {std::move(free), std::move(coupling), std::move(hamiltonian)};
}

EncounterResult run_encounter(const DensityMatrix& rho_a, const DensityMatrix& rho_b, const dynamics::Propagator& u,
                              const Observables& obs, const dynamics::TruncationGuard& guard,
                              const fock::Tolerances& tol) {
    const SpaceSpec spec = obs.hamiltonian.shape().levels;
    const DensityMatrix start = fock::tensor_state(rho_a, rho_b, spec);
    const DensityMatrix evolved = dynamics::evolve(start, u, tol);
    DensityMatrix next_a = fock::partial_trace(evolved, Factor::A, tol);
    DensityMatrix next_b = fock::partial_trace(evolved, Factor::B, tol);
    next_a.check_positive(tol);
    next_b.check_positive(tol);
    const dynamics::TailReport tail = guard.check(next_a, next_b);
    const DensityMatrix reproduct = fock::tensor_state(next_a, next_b, spec);

    EncounterRecord rec;
    rec.dist_a = fock::number_distribution(next_a);
    rec.dist_b = fock::number_distribution(next_b);
    rec.mean_n_a = mean_of(rec.dist_a);
    rec.mean_n_b = mean_of(rec.dist_b);
    rec.purity_a = fock::purity(next_a);
    rec.purity_b = fock::purity(next_b);
    rec.tail_mass = tail.mass();
    rec.truncation_warning = tail.warned;

    const double free_contact_end = real_expectation(evolved, obs.free);
    const double coupling_contact_end = real_expectation(evolved, obs.coupling);
    rec.free_energy = free_contact_end;
    rec.interaction_energy = real_expectation(start, obs.coupling);
    rec.energy_start = real_expectation(start, obs.hamiltonian);
    rec.energy_contact_end = real_expectation(evolved, obs.hamiltonian);
    rec.energy_reproduct = real_expectation(reproduct, obs.hamiltonian);
    rec.delta_free = real_expectation(reproduct, obs.free) - free_contact_end;
    rec.delta_interaction = real_expectation(reproduct, obs.coupling) - coupling_contact_end;

    return {std::move(next_a), std::move(next_b), std::move(rec)};
}

std::vector<EncounterRecord> run_chain(const ProtocolSpec& protocol, const RecordSink& sink) {
    protocol.validate();
    const auto u = propagator_cache().get(protocol.params, protocol.spec, protocol.contact_time);
    const Observables obs = Observables::make(protocol.params, protocol.spec);

    DensityMatrix rho_a = prepare(Factor::A, protocol.initial_a, protocol.spec.levels_a);
    DensityMatrix rho_b = prepare(Factor::B, protocol.initial_b, protocol.spec.levels_b);
    std::vector<EncounterRecord> records;
    records.reserve(protocol.n_encounters);
    for (std::size_t k = 1; k <= protocol.n_encounters; ++k) {
        try {
            auto result = run_encounter(rho_a, rho_b, *u, obs, protocol.guard, protocol.tolerances);
            result.record.index = k;
            rho_a = std::move(result.rho_a);
            rho_b = std::move(result.rho_b);
            if (sink) sink(result.record);
            records.push_back(std::move(result.record));
        } catch (const TruncationOverflow& e) {
            rethrow_at(e, k);
        }
    }
    return records;
}

std::vector<std::size_t> random_matching(std::size_t pool_size, std::uint64_t seed, std::uint64_t round) {
    std::vector<std::size_t> perm(pool_size);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    // Fisher-Yates; draw j uses counter j so each swap is an independent pure function.
    for (std::size_t j = pool_size; j > 1; --j) {
        const auto pick = random::draw_below(seed, round, j, j);
        std::swap(perm[j - 1], perm[pick]);
    }
    return perm;
}

std::vector<EncounterRecord> run_ensemble(const ProtocolSpec& protocol, const RecordSink& sink) {
    protocol.validate();
    const auto* mode = std::get_if<EnsembleMode>(&protocol.mode);
    if (mode == nullptr) throw InvalidArgument("run_ensemble: protocol is not in ensemble mode");
    const std::size_t pool = mode->pool_size;

    const auto u = propagator_cache().get(protocol.params, protocol.spec, protocol.contact_time);
    const Observables obs = Observables::make(protocol.params, protocol.spec);

    std::vector<DensityMatrix> pool_a(pool, prepare(Factor::A, protocol.initial_a, protocol.spec.levels_a));
    std::vector<DensityMatrix> pool_b(pool, prepare(Factor::B, protocol.initial_b, protocol.spec.levels_b));

    std::vector<EncounterRecord> records;
    records.reserve(protocol.n_encounters);
    for (std::size_t round = 1; round <= protocol.n_encounters; ++round) {
        const auto partner = random_matching(pool, mode->seed, round);
        std::vector<std::optional<EncounterResult>> results(pool);
        std::vector<std::exception_ptr> errors(pool);

        auto work = [&](std::size_t worker, std::size_t workers) {
            for (std::size_t i = worker; i < pool; i += workers) {
                try {
                    results[i] = run_encounter(pool_a[i], pool_b[partner[i]], *u, obs, protocol.guard,
                                               protocol.tolerances);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        const std::size_t workers = std::min<std::size_t>(protocol.threads, pool);
        if (workers <= 1) {
            work(0, 1);
        } else {
            std::vector<std::jthread> threads;
            for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w, workers);
        }

        for (const auto& err : errors) {
            if (!err) continue;
            try {
                std::rethrow_exception(err);
            } catch (const TruncationOverflow& e) {
                rethrow_at(e, round);
            }
        }

        std::vector<EncounterRecord> pair_records;
        pair_records.reserve(pool);
        for (std::size_t i = 0; i < pool; ++i) {
            pool_a[i] = std::move(results[i]->rho_a);
            pool_b[partner[i]] = std::move(results[i]->rho_b);
            pair_records.push_back(std::move(results[i]->record));
        }
        EncounterRecord avg = pool_average(pair_records, round);
        if (sink) sink(avg);
        records.push_back(std::move(avg));
    }
    return records;
}

std::vector<EncounterRecord> run(const ProtocolSpec& protocol, const RecordSink& sink) {
    if (std::holds_alternative<EnsembleMode>(protocol.mode)) return run_ensemble(protocol, sink);
    return run_chain(protocol, sink);
}

FitRange default_fit_range(std::size_t levels) { return {2, levels - levels / 4}; }

LineFit fit_exponential(std::span<const double> dist, FitRange range) {
    if (range.last > dist.size() || range.first >= range.last || range.last - range.first < 2) {
        throw InvalidArgument("fit_exponential: range [" + std::to_string(range.first) + ", " +
                              std::to_string(range.last) + ") invalid for " + std::to_string(dist.size()) +
                              " levels");
    }
    std::vector<double> n, log_p;
    for (std::size_t i = range.first; i < range.last; ++i) {
        if (!(dist[i] > 0.0)) {
            throw NonPositiveProbability("fit_exponential: P(" + std::to_string(i) + ") = " + std::to_string(dist[i]));
        }
        n.push_back(static_cast<double>(i));
        log_p.push_back(std::log(dist[i]));
    }
    return fit_line(n, log_p);
}

GrowthFit fit_linear_growth(std::span<const EncounterRecord> records, std::size_t transient) {
    if (records.size() < 5) {
        throw InvalidArgument("fit_linear_growth: need at least 5 records, got " + std::to_string(records.size()));
    }
    if (records.size() < transient + 2) {
        throw InvalidArgument("fit_linear_growth: fewer than 2 records left after the transient");
    }
    std::vector<double> k, na, nb;
    for (const auto& r : records.subspan(transient)) {
        k.push_back(static_cast<double>(r.index));
        na.push_back(r.mean_n_a);
        nb.push_back(r.mean_n_b);
    }
    return {fit_line(k, na), fit_line(k, nb)};
}

}  // namespace qratchet::ratchet
