#include "support.hpp"

#include "qratchet/errors.hpp"
#include "qratchet/ratchet.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace qratchet;
using namespace qratchet::ratchet;
using dynamics::Coupling;
using fock::Factor;
using testing_support::Gen;

namespace {

ProtocolSpec small(std::size_t encounters = 6) {
    ProtocolSpec p = ProtocolSpec::fig1();
    p.spec = {12, 12};
    p.n_encounters = encounters;
    p.guard.hard = 1e-2;
    return p;
}

}  // namespace

TEST_CASE("presets") {
    const auto f1 = ProtocolSpec::fig1();
    CHECK(f1.params == ModelParams{1.0, 2.0, 0.2, Coupling::SpinBoson});
    CHECK(f1.spec == SpaceSpec{21, 21});
    CHECK(f1.contact_time == 4.0);
    CHECK(f1.n_encounters == 25);
    CHECK(std::get<FockInit>(f1.initial_a).n == 2);
    CHECK(std::get<FockInit>(f1.initial_b).n == 1);
    const auto f2 = ProtocolSpec::fig2b();
    CHECK(f2.params.omega_b == 3.0);
    CHECK(f2.params.g == 0.5);
    CHECK(f2.contact_time == 15.0);
}

TEST_CASE("protocol validation") {
    auto p = small();
    p.n_encounters = 0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = small();
    p.contact_time = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = small();
    p.params.g = 0.8;
    CHECK_THROWS_AS(p.validate(), UnstableCoupling);
    p = small();
    p.mode = EnsembleMode{0, 1};
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = small();
    p.initial_a = FockInit{12};
    CHECK_THROWS_AS(run_chain(p), InvalidArgument);
}

TEST_CASE("first fig1 encounter matches exact evolution") {
    auto p = ProtocolSpec::fig1();
    p.n_encounters = 1;
    const auto recs = run_chain(p);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].index == 1);
    CHECK(recs[0].mean_n_a == doctest::Approx(1.9227001131788937).epsilon(1e-10));
    CHECK(recs[0].mean_n_b == doctest::Approx(1.1074721964623617).epsilon(1e-10));
    CHECK(recs[0].dist_a.size() == 21);
    CHECK_FALSE(recs[0].truncation_warning);
}

TEST_CASE("energy bookkeeping per encounter") {
    const auto recs = run_chain(small(8));
    for (const auto& r : recs) {
        const double scale = 1.0 + std::abs(r.free_energy);
        // <H> conserved during contact.
        CHECK(std::abs(r.energy_contact_end - r.energy_start) < 1e-10 * scale);
        // Marginalizing leaves <H0> untouched; the jump is all in <V>.
        CHECK(std::abs(r.delta_free) < 1e-10 * scale);
        CHECK(std::abs(r.energy_reproduct - r.energy_contact_end - r.delta_interaction) < 1e-10 * scale);
        // Product states with Fock-diagonal marginals carry no coupling energy.
        CHECK(std::abs(r.interaction_energy) < 1e-12);
        CHECK(r.purity_a <= 1.0 + 1e-12);
        double sum = 0.0;
        for (double q : r.dist_a) sum += q;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("JC chain conserves total excitation") {
    // Re-tensoring the marginals spreads the total-number distribution, so only its mean is fixed.
    auto p = small(10);
    p.params.coupling = Coupling::JaynesCummings;
    const auto recs = run_chain(p);
    for (const auto& r : recs) CHECK(r.mean_n_a + r.mean_n_b == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(recs.front().tail_mass < 1e-20);
}

TEST_CASE("record sink sees every record in order") {
    std::vector<std::size_t> seen;
    const auto recs = run_chain(small(4), [&](const EncounterRecord& r) { seen.push_back(r.index); });
    CHECK(seen == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(recs.size() == 4);
}

TEST_CASE("truncation overflow reports the encounter and keeps earlier records") {
    auto p = ProtocolSpec::fig1();
    p.spec = {6, 6};
    std::vector<EncounterRecord> seen;
    try {
        run_chain(p, [&](const EncounterRecord& r) { seen.push_back(r); });
        FAIL("expected TruncationOverflow");
    } catch (const TruncationOverflow& e) {
        CHECK(e.encounter() >= 1);
        CHECK(e.encounter() == seen.size() + 1);
        CHECK(e.tail_mass() > p.guard.hard);
    }
}

TEST_CASE("random matching is a reproducible permutation") {
    std::set<std::vector<std::size_t>> distinct;
    for (std::uint64_t round = 0; round < 50; ++round) {
        auto perm = random_matching(7, 42, round);
        CHECK(perm == random_matching(7, 42, round));
        auto sorted = perm;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < 7; ++i) CHECK(sorted[i] == i);
        distinct.insert(perm);
    }
    CHECK(distinct.size() > 40);
    CHECK(random_matching(1, 5, 3) == std::vector<std::size_t>{0});
}

TEST_CASE("random matching is close to uniform") {
    // Each of the 6 permutations of 3 items should come up about 1/6 of the time.
    std::map<std::vector<std::size_t>, int> counts;
    const int rounds = 6000;
    for (int r = 0; r < rounds; ++r) counts[random_matching(3, 9, r)]++;
    CHECK(counts.size() == 6);
    for (const auto& [perm, c] : counts) CHECK(std::abs(c - rounds / 6) < 150);
}

TEST_CASE("ensemble with pool size 1 equals the chain bit for bit") {
    auto chain = small(5);
    auto ens = chain;
    ens.mode = EnsembleMode{1, 17};
    const auto a = run_chain(chain);
    const auto b = run(ens);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].mean_n_a == b[k].mean_n_a);
        CHECK(a[k].mean_n_b == b[k].mean_n_b);
        CHECK(a[k].purity_a == b[k].purity_a);
        CHECK(a[k].dist_b == b[k].dist_b);
    }
}

TEST_CASE("ensemble results do not depend on the thread count") {
    auto p = small(3);
    p.mode = EnsembleMode{4, 3};
    p.initial_b = CoherentInit{{0.7, 0.0}};
    p.threads = 1;
    const auto one = run_ensemble(p);
    p.threads = 3;
    const auto three = run_ensemble(p);
    REQUIRE(one.size() == three.size());
    for (std::size_t k = 0; k < one.size(); ++k) {
        CHECK(one[k].mean_n_a == three[k].mean_n_a);
        CHECK(one[k].dist_a == three[k].dist_a);
    }
    CHECK_THROWS_AS(run_ensemble(small(2)), InvalidArgument);
}

TEST_CASE("fit_exponential recovers a geometric distribution") {
    std::vector<double> dist(20);
    for (std::size_t n = 0; n < dist.size(); ++n) dist[n] = 0.3 * std::pow(0.7, double(n));
    const auto fit = fit_exponential(dist, default_fit_range(20));
    CHECK(fit.slope == doctest::Approx(std::log(0.7)).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(0.3)).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    dist[5] = 0.0;
    CHECK_THROWS_AS(fit_exponential(dist, default_fit_range(20)), NonPositiveProbability);
    CHECK_THROWS_AS(fit_exponential(dist, {10, 30}), InvalidArgument);
}

TEST_CASE("default fit range") {
    const auto r = default_fit_range(21);
    CHECK(r.first == 2);
    CHECK(r.last == 16);
}

TEST_CASE("linear growth fit skips the transient") {
    std::vector<EncounterRecord> recs(12);
    for (std::size_t k = 0; k < recs.size(); ++k) {
        recs[k].index = k + 1;
        recs[k].mean_n_a = k < 5 ? 100.0 : 0.5 * double(k + 1) + 1.0;
        recs[k].mean_n_b = 2.0 - 0.1 * double(k + 1);
    }
    const auto g = fit_linear_growth(recs, 5);
    CHECK(g.n_a.slope == doctest::Approx(0.5));
    CHECK(g.n_a.r_squared == doctest::Approx(1.0));
    CHECK(g.n_b.slope == doctest::Approx(-0.1));
    CHECK_THROWS_AS(fit_linear_growth(std::span(recs).first(6), 5), InvalidArgument);
}

TEST_CASE("prepare builds the requested initial state") {
    const auto f = prepare(Factor::A, FockInit{3}, 6);
    CHECK(fock::expectation(f, fock::number(Factor::A, 6)).real() == 3.0);
    const auto c = prepare(Factor::B, CoherentInit{{0.5, 0.0}}, 20);
    CHECK(fock::expectation(c, fock::number(Factor::B, 20)).real() == doctest::Approx(0.25));
}
