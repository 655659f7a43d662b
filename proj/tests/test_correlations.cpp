#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "pbg/amplitude.hpp"
#include "pbg/correlations.hpp"

using namespace pbg;
using Catch::Approx;

namespace {

const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

TEST_CASE("initial weights validation") {
    CHECK_NOTHROW((InitialWeights{0.6, 0.8}.validate()));
    CHECK_THROWS_AS((InitialWeights{0.6, 0.7}.validate()), std::invalid_argument);
    const auto w = InitialWeights::from_alpha(0.3);
    CHECK(std::norm(w.alpha) + std::norm(w.beta) == Approx(1.0).margin(1e-14));
    CHECK_THROWS_AS(InitialWeights::from_alpha(1.1), std::invalid_argument);
}

TEST_CASE("composite state occupies the expected slots") {
    const auto w = InitialWeights::from_alpha(0.3);
    const complexd b(0.6, 0.2);
    const double bt = std::sqrt(1.0 - std::norm(b));
    const auto s = assemble_state(w, b);
    double norm = 0.0;
    for (int i = 0; i < 16; ++i) norm += std::norm(s.amp[i]);
    CHECK(norm == Approx(1.0).margin(1e-12));
    CHECK(s.amp[0b0000] == w.alpha);
    CHECK(std::abs(s.amp[0b1100] - w.beta * b * b) < 1e-14);
    CHECK(std::abs(s.amp[0b1001] - w.beta * b * bt) < 1e-14);
    CHECK(std::abs(s.amp[0b0110] - w.beta * bt * b) < 1e-14);
    CHECK(std::abs(s.amp[0b0011] - w.beta * bt * bt) < 1e-14);
    // every other slot is empty
    for (int i : {1, 2, 4, 5, 7, 8, 10, 11, 13, 14, 15}) CHECK(std::abs(s.amp[i]) == 0.0);
    CHECK_THROWS_AS(assemble_state(w, complexd(1.5, 0.0)), std::invalid_argument);
}

TEST_CASE("reduced density matrices are unit-trace, Hermitian, positive") {
    const auto s = assemble_state(InitialWeights::from_alpha(complexd(0.3, 0.25)),
                                  complexd(0.55, -0.4));
    for (auto p : {Partition::N1N2, Partition::R1R2, Partition::N1R1, Partition::N1R2,
                   Partition::N2R1, Partition::N2R2}) {
        const auto dm = reduce(s, p);
        CHECK(std::abs(dm.rho.trace() - complexd(1.0, 0.0)) < 1e-12);
        CHECK((dm.rho - dm.rho.adjoint()).norm() < 1e-12);
        for (double ev : detail::density_eigenvalues(dm.rho)) CHECK(ev >= 0.0);
    }
}

TEST_CASE("binary entropy endpoints and symmetry") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == Approx(1.0).margin(1e-14));
    CHECK(binary_entropy(0.3) == Approx(binary_entropy(0.7)).margin(1e-14));
}

TEST_CASE("concurrence of canonical states") {
    // t=0: emitters hold alpha|--> + beta|++>, C = 2|alpha||beta|
    for (double a : {inv_sqrt2, 0.25, 0.9}) {
        const auto w = InitialWeights::from_alpha(a);
        const auto s = assemble_state(w, complexd(1.0, 0.0));
        CHECK(concurrence(reduce(s, Partition::N1N2)) ==
              Approx(2.0 * a * std::abs(w.beta)).margin(1e-10));
        CHECK(concurrence(reduce(s, Partition::R1R2)) == Approx(0.0).margin(1e-10));
    }
    // alpha = 0: the two emitter/reservoir pairs are uncorrelated products
    const auto prod = assemble_state(InitialWeights::from_alpha(0.0), complexd(0.7, 0.1));
    CHECK(concurrence(reduce(prod, Partition::N1N2)) == Approx(0.0).margin(1e-10));
    CHECK(concurrence(reduce(prod, Partition::N1R2)) == Approx(0.0).margin(1e-10));
    // and each pair is itself a pure entangled qubit pair, C = 2|b| btilde
    const double babs = std::abs(complexd(0.7, 0.1));
    const double bt = std::sqrt(1.0 - babs * babs);
    CHECK(concurrence(reduce(prod, Partition::N1R1)) == Approx(2.0 * babs * bt).margin(1e-10));
}

TEST_CASE("entanglement of formation from concurrence") {
    CHECK(eof_from_concurrence(0.0) == 0.0);
    CHECK(eof_from_concurrence(1.0) == Approx(1.0).margin(1e-14));
    // frozen with 60-digit arithmetic
    CHECK(eof_from_concurrence(0.5) == Approx(0.3545789026652699).margin(1e-12));
    double prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
        const double e = eof_from_concurrence(i / 20.0);
        CHECK(e >= prev);
        prev = e;
    }
}

TEST_CASE("discord equals EoF on pure two-qubit marginals") {
    // excitation fully in the emitters: the N1N2 marginal is pure, so
    // QD = EoF = S(single side) and MI = 2 S(single side)
    for (double a : {inv_sqrt2, 0.2, 0.9}) {
        const auto s = assemble_state(InitialWeights::from_alpha(a), complexd(1.0, 0.0));
        const auto dm = reduce(s, Partition::N1N2);
        const auto d = discord_detailed(dm);
        const double e = eof(dm);
        CHECK(d.discord == Approx(e).margin(1e-7));
        CHECK(d.mutual_info == Approx(2.0 * binary_entropy(a * a)).margin(1e-7));
    }
    // excitation shared with the field: the N1R1 marginal is pure
    const auto s = assemble_state(InitialWeights::from_alpha(0.0), complexd(0.6, 0.3));
    const auto dm = reduce(s, Partition::N1R1);
    CHECK(discord(dm) == Approx(eof(dm)).margin(1e-7));
}

TEST_CASE("discord vanishes on product marginals") {
    const auto prod = assemble_state(InitialWeights::from_alpha(0.0), complexd(0.7, 0.1));
    for (auto p : {Partition::N1N2, Partition::R1R2, Partition::N1R2, Partition::N2R1}) {
        const auto d = discord_detailed(reduce(prod, p));
        CHECK(d.discord < 1e-8);
        CHECK(d.mutual_info < 1e-8);
    }
}

TEST_CASE("discord is non-negative, bounded by mutual information, side-swappable") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        complexd a{u(rng), u(rng)};
        if (std::abs(a) > 0.999) a *= 0.999 / std::abs(a);
        complexd b{u(rng), u(rng)};
        if (std::abs(b) > 1.0) b /= std::abs(b);
        const auto s = assemble_state(InitialWeights::from_alpha(a), b);
        for (auto p : {Partition::N1N2, Partition::R1R2, Partition::N1R1, Partition::N2R2}) {
            const auto dm = reduce(s, p);
            const auto d = discord_detailed(dm);
            CHECK(d.discord >= 0.0);
            CHECK(d.discord <= d.mutual_info + 1e-9);
            CHECK(d.classical >= d.grid_classical - 1e-12);
            // the state is symmetric under 1<->2, so for the symmetric
            // partitions measuring either side gives the same discord
            if (p == Partition::N1N2 || p == Partition::R1R2) {
                DiscordOptions oa;
                oa.side = MeasuredSide::A;
                CHECK(discord(dm, oa) == Approx(d.discord).margin(1e-6));
            }
        }
    }
}

TEST_CASE("coarser grids do not change the refined optimum") {
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int trial = 0; trial < 8; ++trial) {
        const auto s = assemble_state(InitialWeights::from_alpha(u(rng)),
                                      complexd(u(rng) * 0.9, u(rng) * 0.3));
        const auto dm = reduce(s, Partition::N1N2);
        DiscordOptions coarse;
        coarse.grid = 16;
        DiscordOptions fine;
        fine.grid = 96;
        CHECK(discord(dm, coarse) == Approx(discord(dm, fine)).margin(1e-6));
    }
}

TEST_CASE("partition names round-trip") {
    for (auto p : {Partition::N1N2, Partition::R1R2, Partition::N1R1, Partition::N1R2,
                   Partition::N2R1, Partition::N2R2}) {
        CHECK(partition_from_name(partition_name(p)) == p);
    }
    CHECK_THROWS_AS(partition_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("timeseries anchors and exchange symmetry") {
    ReservoirParams res;
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 5.0;
    const auto traj = solve_amplitude(res, {0.1}, cfg);
    const auto w = InitialWeights::from_alpha(inv_sqrt2);
    const std::vector<Partition> parts = {Partition::N1N2, Partition::R1R2, Partition::N1R1,
                                          Partition::N1R2, Partition::N2R1};
    const auto recs = correlation_timeseries(traj, w, parts, 25);
    REQUIRE(!recs.empty());
    CHECK(recs.front().t == 0.0);
    CHECK(recs.back().t == traj.t.back());
    // maximally entangled emitters, empty fields at t=0
    CHECK(recs.front().eof[0] == Approx(1.0).margin(1e-9));
    CHECK(recs.front().qd[0] == Approx(1.0).margin(1e-6));
    CHECK(recs.front().eof[1] == Approx(0.0).margin(1e-9));
    CHECK(recs.front().eof[2] == Approx(0.0).margin(1e-9));
    for (const auto& r : recs) {
        // identical emitters and reservoirs: N1R2 and N2R1 mirror each other
        CHECK(r.eof[3] == Approx(r.eof[4]).margin(1e-9));
        CHECK(r.qd[3] == Approx(r.qd[4]).margin(1e-5));
    }
    CHECK_THROWS_AS(correlation_timeseries(traj, w, parts, 0), std::invalid_argument);
}

TEST_CASE("timeseries CSV shape") {
    ReservoirParams res;
    SolverConfig cfg;
    cfg.dt = 0.02;
    cfg.t_max = 1.0;
    const auto traj = solve_amplitude(res, {0.1}, cfg);
    const std::vector<Partition> parts = {Partition::N1N2, Partition::R1R2};
    const auto recs = correlation_timeseries(traj, InitialWeights::from_alpha(0.3), parts, 5);
    std::ostringstream os;
    write_correlations_csv(recs, parts, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,qd_n1n2,eof_n1n2,mi_n1n2,qd_r1r2,eof_r1r2,mi_r1r2");
    size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == recs.size());
}
