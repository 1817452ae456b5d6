#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sepstab/certify.hpp"
#include "support.hpp"

using namespace sepstab;
using testsup::basis_ket;
using testsup::bell_pair;
using testsup::random_density;
using testsup::random_ket;

namespace {

DensityMatrix bell_with_white_noise(double q) {
    return mix(1.0 - q, DensityMatrix::pure(bell_pair()), q, DensityMatrix::maximally_mixed({2, 2}));
}

} // namespace

TEST_CASE("pass_probability on the bell stabilizer") {
    BipartiteStabilizer s = build_bipartite_stabilizer(bell_pair(), 1);

    DensityMatrix pure = DensityMatrix::pure(bell_pair());
    CHECK(pass_probability(pure, s.schmidt_proj) == doctest::Approx(1.0).epsilon(1e-12));

    DensityMatrix mm = DensityMatrix::maximally_mixed({2, 2});
    CHECK(pass_probability(mm, s.schmidt_proj) == doctest::Approx(0.5).epsilon(1e-12));

    DensityMatrix noisy = bell_with_white_noise(0.2);
    CHECK(pass_probability(noisy, s.schmidt_proj) == doctest::Approx(0.9).epsilon(1e-12));

    CHECK_THROWS_AS(pass_probability(mm, op_scale(2.0, s.schmidt_proj)), InvalidParameters);
    CHECK_THROWS_AS(pass_probability(DensityMatrix::maximally_mixed({3}), s.schmidt_proj),
                    DimensionMismatch);
}

TEST_CASE("fidelity lower bound: worked examples") {
    BipartiteStabilizer s = build_bipartite_stabilizer(bell_pair(), 1);

    CHECK(fidelity_lower_bound(DensityMatrix::pure(bell_pair()), s) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // q = 0.2 white noise: bound 0.8, true fidelity^2 0.85
    DensityMatrix noisy = bell_with_white_noise(0.2);
    CHECK(fidelity_lower_bound(noisy, s) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(fidelity_squared(noisy, bell_pair()) == doctest::Approx(0.85).epsilon(1e-12));

    // |01><01|: tr rho P = 0, tr rho Q = 1/2, bound -1/2 (reported unclamped)
    DensityMatrix r01 = DensityMatrix::pure(tensor(basis_ket(2, 0), basis_ket(2, 1)));
    CHECK(fidelity_lower_bound(r01, s) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fidelity_squared(r01, bell_pair()) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("soundness and tightness over random pairs") {
    RngStream rng(301);
    for (int trial = 0; trial < 60; ++trial) {
        int d = 2 + static_cast<int>(rng.uniform() * 4);
        Ket psi = random_ket(rng, {d, d});
        BipartiteStabilizer s = build_bipartite_stabilizer(psi, 1);
        DensityMatrix rho = random_density(rng, {d, d});
        CHECK(fidelity_lower_bound(rho, s) <= fidelity_squared(rho, psi) + TOL_STAB);
        CHECK(fidelity_lower_bound(DensityMatrix::pure(psi), s) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("p test simulation") {
    BipartiteStabilizer s = build_bipartite_stabilizer(bell_pair(), 1);
    RngStream rng(5);

    DensityMatrix pure = DensityMatrix::pure(bell_pair());
    for (int i = 0; i < 200; ++i) {
        ProtocolOutcome o = simulate_p_test(pure, s, rng);
        CHECK(o.accepted);
        CHECK(o.alice_outcome == o.bob_outcome);
    }

    DensityMatrix r01 = DensityMatrix::pure(tensor(basis_ket(2, 0), basis_ket(2, 1)));
    for (int i = 0; i < 200; ++i) CHECK_FALSE(simulate_p_test(r01, s, rng).accepted);

    // maximally mixed: acceptance ~ 0.5 within 3 sigma of 1e4 samples
    DensityMatrix mm = DensityMatrix::maximally_mixed({2, 2});
    int acc = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) acc += simulate_p_test(mm, s, rng).accepted ? 1 : 0;
    double rate = static_cast<double>(acc) / n;
    CHECK(std::abs(rate - 0.5) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("q test simulation, plain and rescaled") {
    BipartiteStabilizer s = build_bipartite_stabilizer(bell_pair(), 1);
    RngStream rng(6);

    DensityMatrix pure = DensityMatrix::pure(bell_pair());
    for (int i = 0; i < 200; ++i) {
        CHECK(simulate_q_test(pure, s, rng).accepted);
        CHECK(simulate_q_test(pure, s, rng, true).accepted);  // c = 1 for bell
    }

    DensityMatrix mm = DensityMatrix::maximally_mixed({2, 2});
    int acc = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) acc += simulate_q_test(mm, s, rng).accepted ? 1 : 0;
    double rate = static_cast<double>(acc) / n;
    CHECK(std::abs(rate - 0.5) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("identical seeds give identical outcome sequences") {
    BipartiteStabilizer s = build_bipartite_stabilizer(bell_pair(), 1);
    DensityMatrix noisy = bell_with_white_noise(0.3);
    RngStream r1(99), r2(99);
    for (int i = 0; i < 100; ++i) {
        ProtocolOutcome a = simulate_p_test(noisy, s, r1);
        ProtocolOutcome b = simulate_p_test(noisy, s, r2);
        CHECK(a.alice_outcome == b.alice_outcome);
        CHECK(a.bob_outcome == b.bob_outcome);
        CHECK(a.accepted == b.accepted);
    }
}

TEST_CASE("enumeration reproduces the trace formula exactly") {
    RngStream rng(303);
    SUBCASE("bipartite") {
        for (int trial = 0; trial < 15; ++trial) {
            int d = 2 + static_cast<int>(rng.uniform() * 3);
            Ket psi = random_ket(rng, {d, d});
            BipartiteStabilizer s = build_bipartite_stabilizer(psi, 1);
            DensityMatrix rho = random_density(rng, {d, d});
            CHECK(enumerate_accept_probability(rho, p_test_tree(s)) ==
                  doctest::Approx(pass_probability(rho, s.schmidt_proj)).epsilon(1e-10));
            CHECK(enumerate_accept_probability(rho, q_test_tree(s)) ==
                  doctest::Approx(pass_probability(rho, s.conj_proj)).epsilon(1e-10));
        }
    }
    SUBCASE("three parties") {
        for (int trial = 0; trial < 8; ++trial) {
            Ket psi = random_ket(rng, {2, 2, 2});
            StabilizerFamily fam = build_family(psi, {});
            DensityMatrix rho = random_density(rng, {2, 2, 2});
            for (const std::string& leaf : fam.leaves)
                CHECK(enumerate_accept_probability(rho, fam.tests.at(leaf)) ==
                      doctest::Approx(pass_probability(rho, fam.nodes.at(leaf))).epsilon(1e-10));
        }
    }
    SUBCASE("rescaled q test enumerates to c * tr(rho Q)") {
        Ket k00 = tensor(basis_ket(2, 0), basis_ket(2, 0));
        BipartiteStabilizer s = build_bipartite_stabilizer(k00, 1);
        DensityMatrix mm = DensityMatrix::maximally_mixed({2, 2});
        double plain = enumerate_accept_probability(mm, q_test_tree(s, false));
        double scaled = enumerate_accept_probability(mm, q_test_tree(s, true));
        CHECK(scaled == doctest::Approx(0.5 * plain).epsilon(1e-12));  // c = 1/2
    }
}

TEST_CASE("required samples from the union-bound formula") {
    CHECK(required_samples(0.05, 0.01, 2) == 1199);
    CHECK(required_samples(0.05, 0.01, 1) == static_cast<long>(
        std::ceil(std::log(2.0 / 0.01) / (2.0 * 0.0025))));
    CHECK_THROWS_AS(required_samples(0.0, 0.01, 2), InvalidParameters);
    CHECK_THROWS_AS(required_samples(0.05, 1.0, 2), InvalidParameters);
}

TEST_CASE("certify on the pure target") {
    BipartiteStabilizer s = build_bipartite_stabilizer(bell_pair(), 1);
    DensityMatrix pure = DensityMatrix::pure(bell_pair());
    EstimateReport rep = certify(pure, s, 0.05, 0.01, RngStream(1));
    CHECK(rep.samples_per_test == 1199);
    CHECK(rep.pass_rates[0] == 1.0);
    CHECK(rep.pass_rates[1] == 1.0);
    CHECK(rep.plug_in_bound == doctest::Approx(1.0));
    CHECK(rep.confidence_adjusted_bound == doctest::Approx(1.0 - 2 * 0.05).epsilon(1e-12));
    // report invariant
    double sum = rep.pass_rates[0] + rep.pass_rates[1];
    CHECK(rep.confidence_adjusted_bound ==
          doctest::Approx(sum - 1.0 - 2 * rep.epsilon).epsilon(1e-12));
}

TEST_CASE("certify parameter validation") {
    BipartiteStabilizer s = build_bipartite_stabilizer(bell_pair(), 1);
    DensityMatrix pure = DensityMatrix::pure(bell_pair());
    CHECK_THROWS_AS(certify(pure, s, 1.5, 0.01, RngStream(1)), InvalidParameters);
    CHECK_THROWS_AS(certify(pure, s, 0.05, 0.0, RngStream(1)), InvalidParameters);
    CHECK_THROWS_AS(certify(pure, s, 0.05, 0.01, RngStream(1), 100), InvalidParameters);
    EstimateReport rep = certify(pure, s, 0.05, 0.01, RngStream(1), 2000);
    CHECK(rep.samples_per_test == 2000);
}

TEST_CASE("estimator consistency on a noisy state") {
    BipartiteStabilizer s = build_bipartite_stabilizer(bell_pair(), 1);
    DensityMatrix noisy = bell_with_white_noise(0.2);
    ProtocolTree tp = p_test_tree(s);
    double exact = pass_probability(noisy, s.schmidt_proj);
    // 1e5 samples put the empirical rate within 0.01 of the exact one (the
    // binomial sigma is ~0.001, so a miss here means a broken sampler)
    for (int seed = 0; seed < 20; ++seed) {
        RngStream rng(static_cast<std::uint64_t>(seed) + 1000);
        long acc = 0;
        const long n = 100000;
        for (long i = 0; i < n; ++i)
            acc += simulate_tree_test(noisy, tp, "P", rng).accepted ? 1 : 0;
        CHECK(std::abs(static_cast<double>(acc) / static_cast<double>(n) - exact) < 0.01);
    }
}

TEST_CASE("certify a three-party family") {
    RngStream rng(71);
    Ket psi = random_ket(rng, {2, 2, 2});
    StabilizerFamily fam = build_family(psi, {});
    DensityMatrix rho =
        mix(0.9, DensityMatrix::pure(psi), 0.1, DensityMatrix::maximally_mixed({2, 2, 2}));
    EstimateReport rep = certify(rho, fam, 0.1, 0.05, RngStream(7));
    CHECK(rep.labels.size() == 4);
    CHECK(rep.samples_per_test == required_samples(0.1, 0.05, 4));
    // empirical rates track the exact ones
    for (std::size_t t = 0; t < 4; ++t)
        CHECK(std::abs(rep.pass_rates[t] - rep.exact_pass[t]) < 0.08);
    CHECK(rep.exact_bound <= rep.exact_fidelity_sq + TOL_STAB);
    // invariant: adjusted = sum rates - (T-1) - T*eps
    double sum = 0.0;
    for (double r : rep.pass_rates) sum += r;
    CHECK(rep.confidence_adjusted_bound == doctest::Approx(sum - 3.0 - 0.4).epsilon(1e-12));
}

TEST_CASE("quick coverage check of the confidence-adjusted bound") {
    BipartiteStabilizer s = build_bipartite_stabilizer(bell_pair(), 1);
    DensityMatrix noisy = bell_with_white_noise(0.2);
    double truth = fidelity_squared(noisy, bell_pair());
    int violations = 0;
    for (int run = 0; run < 30; ++run) {
        EstimateReport rep = certify(noisy, s, 0.05, 0.01, RngStream(static_cast<std::uint64_t>(run)));
        if (rep.confidence_adjusted_bound > truth) ++violations;
    }
    CHECK(violations == 0);  // margin is ~12 sigma here, no run should exceed
}
