#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sepstab/certify.hpp"
#include "sepstab/channels.hpp"
#include "support.hpp"

using namespace sepstab;
using testsup::basis_ket;
using testsup::bell_pair;
using testsup::pauli_z;
using testsup::random_channel;
using testsup::random_ket;

TEST_CASE("cptp validation") {
    // valid: single unitary
    KrausChannel id = KrausChannel::from_matrices({CMatrix::identity(2)});
    CHECK(id.square());

    // invalid: incomplete set
    CMatrix half = mat_scale(0.5, CMatrix::identity(2));
    CHECK_THROWS_AS(KrausChannel::from_matrices({half}), NotCPTP);
    CHECK_THROWS_AS(KrausChannel::from_matrices({}), NotCPTP);
}

TEST_CASE("builtin noise families") {
    SUBCASE("depolarizing p=0 is a single identity Kraus") {
        KrausChannel c = builtin_noise(NoiseKind::Depolarizing, 2, 0.0);
        CHECK(c.kraus.size() == 1);
        CHECK(frob_dist(c.kraus[0], CMatrix::identity(2)) < 1e-15);
    }
    SUBCASE("dephasing d=2 p=1 kills off-diagonals") {
        KrausChannel c = builtin_noise(NoiseKind::Dephasing, 2, 1.0);
        Ket plus({1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}, {2});
        DensityMatrix out = apply_channel(c, DensityMatrix::pure(plus), 0);
        CHECK(std::abs(out.op.mat.at(0, 1)) < 1e-12);
        CHECK(std::abs(out.op.mat.at(1, 0)) < 1e-12);
        CHECK(out.op.mat.at(0, 0).real() == doctest::Approx(0.5));
    }
    SUBCASE("amplitude damping p=1 maps everything to |0><0|") {
        KrausChannel c = builtin_noise(NoiseKind::AmplitudeDamping, 2, 1.0);
        DensityMatrix out = apply_channel(c, DensityMatrix::pure(basis_ket(2, 1)), 0);
        CHECK(out.op.mat.at(0, 0).real() == doctest::Approx(1.0));
        CHECK(std::abs(out.op.mat.at(1, 1)) < 1e-12);
        CHECK_THROWS_AS(builtin_noise(NoiseKind::AmplitudeDamping, 3, 0.5),
                        UnsupportedDimension);
    }
    SUBCASE("all builtins are CPTP across d and p") {
        for (int d : {2, 3, 4})
            for (double p : {0.0, 0.3, 1.0}) {
                builtin_noise(NoiseKind::Depolarizing, d, p);
                builtin_noise(NoiseKind::Dephasing, d, p);
                builtin_noise(NoiseKind::BitFlip, d, p);
            }
    }
    SUBCASE("parameter checks") {
        CHECK_THROWS_AS(builtin_noise(NoiseKind::Depolarizing, 2, 1.5), InvalidParameters);
        CHECK_THROWS_AS(builtin_noise(NoiseKind::Depolarizing, 1, 0.5), UnsupportedDimension);
        CHECK(noise_kind_from_name("bit-flip").has_value());
        CHECK_FALSE(noise_kind_from_name("thermal").has_value());
    }
}

TEST_CASE("apply_channel worked examples") {
    SUBCASE("identity channel") {
        RngStream rng(201);
        DensityMatrix rho = testsup::random_density(rng, {2, 2});
        DensityMatrix out = apply_channel(KrausChannel::from_matrices({CMatrix::identity(2)}), rho, 1);
        CHECK(frob_dist(out.op, rho.op) < 1e-14);
    }
    SUBCASE("full depolarizing on half a bell pair gives 1/4") {
        KrausChannel c = builtin_noise(NoiseKind::Depolarizing, 2, 1.0);
        DensityMatrix out = apply_channel(c, DensityMatrix::pure(bell_pair()), 1);
        Operator want = op_scale(0.25, Operator::identity({2, 2}));
        CHECK(frob_dist(out.op, want) < 1e-12);
    }
    SUBCASE("dephasing on bell matches the 2-Kraus expansion") {
        const double p = 0.37;
        KrausChannel c = builtin_noise(NoiseKind::Dephasing, 2, p);
        DensityMatrix out = apply_channel(c, DensityMatrix::pure(bell_pair()), 1);
        Operator zpsi = outer(bell_pair());
        Operator ztilt = op_mul(op_mul(tensor(Operator::identity({2}), pauli_z()), zpsi),
                                tensor(Operator::identity({2}), pauli_z()));
        Operator want = op_add(op_scale(1.0 - p / 2.0, zpsi), op_scale(p / 2.0, ztilt));
        CHECK(frob_dist(out.op, want) < 1e-12);
    }
    SUBCASE("dimension errors") {
        KrausChannel c = builtin_noise(NoiseKind::Depolarizing, 3, 0.5);
        DensityMatrix rho = DensityMatrix::maximally_mixed({2, 2});
        CHECK_THROWS_AS(apply_channel(c, rho, 1), DimensionMismatch);
        CHECK_THROWS_AS(apply_channel(c, rho, 5), DimensionMismatch);
    }
}

TEST_CASE("state fidelity through a channel") {
    KrausChannel id = KrausChannel::from_matrices({CMatrix::identity(2)});
    RngStream rng(207);
    Ket phi = random_ket(rng, {2});
    CHECK(state_fidelity_through(id, phi) == doctest::Approx(1.0).epsilon(1e-12));

    // depolarizing, d=2: 1 - p + p/2 for every phi
    const double p = 0.4;
    KrausChannel dep = builtin_noise(NoiseKind::Depolarizing, 2, p);
    CHECK(state_fidelity_through(dep, phi) == doctest::Approx(1.0 - p / 2.0).epsilon(1e-12));

    // bit flip with certainty: <0|X|0> = 0
    KrausChannel flip = builtin_noise(NoiseKind::BitFlip, 2, 1.0);
    CHECK(state_fidelity_through(flip, basis_ket(2, 0)) == doctest::Approx(0.0));
}

TEST_CASE("entanglement fidelity") {
    KrausChannel id = KrausChannel::from_matrices({CMatrix::identity(2)});
    CHECK(entanglement_fidelity(id, bell_pair()) == doctest::Approx(1.0).epsilon(1e-12));

    const double p = 0.3;
    KrausChannel dep = builtin_noise(NoiseKind::Depolarizing, 2, p);
    CHECK(entanglement_fidelity(dep, bell_pair()) ==
          doctest::Approx(1.0 - p + p / 4.0).epsilon(1e-12));

    // general d, maximally entangled: 1 - p + p/d^2
    for (int d : {3, 4}) {
        std::vector<cdouble> amp(static_cast<std::size_t>(d * d), 0.0);
        for (int j = 0; j < d; ++j)
            amp[static_cast<std::size_t>(j * d + j)] = 1.0 / std::sqrt(static_cast<double>(d));
        Ket me(amp, {d, d});
        KrausChannel depd = builtin_noise(NoiseKind::Depolarizing, d, p);
        CHECK(entanglement_fidelity(depd, me) ==
              doctest::Approx(1.0 - p + p / (d * d)).epsilon(1e-12));
    }

    // equals tr(psi (id x T) psi) computed via apply_channel
    RngStream rng(211);
    Ket psi = random_ket(rng, {3, 3});
    KrausChannel chan = random_channel(rng, 3, 3);
    DensityMatrix out = apply_channel(chan, DensityMatrix::pure(psi), 1);
    CHECK(entanglement_fidelity(chan, psi) ==
          doctest::Approx(fidelity_squared(out, psi)).epsilon(1e-10));
}

TEST_CASE("channel bound, exact: worked depolarizing numbers") {
    BipartiteStabilizer s = build_bipartite_stabilizer(bell_pair(), 1);

    KrausChannel id = KrausChannel::from_matrices({CMatrix::identity(2)});
    ChannelBoundReport r0 = channel_bound_exact(id, s);
    CHECK(r0.ensemble_term_schmidt == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r0.ensemble_term_conj == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r0.bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r0.ent_fidelity_sq == doctest::Approx(1.0).epsilon(1e-12));

    KrausChannel dep = builtin_noise(NoiseKind::Depolarizing, 2, 0.1);
    ChannelBoundReport r = channel_bound_exact(dep, s);
    CHECK(r.ensemble_term_schmidt == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(r.ensemble_term_conj == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(r.bound == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(r.ent_fidelity_sq == doctest::Approx(0.925).epsilon(1e-12));
}

TEST_CASE("channel bound never exceeds the entanglement fidelity") {
    RngStream rng(213);
    for (int trial = 0; trial < 40; ++trial) {
        int d = 2 + static_cast<int>(rng.uniform() * 3);
        int nk = 1 + static_cast<int>(rng.uniform() * 4);
        Ket psi = random_ket(rng, {d, d});
        BipartiteStabilizer s = build_bipartite_stabilizer(psi, 1);
        KrausChannel chan = random_channel(rng, d, nk);
        ChannelBoundReport r = channel_bound_exact(chan, s);
        CHECK(r.bound <= r.ent_fidelity_sq + TOL_STAB);
    }
}

TEST_CASE("proof identities: ensemble terms equal tr(rho P), tr(rho Q)") {
    RngStream rng(217);
    for (int trial = 0; trial < 25; ++trial) {
        int d = 2 + static_cast<int>(rng.uniform() * 3);
        Ket psi = random_ket(rng, {d, d});
        BipartiteStabilizer s = build_bipartite_stabilizer(psi, 1);
        KrausChannel chan = random_channel(rng, d, 2 + static_cast<int>(rng.uniform() * 3));
        DensityMatrix rho = apply_channel(chan, DensityMatrix::pure(psi), 1);
        ChannelBoundReport r = channel_bound_exact(chan, s);
        CHECK(pass_probability(rho, s.schmidt_proj) ==
              doctest::Approx(r.ensemble_term_schmidt).epsilon(1e-9));
        CHECK(pass_probability(rho, s.conj_proj) ==
              doctest::Approx(r.ensemble_term_conj).epsilon(1e-9));
        // second route for tr rho Q: direct trace against the projector
        CHECK(mat_trace(matmul(rho.op.mat, s.conj_proj.mat)).real() ==
              doctest::Approx(r.ensemble_term_conj).epsilon(1e-9));
    }
}

TEST_CASE("sampled channel bound") {
    BipartiteStabilizer s = build_bipartite_stabilizer(bell_pair(), 1);

    SUBCASE("sample count follows the delta/2 Hoeffding split, no d anywhere") {
        CHECK(channel_samples_per_term(0.05, 0.01) == 1199);
        // structurally dimension-independent: same n for a d=4 stabilizer
        RngStream rng(219);
        Ket psi4 = random_ket(rng, {4, 4});
        BipartiteStabilizer s4 = build_bipartite_stabilizer(psi4, 1);
        KrausChannel c4 = builtin_noise(NoiseKind::Depolarizing, 4, 0.2);
        ChannelBoundReport r4 = channel_bound_sampled(c4, s4, 0.05, 0.01, RngStream(3));
        CHECK(r4.sampled->samples_per_term == 1199);
    }

    SUBCASE("identity channel: means exactly 1 for every seed") {
        KrausChannel id = KrausChannel::from_matrices({CMatrix::identity(2)});
        for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
            ChannelBoundReport r = channel_bound_sampled(id, s, 0.05, 0.01, RngStream(seed));
            CHECK(r.sampled->mean_schmidt == 1.0);
            CHECK(r.sampled->mean_conj == 1.0);
            CHECK(r.sampled->adjusted_bound == doctest::Approx(1.0 - 0.1).epsilon(1e-12));
        }
    }

    SUBCASE("depolarizing: sampled means track the exact terms") {
        KrausChannel dep = builtin_noise(NoiseKind::Depolarizing, 2, 0.1);
        ChannelBoundReport r = channel_bound_sampled(dep, s, 0.05, 0.01, RngStream(17));
        CHECK(std::abs(r.sampled->mean_schmidt - 0.95) < 0.05);
        CHECK(std::abs(r.sampled->mean_conj - 0.95) < 0.05);
        CHECK(r.sampled->adjusted_bound <= r.ent_fidelity_sq);
    }

    SUBCASE("parameter validation") {
        KrausChannel id = KrausChannel::from_matrices({CMatrix::identity(2)});
        CHECK_THROWS_AS(channel_bound_sampled(id, s, 0.0, 0.01, RngStream(1)),
                        InvalidParameters);
    }
}
