#pragma once

// CPTP maps as Kraus sets, built-in noise families, and the channel
// entanglement-fidelity bound: for T acting on the B side of |psi> with
// Schmidt coefficients lambda and conditional states |psi_alpha>,
//
//   F(|psi>;T)^2 >= sum_j lambda_j F(|j>;T)^2
//                 + sum_alpha (1/d) F(|psi_alpha>;T)^2 - 1,
//
// where F(|phi>;T)^2 = <phi| T(|phi><phi|) |phi> for the local probes and
// F(|psi>;T)^2 = tr psi (id (x) T)(psi). The two ensemble terms equal
// tr(rho P) and tr(rho Q) for rho = (id (x) T)(psi), which is the identity
// the exact and sampled estimators are cross-checked against.

#include <optional>
#include <string>
#include <vector>

#include "sepstab/rng.hpp"
#include "sepstab/stabilizer.hpp"

namespace sepstab {

struct KrausChannel {
    std::vector<CMatrix> kraus;  // all dim_out x dim_in

    int dim_in() const { return static_cast<int>(kraus.front().cols); }
    int dim_out() const { return static_cast<int>(kraus.front().rows); }
    bool square() const { return dim_in() == dim_out(); }

    // Validates shape agreement and completeness sum K^dagger K = identity
    // within TOL_CPTP.
    static KrausChannel from_matrices(std::vector<CMatrix> ops);
};

enum class NoiseKind { Depolarizing, Dephasing, AmplitudeDamping, BitFlip };

std::optional<NoiseKind> noise_kind_from_name(const std::string& name);

// Standard Kraus sets; generalized Pauli (shift/clock) based for d > 2.
// Amplitude damping is qubit-only (UnsupportedDimension otherwise).
KrausChannel builtin_noise(NoiseKind kind, int d, double p);

// (id (x) ... (x) T (x) ... (x) id)(rho), channel on the given factor.
DensityMatrix apply_channel(const KrausChannel& chan, const DensityMatrix& rho, int on_factor);

// <phi| T(|phi><phi|) |phi> = sum_k |<phi|K_k|phi>|^2.
double state_fidelity_through(const KrausChannel& chan, const Ket& phi);

// tr psi (id (x) T)(psi) = sum_k |<psi|(1 (x) K_k)|psi>|^2; the channel acts
// on the trailing factor group whose dimension matches dim_in.
double entanglement_fidelity(const KrausChannel& chan, const Ket& psi);

struct SampledChannelEstimate {
    long samples_per_term = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    double mean_schmidt = 0.0;
    double mean_conj = 0.0;
    double adjusted_bound = 0.0;  // means - 2 eps - 1
};

struct ChannelBoundReport {
    double ensemble_term_schmidt = 0.0;  // sum_j lambda_j F(|j>;T)^2
    double ensemble_term_conj = 0.0;     // sum_alpha (1/d) F(|psi_alpha>;T)^2
    double bound = 0.0;                  // terms - 1
    double ent_fidelity_sq = 0.0;
    std::optional<SampledChannelEstimate> sampled;
};

ChannelBoundReport channel_bound_exact(const KrausChannel& chan,
                                         const BipartiteStabilizer& stab);

// Per term: n = ceil(ln(4/delta)/(2 eps^2)) probes, indices j ~ lambda and
// alpha ~ uniform, each a Bernoulli with success F(probe;T)^2. n carries no
// dimension dependence.
ChannelBoundReport channel_bound_sampled(const KrausChannel& chan,
                                           const BipartiteStabilizer& stab, double epsilon,
                                           double delta, RngStream rng);

long channel_samples_per_term(double epsilon, double delta);

} // namespace sepstab
