#pragma once

// One-way LOCC certification: exact pass probabilities, protocol simulation
// by iterated conditional Born rules, exact outcome enumeration, and the
// Hoeffding-style certificate
//
//   samples per test n = ceil(ln(2 T / delta) / (2 eps^2))
//
// which by a union bound over the T tests makes
//   sum_t (rate_t - eps) - (T - 1) <= tr(rho |psi><psi|)
// hold with probability at least 1 - delta.

#include <optional>
#include <string>
#include <vector>

#include "sepstab/multipartite.hpp"
#include "sepstab/protocol.hpp"
#include "sepstab/rng.hpp"
#include "sepstab/stabilizer.hpp"

namespace sepstab {

// tr(rho proj), clamped into [0,1]. proj must pass is_projector.
double pass_probability(const DensityMatrix& rho, const Operator& proj);

// Re <psi| rho |psi>.
double fidelity_squared(const DensityMatrix& rho, const Ket& psi);

// tr(rho P) + tr(rho Q) - 1; never exceeds tr(rho |psi><psi|).
double fidelity_lower_bound(const DensityMatrix& rho, const BipartiteStabilizer& stab);

// rho embedded into the stabilizer's ambient space when the construction
// embedded the state (accepts source dims or ambient dims).
DensityMatrix align_density(const DensityMatrix& rho, const BipartiteStabilizer& stab);

struct ProtocolOutcome {
    std::string test;        // "P", "Q", or a leaf word
    int alice_outcome = -1;  // first party's basis index
    int bob_outcome = -1;    // basis index (P test) or accept bit (otherwise)
    std::vector<int> path;   // every measured basis index, cascade order
    bool accepted = false;
};

// Both parties sample the computational (Schmidt) bases jointly; accept iff
// the outcomes coincide.
ProtocolOutcome simulate_p_test(const DensityMatrix& rho, const BipartiteStabilizer& stab,
                                RngStream& rng);

// Alice samples the conjugate basis, Bob measures |psi_alpha><psi_alpha|
// (rescaled to the POVM effect M_alpha when requested).
ProtocolOutcome simulate_q_test(const DensityMatrix& rho, const BipartiteStabilizer& stab,
                                RngStream& rng, bool rescaled = false);

// Generic cascade over a protocol tree (the multipartite leaf tests).
ProtocolOutcome simulate_tree_test(const DensityMatrix& rho, const ProtocolTree& tree,
                                   const std::string& label, RngStream& rng);

// Exact accept probability by summing the full outcome distribution; the
// independent check that the simulated protocol realizes tr(rho proj).
double enumerate_accept_probability(const DensityMatrix& rho, const ProtocolTree& tree);

// Measurement cascades of the bipartite tests in tree form.
ProtocolTree p_test_tree(const BipartiteStabilizer& stab);
ProtocolTree q_test_tree(const BipartiteStabilizer& stab, bool rescaled = false);

struct EstimateReport {
    std::vector<std::string> labels;      // one per test, report order
    std::vector<double> pass_rates;       // empirical
    std::vector<double> exact_pass;       // tr(rho proj) per test
    long samples_per_test = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    double plug_in_bound = 0.0;             // sum rates - (T-1)
    double confidence_adjusted_bound = 0.0; // sum rates - (T-1) - T*eps
    double exact_bound = 0.0;               // sum of exact passes - (T-1)
    double exact_fidelity_sq = 0.0;         // tr rho psi
};

long required_samples(double epsilon, double delta, int tests);

// samples_override must be >= required_samples when given.
EstimateReport certify(const DensityMatrix& rho, const BipartiteStabilizer& stab,
                       double epsilon, double delta, RngStream rng,
                       std::optional<long> samples_override = std::nullopt);

EstimateReport certify(const DensityMatrix& rho, const StabilizerFamily& fam,
                       double epsilon, double delta, RngStream rng,
                       std::optional<long> samples_override = std::nullopt);

} // namespace sepstab
