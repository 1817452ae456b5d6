#pragma once

// Separable stabilizer pair for a bipartite pure state.
//
// In Schmidt coordinates |psi> = sum_j sqrt(lambda_j) |j>|j>, the pair is
//
//   P = sum_j |j><j| (x) |j><j|            (correlation check, Schmidt basis)
//   Q = sum_a |a><a| (x) |psi_a><psi_a|    (conjugate-basis check)
//
// with |a> = (1/sqrt d) sum_j e^{i phi(j,a)} |j> an unbiased basis and
// |psi_a> = sum_j sqrt(lambda_j) e^{-i phi(j,a)} |j> the conditional states
// Bob projects onto. Both are rank-d separable projectors whose unique joint
// +1-eigenstate is |psi>, and PQ = QP = |psi><psi|.

#include <optional>
#include <vector>

#include "sepstab/linalg.hpp"

namespace sepstab {

// Unbiased ("conjugate") basis given by a d x d phase table; every basis
// vector has amplitude magnitude 1/sqrt(d) against the computational basis
// by construction.
struct ConjugateBasis {
    int dim = 0;
    std::vector<double> phases;  // row-major, phases[j*dim + alpha]

    double phase(int j, int alpha) const {
        return phases[static_cast<std::size_t>(j * dim + alpha)];
    }
};

// Discrete Fourier phases phi(j, alpha) = 2 pi j alpha / d.
ConjugateBasis fourier_conjugate_basis(int d);

// Arbitrary phase table; throws NotUnbiasedBasis unless the implied vectors
// are orthonormal within TOL_ORTHO.
ConjugateBasis custom_conjugate_basis(int d, std::vector<double> phases);

// |alpha> expressed in the ambient A space spanned by basis_a.
Ket conjugate_vector(const ConjugateBasis& cb, const std::vector<Ket>& basis_a, int alpha);

// The d conditional states |psi_alpha>, unit vectors in the ambient B space.
std::vector<Ket> build_bob_states(const SchmidtForm& f, const ConjugateBasis& cb);

// P and Q lifted to the ambient product space.
Operator build_schmidt_projector(const SchmidtForm& f);
Operator build_conjugate_projector(const SchmidtForm& f, const ConjugateBasis& cb);

struct BipartiteStabilizer {
    Ket target;                    // embedded if the two sides differed in dimension
    std::vector<int> source_dims;  // factor dims of the state as given
    int cut = 1;                   // factors [0, cut) form the A side of the source
    SchmidtForm schmidt;
    ConjugateBasis conj;
    std::vector<Ket> alpha_states;  // conjugate basis, ambient A coordinates
    std::vector<Ket> bob_states;    // |psi_alpha>, ambient B coordinates
    Operator schmidt_proj;          // P
    Operator conj_proj;             // Q

    int d() const { return schmidt.d(); }
};

// Full construction from a state and a cut position; the conjugate basis
// defaults to Fourier. Unequal side dimensions embed into max(dim A, dim B).
BipartiteStabilizer build_bipartite_stabilizer(
    const Ket& psi, int cut,
    const std::optional<ConjugateBasis>& basis = std::nullopt);

// Assembly from an existing Schmidt form (the multipartite recursion enters
// here with schmidt_for_cut output).
BipartiteStabilizer stabilizer_from_schmidt(Ket target, SchmidtForm f, ConjugateBasis cb);

// Residuals of the stabilizer identities; pass iff all are <= TOL_STAB.
struct StabilizerReport {
    double p_fixes_target;   // || P|psi> - |psi> ||
    double q_fixes_target;   // || Q|psi> - |psi> ||
    double pq_minus_psi;     // || PQ - |psi><psi| ||_F
    double qp_minus_psi;     // || QP - |psi><psi| ||_F
    double commutator;       // || [P,Q] ||_F
    double pqp_minus_psi;    // || PQP - |psi><psi| ||_F
    bool pass;
};

StabilizerReport verify_stabilizer(const BipartiteStabilizer& stab);

// Uniform rescaling of Bob's projectors to POVM effects
// M_alpha = c |psi_alpha><psi_alpha| with c = 1/||sum |psi_a><psi_a|||_op,
// so that sum_alpha M_alpha <= identity with operator norm exactly 1.
struct RescaledEffects {
    double coefficient;
    std::vector<Operator> effects;
};

RescaledEffects rescale_bob_effects(const std::vector<Ket>& bob_states);

} // namespace sepstab
