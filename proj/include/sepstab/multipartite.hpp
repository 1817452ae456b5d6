#pragma once

// Recursive family of 2^(n-1) fully separable stabilizer projectors for an
// n-party pure state.
//
// Words u over {0,1} index the tree: the empty word is |psi><psi| and each
// node splits at the next party's cut, bit 0 following the Schmidt-basis
// branch and bit 1 the conjugate-basis branch,
//
//   node(0w) = sum_j     |j><j|     (x) node_w(conditional |j>)
//   node(1w) = sum_alpha |a><a|     (x) node_w(conditional |psi_alpha>)
//
// For every internal word, node(u) = node(u0) node(u1) with commuting
// factors, the lexicographic product of the 2^(n-1) leaves is |psi><psi|,
// and 1 - |psi><psi| <= sum_u (1 - node(u)) over the leaves.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sepstab/protocol.hpp"
#include "sepstab/stabilizer.hpp"

namespace sepstab {

// One fully separable product term: a rank-1 local projector per party.
struct SeparableTerm {
    std::vector<Ket> factors;
};

// tensor(outer(f0), tensor(outer(f1), ...)); leaf operators are assembled as
// plain sums of these, so the stored term list reconstructs them bit-exactly.
Operator term_operator(const SeparableTerm& term);

struct StabilizerFamily {
    Ket target;                    // state after party reordering (and n=2 embedding)
    std::vector<int> order;        // order[k] = original party at position k
    std::vector<int> source_dims;  // factor dims as given
    std::map<std::string, Operator> nodes;  // every word, length 0 .. n-1
    std::vector<std::string> leaves;        // words of length n-1, lexicographic
    std::map<std::string, std::vector<SeparableTerm>> sep_terms;  // per leaf
    std::map<std::string, ProtocolTree> tests;                    // per leaf

    int parties() const { return static_cast<int>(target.dims.size()); }
};

// bases[k], when set, is the conjugate basis used at every cut of level k
// (dimension = the level-k party); Fourier by default. Throws DimensionCap
// when the total dimension exceeds dim_cap, InvalidOrder for a bad
// permutation or an ordering with dim(party k) > dim(remaining parties).
StabilizerFamily build_family(const Ket& psi, const std::vector<int>& order,
                              const std::vector<std::optional<ConjugateBasis>>& bases = {},
                              int dim_cap = DEFAULT_DIM_CAP);

struct FamilyReport {
    double product_minus_psi;           // || lex product of leaves - |psi><psi| ||_F
    double max_sibling_product_gap;     // max_u || node(u) - node(u0) node(u1) ||_F
    double max_sibling_commutator;      // max_u || [node(u0), node(u1)] ||_F
    double inequality_min_eigenvalue;   // min eig of sum_u(1-node(u)) - (1-psi)
    bool separability_exact;            // every leaf rebuilds from its term list
    bool projectors_ok;                 // every stored node passes is_projector
    bool pass;
};

FamilyReport verify_family(const StabilizerFamily& fam);

// sum_u tr(rho node(u)) - (2^(n-1) - 1); never exceeds tr(rho |psi><psi|).
// rho is given in the original party order and dims; the family applies its
// stored permutation (and n=2 embedding) itself.
double fidelity_bound_multipartite(const DensityMatrix& rho, const StabilizerFamily& fam);

// rho reordered/embedded into the family's ambient space.
DensityMatrix align_density(const DensityMatrix& rho, const StabilizerFamily& fam);

// Local measurement settings per party for the full family protocol:
// 2(2d)^(k-1) for party k < n and (2d)^(n-1) binary settings for the last.
std::vector<long long> measurement_count(int parties, int local_dim);

} // namespace sepstab
