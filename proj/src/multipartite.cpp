#include "sepstab/multipartite.hpp"

#include <algorithm>
#include <cmath>

namespace sepstab {

Operator term_operator(const SeparableTerm& term) {
    Operator acc = outer(term.factors.back());
    for (auto it = term.factors.rbegin() + 1; it != term.factors.rend(); ++it)
        acc = tensor(outer(*it), acc);
    return acc;
}

namespace {

Operator sum_terms(const std::vector<SeparableTerm>& terms) {
    Operator acc = term_operator(terms[0]);
    for (std::size_t t = 1; t < terms.size(); ++t) {
        Operator op = term_operator(terms[t]);
        kernels::active().axpy(acc.mat.a.size(), 1.0, op.mat.a.data(), acc.mat.a.data());
    }
    return acc;
}

struct SubBuild {
    std::map<std::string, Operator> nodes;
    std::map<std::string, std::vector<SeparableTerm>> terms;
    std::map<std::string, ProtocolTree> tests;
};

// chi lives on parties level..n-1; level_bases[k] is the conjugate basis of
// the level-k cut.
SubBuild build_rec(const Ket& chi, std::size_t level,
                   const std::vector<ConjugateBasis>& level_bases) {
    SubBuild out;
    out.nodes.emplace("", outer(chi));
    if (chi.dims.size() == 1) {
        out.terms.emplace("", std::vector<SeparableTerm>{SeparableTerm{{chi}}});
        out.tests.emplace("", ProtocolTree::leaf(chi));
        return out;
    }

    SchmidtForm f = schmidt_for_cut(chi, 1);
    const ConjugateBasis& cb = level_bases[level];

    // branch 0: Schmidt basis on this party, conditional states |j>^rest
    std::vector<Ket> locals0 = f.basis_a;
    std::vector<SubBuild> subs0;
    subs0.reserve(locals0.size());
    for (int j = 0; j < f.d(); ++j)
        subs0.push_back(build_rec(f.basis_b[static_cast<std::size_t>(j)], level + 1, level_bases));

    // branch 1: conjugate basis, conditional states |psi_alpha>^rest
    std::vector<Ket> locals1;
    locals1.reserve(static_cast<std::size_t>(cb.dim));
    for (int a = 0; a < cb.dim; ++a) locals1.push_back(conjugate_vector(cb, f.basis_a, a));
    std::vector<Ket> bob = build_bob_states(f, cb);
    std::vector<SubBuild> subs1;
    subs1.reserve(bob.size());
    for (const Ket& b : bob) subs1.push_back(build_rec(b, level + 1, level_bases));

    const std::size_t n_here = chi.dims.size();
    auto assemble = [&](char bit, const std::vector<Ket>& locals, std::vector<SubBuild>& subs) {
        for (const auto& [w, sub_node] : subs[0].nodes) {
            std::string word = std::string(1, bit) + w;
            if (word.size() == n_here - 1) continue;  // leaves are summed from terms below
            Operator acc = tensor(outer(locals[0]), sub_node);
            for (std::size_t i = 1; i < subs.size(); ++i) {
                Operator part = tensor(outer(locals[i]), subs[i].nodes.at(w));
                kernels::active().axpy(acc.mat.a.size(), 1.0, part.mat.a.data(), acc.mat.a.data());
            }
            out.nodes.emplace(std::move(word), std::move(acc));
        }
        for (const auto& [w, sub_terms] : subs[0].terms) {
            std::string word = std::string(1, bit) + w;
            std::vector<SeparableTerm> terms;
            std::vector<ProtocolTree> children;
            for (std::size_t i = 0; i < subs.size(); ++i) {
                for (const SeparableTerm& t : subs[i].terms.at(w)) {
                    SeparableTerm ext;
                    ext.factors.reserve(t.factors.size() + 1);
                    ext.factors.push_back(locals[i]);
                    ext.factors.insert(ext.factors.end(), t.factors.begin(), t.factors.end());
                    terms.push_back(std::move(ext));
                }
                children.push_back(subs[i].tests.at(w));
            }
            out.nodes.emplace(word, sum_terms(terms));
            out.tests.emplace(word, ProtocolTree::node(locals, std::move(children)));
            out.terms.emplace(std::move(word), std::move(terms));
        }
    };
    assemble('0', locals0, subs0);
    assemble('1', locals1, subs1);
    return out;
}

} // namespace

StabilizerFamily build_family(const Ket& psi, const std::vector<int>& order,
                              const std::vector<std::optional<ConjugateBasis>>& bases,
                              int dim_cap) {
    const int n = static_cast<int>(psi.dims.size());
    if (n < 2) throw InvalidParameters("build_family: at least two parties required");
    if (psi.dim() > dim_cap)
        throw DimensionCap("build_family: total dimension " + std::to_string(psi.dim()) +
                           " exceeds cap " + std::to_string(dim_cap));
    std::vector<int> ord = order.empty() ? [&] {
        std::vector<int> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
        return v;
    }() : order;

    Ket target = permute_parties(psi, ord);

    if (n == 2 && target.dims[0] != target.dims[1]) {
        int d = std::max(target.dims[0], target.dims[1]);
        target = embed_ket(target, {d, d});
    }
    for (int k = 0; k + 1 < n; ++k) {
        int rest = 1;
        for (std::size_t i = static_cast<std::size_t>(k) + 1; i < target.dims.size(); ++i)
            rest *= target.dims[i];
        if (target.dims[static_cast<std::size_t>(k)] > rest)
            throw InvalidOrder("build_family: party " + std::to_string(k) +
                               " is larger than the remaining parties; reorder the parties");
    }

    std::vector<ConjugateBasis> level_bases;
    for (int k = 0; k + 1 < n; ++k) {
        int d = target.dims[static_cast<std::size_t>(k)];
        if (static_cast<std::size_t>(k) < bases.size() && bases[static_cast<std::size_t>(k)]) {
            if (bases[static_cast<std::size_t>(k)]->dim != d)
                throw DimensionMismatch("build_family: level " + std::to_string(k) +
                                        " basis has wrong dimension");
            level_bases.push_back(*bases[static_cast<std::size_t>(k)]);
        } else {
            level_bases.push_back(fourier_conjugate_basis(d));
        }
    }

    SubBuild top = build_rec(target, 0, level_bases);

    StabilizerFamily fam;
    fam.target = std::move(target);
    fam.order = std::move(ord);
    fam.source_dims = psi.dims;
    fam.nodes = std::move(top.nodes);
    fam.sep_terms = std::move(top.terms);
    fam.tests = std::move(top.tests);
    for (const auto& [w, op] : fam.nodes)
        if (static_cast<int>(w.size()) == n - 1) fam.leaves.push_back(w);
    std::sort(fam.leaves.begin(), fam.leaves.end());
    return fam;
}

FamilyReport verify_family(const StabilizerFamily& fam) {
    FamilyReport r{};
    Operator psi_proj = outer(fam.target);

    Operator prod = fam.nodes.at(fam.leaves.front());
    for (std::size_t i = 1; i < fam.leaves.size(); ++i)
        prod = op_mul(prod, fam.nodes.at(fam.leaves[i]));
    r.product_minus_psi = frob_dist(prod, psi_proj);

    r.max_sibling_product_gap = 0.0;
    r.max_sibling_commutator = 0.0;
    for (const auto& [w, op] : fam.nodes) {
        if (static_cast<int>(w.size()) >= fam.parties() - 1) continue;
        const Operator& c0 = fam.nodes.at(w + "0");
        const Operator& c1 = fam.nodes.at(w + "1");
        r.max_sibling_product_gap =
            std::max(r.max_sibling_product_gap, frob_dist(op, op_mul(c0, c1)));
        r.max_sibling_commutator = std::max(r.max_sibling_commutator, commutator_norm(c0, c1));
    }

    Operator ident = Operator::identity(fam.target.dims);
    Operator gap = op_sub(psi_proj, ident);  // -(1 - psi)
    for (const std::string& leaf : fam.leaves)
        gap = op_add(gap, op_sub(ident, fam.nodes.at(leaf)));
    r.inequality_min_eigenvalue = min_eigenvalue(gap);

    r.separability_exact = true;
    for (const std::string& leaf : fam.leaves) {
        Operator rebuilt = term_operator(fam.sep_terms.at(leaf)[0]);
        const auto& terms = fam.sep_terms.at(leaf);
        for (std::size_t t = 1; t < terms.size(); ++t) {
            Operator op = term_operator(terms[t]);
            kernels::active().axpy(rebuilt.mat.a.size(), 1.0, op.mat.a.data(),
                                   rebuilt.mat.a.data());
        }
        if (max_abs_diff(rebuilt.mat, fam.nodes.at(leaf).mat) != 0.0) r.separability_exact = false;
    }

    r.projectors_ok = true;
    for (const auto& [w, op] : fam.nodes)
        if (!is_projector(op)) r.projectors_ok = false;

    r.pass = r.product_minus_psi <= TOL_STAB && r.max_sibling_product_gap <= TOL_STAB &&
             r.max_sibling_commutator <= TOL_STAB && r.inequality_min_eigenvalue >= -TOL_PSD &&
             r.separability_exact && r.projectors_ok;
    return r;
}

DensityMatrix align_density(const DensityMatrix& rho, const StabilizerFamily& fam) {
    if (rho.dims() != fam.source_dims)
        throw DimensionMismatch("align_density: density matrix must be given on the source dims");
    Operator op = permute_parties(rho.op, fam.order);
    if (op.dims != fam.target.dims) op = embed_operator(op, fam.target.dims);
    DensityMatrix out;
    out.op = std::move(op);
    return out;
}

double fidelity_bound_multipartite(const DensityMatrix& rho, const StabilizerFamily& fam) {
    DensityMatrix aligned = align_density(rho, fam);
    double sum = 0.0;
    for (const std::string& leaf : fam.leaves)
        sum += mat_trace(matmul(aligned.op.mat, fam.nodes.at(leaf).mat)).real();
    return sum - (static_cast<double>(fam.leaves.size()) - 1.0);
}

std::vector<long long> measurement_count(int parties, int local_dim) {
    if (parties < 2 || local_dim < 2)
        throw InvalidParameters("measurement_count: need parties >= 2 and d >= 2");
    std::vector<long long> counts(static_cast<std::size_t>(parties));
    long long base = 2LL * local_dim;
    long long pw = 1;  // (2d)^(k-1)
    for (int k = 1; k <= parties; ++k) {
        counts[static_cast<std::size_t>(k - 1)] = (k == parties) ? pw : 2 * pw;
        pw *= base;
    }
    return counts;
}

} // namespace sepstab
