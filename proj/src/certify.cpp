#include "sepstab/certify.hpp"

#include <algorithm>
#include <cmath>

namespace sepstab {

double pass_probability(const DensityMatrix& rho, const Operator& proj) {
    if (rho.dims() != proj.dims)
        throw DimensionMismatch("pass_probability: dimension mismatch");
    if (!is_projector(proj))
        throw InvalidParameters("pass_probability: operator is not a projector");
    double t = mat_trace(matmul(rho.op.mat, proj.mat)).real();
    return std::clamp(t, 0.0, 1.0);
}

double fidelity_squared(const DensityMatrix& rho, const Ket& psi) {
    if (rho.dim() != psi.dim())
        throw DimensionMismatch("fidelity_squared: dimension mismatch");
    std::vector<cdouble> v = mat_vec(rho.op.mat, psi.amp);
    return kernels::active().dotc(v.size(), psi.amp.data(), v.data()).real();
}

DensityMatrix align_density(const DensityMatrix& rho, const BipartiteStabilizer& stab) {
    if (rho.dims() == stab.target.dims) return rho;
    if (rho.dims() != stab.source_dims)
        throw DimensionMismatch(
            "align_density: density matrix matches neither ambient nor source dims");
    // regroup to the two cut groups (metadata only), then zero-pad both into
    // the stabilizer's d x d ambient space
    int src_a = 1;
    for (int k = 0; k < stab.cut; ++k) src_a *= stab.source_dims[static_cast<std::size_t>(k)];
    Operator op = rho.op;
    op.dims = {src_a, rho.dim() / src_a};
    DensityMatrix grouped;
    grouped.op = std::move(op);
    return embed_density(grouped, stab.target.dims);
}

// ---------------------------------------------------------------------------
// Conditioning

namespace {

// Unnormalized post-measurement operator on the remaining factors after the
// leading factor group is projected onto |a>: B[i][j] = <a (x) i| R |a (x) j>.
CMatrix condition_first(const CMatrix& r, const std::vector<cdouble>& a) {
    const std::size_t da = a.size();
    const std::size_t db = r.rows / da;
    CMatrix b(db, db);
    for (std::size_t kk = 0; kk < da; ++kk) {
        if (a[kk] == cdouble{0.0, 0.0}) continue;
        for (std::size_t ll = 0; ll < da; ++ll) {
            if (a[ll] == cdouble{0.0, 0.0}) continue;
            cdouble w = std::conj(a[kk]) * a[ll];
            for (std::size_t i = 0; i < db; ++i)
                kernels::active().axpy(db, w, r.a.data() + (kk * db + i) * r.cols + ll * db,
                                       b.a.data() + i * db);
        }
    }
    return b;
}

double real_trace(const CMatrix& m) { return mat_trace(m).real(); }

// <v| B |v>
double expectation(const CMatrix& b, const std::vector<cdouble>& v) {
    std::vector<cdouble> bv = mat_vec(b, v);
    return kernels::active().dotc(v.size(), v.data(), bv.data()).real();
}

double enumerate_rec(const CMatrix& r, const ProtocolTree& tree) {
    if (tree.is_leaf) return tree.accept_scale * expectation(r, tree.accept.amp);
    double acc = 0.0;
    for (std::size_t i = 0; i < tree.basis.size(); ++i)
        acc += enumerate_rec(condition_first(r, tree.basis[i].amp), tree.next[i]);
    return acc;
}

} // namespace

double enumerate_accept_probability(const DensityMatrix& rho, const ProtocolTree& tree) {
    return enumerate_rec(rho.op.mat, tree);
}

ProtocolOutcome simulate_tree_test(const DensityMatrix& rho, const ProtocolTree& tree,
                                   const std::string& label, RngStream& rng) {
    ProtocolOutcome out;
    out.test = label;
    CMatrix current = rho.op.mat;
    const ProtocolTree* node = &tree;
    while (!node->is_leaf) {
        std::vector<double> probs(node->basis.size());
        std::vector<CMatrix> conds(node->basis.size());
        for (std::size_t i = 0; i < node->basis.size(); ++i) {
            conds[i] = condition_first(current, node->basis[i].amp);
            probs[i] = std::max(0.0, real_trace(conds[i]));
        }
        std::size_t pick = rng.discrete(probs);
        out.path.push_back(static_cast<int>(pick));
        double p = real_trace(conds[pick]);
        current = mat_scale(1.0 / p, conds[pick]);
        node = &node->next[pick];
    }
    double accept_prob = std::clamp(node->accept_scale * expectation(current, node->accept.amp),
                                    0.0, 1.0);
    out.accepted = rng.bernoulli(accept_prob);
    out.alice_outcome = out.path.empty() ? -1 : out.path.front();
    out.bob_outcome = out.accepted ? 1 : 0;
    return out;
}

ProtocolTree p_test_tree(const BipartiteStabilizer& stab) {
    std::vector<ProtocolTree> leaves;
    leaves.reserve(stab.schmidt.basis_b.size());
    for (const Ket& b : stab.schmidt.basis_b) leaves.push_back(ProtocolTree::leaf(b));
    return ProtocolTree::node(stab.schmidt.basis_a, std::move(leaves));
}

ProtocolTree q_test_tree(const BipartiteStabilizer& stab, bool rescaled) {
    double scale = 1.0;
    if (rescaled) scale = rescale_bob_effects(stab.bob_states).coefficient;
    std::vector<ProtocolTree> leaves;
    leaves.reserve(stab.bob_states.size());
    for (const Ket& b : stab.bob_states) leaves.push_back(ProtocolTree::leaf(b, scale));
    return ProtocolTree::node(stab.alpha_states, std::move(leaves));
}

ProtocolOutcome simulate_p_test(const DensityMatrix& rho, const BipartiteStabilizer& stab,
                                RngStream& rng) {
    DensityMatrix r = align_density(rho, stab);
    const int d = stab.d();
    // joint Born distribution over (j_A, j_B) in the Schmidt bases
    std::vector<double> joint(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
    for (int ja = 0; ja < d; ++ja) {
        CMatrix cond = condition_first(r.op.mat, stab.schmidt.basis_a[static_cast<std::size_t>(ja)].amp);
        for (int jb = 0; jb < d; ++jb)
            joint[static_cast<std::size_t>(ja * d + jb)] = std::max(
                0.0, expectation(cond, stab.schmidt.basis_b[static_cast<std::size_t>(jb)].amp));
    }
    std::size_t pick = rng.discrete(joint);
    ProtocolOutcome out;
    out.test = "P";
    out.alice_outcome = static_cast<int>(pick) / d;
    out.bob_outcome = static_cast<int>(pick) % d;
    out.path = {out.alice_outcome, out.bob_outcome};
    out.accepted = out.alice_outcome == out.bob_outcome;
    return out;
}

ProtocolOutcome simulate_q_test(const DensityMatrix& rho, const BipartiteStabilizer& stab,
                                RngStream& rng, bool rescaled) {
    DensityMatrix r = align_density(rho, stab);
    ProtocolOutcome out = simulate_tree_test(r, q_test_tree(stab, rescaled), "Q", rng);
    return out;
}

// ---------------------------------------------------------------------------
// Certification

long required_samples(double epsilon, double delta, int tests) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) || tests < 1)
        throw InvalidParameters("required_samples: need 0 < epsilon < 1, 0 < delta < 1");
    return static_cast<long>(
        std::ceil(std::log(2.0 * tests / delta) / (2.0 * epsilon * epsilon)));
}

namespace {

struct NamedTest {
    std::string label;
    ProtocolTree tree;
    double exact;
};

EstimateReport run_certification(const DensityMatrix& aligned, const Ket& target,
                                 std::vector<NamedTest> tests, double epsilon, double delta,
                                 RngStream& rng, std::optional<long> samples_override) {
    const int t_count = static_cast<int>(tests.size());
    long required = required_samples(epsilon, delta, t_count);
    long n = samples_override.value_or(required);
    if (n < required)
        throw InvalidParameters("certify: samples override below the Hoeffding requirement " +
                                std::to_string(required));

    EstimateReport rep;
    rep.samples_per_test = n;
    rep.epsilon = epsilon;
    rep.delta = delta;
    double rate_sum = 0.0, exact_sum = 0.0;
    for (int t = 0; t < t_count; ++t) {
        RngStream sub = rng.substream(static_cast<std::uint64_t>(t));
        long accepted = 0;
        for (long i = 0; i < n; ++i)
            if (simulate_tree_test(aligned, tests[static_cast<std::size_t>(t)].tree,
                                   tests[static_cast<std::size_t>(t)].label, sub)
                    .accepted)
                ++accepted;
        double rate = static_cast<double>(accepted) / static_cast<double>(n);
        rep.labels.push_back(tests[static_cast<std::size_t>(t)].label);
        rep.pass_rates.push_back(rate);
        rep.exact_pass.push_back(tests[static_cast<std::size_t>(t)].exact);
        rate_sum += rate;
        exact_sum += tests[static_cast<std::size_t>(t)].exact;
    }
    rep.plug_in_bound = rate_sum - (t_count - 1);
    rep.confidence_adjusted_bound = rate_sum - (t_count - 1) - t_count * epsilon;
    rep.exact_bound = exact_sum - (t_count - 1);
    rep.exact_fidelity_sq = fidelity_squared(aligned, target);
    return rep;
}

} // namespace

EstimateReport certify(const DensityMatrix& rho, const BipartiteStabilizer& stab, double epsilon,
                       double delta, RngStream rng, std::optional<long> samples_override) {
    DensityMatrix aligned = align_density(rho, stab);
    std::vector<NamedTest> tests;
    tests.push_back({"P", p_test_tree(stab), pass_probability(aligned, stab.schmidt_proj)});
    tests.push_back({"Q", q_test_tree(stab), pass_probability(aligned, stab.conj_proj)});
    return run_certification(aligned, stab.target, std::move(tests), epsilon, delta, rng,
                             samples_override);
}

EstimateReport certify(const DensityMatrix& rho, const StabilizerFamily& fam, double epsilon,
                       double delta, RngStream rng, std::optional<long> samples_override) {
    DensityMatrix aligned = align_density(rho, fam);
    std::vector<NamedTest> tests;
    for (const std::string& leaf : fam.leaves)
        tests.push_back(
            {leaf, fam.tests.at(leaf), pass_probability(aligned, fam.nodes.at(leaf))});
    return run_certification(aligned, fam.target, std::move(tests), epsilon, delta, rng,
                             samples_override);
}

double fidelity_lower_bound(const DensityMatrix& rho, const BipartiteStabilizer& stab) {
    DensityMatrix aligned = align_density(rho, stab);
    return pass_probability(aligned, stab.schmidt_proj) +
           pass_probability(aligned, stab.conj_proj) - 1.0;
}

} // namespace sepstab
