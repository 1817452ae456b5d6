#include "sepstab/stabilizer.hpp"

#include <cmath>
#include <numbers>

namespace sepstab {

namespace {
constexpr double TWO_PI = 2.0 * std::numbers::pi;
} // namespace

ConjugateBasis fourier_conjugate_basis(int d) {
    if (d < 1) throw InvalidParameters("fourier_conjugate_basis: d must be >= 1");
    ConjugateBasis cb;
    cb.dim = d;
    cb.phases.resize(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        for (int a = 0; a < d; ++a)
            cb.phases[static_cast<std::size_t>(j * d + a)] =
                TWO_PI * static_cast<double>(j) * static_cast<double>(a) / d;
    return cb;
}

ConjugateBasis custom_conjugate_basis(int d, std::vector<double> phases) {
    if (d < 1) throw InvalidParameters("custom_conjugate_basis: d must be >= 1");
    if (phases.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d))
        throw DimensionMismatch("custom_conjugate_basis: phase table must be d x d");
    ConjugateBasis cb;
    cb.dim = d;
    cb.phases = std::move(phases);
    // Gram matrix of the implied vectors must be the identity.
    const double inv_d = 1.0 / d;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            cdouble g = 0.0;
            for (int j = 0; j < d; ++j)
                g += std::polar(inv_d, cb.phase(j, b) - cb.phase(j, a));
            cdouble want = (a == b) ? cdouble{1.0} : cdouble{0.0};
            if (std::abs(g - want) > TOL_ORTHO)
                throw NotUnbiasedBasis("custom_conjugate_basis: vectors not orthonormal");
        }
    return cb;
}

Ket conjugate_vector(const ConjugateBasis& cb, const std::vector<Ket>& basis_a, int alpha) {
    if (static_cast<int>(basis_a.size()) != cb.dim)
        throw DimensionMismatch("conjugate_vector: basis size != conjugate dimension");
    const double amp = 1.0 / std::sqrt(static_cast<double>(cb.dim));
    std::vector<cdouble> v(basis_a[0].amp.size(), 0.0);
    for (int j = 0; j < cb.dim; ++j)
        kernels::active().axpy(v.size(), std::polar(amp, cb.phase(j, alpha)),
                               basis_a[static_cast<std::size_t>(j)].amp.data(), v.data());
    return Ket(std::move(v), basis_a[0].dims);
}

std::vector<Ket> build_bob_states(const SchmidtForm& f, const ConjugateBasis& cb) {
    if (cb.dim != f.d())
        throw DimensionMismatch("build_bob_states: conjugate dimension != Schmidt dimension");
    std::vector<Ket> out;
    out.reserve(static_cast<std::size_t>(cb.dim));
    for (int a = 0; a < cb.dim; ++a) {
        std::vector<cdouble> v(f.basis_b[0].amp.size(), 0.0);
        for (int j = 0; j < cb.dim; ++j)
            kernels::active().axpy(
                v.size(), std::polar(std::sqrt(f.coeffs[static_cast<std::size_t>(j)]), -cb.phase(j, a)),
                f.basis_b[static_cast<std::size_t>(j)].amp.data(), v.data());
        out.emplace_back(std::move(v), f.basis_b[0].dims);
    }
    return out;
}

namespace {

Operator sum_of_products(const std::vector<Ket>& left, const std::vector<Ket>& right) {
    Operator acc = tensor(outer(left[0]), outer(right[0]));
    for (std::size_t j = 1; j < left.size(); ++j) {
        Operator term = tensor(outer(left[j]), outer(right[j]));
        kernels::active().axpy(acc.mat.a.size(), 1.0, term.mat.a.data(), acc.mat.a.data());
    }
    return acc;
}

} // namespace

Operator build_schmidt_projector(const SchmidtForm& f) {
    return sum_of_products(f.basis_a, f.basis_b);
}

Operator build_conjugate_projector(const SchmidtForm& f, const ConjugateBasis& cb) {
    std::vector<Ket> alphas;
    alphas.reserve(static_cast<std::size_t>(cb.dim));
    for (int a = 0; a < cb.dim; ++a) alphas.push_back(conjugate_vector(cb, f.basis_a, a));
    return sum_of_products(alphas, build_bob_states(f, cb));
}

BipartiteStabilizer stabilizer_from_schmidt(Ket target, SchmidtForm f, ConjugateBasis cb) {
    BipartiteStabilizer s;
    s.source_dims = target.dims;
    s.target = std::move(target);
    s.conj = std::move(cb);
    s.alpha_states.reserve(static_cast<std::size_t>(s.conj.dim));
    for (int a = 0; a < s.conj.dim; ++a)
        s.alpha_states.push_back(conjugate_vector(s.conj, f.basis_a, a));
    s.bob_states = build_bob_states(f, s.conj);
    s.schmidt_proj = sum_of_products(f.basis_a, f.basis_b);
    s.conj_proj = sum_of_products(s.alpha_states, s.bob_states);
    s.schmidt = std::move(f);
    if (s.schmidt_proj.dim() != s.target.dim())
        throw DimensionMismatch("stabilizer_from_schmidt: target does not match the form");
    return s;
}

BipartiteStabilizer build_bipartite_stabilizer(const Ket& psi, int cut,
                                               const std::optional<ConjugateBasis>& basis) {
    SchmidtForm f = schmidt_decompose(psi, cut);
    ConjugateBasis cb = basis ? *basis : fourier_conjugate_basis(f.d());
    if (cb.dim != f.d())
        throw DimensionMismatch("build_bipartite_stabilizer: conjugate basis has wrong dimension");

    // embedded iff the two groups differed in dimension
    Ket grouped = regroup(psi, cut);
    Ket target = psi;
    if (grouped.dims[0] != grouped.dims[1])
        target = embed_ket(grouped, {f.d(), f.d()});

    BipartiteStabilizer s = stabilizer_from_schmidt(std::move(target), std::move(f), std::move(cb));
    s.source_dims = psi.dims;
    s.cut = cut;
    return s;
}

StabilizerReport verify_stabilizer(const BipartiteStabilizer& stab) {
    const Operator& p = stab.schmidt_proj;
    const Operator& q = stab.conj_proj;
    Operator psi_proj = outer(stab.target);

    auto vec_residual = [&](const Operator& op) {
        std::vector<cdouble> v = apply(op, stab.target);
        kernels::active().axpy(v.size(), -1.0, stab.target.amp.data(), v.data());
        return std::sqrt(kernels::active().norm2(v.size(), v.data()));
    };

    Operator pq = op_mul(p, q);
    Operator qp = op_mul(q, p);

    StabilizerReport r;
    r.p_fixes_target = vec_residual(p);
    r.q_fixes_target = vec_residual(q);
    r.pq_minus_psi = frob_dist(pq, psi_proj);
    r.qp_minus_psi = frob_dist(qp, psi_proj);
    r.commutator = frob_dist(pq, qp);
    r.pqp_minus_psi = frob_dist(op_mul(p, qp), psi_proj);
    r.pass = r.p_fixes_target <= TOL_STAB && r.q_fixes_target <= TOL_STAB &&
             r.pq_minus_psi <= TOL_STAB && r.qp_minus_psi <= TOL_STAB &&
             r.commutator <= TOL_STAB && r.pqp_minus_psi <= TOL_STAB;
    return r;
}

RescaledEffects rescale_bob_effects(const std::vector<Ket>& bob_states) {
    if (bob_states.empty())
        throw InvalidParameters("rescale_bob_effects: empty state list");
    Operator sum = outer(bob_states[0]);
    for (std::size_t a = 1; a < bob_states.size(); ++a) {
        Operator term = outer(bob_states[a]);
        kernels::active().axpy(sum.mat.a.size(), 1.0, term.mat.a.data(), sum.mat.a.data());
    }
    EigResult e = eig_hermitian(sum);
    double c = 1.0 / e.values.front();
    RescaledEffects out;
    out.coefficient = c;
    out.effects.reserve(bob_states.size());
    for (const Ket& b : bob_states) out.effects.push_back(op_scale(c, outer(b)));
    return out;
}

} // namespace sepstab
