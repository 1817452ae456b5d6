#include "sepstab/channels.hpp"

#include <cmath>
#include <numbers>

namespace sepstab {

namespace {

// shift X|j> = |j+1 mod d>, clock Z|j> = w^j |j>
CMatrix shift_matrix(int d) {
    CMatrix x(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        x.at(static_cast<std::size_t>((j + 1) % d), static_cast<std::size_t>(j)) = 1.0;
    return x;
}

CMatrix clock_matrix(int d) {
    CMatrix z(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        z.at(static_cast<std::size_t>(j), static_cast<std::size_t>(j)) =
            std::polar(1.0, 2.0 * std::numbers::pi * j / d);
    return z;
}

CMatrix matrix_power(const CMatrix& m, int k) {
    CMatrix acc = CMatrix::identity(m.rows);
    for (int i = 0; i < k; ++i) acc = matmul(acc, m);
    return acc;
}

} // namespace

KrausChannel KrausChannel::from_matrices(std::vector<CMatrix> ops) {
    if (ops.empty()) throw NotCPTP("KrausChannel: empty Kraus list");
    for (const CMatrix& k : ops)
        if (k.rows != ops.front().rows || k.cols != ops.front().cols)
            throw DimensionMismatch("KrausChannel: inconsistent Kraus shapes");
    CMatrix sum(ops.front().cols, ops.front().cols);
    for (const CMatrix& k : ops) {
        CMatrix t = matmul(adjoint(k), k);
        kernels::active().axpy(sum.a.size(), 1.0, t.a.data(), sum.a.data());
    }
    if (frob_dist(sum, CMatrix::identity(sum.rows)) > TOL_CPTP)
        throw NotCPTP("KrausChannel: completeness sum deviates from the identity");
    KrausChannel c;
    c.kraus = std::move(ops);
    return c;
}

std::optional<NoiseKind> noise_kind_from_name(const std::string& name) {
    if (name == "depolarizing") return NoiseKind::Depolarizing;
    if (name == "dephasing") return NoiseKind::Dephasing;
    if (name == "amplitude-damping") return NoiseKind::AmplitudeDamping;
    if (name == "bit-flip") return NoiseKind::BitFlip;
    return std::nullopt;
}

KrausChannel builtin_noise(NoiseKind kind, int d, double p) {
    if (d < 2) throw UnsupportedDimension("builtin_noise: d must be >= 2");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameters("builtin_noise: p must be in [0,1]");
    std::vector<CMatrix> ops;
    auto push_scaled = [&](double coeff, CMatrix m) {
        if (coeff <= 0.0) return;  // drop vanishing Kraus terms
        ops.push_back(mat_scale(std::sqrt(coeff), m));
    };
    const std::size_t du = static_cast<std::size_t>(d);
    switch (kind) {
        case NoiseKind::Depolarizing: {
            // (1-p) rho + p 1/d via the Weyl twirl: sum_{ab} W rho W^dag / d^2
            double dd = static_cast<double>(d) * d;
            push_scaled(1.0 - p + p / dd, CMatrix::identity(du));
            CMatrix x = shift_matrix(d), z = clock_matrix(d);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                    if (a == 0 && b == 0) continue;
                    push_scaled(p / dd, matmul(matrix_power(x, a), matrix_power(z, b)));
                }
            break;
        }
        case NoiseKind::Dephasing: {
            // (1-p) rho + p diag(rho) via the clock twirl
            push_scaled(1.0 - p * (d - 1) / d, CMatrix::identity(du));
            CMatrix z = clock_matrix(d);
            for (int k = 1; k < d; ++k) push_scaled(p / d, matrix_power(z, k));
            break;
        }
        case NoiseKind::AmplitudeDamping: {
            if (d != 2)
                throw UnsupportedDimension("amplitude-damping is defined for d = 2 only");
            CMatrix k0(2, 2), k1(2, 2);
            k0.at(0, 0) = 1.0;
            k0.at(1, 1) = std::sqrt(1.0 - p);
            ops.push_back(std::move(k0));
            if (p > 0.0) {
                k1.at(0, 1) = std::sqrt(p);
                ops.push_back(std::move(k1));
            }
            break;
        }
        case NoiseKind::BitFlip: {
            push_scaled(1.0 - p, CMatrix::identity(du));
            push_scaled(p, shift_matrix(d));
            break;
        }
    }
    return KrausChannel::from_matrices(std::move(ops));
}

DensityMatrix apply_channel(const KrausChannel& chan, const DensityMatrix& rho, int on_factor) {
    if (on_factor < 0 || on_factor >= static_cast<int>(rho.dims().size()))
        throw DimensionMismatch("apply_channel: factor index out of range");
    if (rho.dims()[static_cast<std::size_t>(on_factor)] != chan.dim_in())
        throw DimensionMismatch("apply_channel: factor dimension != channel input");
    // construction guarantees completeness; re-check cheaply in case the
    // Kraus list was assembled by hand
    CMatrix comp(static_cast<std::size_t>(chan.dim_in()), static_cast<std::size_t>(chan.dim_in()));
    for (const CMatrix& k : chan.kraus) {
        CMatrix t = matmul(adjoint(k), k);
        kernels::active().axpy(comp.a.size(), 1.0, t.a.data(), comp.a.data());
    }
    if (frob_dist(comp, CMatrix::identity(comp.rows)) > TOL_CPTP)
        throw NotCPTP("apply_channel: Kraus set is not trace preserving");

    int pre = 1, post = 1;
    for (int i = 0; i < on_factor; ++i) pre *= rho.dims()[static_cast<std::size_t>(i)];
    for (std::size_t i = static_cast<std::size_t>(on_factor) + 1; i < rho.dims().size(); ++i)
        post *= rho.dims()[i];

    std::vector<int> out_dims = rho.dims();
    out_dims[static_cast<std::size_t>(on_factor)] = chan.dim_out();
    std::size_t out_dim = static_cast<std::size_t>(pre) * static_cast<std::size_t>(chan.dim_out()) *
                          static_cast<std::size_t>(post);
    CMatrix acc(out_dim, out_dim);
    CMatrix ipre = CMatrix::identity(static_cast<std::size_t>(pre));
    CMatrix ipost = CMatrix::identity(static_cast<std::size_t>(post));
    for (const CMatrix& k : chan.kraus) {
        CMatrix lifted = kron(kron(ipre, k), ipost);
        CMatrix term = matmul(matmul(lifted, rho.op.mat), adjoint(lifted));
        kernels::active().axpy(acc.a.size(), 1.0, term.a.data(), acc.a.data());
    }
    DensityMatrix out;
    out.op = Operator(std::move(acc), std::move(out_dims));
    return out;
}

double state_fidelity_through(const KrausChannel& chan, const Ket& phi) {
    if (!chan.square() || phi.dim() != chan.dim_in())
        throw DimensionMismatch("state_fidelity_through: channel/state dimensions mismatch");
    double acc = 0.0;
    for (const CMatrix& k : chan.kraus) {
        std::vector<cdouble> v = mat_vec(k, phi.amp);
        acc += std::norm(kernels::active().dotc(v.size(), phi.amp.data(), v.data()));
    }
    return acc;
}

double entanglement_fidelity(const KrausChannel& chan, const Ket& psi) {
    if (!chan.square())
        throw DimensionMismatch("entanglement_fidelity: channel must be square");
    // locate the trailing factor group matching dim_in
    int db = 1;
    int cut = static_cast<int>(psi.dims.size());
    while (cut > 0 && db < chan.dim_in()) {
        --cut;
        db *= psi.dims[static_cast<std::size_t>(cut)];
    }
    if (db != chan.dim_in() || cut == 0)
        throw DimensionMismatch("entanglement_fidelity: no trailing group matches the channel");
    int da = psi.dim() / db;
    double acc = 0.0;
    for (const CMatrix& k : chan.kraus) {
        cdouble amp = 0.0;
        for (int a = 0; a < da; ++a) {
            const cdouble* r = psi.amp.data() + static_cast<std::size_t>(a) * static_cast<std::size_t>(db);
            std::vector<cdouble> kr = mat_vec(k, std::vector<cdouble>(r, r + db));
            amp += kernels::active().dotc(static_cast<std::size_t>(db), r, kr.data());
        }
        acc += std::norm(amp);
    }
    return acc;
}

long channel_samples_per_term(double epsilon, double delta) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw InvalidParameters("channel_samples_per_term: need 0 < epsilon, delta < 1");
    return static_cast<long>(std::ceil(std::log(4.0 / delta) / (2.0 * epsilon * epsilon)));
}

namespace {

void check_channel_fits(const KrausChannel& chan, const BipartiteStabilizer& stab) {
    if (!chan.square() || chan.dim_in() != stab.schmidt.basis_b[0].dim())
        throw DimensionMismatch("channel does not act on the stabilizer's B side");
}

std::vector<double> probe_fidelities(const KrausChannel& chan, const std::vector<Ket>& probes) {
    std::vector<double> f;
    f.reserve(probes.size());
    for (const Ket& p : probes) f.push_back(state_fidelity_through(chan, p));
    return f;
}

} // namespace

ChannelBoundReport channel_bound_exact(const KrausChannel& chan,
                                         const BipartiteStabilizer& stab) {
    check_channel_fits(chan, stab);
    const int d = stab.d();
    ChannelBoundReport rep;
    std::vector<double> f_schmidt = probe_fidelities(chan, stab.schmidt.basis_b);
    std::vector<double> f_conj = probe_fidelities(chan, stab.bob_states);
    rep.ensemble_term_schmidt = 0.0;
    for (int j = 0; j < d; ++j)
        rep.ensemble_term_schmidt += stab.schmidt.coeffs[static_cast<std::size_t>(j)] *
                                     f_schmidt[static_cast<std::size_t>(j)];
    rep.ensemble_term_conj = 0.0;
    for (int a = 0; a < d; ++a) rep.ensemble_term_conj += f_conj[static_cast<std::size_t>(a)] / d;
    rep.bound = rep.ensemble_term_schmidt + rep.ensemble_term_conj - 1.0;
    rep.ent_fidelity_sq = entanglement_fidelity(chan, stab.target);
    if (rep.bound > rep.ent_fidelity_sq + TOL_STAB)
        throw Error("channel bound exceeded the entanglement fidelity; construction is broken");
    return rep;
}

ChannelBoundReport channel_bound_sampled(const KrausChannel& chan,
                                           const BipartiteStabilizer& stab, double epsilon,
                                           double delta, RngStream rng) {
    check_channel_fits(chan, stab);
    ChannelBoundReport rep = channel_bound_exact(chan, stab);
    const int d = stab.d();
    long n = channel_samples_per_term(epsilon, delta);

    std::vector<double> f_schmidt = probe_fidelities(chan, stab.schmidt.basis_b);
    std::vector<double> f_conj = probe_fidelities(chan, stab.bob_states);

    SampledChannelEstimate est;
    est.samples_per_term = n;
    est.epsilon = epsilon;
    est.delta = delta;

    RngStream s1 = rng.substream(0);
    long acc1 = 0;
    std::vector<double> lambda = stab.schmidt.coeffs;
    for (long i = 0; i < n; ++i) {
        std::size_t j = s1.discrete(lambda);
        if (s1.bernoulli(std::clamp(f_schmidt[j], 0.0, 1.0))) ++acc1;
    }
    est.mean_schmidt = static_cast<double>(acc1) / static_cast<double>(n);

    RngStream s2 = rng.substream(1);
    long acc2 = 0;
    for (long i = 0; i < n; ++i) {
        std::size_t a = static_cast<std::size_t>(s2.uniform() * d);
        if (a >= static_cast<std::size_t>(d)) a = static_cast<std::size_t>(d) - 1;
        if (s2.bernoulli(std::clamp(f_conj[a], 0.0, 1.0))) ++acc2;
    }
    est.mean_conj = static_cast<double>(acc2) / static_cast<double>(n);

    est.adjusted_bound = est.mean_schmidt + est.mean_conj - 2.0 * epsilon - 1.0;
    rep.sampled = est;
    return rep;
}

} // namespace sepstab
