#include "sepstab/runner.hpp"

#include <chrono>
#include <cstdlib>

namespace sepstab {

int dim_cap_from_env() {
    const char* e = std::getenv("SEPSTAB_DIM_CAP");
    if (e == nullptr) return DEFAULT_DIM_CAP;
    char* end = nullptr;
    long v = std::strtol(e, &end, 10);
    if (end == e || *end != '\0' || v < 2)
        throw ValidationError("SEPSTAB_DIM_CAP: not a valid dimension cap");
    return static_cast<int>(v);
}

namespace {

std::optional<ConjugateBasis> bipartite_basis(const ExperimentConfig& cfg) {
    if (cfg.conjugate_phases.empty()) return std::nullopt;
    return custom_conjugate_basis(cfg.conjugate_dim, cfg.conjugate_phases);
}

std::vector<std::optional<ConjugateBasis>> level_bases(const ExperimentConfig& cfg,
                                                       const std::vector<int>& ordered_dims) {
    std::vector<std::optional<ConjugateBasis>> out(ordered_dims.size() - 1);
    if (cfg.conjugate_phases.empty()) return out;
    ConjugateBasis cb = custom_conjugate_basis(cfg.conjugate_dim, cfg.conjugate_phases);
    for (std::size_t k = 0; k + 1 < ordered_dims.size(); ++k) {
        if (ordered_dims[k] != cb.dim)
            throw ValidationError(
                "conjugateBasis: inline phase table must match every party dimension for "
                "multipartite targets");
        out[k] = cb;
    }
    return out;
}

DensityMatrix prepared_state(const ExperimentConfig& cfg, const Ket& target,
                             const std::string& base_dir) {
    DensityMatrix rho = DensityMatrix::pure(target);
    if (!cfg.noise) return rho;
    int parties = static_cast<int>(target.dims.size());
    int factor = cfg.noise->on_factor.value_or(parties - 1);
    if (factor < 0 || factor >= parties)
        throw ValidationError("noise.onFactor: index out of range");
    KrausChannel chan =
        build_noise(*cfg.noise, target.dims[static_cast<std::size_t>(factor)], base_dir);
    if (!chan.square())
        throw ValidationError("noise: certification needs a dimension-preserving channel");
    return apply_channel(chan, rho, factor);
}

void require_seed(const ExperimentConfig& cfg) {
    if (!cfg.seed)
        throw ValidationError("seed: required (certify and sampled channel-bound runs are "
                              "reproducible by construction)");
}

} // namespace

Report run(const ExperimentConfig& cfg, const std::string& base_dir) {
    if (!cfg.mode) throw ValidationError("mode: missing");
    const auto t0 = std::chrono::steady_clock::now();

    Report rep;
    rep.mode = *cfg.mode;
    rep.config = cfg;

    Ket target = build_target(cfg.target);
    if (target.dims.size() < 2)
        throw ValidationError("target: needs at least two tensor factors");
    // partyOrder relabels the factors once, up front; noise factors and
    // reports refer to the new order
    if (!cfg.party_order.empty()) target = permute_parties(target, cfg.party_order);
    int cap = dim_cap_from_env();
    if (target.dim() > cap)
        throw DimensionCap("target dimension " + std::to_string(target.dim()) +
                           " exceeds the cap " + std::to_string(cap));
    rep.parties = static_cast<int>(target.dims.size());
    rep.dimension = target.dim();
    const bool bipartite = rep.parties == 2;

    switch (*cfg.mode) {
        case RunMode::Construct:
        case RunMode::Verify: {
            if (bipartite) {
                BipartiteStabilizer stab = build_bipartite_stabilizer(target, 1, bipartite_basis(cfg));
                StabilizerReport sr = verify_stabilizer(stab);
                rep.stabilizer = sr;
                rep.rank_p = projector_rank(stab.schmidt_proj);
                rep.rank_q = projector_rank(stab.conj_proj);
                rep.pass = sr.pass && *rep.rank_p == stab.d() && *rep.rank_q == stab.d();
                if (*cfg.mode == RunMode::Verify) {
                    Operator ident = Operator::identity(stab.target.dims);
                    Operator gap = op_sub(outer(stab.target), ident);
                    gap = op_add(gap, op_sub(ident, stab.schmidt_proj));
                    gap = op_add(gap, op_sub(ident, stab.conj_proj));
                    double mineig = min_eigenvalue(gap);
                    rep.inequality_min_eig = mineig;
                    rep.pass = rep.pass && mineig >= -TOL_PSD;
                }
            } else {
                StabilizerFamily fam = build_family(target, {}, level_bases(cfg, target.dims), cap);
                FamilyReport fr = verify_family(fam);
                rep.family = fr;
                rep.leaf_count = static_cast<int>(fam.leaves.size());
                rep.pass = fr.pass;
            }
            break;
        }
        case RunMode::Certify: {
            require_seed(cfg);
            if (!cfg.epsilon || !cfg.delta)
                throw ValidationError("certify: epsilon and delta are required");
            int tests = bipartite ? 2 : (1 << (rep.parties - 1));
            long required = required_samples(*cfg.epsilon, *cfg.delta, tests);
            if (cfg.samples && *cfg.samples < required)
                throw ValidationError(
                    "samples: below the Hoeffding requirement ceil(ln(2*tests/delta)/(2 eps^2)) = " +
                    std::to_string(required));
            DensityMatrix rho = prepared_state(cfg, target, base_dir);
            RngStream rng(*cfg.seed);
            EstimateReport est;
            if (bipartite) {
                BipartiteStabilizer stab = build_bipartite_stabilizer(target, 1, bipartite_basis(cfg));
                est = certify(rho, stab, *cfg.epsilon, *cfg.delta, rng, cfg.samples);
            } else {
                StabilizerFamily fam = build_family(target, {}, level_bases(cfg, target.dims), cap);
                est = certify(rho, fam, *cfg.epsilon, *cfg.delta, rng, cfg.samples);
            }
            rep.estimate = est;
            rep.pass = est.exact_bound <= est.exact_fidelity_sq + TOL_STAB;
            break;
        }
        case RunMode::ChannelBound: {
            if (!cfg.noise) throw ValidationError("channel-bound: noise block is required");
            if (!bipartite)
                throw ValidationError("channel-bound: target must be bipartite (two factors)");
            if (target.dims[0] > target.dims[1])
                throw ValidationError(
                    "channel-bound: needs dim A <= dim B so the probe states live on the "
                    "channel's input space");
            KrausChannel chan = build_noise(*cfg.noise, target.dims[1], base_dir);
            if (!chan.square())
                throw ValidationError("channel-bound: channel must preserve the B dimension");
            BipartiteStabilizer stab = build_bipartite_stabilizer(target, 1, bipartite_basis(cfg));
            ChannelBoundReport cb;
            if (cfg.epsilon || cfg.delta) {
                if (!cfg.epsilon || !cfg.delta)
                    throw ValidationError("channel-bound: sampling needs both epsilon and delta");
                require_seed(cfg);
                cb = channel_bound_sampled(chan, stab, *cfg.epsilon, *cfg.delta,
                                             RngStream(*cfg.seed));
            } else {
                cb = channel_bound_exact(chan, stab);
            }
            rep.channel = cb;
            rep.pass = cb.bound <= cb.ent_fidelity_sq + TOL_STAB;
            break;
        }
    }

    rep.timing_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace sepstab
