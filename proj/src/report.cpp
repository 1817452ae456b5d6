#include "sepstab/report.hpp"

#include <cstdio>
#include <sstream>

#include "sepstab/jsonfmt.hpp"
#include "sepstab/kernels.hpp"

namespace sepstab {

namespace {

std::string emit_machine(const Report& rep) {
    jsonfmt::Writer w;
    w.begin_obj();
    w.key("schemaVersion");
    w.integer(1);
    w.key("mode");
    w.str(run_mode_name(rep.mode));
    w.key("config");
    emit_config_into(w, rep.config);
    w.key("parties");
    w.integer(rep.parties);
    w.key("dimension");
    w.integer(rep.dimension);
    w.key("kernels");
    w.str(kernels::active_name());

    if (rep.stabilizer) {
        const StabilizerReport& s = *rep.stabilizer;
        w.key("residual");
        w.begin_obj();
        w.key("P_psi");
        w.num(s.p_fixes_target);
        w.key("Q_psi");
        w.num(s.q_fixes_target);
        w.key("PQ_minus_psi");
        w.num(s.pq_minus_psi);
        w.key("QP_minus_psi");
        w.num(s.qp_minus_psi);
        w.key("commutator");
        w.num(s.commutator);
        w.key("PQP_minus_psi");
        w.num(s.pqp_minus_psi);
        w.end_obj();
        if (rep.rank_p) {
            w.key("ranks");
            w.begin_obj();
            w.key("P");
            w.integer(*rep.rank_p);
            w.key("Q");
            w.integer(*rep.rank_q);
            w.end_obj();
        }
    }
    if (rep.inequality_min_eig) {
        w.key("inequalityMinEigenvalue");
        w.num(*rep.inequality_min_eig);
    }
    if (rep.family) {
        const FamilyReport& f = *rep.family;
        w.key("family");
        w.begin_obj();
        w.key("leaves");
        w.integer(rep.leaf_count.value_or(0));
        w.key("residual");
        w.begin_obj();
        w.key("product_minus_psi");
        w.num(f.product_minus_psi);
        w.key("max_sibling_product");
        w.num(f.max_sibling_product_gap);
        w.key("max_sibling_commutator");
        w.num(f.max_sibling_commutator);
        w.end_obj();
        w.key("inequalityMinEigenvalue");
        w.num(f.inequality_min_eigenvalue);
        w.key("separabilityExact");
        w.boolean(f.separability_exact);
        w.key("projectorsOk");
        w.boolean(f.projectors_ok);
        w.end_obj();
    }
    if (rep.estimate) {
        const EstimateReport& e = *rep.estimate;
        w.key("passRates");
        w.begin_obj();
        for (std::size_t t = 0; t < e.labels.size(); ++t) {
            w.key(e.labels[t]);
            w.num(e.pass_rates[t]);
        }
        w.end_obj();
        w.key("samplesPerTest");
        w.integer(e.samples_per_test);
        w.key("epsilon");
        w.num(e.epsilon);
        w.key("delta");
        w.num(e.delta);
        w.key("bounds");
        w.begin_obj();
        w.key("plugIn");
        w.num(e.plug_in_bound);
        w.key("confidenceAdjusted");
        w.num(e.confidence_adjusted_bound);
        w.end_obj();
        w.key("exact");
        w.begin_obj();
        w.key("passRates");
        w.begin_obj();
        for (std::size_t t = 0; t < e.labels.size(); ++t) {
            w.key(e.labels[t]);
            w.num(e.exact_pass[t]);
        }
        w.end_obj();
        w.key("bound");
        w.num(e.exact_bound);
        w.key("fidelitySquared");
        w.num(e.exact_fidelity_sq);
        w.end_obj();
    }
    if (rep.channel) {
        const ChannelBoundReport& c = *rep.channel;
        w.key("channel");
        w.begin_obj();
        w.key("ensembleTermSchmidt");
        w.num(c.ensemble_term_schmidt);
        w.key("ensembleTermConj");
        w.num(c.ensemble_term_conj);
        w.key("bound");
        w.num(c.bound);
        w.key("entFidelitySq");
        w.num(c.ent_fidelity_sq);
        if (c.sampled) {
            w.key("sampled");
            w.begin_obj();
            w.key("samplesPerTerm");
            w.integer(c.sampled->samples_per_term);
            w.key("epsilon");
            w.num(c.sampled->epsilon);
            w.key("delta");
            w.num(c.sampled->delta);
            w.key("meanSchmidt");
            w.num(c.sampled->mean_schmidt);
            w.key("meanConj");
            w.num(c.sampled->mean_conj);
            w.key("adjustedBound");
            w.num(c.sampled->adjusted_bound);
            w.end_obj();
        }
        w.end_obj();
    }
    w.key("pass");
    w.boolean(rep.pass);
    w.end_obj();
    return w.take();
}

class Table {
public:
    void row(const std::string& k, const std::string& v) {
        rows_.emplace_back(k, v);
    }
    void row(const std::string& k, double v) { row(k, jsonfmt::fmt_double(v)); }
    void row(const std::string& k, long long v) { row(k, std::to_string(v)); }
    void row(const std::string& k, bool v) { row(k, std::string(v ? "yes" : "no")); }

    std::string render() const {
        std::size_t width = 0;
        for (const auto& [k, v] : rows_) width = std::max(width, k.size());
        std::ostringstream os;
        for (const auto& [k, v] : rows_) {
            os << "  " << k;
            os << std::string(width - k.size() + 2, ' ') << v << "\n";
        }
        return os.str();
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

std::string emit_human(const Report& rep) {
    std::ostringstream os;
    os << "sepstab " << run_mode_name(rep.mode) << " report\n";
    {
        Table t;
        std::string target = rep.config.target.generator.empty()
                                 ? "inline amplitudes"
                                 : rep.config.target.generator;
        t.row("target", target);
        t.row("parties", static_cast<long long>(rep.parties));
        t.row("dimension", static_cast<long long>(rep.dimension));
        t.row("kernels", std::string(kernels::active_name()));
        if (rep.config.seed) t.row("seed", static_cast<long long>(*rep.config.seed));
        os << t.render();
    }
    if (rep.stabilizer) {
        const StabilizerReport& s = *rep.stabilizer;
        os << "residuals\n";
        Table t;
        t.row("|| P psi - psi ||", s.p_fixes_target);
        t.row("|| Q psi - psi ||", s.q_fixes_target);
        t.row("|| PQ - psi proj ||_F", s.pq_minus_psi);
        t.row("|| QP - psi proj ||_F", s.qp_minus_psi);
        t.row("|| [P,Q] ||_F", s.commutator);
        t.row("|| PQP - psi proj ||_F", s.pqp_minus_psi);
        if (rep.rank_p) t.row("rank P / rank Q", std::to_string(*rep.rank_p) + " / " +
                                                     std::to_string(*rep.rank_q));
        if (rep.inequality_min_eig) t.row("inequality min eigenvalue", *rep.inequality_min_eig);
        os << t.render();
    }
    if (rep.family) {
        const FamilyReport& f = *rep.family;
        os << "family residuals (" << rep.leaf_count.value_or(0) << " leaves)\n";
        Table t;
        t.row("|| lex product - psi proj ||_F", f.product_minus_psi);
        t.row("max sibling product gap", f.max_sibling_product_gap);
        t.row("max sibling commutator", f.max_sibling_commutator);
        t.row("inequality min eigenvalue", f.inequality_min_eigenvalue);
        t.row("separability exact", f.separability_exact);
        t.row("projectors ok", f.projectors_ok);
        os << t.render();
    }
    if (rep.estimate) {
        const EstimateReport& e = *rep.estimate;
        os << "certification (epsilon " << jsonfmt::fmt_double(e.epsilon) << ", delta "
           << jsonfmt::fmt_double(e.delta) << ", " << e.samples_per_test
           << " samples per test)\n";
        Table t;
        for (std::size_t i = 0; i < e.labels.size(); ++i)
            t.row("rate[" + e.labels[i] + "] (exact)",
                  jsonfmt::fmt_double(e.pass_rates[i]) + "  (" +
                      jsonfmt::fmt_double(e.exact_pass[i]) + ")");
        t.row("plug-in bound", e.plug_in_bound);
        t.row("confidence-adjusted bound", e.confidence_adjusted_bound);
        t.row("exact bound", e.exact_bound);
        t.row("exact fidelity-squared", e.exact_fidelity_sq);
        os << t.render();
    }
    if (rep.channel) {
        const ChannelBoundReport& c = *rep.channel;
        os << "channel bound\n";
        Table t;
        t.row("ensemble term (schmidt)", c.ensemble_term_schmidt);
        t.row("ensemble term (conjugate)", c.ensemble_term_conj);
        t.row("bound", c.bound);
        t.row("entanglement fidelity-squared", c.ent_fidelity_sq);
        if (c.sampled) {
            t.row("sampled mean (schmidt)", c.sampled->mean_schmidt);
            t.row("sampled mean (conjugate)", c.sampled->mean_conj);
            t.row("sampled adjusted bound", c.sampled->adjusted_bound);
            t.row("samples per term", static_cast<long long>(c.sampled->samples_per_term));
        }
        os << t.render();
    }
    {
        Table t;
        t.row("elapsed seconds", rep.timing_seconds);
        t.row("pass", rep.pass);
        os << t.render();
    }
    return os.str();
}

} // namespace

std::string emit_report(const Report& rep, ReportFormat format) {
    return format == ReportFormat::Machine ? emit_machine(rep) : emit_human(rep);
}

} // namespace sepstab
