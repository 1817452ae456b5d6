#include "sepstab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sepstab/states.hpp"
#include "sepstab/jsonfmt.hpp"

namespace sepstab {

using nlohmann::json;

std::string run_mode_name(RunMode m) {
    switch (m) {
        case RunMode::Construct: return "construct";
        case RunMode::Verify: return "verify";
        case RunMode::Certify: return "certify";
        case RunMode::ChannelBound: return "channel-bound";
    }
    return "?";
}

RunMode run_mode_from_name(const std::string& name) {
    if (name == "construct") return RunMode::Construct;
    if (name == "verify") return RunMode::Verify;
    if (name == "certify") return RunMode::Certify;
    if (name == "channel-bound") return RunMode::ChannelBound;
    throw ValidationError("mode: unknown value '" + name + "'");
}

namespace {

int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

cdouble parse_complex(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError(where + ": complex numbers are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<CMatrix> parse_kraus_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw ValidationError(where + ": expected a nonempty array of matrices");
    std::vector<CMatrix> out;
    for (std::size_t m = 0; m < j.size(); ++m) {
        const json& jm = j[m];
        if (!jm.is_array() || jm.empty() || !jm[0].is_array())
            throw ValidationError(where + ": each matrix is an array of rows");
        std::size_t rows = jm.size(), cols = jm[0].size();
        CMatrix mat(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            if (jm[r].size() != cols)
                throw ValidationError(where + ": ragged matrix rows");
            for (std::size_t c = 0; c < cols; ++c)
                mat.at(r, c) = parse_complex(jm[r][c], where);
        }
        out.push_back(std::move(mat));
    }
    return out;
}

TargetSpec parse_target(const json& j, std::vector<std::string>& warnings) {
    if (!j.is_object()) throw ValidationError("target: expected an object");
    TargetSpec t;
    if (j.contains("generator")) {
        t.generator = j.at("generator").get<std::string>();
        if (j.contains("parties")) t.parties = j.at("parties").get<int>();
        if (j.contains("d")) t.d = j.at("d").get<int>();
        if (j.contains("seed")) t.generator_seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("dims")) t.dims = j.at("dims").get<std::vector<int>>();
        return t;
    }
    if (!j.contains("amplitudes") || !j.contains("dims"))
        throw ValidationError("target: needs either a generator or amplitudes with dims");
    t.dims = j.at("dims").get<std::vector<int>>();
    const json& amps = j.at("amplitudes");
    if (!amps.is_array()) throw ValidationError("target.amplitudes: expected an array");
    for (const json& a : amps) t.amplitudes.push_back(parse_complex(a, "target.amplitudes"));
    if (dim_product(t.dims) != static_cast<int>(t.amplitudes.size()))
        throw ValidationError("target: product(dims) != amplitude count");
    double n2 = 0.0;
    for (const cdouble& a : t.amplitudes) n2 += std::norm(a);
    double norm = std::sqrt(n2);
    if (norm <= 0.0) throw ValidationError("target: zero amplitude vector");
    if (std::abs(norm - 1.0) > 1e-6)
        warnings.push_back("target amplitudes renormalized (norm was " +
                           jsonfmt::fmt_double(norm) + ")");
    for (cdouble& a : t.amplitudes) a /= norm;
    return t;
}

NoiseSpec parse_noise(const json& j) {
    if (!j.is_object()) throw ValidationError("noise: expected an object");
    NoiseSpec n;
    if (j.contains("onFactor")) n.on_factor = j.at("onFactor").get<int>();
    if (j.contains("name")) {
        n.name = j.at("name").get<std::string>();
        if (!noise_kind_from_name(n.name))
            throw ValidationError("noise.name: unknown channel '" + n.name + "'");
        if (!j.contains("p")) throw ValidationError("noise: builtin channels need p");
        n.p = j.at("p").get<double>();
        if (!(n.p >= 0.0 && n.p <= 1.0)) throw ValidationError("noise.p: must be in [0,1]");
        return n;
    }
    if (j.contains("kraus")) {
        n.kraus = parse_kraus_json(j.at("kraus"), "noise.kraus");
        return n;
    }
    if (j.contains("krausFile")) {
        n.kraus_file = j.at("krausFile").get<std::string>();
        return n;
    }
    throw ValidationError("noise: needs name, kraus, or krausFile");
}

} // namespace

ParsedConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("config is not valid JSON (line " +
                         std::to_string(line_of_byte(text, e.byte)) + "): " + e.what());
    }
    ParsedConfig out;
    ExperimentConfig& c = out.config;
    try {
        if (!j.is_object()) throw ValidationError("config: expected a JSON object");
        if (j.contains("schemaVersion") && j.at("schemaVersion").get<int>() != 1)
            throw ValidationError("schemaVersion: only version 1 is supported");
        if (j.contains("mode")) c.mode = run_mode_from_name(j.at("mode").get<std::string>());
        if (!j.contains("target")) throw ValidationError("target: missing");
        c.target = parse_target(j.at("target"), out.warnings);
        if (j.contains("partyOrder")) c.party_order = j.at("partyOrder").get<std::vector<int>>();
        if (j.contains("conjugateBasis")) {
            const json& cb = j.at("conjugateBasis");
            if (cb.is_string()) {
                if (cb.get<std::string>() != "fourier")
                    throw ValidationError("conjugateBasis: unknown name '" +
                                          cb.get<std::string>() + "'");
            } else if (cb.is_object() && cb.contains("phases")) {
                const json& ph = cb.at("phases");
                if (!ph.is_array() || ph.empty())
                    throw ValidationError("conjugateBasis.phases: expected a square table");
                c.conjugate_dim = static_cast<int>(ph.size());
                for (const json& row : ph) {
                    if (!row.is_array() || static_cast<int>(row.size()) != c.conjugate_dim)
                        throw ValidationError("conjugateBasis.phases: table must be square");
                    for (const json& v : row) c.conjugate_phases.push_back(v.get<double>());
                }
            } else {
                throw ValidationError("conjugateBasis: expected \"fourier\" or a phase table");
            }
        }
        if (j.contains("noise")) c.noise = parse_noise(j.at("noise"));
        if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
        if (j.contains("delta")) c.delta = j.at("delta").get<double>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("samples")) c.samples = j.at("samples").get<long>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    if (c.epsilon && !(*c.epsilon > 0.0 && *c.epsilon < 1.0))
        throw ValidationError("epsilon: must be in (0,1)");
    if (c.delta && !(*c.delta > 0.0 && *c.delta < 1.0))
        throw ValidationError("delta: must be in (0,1)");
    return out;
}

std::vector<CMatrix> parse_kraus_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("kraus document is not valid JSON (line " +
                         std::to_string(line_of_byte(text, e.byte)) + "): " + e.what());
    }
    if (!j.is_object() || !j.contains("kraus"))
        throw ValidationError("kraus document: expected an object with a kraus array");
    return parse_kraus_json(j.at("kraus"), "kraus");
}

std::string emit_config(const ExperimentConfig& cfg) {
    jsonfmt::Writer w;
    emit_config_into(w, cfg);
    return w.take();
}

void emit_config_into(jsonfmt::Writer& w, const ExperimentConfig& cfg) {
    w.begin_obj();
    w.key("schemaVersion");
    w.integer(1);
    if (cfg.mode) {
        w.key("mode");
        w.str(run_mode_name(*cfg.mode));
    }
    w.key("target");
    w.begin_obj();
    if (!cfg.target.generator.empty()) {
        w.key("generator");
        w.str(cfg.target.generator);
        if (cfg.target.parties > 0) {
            w.key("parties");
            w.integer(cfg.target.parties);
        }
        if (cfg.target.d > 0) {
            w.key("d");
            w.integer(cfg.target.d);
        }
        if (!cfg.target.dims.empty()) {
            w.key("dims");
            w.begin_arr();
            for (int d : cfg.target.dims) w.integer(d);
            w.end_arr();
        }
        if (cfg.target.generator == "random") {
            w.key("seed");
            w.uinteger(cfg.target.generator_seed);
        }
    } else {
        w.key("amplitudes");
        w.begin_arr();
        for (const cdouble& a : cfg.target.amplitudes) {
            w.begin_arr();
            w.num(a.real());
            w.num(a.imag());
            w.end_arr();
        }
        w.end_arr();
        w.key("dims");
        w.begin_arr();
        for (int d : cfg.target.dims) w.integer(d);
        w.end_arr();
    }
    w.end_obj();
    if (!cfg.party_order.empty()) {
        w.key("partyOrder");
        w.begin_arr();
        for (int o : cfg.party_order) w.integer(o);
        w.end_arr();
    }
    if (!cfg.conjugate_phases.empty()) {
        w.key("conjugateBasis");
        w.begin_obj();
        w.key("phases");
        w.begin_arr();
        for (int r = 0; r < cfg.conjugate_dim; ++r) {
            w.begin_arr();
            for (int c = 0; c < cfg.conjugate_dim; ++c)
                w.num(cfg.conjugate_phases[static_cast<std::size_t>(r * cfg.conjugate_dim + c)]);
            w.end_arr();
        }
        w.end_arr();
        w.end_obj();
    }
    if (cfg.noise) {
        w.key("noise");
        w.begin_obj();
        if (!cfg.noise->name.empty()) {
            w.key("name");
            w.str(cfg.noise->name);
            w.key("p");
            w.num(cfg.noise->p);
        } else if (!cfg.noise->kraus.empty()) {
            w.key("kraus");
            w.begin_arr();
            for (const CMatrix& m : cfg.noise->kraus) {
                w.begin_arr();
                for (std::size_t r = 0; r < m.rows; ++r) {
                    w.begin_arr();
                    for (std::size_t c = 0; c < m.cols; ++c) {
                        w.begin_arr();
                        w.num(m.at(r, c).real());
                        w.num(m.at(r, c).imag());
                        w.end_arr();
                    }
                    w.end_arr();
                }
                w.end_arr();
            }
            w.end_arr();
        } else {
            w.key("krausFile");
            w.str(cfg.noise->kraus_file);
        }
        if (cfg.noise->on_factor) {
            w.key("onFactor");
            w.integer(*cfg.noise->on_factor);
        }
        w.end_obj();
    }
    if (cfg.epsilon) {
        w.key("epsilon");
        w.num(*cfg.epsilon);
    }
    if (cfg.delta) {
        w.key("delta");
        w.num(*cfg.delta);
    }
    if (cfg.seed) {
        w.key("seed");
        w.uinteger(*cfg.seed);
    }
    if (cfg.samples) {
        w.key("samples");
        w.integer(*cfg.samples);
    }
    w.end_obj();
}

Ket build_target(const TargetSpec& spec) {
    if (spec.generator.empty()) return Ket(spec.amplitudes, spec.dims);
    const std::string& g = spec.generator;
    if (g == "bell") return bell_state();
    if (g == "ghz") return ghz_state(spec.parties > 0 ? spec.parties : 3,
                                     spec.d > 0 ? spec.d : 2);
    if (g == "w") return w_state(spec.parties > 0 ? spec.parties : 3);
    if (g == "maximally-entangled")
        return maximally_entangled_state(spec.d > 0 ? spec.d : 2);
    if (g == "random") {
        if (spec.dims.empty())
            throw ValidationError("target: random generator needs dims");
        return random_state(spec.dims, spec.generator_seed);
    }
    throw ValidationError("target.generator: unknown generator '" + g + "'");
}

KrausChannel build_noise(const NoiseSpec& spec, int dim, const std::string& base_dir) {
    if (!spec.name.empty()) {
        auto kind = noise_kind_from_name(spec.name);
        if (!kind) throw ValidationError("noise.name: unknown channel '" + spec.name + "'");
        return builtin_noise(*kind, dim, spec.p);
    }
    std::vector<CMatrix> kraus = spec.kraus;
    if (kraus.empty()) {
        std::ifstream in(base_dir + "/" + spec.kraus_file);
        if (!in)
            throw ValidationError("noise.krausFile: cannot open '" + spec.kraus_file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        kraus = parse_kraus_document(ss.str());
    }
    KrausChannel chan = KrausChannel::from_matrices(std::move(kraus));
    if (chan.dim_in() != dim)
        throw ValidationError("noise: Kraus input dimension " + std::to_string(chan.dim_in()) +
                              " does not match the target factor dimension " +
                              std::to_string(dim));
    return chan;
}

} // namespace sepstab
