#pragma once

// Experiment configuration: a JSON document (complex numbers as [re, im]
// pairs) selecting a target state, an optional noise channel, the run mode
// and the estimation parameters. See README.md for the schema.

#include <optional>
#include <string>
#include <vector>

#include "sepstab/channels.hpp"
#include "sepstab/linalg.hpp"

namespace sepstab {

enum class RunMode { Construct, Verify, Certify, ChannelBound };

std::string run_mode_name(RunMode m);
RunMode run_mode_from_name(const std::string& name);

struct TargetSpec {
    std::string generator;  // bell | ghz | w | maximally-entangled | random; empty = inline
    int parties = 0;
    int d = 0;
    std::uint64_t generator_seed = 0;
    std::vector<int> dims;             // inline and random targets
    std::vector<cdouble> amplitudes;   // inline targets (normalized on load)

    bool operator==(const TargetSpec&) const = default;
};

struct NoiseSpec {
    std::string name;  // builtin channel; empty when a Kraus set is given
    double p = 0.0;
    std::optional<int> on_factor;      // default: last party
    std::string kraus_file;            // external Kraus document
    std::vector<CMatrix> kraus;        // inline Kraus matrices

    bool operator==(const NoiseSpec&) const = default;
};

struct ExperimentConfig {
    std::optional<RunMode> mode;
    TargetSpec target;
    std::vector<int> party_order;                   // empty = identity
    std::vector<double> conjugate_phases;           // empty = fourier
    int conjugate_dim = 0;
    std::optional<NoiseSpec> noise;
    std::optional<double> epsilon;
    std::optional<double> delta;
    std::optional<std::uint64_t> seed;
    std::optional<long> samples;

    bool operator==(const ExperimentConfig&) const = default;
};

struct ParsedConfig {
    ExperimentConfig config;
    std::vector<std::string> warnings;
};

// Throws ParseError (with line context) on malformed documents and
// ValidationError naming the violated invariant.
ParsedConfig parse_config(const std::string& text);

// Canonical JSON; parse_config(emit_config(c)).config == c for
// generator-based configs.
std::string emit_config(const ExperimentConfig& cfg);

namespace jsonfmt {
class Writer;
}

// Same document written into an enclosing report.
void emit_config_into(jsonfmt::Writer& w, const ExperimentConfig& cfg);

// Kraus matrices from a {"kraus": [...]} document.
std::vector<CMatrix> parse_kraus_document(const std::string& text);

// Materializes the target state.
Ket build_target(const TargetSpec& spec);

// Materializes the noise channel acting on a dim-dimensional factor (reads
// kraus_file relative to base_dir when set).
KrausChannel build_noise(const NoiseSpec& spec, int dim, const std::string& base_dir = ".");

} // namespace sepstab
