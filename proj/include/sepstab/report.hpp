#pragma once

// Structured run reports. The machine format is a versioned JSON document
// with a fixed key order and every floating-point value printed with 12
// significant digits, so identical runs emit byte-identical documents
// (timing, which cannot be deterministic, appears in the human format only).

#include <optional>
#include <string>

#include "sepstab/certify.hpp"
#include "sepstab/channels.hpp"
#include "sepstab/config.hpp"
#include "sepstab/multipartite.hpp"
#include "sepstab/stabilizer.hpp"

namespace sepstab {

enum class ReportFormat { Human, Machine };

struct Report {
    RunMode mode = RunMode::Construct;
    ExperimentConfig config;  // echo
    double timing_seconds = 0.0;
    bool pass = false;
    int parties = 0;
    int dimension = 0;

    // construct / verify, bipartite
    std::optional<StabilizerReport> stabilizer;
    std::optional<double> inequality_min_eig;  // verify only
    std::optional<int> rank_p;
    std::optional<int> rank_q;

    // construct / verify, multipartite
    std::optional<FamilyReport> family;
    std::optional<int> leaf_count;

    // certify
    std::optional<EstimateReport> estimate;

    // channel-bound
    std::optional<ChannelBoundReport> channel;
};

std::string emit_report(const Report& rep, ReportFormat format);

} // namespace sepstab
