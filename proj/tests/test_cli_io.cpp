#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "sepstab/runner.hpp"
#include "sepstab/states.hpp"

using namespace sepstab;
using nlohmann::json;

TEST_CASE("parse_config: generators") {
    ParsedConfig p = parse_config(R"({"mode":"construct","target":{"generator":"bell"}})");
    CHECK(p.config.mode == RunMode::Construct);
    Ket k = build_target(p.config.target);
    CHECK(k.dims == std::vector<int>{2, 2});
    CHECK(std::abs(k.amp[0] - cdouble{1.0 / std::sqrt(2.0)}) < 1e-15);
    CHECK(std::abs(k.amp[3] - cdouble{1.0 / std::sqrt(2.0)}) < 1e-15);

    ParsedConfig g = parse_config(R"({"target":{"generator":"ghz","parties":3,"d":2}})");
    Ket ghz = build_target(g.config.target);
    CHECK(ghz.dims == std::vector<int>{2, 2, 2});
    CHECK(std::abs(ghz.amp[0] - cdouble{1.0 / std::sqrt(2.0)}) < 1e-15);
    CHECK(std::abs(ghz.amp[7] - cdouble{1.0 / std::sqrt(2.0)}) < 1e-15);
    CHECK(std::abs(ghz.amp[3]) == 0.0);
}

TEST_CASE("parse_config: inline amplitudes give the documented schmidt weights") {
    ParsedConfig p = parse_config(
        R"({"target":{"amplitudes":[[0.9487,0],[0,0],[0,0],[0.3162,0]],"dims":[2,2]}})");
    Ket k = build_target(p.config.target);
    SchmidtForm f = schmidt_decompose(k, 1);
    CHECK(f.coeffs[0] == doctest::Approx(0.9).epsilon(1e-3));
    CHECK(f.coeffs[1] == doctest::Approx(0.1).epsilon(1e-3));
}

TEST_CASE("parse_config: errors and warnings") {
    // malformed JSON carries a line number
    try {
        parse_config("{\n  \"mode\": construct\n}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config(R"({"mode":"explode","target":{"generator":"bell"}})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"mode":"construct"})"), ValidationError);
    CHECK_THROWS_AS(
        parse_config(R"({"target":{"amplitudes":[[1,0]],"dims":[2]},"epsilon":2.0})"),
        ValidationError);
    CHECK_THROWS_AS(
        parse_config(R"({"target":{"generator":"bell"},"noise":{"name":"thermal","p":0.1}})"),
        ValidationError);

    // norm deviation above 1e-6 warns and renormalizes
    ParsedConfig warned =
        parse_config(R"({"target":{"amplitudes":[[1.001,0],[0,0]],"dims":[2]}})");
    REQUIRE(warned.warnings.size() == 1);
    CHECK(warned.warnings[0].find("renormalized") != std::string::npos);
    CHECK(std::abs(warned.config.target.amplitudes[0] - cdouble{1.0}) < 1e-12);

    ParsedConfig quiet =
        parse_config(R"({"target":{"amplitudes":[[1.0000000001,0],[0,0]],"dims":[2]}})");
    CHECK(quiet.warnings.empty());
}

TEST_CASE("config round trip for generator-based configs") {
    for (const char* text : {
             R"({"mode":"construct","target":{"generator":"bell"}})",
             R"({"mode":"verify","target":{"generator":"ghz","parties":3,"d":3},"partyOrder":[2,0,1]})",
             R"({"mode":"certify","target":{"generator":"w","parties":4},"noise":{"name":"dephasing","p":0.25},"epsilon":0.05,"delta":0.01,"seed":7})",
             R"({"mode":"channel-bound","target":{"generator":"maximally-entangled","d":3},"noise":{"name":"depolarizing","p":0.1,"onFactor":1}})",
             R"({"mode":"certify","target":{"generator":"random","dims":[2,2],"seed":11},"epsilon":0.1,"delta":0.05,"seed":3,"samples":2000})",
         }) {
        ExperimentConfig c = parse_config(text).config;
        ExperimentConfig back = parse_config(emit_config(c)).config;
        CHECK(back == c);
    }
}

TEST_CASE("named generators build valid states") {
    Ket w = w_state(4);
    CHECK(w.dims == std::vector<int>{2, 2, 2, 2});
    CHECK(std::abs(w.amp[1] - cdouble{0.5}) < 1e-15);  // |0001>
    CHECK(std::abs(w.amp[8] - cdouble{0.5}) < 1e-15);  // |1000>

    Ket me = maximally_entangled_state(3);
    SchmidtForm f = schmidt_decompose(me, 1);
    for (double l : f.coeffs) CHECK(l == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // the random generator is seed-deterministic
    Ket r1 = random_state({2, 3}, 5);
    Ket r2 = random_state({2, 3}, 5);
    Ket r3 = random_state({2, 3}, 6);
    CHECK(r1.amp == r2.amp);
    CHECK(r1.amp != r3.amp);
}

TEST_CASE("run: construct on bell passes with tiny residuals") {
    ExperimentConfig cfg = parse_config(R"({"mode":"construct","target":{"generator":"bell"}})").config;
    Report rep = run(cfg);
    CHECK(rep.pass);
    REQUIRE(rep.stabilizer.has_value());
    CHECK(rep.stabilizer->pq_minus_psi <= 1e-12);
    CHECK(rep.stabilizer->commutator <= 1e-12);
    CHECK(rep.rank_p == 2);
}

TEST_CASE("run: verify ghz3 includes the operator inequality") {
    ExperimentConfig cfg =
        parse_config(R"({"mode":"verify","target":{"generator":"ghz","parties":3}})").config;
    Report rep = run(cfg);
    CHECK(rep.pass);
    REQUIRE(rep.family.has_value());
    CHECK(rep.family->inequality_min_eigenvalue >= -1e-9);
    CHECK(rep.leaf_count == 4);
}

TEST_CASE("run: certify noisy bell reproduces the exact bound") {
    ExperimentConfig cfg = parse_config(R"({
        "mode":"certify",
        "target":{"generator":"bell"},
        "noise":{"name":"depolarizing","p":0.2},
        "epsilon":0.05,"delta":0.01,"seed":42})")
                               .config;
    Report rep = run(cfg);
    CHECK(rep.pass);
    REQUIRE(rep.estimate.has_value());
    CHECK(rep.estimate->samples_per_test == 1199);
    CHECK(rep.estimate->exact_bound == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(rep.estimate->exact_fidelity_sq == doctest::Approx(0.85).epsilon(1e-12));
    // adjusted bound lands near the exact bound
    CHECK(std::abs(rep.estimate->confidence_adjusted_bound - 0.8) < 0.15);
}

TEST_CASE("run: certify a three-party target through the runner") {
    ExperimentConfig cfg = parse_config(R"({
        "mode":"certify",
        "target":{"generator":"ghz","parties":3,"d":2},
        "noise":{"name":"dephasing","p":0.3,"onFactor":0},
        "epsilon":0.1,"delta":0.05,"seed":21})")
                               .config;
    Report rep = run(cfg);
    CHECK(rep.pass);
    REQUIRE(rep.estimate.has_value());
    CHECK(rep.estimate->labels.size() == 4);
    CHECK(rep.estimate->samples_per_test == required_samples(0.1, 0.05, 4));
    CHECK(rep.estimate->exact_bound <= rep.estimate->exact_fidelity_sq + TOL_STAB);
}

TEST_CASE("run: certify requires a seed") {
    ExperimentConfig cfg = parse_config(R"({
        "mode":"certify","target":{"generator":"bell"},
        "epsilon":0.05,"delta":0.01})")
                               .config;
    CHECK_THROWS_AS(run(cfg), ValidationError);
}

TEST_CASE("run: samples override below the requirement is rejected") {
    ExperimentConfig cfg = parse_config(R"({
        "mode":"certify","target":{"generator":"bell"},
        "epsilon":0.05,"delta":0.01,"seed":1,"samples":100})")
                               .config;
    CHECK_THROWS_AS(run(cfg), ValidationError);
}

TEST_CASE("run: channel-bound identity limit") {
    ExperimentConfig cfg = parse_config(R"({
        "mode":"channel-bound","target":{"generator":"bell"},
        "noise":{"name":"depolarizing","p":0.0}})")
                               .config;
    Report rep = run(cfg);
    CHECK(rep.pass);
    REQUIRE(rep.channel.has_value());
    CHECK(rep.channel->bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.channel->ent_fidelity_sq == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("machine report: schema keys and determinism") {
    ExperimentConfig cfg = parse_config(R"({
        "mode":"certify","target":{"generator":"bell"},
        "noise":{"name":"depolarizing","p":0.2},
        "epsilon":0.05,"delta":0.01,"seed":42})")
                               .config;
    Report r1 = run(cfg);
    Report r2 = run(cfg);
    std::string m1 = emit_report(r1, ReportFormat::Machine);
    std::string m2 = emit_report(r2, ReportFormat::Machine);
    CHECK(m1 == m2);  // byte-identical for the same config and seed

    json doc = json::parse(m1);
    CHECK(doc.at("schemaVersion") == 1);
    CHECK(doc.at("passRates").contains("P"));
    CHECK(doc.at("bounds").contains("confidenceAdjusted"));
    CHECK(doc.at("exact").contains("fidelitySquared"));

    // construct report exposes the residual keys
    ExperimentConfig c2 = parse_config(R"({"mode":"construct","target":{"generator":"bell"}})").config;
    json cdoc = json::parse(emit_report(run(c2), ReportFormat::Machine));
    CHECK(cdoc.at("residual").contains("PQ_minus_psi"));
    CHECK(cdoc.at("residual").contains("commutator"));
}

TEST_CASE("machine report: numbers survive a parse/print cycle") {
    ExperimentConfig cfg = parse_config(R"({
        "mode":"certify","target":{"generator":"bell"},
        "noise":{"name":"depolarizing","p":0.2},
        "epsilon":0.05,"delta":0.01,"seed":42})")
                               .config;
    std::string m = emit_report(run(cfg), ReportFormat::Machine);
    json doc = json::parse(m);
    for (const char* key : {"plugIn", "confidenceAdjusted"}) {
        double v = doc.at("bounds").at(key).get<double>();
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        CHECK(m.find(std::string("\"") + key + "\": " + buf) != std::string::npos);
    }
}

TEST_CASE("human report renders a table") {
    ExperimentConfig cfg = parse_config(R"({"mode":"construct","target":{"generator":"bell"}})").config;
    std::string text = emit_report(run(cfg), ReportFormat::Human);
    CHECK(text.find("residuals") != std::string::npos);
    CHECK(text.find("|| PQ - psi proj ||_F") != std::string::npos);
}

TEST_CASE("dimension cap from the environment") {
    ExperimentConfig cfg =
        parse_config(R"({"mode":"construct","target":{"generator":"ghz","parties":3}})").config;
    setenv("SEPSTAB_DIM_CAP", "4", 1);
    CHECK_THROWS_AS(run(cfg), DimensionCap);
    setenv("SEPSTAB_DIM_CAP", "junk", 1);
    CHECK_THROWS_AS(run(cfg), ValidationError);
    unsetenv("SEPSTAB_DIM_CAP");
    CHECK(run(cfg).pass);
}

TEST_CASE("inline kraus noise block") {
    // bit flip with p = 1 as explicit matrices
    ExperimentConfig cfg = parse_config(R"({
        "mode":"certify","target":{"generator":"bell"},
        "noise":{"kraus":[[[[0,0],[1,0]],[[1,0],[0,0]]]]},
        "epsilon":0.1,"delta":0.05,"seed":9})")
                               .config;
    Report rep = run(cfg);
    REQUIRE(rep.estimate.has_value());
    // flipping bob's qubit sends the bell state to (|01>+|10>)/sqrt(2), which
    // fails the Schmidt-basis coincidence always but still satisfies XX = +1
    CHECK(rep.estimate->exact_pass[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.estimate->exact_pass[1] == doctest::Approx(1.0).epsilon(1e-12));
}
