#include <catch2/catch_amalgamated.hpp>

#include "specwindow/report.hpp"

using namespace specwindow;

namespace {
const std::string kCorpus = SPECWINDOW_CORPUS_DIR;
}

TEST_CASE("run reports validate") {
    Gadget g = load_gadget(kCorpus + "/siscloak2.json");
    RunConfig cfg;
    cfg.model.mode = Mode::A53;
    Runner r(g, cfg);
    Measurement m = r.measure(4096, 41);

    json report = report_envelope("run", cfg);
    report["results"].push_back(run_result_to_json(g.manifest.name, cfg.model.mode, 4096, 41, m));
    CHECK(validate_report(report).empty());
    CHECK(report["results"][0]["cycles"].get<std::uint64_t>() == m.sim.cycles);
    CHECK(report["results"][0]["observation"]["observer"] == "fill-trace");
}

TEST_CASE("attack reports validate and carry the recovery verdict") {
    Gadget g = load_gadget(kCorpus + "/siscloak1_scaled.json");
    RunConfig cfg;
    cfg.model.mode = Mode::A53;
    AttackResult a = flush_reload(g, cfg, 60, 201);

    json report = report_envelope("attack", cfg);
    report["results"].push_back(attack_result_to_json(g.manifest.name, cfg.model.mode, a));
    CHECK(validate_report(report).empty());
    CHECK(report["results"][0]["success"] == true);
    CHECK(report["results"][0]["recovered_value"] == 201);
}

TEST_CASE("check reports validate for both verdicts") {
    RunConfig cfg;
    for (const char* stem : {"spectre_pht", "siscloak2"}) {
        Gadget g = load_gadget(kCorpus + "/" + std::string(stem) + ".json");
        cfg.model.mode = Mode::A53;
        CheckResult r = check_gadget(g, cfg);
        json report = report_envelope("check", cfg);
        report["results"].push_back(check_result_to_json(r));
        INFO(stem);
        CHECK(validate_report(report).empty());
        if (r.leak)
            CHECK(report["results"][0]["witness"].is_object());
        else
            CHECK(report["results"][0]["witness"].is_null());
    }
}

TEST_CASE("the validator rejects malformed reports") {
    RunConfig cfg;
    json good = report_envelope("check", cfg);
    CheckResult secure;
    secure.gadget = "x";
    good["results"].push_back(check_result_to_json(secure));
    REQUIRE(validate_report(good).empty());

    json wrong_version = good;
    wrong_version["schema_version"] = 2;
    CHECK_FALSE(validate_report(wrong_version).empty());

    json wrong_tool = good;
    wrong_tool["tool"] = "other";
    CHECK_FALSE(validate_report(wrong_tool).empty());

    json no_results = good;
    no_results.erase("results");
    CHECK_FALSE(validate_report(no_results).empty());

    json bad_command = good;
    bad_command["command"] = "explode";
    CHECK_FALSE(validate_report(bad_command).empty());

    json bad_verdict = good;
    bad_verdict["results"][0]["verdict"] = "MAYBE";
    CHECK_FALSE(validate_report(bad_verdict).empty());

    json leak_without_witness = good;
    leak_without_witness["results"][0]["verdict"] = "LEAK";
    leak_without_witness["results"][0]["witness"] = nullptr;
    CHECK_FALSE(validate_report(leak_without_witness).empty());

    CHECK_FALSE(validate_report(json::array()).empty());
    CHECK_FALSE(validate_report(json{{"schema_version", 1}}).empty());
}

TEST_CASE("config echo round-trips through the loader") {
    RunConfig cfg;
    cfg.model.mode = Mode::Ooo;
    cfg.model.spec_depth = 7;
    cfg.model.resolve_delay = 3;
    cfg.fuel = 5000;
    cfg.observer = ObserverMode::Probe;
    json echoed = to_json(cfg);
    RunConfig back = run_config_from_json(echoed);
    CHECK(back == cfg);

    // An unset depth echoes as its effective value ("unbounded" for ooo)
    // and loads back to the same semantics.
    RunConfig unbounded;
    unbounded.model.mode = Mode::Ooo;
    json j = to_json(unbounded);
    CHECK(j["model"]["spec_depth"] == "unbounded");
    CHECK(run_config_from_json(j).model.effective_depth() == kUnboundedDepth);
}

TEST_CASE("config loader rejects unknown keys and bad values") {
    CHECK_THROWS_AS(run_config_from_json(json{{"cheese", 1}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json{{"model", {{"mode", "warp"}}}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json{{"model", {{"hit_latency", 50}}}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json{{"cache", {{"num_sets", 100}}}}), ConfigError);
    json d = json{{"model", {{"spec_depth", "sometimes"}}}};
    CHECK_THROWS_AS(run_config_from_json(d), ConfigError);
    json ok = json{{"model", {{"spec_depth", "unbounded"}}}};
    CHECK(run_config_from_json(ok).model.spec_depth == kUnboundedDepth);
}
