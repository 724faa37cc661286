#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "fraclab/acceptance.hpp"
#include "fraclab/config.hpp"
#include "fraclab/emit.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <string>
#include <vector>

using namespace fraclab;

TEST_CASE("twelve-digit formatting") {
    CHECK(emit::format_double(1.0 / 3.0) == "0.333333333333");
    CHECK(emit::format_double(0.0) == "0");
    CHECK(emit::format_double(-2.5) == "-2.5");
    CHECK(emit::format_double(1e-300) == "1e-300");
}

TEST_CASE("csv round trip") {
    emit::Table t({"t", "x", "err"});
    t.add_row({0.0, 1.0, 0.0});
    t.add_row({0.5, 1.0 / 3.0, 1e-9});
    t.add_row({1.0, -2.75, 2.5e-17});
    const std::string text = emit::to_csv(t);
    CHECK(text.front() == 't');
    CHECK(text.back() == '\n');
    CHECK(text.find('\r') == std::string::npos);
    const emit::Table back = emit::parse_csv(text);
    REQUIRE(back.columns == t.columns);
    REQUIRE(back.rows.size() == t.rows.size());
    for (size_t r = 0; r < t.rows.size(); ++r)
        for (size_t c = 0; c < 3; ++c)
            CHECK(back.rows[r][c] == doctest::Approx(t.rows[r][c]).epsilon(1e-11));
    // empty table: header only
    emit::Table empty({"a", "b"});
    CHECK(emit::to_csv(empty) == "a,b\n");
    CHECK_THROWS_AS(t.add_row({1.0}), LengthMismatch);
    emit::Table nameless;
    CHECK_THROWS_AS(emit::to_csv(nameless), UsageError);
    emit::Table comma({"a,b"});
    CHECK_THROWS_AS(emit::to_csv(comma), UsageError);
    CHECK_THROWS_AS(emit::parse_csv("a,b\n1,junk\n"), UsageError);
}

TEST_CASE("json emission parses back") {
    emit::Table t({"n", "value"});
    t.add_row({0.0, 0.1});
    t.add_row({1.0, -3.25});
    const auto j = nlohmann::json::parse(emit::to_json(t));
    REQUIRE(j.contains("columns"));
    REQUIRE(j.contains("rows"));
    CHECK(j["columns"].size() == 2);
    CHECK(j["columns"][1].get<std::string>() == "value");
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][1][1].get<double>() == doctest::Approx(-3.25).epsilon(1e-12));
}

TEST_CASE("file round trip") {
    const std::string path = "/tmp/fraclab_emit_roundtrip.txt";
    const std::string payload = "line one\nline two\n";
    emit::write_file(path, payload);
    CHECK(emit::read_file(path) == payload);
    std::remove(path.c_str());
    CHECK_THROWS_AS(emit::read_file("/nonexistent/dir/file.csv"), UsageError);
    CHECK_THROWS_AS(emit::write_file("/nonexistent/dir/file.csv", "x"), UsageError);
}

TEST_CASE("configuration round trip") {
    config::RunConfig cfg;
    cfg.experiment = "fsde";
    cfg.alpha = 0.75;
    cfg.hurst = 0.625;
    cfg.potential = "poly:0,0,0.5";
    cfg.x0 = {1.5, -2.0};
    cfg.T = 10.0;
    cfg.n = 256;
    cfg.samples = 10000;
    cfg.seed = (std::uint64_t(1) << 63) + 5;
    cfg.hist_times = {2.5, 7.5};
    cfg.out_prefix = "/tmp/run";
    cfg.threads = 4;
    const config::RunConfig back = config::config_from_json(config::to_json(cfg));
    CHECK(back == cfg);
    // defaults survive too
    const config::RunConfig dflt;
    CHECK(config::config_from_json(config::to_json(dflt)) == dflt);
}

TEST_CASE("configuration rejects malformed documents") {
    CHECK_THROWS_AS(config::config_from_json("not json"), ConfigError);
    CHECK_THROWS_AS(config::config_from_json("[1,2]"), ConfigError);
    CHECK_THROWS_AS(config::config_from_json(R"({"experiment":"fode","alpa":0.5})"), ConfigError);
    CHECK_THROWS_AS(config::config_from_json(R"({"alpha":"half"})"), ConfigError);
    CHECK_THROWS_AS(config::config_from_json(R"({"schema_version":99})"), ConfigError);
    CHECK_THROWS_AS(config::load_config("/nonexistent/config.json"), UsageError);
}

TEST_CASE("manifest serialization and validation") {
    config::RunManifest m;
    m.config.experiment = "accept";
    m.wall_seconds = 1.25;
    m.seeds_used = {440017, 600101};
    for (int id = 1; id <= 10; ++id)
        m.criteria.push_back({id, "criterion", true, 0.5, 1.0, "ok"});
    CHECK_NOTHROW(config::validate_manifest(m, true));
    const auto j = nlohmann::json::parse(config::to_json(m));
    CHECK(j["library_version"].get<std::string>() == config::kLibraryVersion);
    CHECK(j["criteria"].size() == 10);
    CHECK(j["criteria"][3]["id"].get<int>() == 4);
    CHECK(j["seeds_used"][0].get<std::uint64_t>() == 440017);

    config::RunManifest dup = m;
    dup.criteria.push_back({5, "again", true, 0.0, 0.0, ""});
    CHECK_THROWS_AS(config::validate_manifest(dup, false), ConfigError);
    config::RunManifest partial = m;
    partial.criteria.pop_back();
    CHECK_NOTHROW(config::validate_manifest(partial, false));
    CHECK_THROWS_AS(config::validate_manifest(partial, true), ConfigError);
}

TEST_CASE("battery names map to criterion sets") {
    CHECK_THROWS_AS(acceptance::run_battery("bogus"), UsageError);
    const auto coeffs = acceptance::run_battery("coeffs");
    REQUIRE(coeffs.size() == 2);
    CHECK(coeffs[0].id == 1);
    CHECK(coeffs[1].id == 2);
    for (const auto& c : coeffs) CHECK(c.pass);
    const auto gradflow = acceptance::run_battery("gradflow");
    REQUIRE(gradflow.size() == 1);
    CHECK(gradflow[0].id == 9);
    CHECK(gradflow[0].pass);
}

TEST_CASE("reduced-sample statistical battery") {
    acceptance::AcceptanceOptions opts;
    opts.small = true;
    const auto res = acceptance::run_battery("fsde-small", opts);
    REQUIRE(res.size() == 2);
    CHECK(res[0].id == 6);
    CHECK(res[1].id == 10);
    for (const auto& c : res) CHECK(c.pass);
    const auto manifest = acceptance::run_acceptance("fsde-small", opts);
    CHECK(manifest.criteria.size() == 2);
    CHECK_NOTHROW(config::validate_manifest(manifest, false));
    CHECK(!manifest.seeds_used.empty());
    CHECK(manifest.wall_seconds > 0.0);
}
