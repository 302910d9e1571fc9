// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "codesign/config.hpp"
#include "codesign/errors.hpp"
#include "codesign/pipeline.hpp"
#include "json.hpp"

using namespace codesign;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

fs::path fresh_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / ("codesign-test-" + leaf);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Small but complete run: two pf points, two bundles into search, one target.
RunConfig small_config(const fs::path& out_dir) {
    RunConfig cfg = default_run_config();
    cfg.pf_set = {2, 8};
    cfg.rep_counts = {1, 2};
    cfg.clips = {ActivationClip::relu};
    cfg.top_n = 2;
    cfg.search_k = 2;
    cfg.targets = {cfg.targets.front()}; // 10 fps
    cfg.out_dir = out_dir.string();
    return cfg;
}

} // namespace

TEST_CASE("default config carries the three frame-rate targets") {
    const RunConfig cfg = default_run_config();
    CHECK_NOTHROW(validate(cfg));
    CHECK(cfg.device.name == "pynq-z1");
    REQUIRE(cfg.targets.size() == 3);
    CHECK(cfg.targets[0].label == "10fps");
    CHECK(cfg.targets[0].latency_ms == doctest::Approx(100.0));
    CHECK(cfg.targets[0].epsilon_ms == doctest::Approx(5.0));
    CHECK(cfg.targets[1].latency_ms == doctest::Approx(1000.0 / 15.0));
    CHECK(cfg.targets[2].latency_ms == doctest::Approx(50.0));
    CHECK(cfg.top_n == 5);
}

TEST_CASE("config validation rejects out-of-domain values") {
    RunConfig bad = default_run_config();
    bad.targets.clear();
    CHECK_THROWS_AS(validate(bad), ConfigError);

    bad = default_run_config();
    bad.targets[0].epsilon_ms = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);

    bad = default_run_config();
    bad.pf_set = {3};
    CHECK_THROWS_AS(validate(bad), ConfigError);

    bad = default_run_config();
    bad.top_n = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);

    bad = default_run_config();
    bad.evaluator_type = "quantum";
    CHECK_THROWS_AS(validate(bad), ConfigError);

    bad = default_run_config();
    bad.evaluator_type = "external"; // command missing
    CHECK_THROWS_AS(validate(bad), ConfigError);

    bad = default_run_config();
    bad.out_dir.clear();
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("config JSON round-trips byte-for-byte") {
    RunConfig cfg = default_run_config();
    cfg.pf_set = {4, 16};
    cfg.quant.weight_bits = 16;
    cfg.codegen.loop_fusion = true;
    const std::string text = to_json(cfg);
    const RunConfig back = run_config_from_json(text);
    CHECK(to_json(back) == text);
}

TEST_CASE("config parser rejects unknown keys at any depth") {
    auto j = nlohmann::json::parse(to_json(default_run_config()));
    auto top = j;
    top["bogus"] = 1;
    CHECK_THROWS_AS(run_config_from_json(top.dump()), ConfigError);

    auto nested = j;
    nested["device"]["bogus"] = 1;
    CHECK_THROWS_AS(run_config_from_json(nested.dump()), ConfigError);

    CHECK_THROWS_AS(run_config_from_json("not json"), ConfigError);
}

TEST_CASE("targets accept frames per second or milliseconds, never both") {
    const RunConfig fps = run_config_from_json(R"({"targets": [{"fps": 20}]})");
    REQUIRE(fps.targets.size() == 1);
    CHECK(fps.targets[0].latency_ms == doctest::Approx(50.0));
    CHECK(fps.targets[0].epsilon_ms == doctest::Approx(2.5));
    CHECK(fps.targets[0].label == "20fps");

    const RunConfig ms = run_config_from_json(
        R"({"targets": [{"latency_ms": 80, "epsilon_ms": 2}]})");
    CHECK(ms.targets[0].latency_ms == doctest::Approx(80.0));
    CHECK(ms.targets[0].epsilon_ms == doctest::Approx(2.0));
    CHECK(ms.targets[0].label == "80ms");

    CHECK_THROWS_AS(run_config_from_json(R"({"targets": [{"fps": 20, "latency_ms": 50}]})"),
                    ConfigError);
    CHECK_THROWS_AS(run_config_from_json(R"({"targets": [{"label": "x"}]})"), ConfigError);
}

TEST_CASE("config files load from disk") {
    const fs::path dir = fresh_dir("config");
    const fs::path file = dir / "run.json";
    spit(file, to_json(default_run_config()));
    const RunConfig cfg = load_run_config(file.string());
    CHECK(cfg.device.name == "pynq-z1");
    CHECK_THROWS_AS(load_run_config((dir / "missing.json").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("seed derivation separates neighbouring job indices") {
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("pipeline produces a complete, verifiable run directory") {
    const fs::path out = fresh_dir("pipeline");
    const RunConfig cfg = small_config(out);

    std::ostringstream progress;
    const PipelineResult result = run_pipeline(cfg, &progress);

    CHECK(result.calibration.bundles.size() == 18);
    CHECK(result.coarse.size() == 18 * 2);
    CHECK(!result.selected.empty());
    CHECK(result.top.size() == 2);
    REQUIRE(result.targets.size() == 1);
    CHECK(result.all_met);
    CHECK(result.targets[0].met);
    CHECK(progress.str().find("pipeline finished") != std::string::npos);

    for (const char* f : {"config.json", "bundles.json", "calibration.json", "report.json",
                          "evaluation/coarse.json", "evaluation/coarse.csv",
                          "evaluation/fine.json", "evaluation/fine.csv",
                          "evaluation/selected.json"}) {
        CAPTURE(f);
        CHECK(fs::exists(out / f));
    }

    // Every accepted model landed on disk with its estimate and sources.
    std::size_t accepted = 0;
    for (const auto& t : result.targets) {
        for (const auto& b : t.bundles) {
            for (const auto& m : b.models) {
                ++accepted;
                CHECK(fs::exists(out / m.model_file));
                CHECK(fs::exists(out / m.estimate_file));
                if (m.codegen_error.empty()) {
                    CHECK(fs::exists(out / m.codegen_dir / "manifest.json"));
                    CHECK(fs::exists(out / m.codegen_dir / "accel_top.c"));
                }
            }
        }
    }
    CHECK(accepted > 0);

    CHECK(verify_run(cfg).empty());
    fs::remove_all(out);
}

TEST_CASE("verification flags tampered artifacts") {
    const fs::path out = fresh_dir("tamper");
    const RunConfig cfg = small_config(out);
    run_pipeline(cfg);
    REQUIRE(verify_run(cfg).empty());

    // Corrupt a reported latency.
    auto report = nlohmann::json::parse(slurp(out / "report.json"));
    std::string model_file;
    for (auto& jt : report.at("targets")) {
        for (auto& jb : jt.at("bundles")) {
            for (auto& jm : jb.at("models")) {
                if (model_file.empty()) {
                    jm["latency_ms"] = jm["latency_ms"].get<double>() + 1.0;
                    model_file = jm["model_file"].get<std::string>();
                }
            }
        }
    }
    REQUIRE(!model_file.empty());
    spit(out / "report.json", report.dump(2) + "\n");
    auto violations = verify_run(cfg);
    REQUIRE(!violations.empty());
    bool mentions_latency = false;
    for (const auto& v : violations) {
        mentions_latency |= v.what.find("does not match recomputed") != std::string::npos;
    }
    CHECK(mentions_latency);

    // Corrupt the model document itself.
    spit(out / model_file, "not json");
    violations = verify_run(cfg);
    bool unreadable = false;
    for (const auto& v : violations) {
        unreadable |= v.what.find("unreadable model") != std::string::npos;
    }
    CHECK(unreadable);

    // A missing report is itself a violation.
    fs::remove(out / "report.json");
    violations = verify_run(cfg);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].where == "report.json");
    fs::remove_all(out);
}
