// SPDX-License-Identifier: Apache-2.0
// Acceptance gate: nine release criteria, one [PASS]/[FAIL] line each, with
// the measured values and the pinned tolerances printed inline. Exits
// non-zero when any criterion fails. Tolerances live here, in code, so a
// change to the gate is a visible diff.
#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "codesign/calibrate.hpp"
#include "codesign/codegen.hpp"
#include "codesign/config.hpp"
#include "codesign/dnn.hpp"
#include "codesign/eval.hpp"
#include "codesign/pipeline.hpp"
#include "codesign/search.hpp"
#include "codesign/sim.hpp"

#include "../oracles.hpp"

namespace fs = std::filesystem;
using namespace codesign;

namespace {

// Pinned tolerances and limits, one place.
constexpr double kFidelityTol = 0.10;      // criterion 1: relative error bound
constexpr double kFidelityBudgetS = 60.0;  // criterion 1: runtime bound
constexpr double kRoundTripTol = 1e-6;     // criterion 2: recovery residual
constexpr int kParetoTrials = 200;         // criterion 3: randomized sets
constexpr double kScdBudgetS = 10.0;       // criterion 4: runtime bound
constexpr double kScdEpsFrac = 0.05;       // criterion 4: epsilon = 5% of target

int g_failures = 0;

void line(int idx, bool ok, const std::string& text) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << idx << ". " << text << "\n";
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Relative path -> bytes for every regular file under root.
std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    }
    return files;
}

std::vector<SampleConfig> half_configs(int parity) {
    std::vector<SampleConfig> out;
    const auto all = default_sample_configs();
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (static_cast<int>(i % 2) == parity) out.push_back(all[i]);
    }
    return out;
}

// --- criterion 1: analytical estimates vs the discrete-event simulator ----

void criterion_fidelity(const Characterization& ch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto train = half_configs(0);
    const auto holdout = half_configs(1);
    const auto skeletons = enumerate_bundles(builtin_templates());
    const CalibrationResult cal = calibrate(skeletons, train, ch);

    double worst_bundle = 0.0; // per-launch estimate vs simulate_bundle
    double worst_dnn = 0.0;    // whole-model estimate vs simulate_dnn
    const DeviceSpec device = pynq_z1();
    for (const Bundle& b : cal.bundles) {
        for (double e : fidelity_errors(b, holdout, ch)) worst_bundle = std::max(worst_bundle, e);
        DnnModel m = build_eval_dnn(with_config(b, 4, QuantScheme{}),
                                    BuildMethod::pure_replication, 2, {64, 64, 32});
        m.calib = cal.dnn;
        const double est = dnn_latency_cycles(m, device.bw_bytes_per_cycle, ch);
        const auto sim = static_cast<double>(simulate_dnn(m, device, ch).total_cycles);
        worst_dnn = std::max(worst_dnn, std::abs(est - sim) / sim);
    }
    const double secs = seconds_since(t0);
    const bool ok = worst_bundle <= kFidelityTol && worst_dnn <= kFidelityTol &&
                    secs < kFidelityBudgetS;
    std::ostringstream ss;
    ss << "model-vs-simulator fidelity: 18 bundles, 8 train / 8 holdout configs; worst "
       << "per-launch rel err " << worst_bundle * 100 << "%, worst whole-model rel err "
       << worst_dnn * 100 << "% (tol " << kFidelityTol * 100 << "%); " << secs << " s (limit "
       << kFidelityBudgetS << " s)";
    line(1, ok, ss.str());
}

// --- criterion 2: calibration round-trip on exact synthetic data ----------

void criterion_round_trip(const Characterization& ch) {
    const auto skeletons = enumerate_bundles(builtin_templates());
    const std::array<std::pair<double, double>, 3> truths = {
        {{0.87, 0.33}, {1.2, 0.05}, {0.5, 1.5}}};
    const std::array<std::size_t, 3> picks = {1, 11, 17};
    double worst = 0.0;
    for (std::size_t t = 0; t < truths.size(); ++t) {
        const Bundle& skel = skeletons[picks[t]];
        std::vector<std::array<double, 2>> features;
        for (const SampleConfig& s : default_sample_configs()) {
            const Bundle b = with_config(skel, s.pf, s.quant);
            std::vector<LayerDims> dims(b.instances.size(), LayerDims{s.dims, s.dims});
            double comp = 0.0;
            for (std::size_t i = 0; i < b.instances.size(); ++i) {
                comp += static_cast<double>(comp_latency(b.instances[i], dims[i], ch.tile(), ch));
            }
            const double traffic = static_cast<double>(data_footprint(b, dims, ch).total());
            features.push_back({comp, traffic / s.bw});
        }
        const auto y = oracles::exact_latency_targets(features, truths[t].first, truths[t].second);
        const auto [a, bb] = fit_scale2(features, y);
        worst = std::max(worst, std::abs(a - truths[t].first));
        worst = std::max(worst, std::abs(bb - truths[t].second));
    }
    std::ostringstream ss;
    ss << "calibration round-trip: 3 known (alpha, beta) pairs on 16-point grids; worst "
       << "residual " << worst << " (tol " << kRoundTripTol << ")";
    line(2, worst < kRoundTripTol, ss.str());
}

// --- criterion 3: pareto_select vs O(n^2) dominance oracle ----------------

void criterion_pareto() {
    std::mt19937_64 rng(97);
    std::uniform_int_distribution<int> size_dist(5, 200);
    std::uniform_real_distribution<double> dsp(0.0, 220.0);
    std::uniform_real_distribution<double> lat(1.0, 100.0);
    std::uniform_real_distribution<double> acc(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::array<double, 4> widths = {8.0, 16.0, 32.0, 64.0};
    int agree = 0;
    for (int t = 0; t < kParetoTrials; ++t) {
        const int n = size_dist(rng);
        std::vector<EvalRecord> records(static_cast<std::size_t>(n));
        for (EvalRecord& r : records) {
            r.bundle_id = "b" + std::to_string(1 + static_cast<int>(rng() % 14));
            r.resource.dsp = dsp(rng);
            r.latency_ms = lat(rng);
            r.accuracy = acc(rng);
            r.valid = unit(rng) > 0.1;
        }
        const double w = widths[t % widths.size()];
        if (pareto_select(records, w) == oracles::pareto_oracle(records, w)) ++agree;
    }
    std::ostringstream ss;
    ss << "Pareto equivalence: " << agree << "/" << kParetoTrials
       << " random record sets (5-200 records) match the brute-force dominance front exactly";
    line(3, agree == kParetoTrials, ss.str());
}

// --- criterion 4: coordinate descent on the linear synthetic model --------

void criterion_scd() {
    const auto t0 = std::chrono::steady_clock::now();
    const oracles::LinearOracle oracle; // 10 ms per replication
    const auto skeletons = enumerate_bundles(builtin_templates());
    DnnModel base;
    base.bundle = with_config(skeletons[1], 4, QuantScheme{});
    base.n_rep = 3;
    base.x_ds = {1, 1};
    base.pi_ch = {1.0, 1.0};
    base.input_dims = {64, 64, 32};

    const std::array<double, 3> targets = {100.0, 66.7, 50.0};
    int runs = 0;
    int good_models = 0;
    int want_models = 0;
    int worst_iters = 0;
    for (double targ : targets) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            SearchConfig cfg;
            cfg.lat_targ_ms = targ;
            cfg.epsilon_ms = kScdEpsFrac * targ;
            cfg.res_max = {100.0, 1000.0, 1000.0, 100.0};
            cfg.k = 3;
            cfg.seed = seed;
            cfg.max_iters = 1000;
            const SearchResult r = scd_search(base, cfg, oracle);
            ++runs;
            want_models += cfg.k;
            worst_iters = std::max(worst_iters, r.iterations);
            for (const DnnModel& m : r.models) {
                const double gap = std::abs(targ - oracle.latency_ms(m));
                if (gap < cfg.epsilon_ms && oracle.resource(m).all_leq(cfg.res_max)) {
                    ++good_models;
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    const bool ok = good_models == want_models && secs < kScdBudgetS;
    std::ostringstream ss;
    ss << "search convergence: " << good_models << "/" << want_models
       << " models in band across " << runs << " runs (targets {100, 66.7, 50} ms, eps 5%, 20 "
       << "seeds); worst " << worst_iters << "/1000 iterations; " << secs << " s (limit "
       << kScdBudgetS << " s)";
    line(4, ok, ss.str());
}

// --- criteria 5/7/9 share one full default pipeline run --------------------

struct PipelineRun {
    RunConfig cfg;
    PipelineResult result;
    bool ok = false;
    std::string error;
};

PipelineRun run_default_pipeline(const fs::path& out_dir) {
    PipelineRun run;
    run.cfg = default_run_config();
    run.cfg.out_dir = out_dir.string();
    try {
        run.result = run_pipeline(run.cfg);
        run.ok = true;
    } catch (const std::exception& e) {
        run.error = e.what();
    }
    return run;
}

void criterion_audit(const PipelineRun& run) {
    if (!run.ok) {
        line(5, false, "acceptance soundness audit: pipeline run failed: " + run.error);
        return;
    }
    const DeviceSpec& d = run.cfg.device;
    const bool device_ok = d.budget.dsp == 220.0 && d.budget.lut == 53200.0 &&
                           d.budget.ff == 106400.0 && d.budget.bram_kbit == 4900.0;
    int accepted = 0;
    for (const TargetOutcome& t : run.result.targets) {
        for (const BundleOutcome& b : t.bundles) accepted += static_cast<int>(b.models.size());
    }
    const auto violations = verify_run(run.cfg);
    std::ostringstream ss;
    ss << "acceptance soundness audit: independent re-evaluation of " << accepted
       << " emitted DNNs on the default PYNQ-Z1 run found " << violations.size()
       << " violations (want 0; all_met=" << (run.result.all_met ? "true" : "false") << ")";
    if (!violations.empty()) {
        ss << "; first: " << violations.front().where << ": " << violations.front().what;
    }
    line(5, device_ok && accepted > 0 && violations.empty(), ss.str());
}

// --- criterion 6: resource model independent of the replication count -----

void criterion_n_invariance(const Characterization& ch) {
    const auto skeletons = enumerate_bundles(builtin_templates());
    int invariant = 0;
    for (const Bundle& skel : skeletons) {
        const Bundle b = with_config(skel, 4, QuantScheme{});
        DnnModel first = build_eval_dnn(b, BuildMethod::pure_replication, 1, {64, 64, 32});
        const ResourceVector r1 = dnn_resource(first, ch);
        bool same = true;
        for (int n = 2; n <= 8; ++n) {
            DnnModel m = build_eval_dnn(b, BuildMethod::pure_replication, n, {64, 64, 32});
            if (!(dnn_resource(m, ch) == r1)) same = false;
        }
        if (same) ++invariant;
    }
    std::ostringstream ss;
    ss << "resource N-invariance: dnn_resource exactly equal over n_rep 1..8 for " << invariant
       << "/" << skeletons.size() << " bundles";
    line(6, invariant == static_cast<int>(skeletons.size()), ss.str());
}

// --- criterion 7: structural counts ----------------------------------------

void criterion_counts(const PipelineRun& run) {
    const auto bundles = enumerate_bundles(builtin_templates());
    std::ostringstream ss;
    ss << "structural counts: enumerate_bundles yields " << bundles.size() << " (want 18)";
    bool ok = bundles.size() == 18;
    if (run.ok) {
        ss << "; default pipeline carries " << run.result.top.size()
           << " bundles into the search (want 5)";
        ok = ok && run.result.top.size() == 5;
    } else {
        ss << "; pipeline run failed: " << run.error;
        ok = false;
    }
    line(7, ok, ss.str());
}

// --- criterion 8: codegen golden files -------------------------------------

struct GoldenCase {
    const char* name;
    PlanOptions opts;
};

void criterion_golden(const Characterization& ch, const fs::path& scratch) {
    const fs::path root = fs::path(CODESIGN_TESTS_DIR) / "golden";
    const std::array<GoldenCase, 3> cases = {{{"case1", {false, false}},
                                              {"case2", {false, true}},
                                              {"case3", {true, false}}}};
    const DeviceSpec device = pynq_z1();
    int ok_cases = 0;
    std::string detail;
    for (const GoldenCase& c : cases) {
        try {
            const DnnModel m = dnn_model_from_json(slurp(root / c.name / "model.json"));
            const CodegenPlan p = plan(m, ch.tile(), ch, device, c.opts);

            std::vector<int> seen(m.layer_count(), 0);
            for (const CallStep& s : p.schedule) {
                ++seen[s.layer];
                for (std::size_t f : s.fused_layers) ++seen[f];
            }
            bool covered = true;
            for (int v : seen) covered = covered && v == 1;
            if (!covered) throw std::runtime_error("schedule does not cover layers exactly once");

            const fs::path out = scratch / "golden" / c.name;
            fs::create_directories(out);
            emit(p, out);
            const auto got = snapshot_tree(out);
            const auto want = snapshot_tree(root / c.name / "expected");
            if (got != want) throw std::runtime_error("emitted tree differs from frozen tree");

            const std::string cmd = "cd \"" + out.string() +
                                    "\" && gcc -fsyntax-only -std=c99 -Wall accel_top.c ip_*.c";
            if (std::system(cmd.c_str()) != 0) throw std::runtime_error("C syntax check failed");
            ++ok_cases;
        } catch (const std::exception& e) {
            if (detail.empty()) detail = std::string("; ") + c.name + ": " + e.what();
        }
    }
    std::ostringstream ss;
    ss << "codegen determinism: " << ok_cases << "/3 frozen models byte-identical, C-syntax "
       << "clean, schedule covers every layer exactly once" << detail;
    line(8, ok_cases == 3, ss.str());
}

// --- criterion 9: end-to-end reproducibility --------------------------------

void criterion_reproducible(const PipelineRun& first) {
    if (!first.ok) {
        line(9, false, "end-to-end reproducibility: pipeline run failed: " + first.error);
        return;
    }
    const fs::path out(first.cfg.out_dir);
    const auto before = snapshot_tree(out);
    try {
        run_pipeline(first.cfg);
    } catch (const std::exception& e) {
        line(9, false, std::string("end-to-end reproducibility: rerun failed: ") + e.what());
        return;
    }
    const auto after = snapshot_tree(out);
    int diffs = 0;
    std::string detail;
    if (before.size() != after.size()) {
        ++diffs;
        detail = "; file sets differ";
    } else {
        for (const auto& [rel, bytes] : before) {
            auto it = after.find(rel);
            if (it == after.end()) {
                ++diffs;
                detail = "; missing " + rel;
                break;
            }
            if (it->second == bytes) continue;
            if (rel == "report.json") {
                auto a = nlohmann::json::parse(bytes);
                auto b = nlohmann::json::parse(it->second);
                a.erase("timestamp");
                b.erase("timestamp");
                if (a == b) continue;
            }
            ++diffs;
            if (detail.empty()) detail = "; differs: " + rel;
        }
    }
    std::ostringstream ss;
    ss << "end-to-end reproducibility: rerun with identical config/seed reproduced "
       << before.size() << " files byte-for-byte (report.json modulo timestamp)" << detail;
    line(9, diffs == 0, ss.str());
}

} // namespace

int main() {
    const Characterization ch(default_char_table(), TileShape{});
    const fs::path scratch =
        fs::temp_directory_path() / ("codesign_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    criterion_fidelity(ch);
    criterion_round_trip(ch);
    criterion_pareto();
    criterion_scd();
    const PipelineRun run = run_default_pipeline(scratch / "run");
    criterion_audit(run);
    criterion_n_invariance(ch);
    criterion_counts(run);
    criterion_golden(ch, scratch);
    criterion_reproducible(run);

    fs::remove_all(scratch);
    std::cout << (g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << " ("
              << 9 - g_failures << "/9 criteria)\n";
    return g_failures == 0 ? 0 : 1;
}
