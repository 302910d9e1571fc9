// SPDX-License-Identifier: Apache-2.0
// codesign: command-line front end for the co-design exploration engine.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "codesign/calibrate.hpp"
#include "codesign/codegen.hpp"
#include "codesign/config.hpp"
#include "codesign/errors.hpp"
#include "codesign/eval.hpp"
#include "codesign/pipeline.hpp"
#include "codesign/search.hpp"
#include "codesign/sim.hpp"

namespace fs = std::filesystem;
using namespace codesign;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out;
    std::string char_table;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* sc, CommonOpts& c) {
    sc->add_option("--config", c.config_path, "Run configuration JSON");
    sc->add_option("--char-table", c.char_table, "IP characterization table JSON");
    sc->add_option("--seed", c.seed, "Master RNG seed")->each([&](const std::string&) {
        c.seed_set = true;
    });
}

RunConfig resolve(const CommonOpts& c) {
    RunConfig cfg = c.config_path.empty() ? default_run_config() : load_run_config(c.config_path);
    if (!c.out.empty()) cfg.out_dir = c.out;
    if (!c.char_table.empty()) cfg.char_table_path = c.char_table;
    if (c.seed_set) cfg.seed = c.seed;
    validate(cfg);
    return cfg;
}

Characterization characterization(const RunConfig& cfg) {
    CharTable table =
        cfg.char_table_path.empty() ? default_char_table() : load_char_table(cfg.char_table_path);
    return Characterization(std::move(table), cfg.tile);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

std::unique_ptr<AccuracyEvaluator> evaluator(const RunConfig& cfg, const Characterization& ch) {
    if (cfg.evaluator_type == "external") {
        return std::make_unique<ExternalCommandEvaluator>(cfg.evaluator_command);
    }
    return std::make_unique<SyntheticProxyEvaluator>(ch, cfg.eval_seed, cfg.proxy);
}

int run_enumerate(const CommonOpts& c, const std::string& calibration_path) {
    const RunConfig cfg = resolve(c);
    std::vector<Bundle> bundles = enumerate_bundles(builtin_templates());
    bool calibrated = false;
    if (!calibration_path.empty()) {
        DnnCalibration dnn;
        apply_calibration_json(bundles, dnn, slurp(calibration_path));
        calibrated = true;
    }
    const std::string text = bundles_to_json(bundles, calibrated);
    if (c.out.empty()) {
        std::cout << text;
    } else {
        spit(c.out, text);
        std::cout << bundles.size() << " bundles -> " << c.out << "\n";
    }
    return 0;
}

int run_calibrate(const CommonOpts& c) {
    const RunConfig cfg = resolve(c);
    const Characterization ch = characterization(cfg);
    const std::vector<SampleConfig> samples = default_sample_configs();
    const CalibrationResult result = calibrate(enumerate_bundles(builtin_templates()), samples, ch);

    // Held-out half of the sample grid gauges model fidelity.
    std::vector<SampleConfig> holdout;
    for (std::size_t i = 1; i < samples.size(); i += 2) holdout.push_back(samples[i]);

    const std::string text = calibration_to_json(result);
    if (c.out.empty()) {
        std::cout << text;
    } else {
        spit(c.out, text);
        for (std::size_t i = 0; i < result.bundles.size(); ++i) {
            const Bundle& b = result.bundles[i];
            double max_err = 0.0;
            for (double e : fidelity_errors(b, holdout, ch)) max_err = std::max(max_err, e);
            std::printf("%-28s alpha=%.4f beta=%.4f holdout_max_rel_err=%.4f\n", b.id.c_str(),
                        b.calib.alpha, b.calib.beta, max_err);
        }
        std::printf("phi=%.3f lat_dm=%.0f -> %s\n", result.dnn.phi, result.dnn.lat_dm,
                    c.out.c_str());
    }
    return 0;
}

int run_evaluate(const CommonOpts& c, const std::string& calibration_path) {
    const RunConfig cfg = resolve(c);
    const Characterization ch = characterization(cfg);

    std::vector<Bundle> bundles = enumerate_bundles(builtin_templates());
    DnnCalibration dnn;
    if (calibration_path.empty()) {
        const CalibrationResult result =
            calibrate(bundles, default_sample_configs(), ch);
        bundles = result.bundles;
        dnn = result.dnn;
    } else {
        apply_calibration_json(bundles, dnn, slurp(calibration_path));
    }
    for (Bundle& b : bundles) b = with_config(b, b.instances.front().pf, cfg.quant);

    EvalOptions opts;
    opts.input_dims = cfg.input_dims;
    opts.task = cfg.task;
    opts.dnn_calib = dnn;
    std::unique_ptr<AccuracyEvaluator> ev = evaluator(cfg, ch);

    const fs::path dir = fs::path(cfg.out_dir) / "evaluation";
    const std::vector<EvalRecord> coarse =
        coarse_evaluate(bundles, cfg.pf_set, *ev, cfg.device, ch, opts);
    spit(dir / "coarse.json", records_to_json(coarse));
    spit(dir / "coarse.csv", records_to_csv(coarse));

    const std::vector<std::string> selected =
        pareto_select(coarse, 0.2 * cfg.device.budget.dsp);
    std::vector<Bundle> picked;
    for (const Bundle& b : bundles) {
        if (std::find(selected.begin(), selected.end(), b.id) == selected.end()) continue;
        // Carry the fittest coarse pf forward: within budget if possible,
        // fastest among those.
        int best_pf = 0;
        bool best_fits = false;
        double best_lat = 0.0;
        for (const EvalRecord& r : coarse) {
            if (r.bundle_id != b.id || !r.valid) continue;
            const bool fits = r.resource.all_leq(cfg.device.budget);
            if (best_pf == 0 || (fits && !best_fits) ||
                (fits == best_fits && r.latency_ms < best_lat)) {
                best_pf = r.pf;
                best_fits = fits;
                best_lat = r.latency_ms;
            }
        }
        if (best_pf > 0) picked.push_back(with_config(b, best_pf, cfg.quant));
    }
    const std::vector<EvalRecord> fine =
        fine_evaluate(picked, cfg.rep_counts, cfg.clips, *ev, cfg.device, ch, opts);
    spit(dir / "fine.json", records_to_json(fine));
    spit(dir / "fine.csv", records_to_csv(fine));

    std::cout << "coarse=" << coarse.size() << " selected=" << selected.size()
              << " fine=" << fine.size() << " -> " << dir.string() << "\n";
    for (const EvalRecord& r : rank_records(fine)) {
        if (!r.valid) continue;
        std::printf("  %-28s pf=%-2d n=%d clip=%-5s acc=%.4f lat=%.3fms\n", r.bundle_id.c_str(),
                    r.pf, r.n_rep, to_string(r.quant.activation_clip).c_str(), r.accuracy,
                    r.latency_ms);
    }
    return 0;
}

int run_search(const CommonOpts& c, const std::string& bundle_id, double target_ms,
               double epsilon_ms, int k, int max_iters) {
    const RunConfig cfg = resolve(c);
    const Characterization ch = characterization(cfg);

    std::vector<Bundle> bundles = enumerate_bundles(builtin_templates());
    const auto it = std::find_if(bundles.begin(), bundles.end(),
                                 [&](const Bundle& b) { return b.id == bundle_id; });
    if (it == bundles.end()) throw ConfigError("unknown bundle id: " + bundle_id);

    std::vector<Bundle> one{*it};
    const CalibrationResult calib = calibrate(one, default_sample_configs(), ch);
    const Bundle skeleton = with_config(calib.bundles.front(), 4, cfg.quant);

    SearchConfig scfg;
    scfg.lat_targ_ms = target_ms > 0.0 ? target_ms : cfg.targets.front().latency_ms;
    scfg.epsilon_ms = epsilon_ms > 0.0 ? epsilon_ms : 0.05 * scfg.lat_targ_ms;
    scfg.res_max = cfg.device.budget;
    scfg.k = k > 0 ? k : cfg.search_k;
    scfg.seed = c.seed_set ? c.seed : cfg.seed;
    scfg.max_iters = max_iters > 0 ? max_iters : cfg.max_iters;

    DnnModel initial = initialize_dnn(skeleton, cfg.device, cfg.quant, cfg.input_dims, ch,
                                      InitOptions{cfg.init_n_rep, 2});
    initial.calib = calib.dnn;
    const AnalyticalOracle oracle(cfg.device, ch);
    const SearchResult res = scd_search(initial, scfg, oracle);

    const fs::path dir =
        c.out.empty() ? fs::path(cfg.out_dir) / "search" / bundle_id : fs::path(c.out);
    spit(dir / "search.log", trace_to_text(res.trace));
    for (std::size_t i = 0; i < res.models.size(); ++i) {
        spit(dir / ("model_" + std::to_string(i) + ".json"), to_json(res.models[i]));
        spit(dir / ("model_" + std::to_string(i) + ".estimate.json"),
             estimate_report(res.models[i], cfg.device, ch));
        std::printf("model_%zu: n_rep=%d lat=%.3fms dsp=%.0f\n", i, res.models[i].n_rep,
                    oracle.latency_ms(res.models[i]), oracle.resource(res.models[i]).dsp);
    }
    if (!res.warning.empty()) std::cerr << "warning: " << res.warning << "\n";
    std::cout << res.models.size() << " model(s) in " << res.iterations << " iterations -> "
              << dir.string() << "\n";
    return res.models.empty() ? 2 : 0;
}

int run_codegen(const CommonOpts& c, const std::string& model_path) {
    const RunConfig cfg = resolve(c);
    const Characterization ch = characterization(cfg);
    const DnnModel m = dnn_model_from_json(slurp(model_path));
    const CodegenPlan p = plan(m, cfg.tile, ch, cfg.device, cfg.codegen);
    const fs::path dir = c.out.empty() ? fs::path(cfg.out_dir) / "codegen" : fs::path(c.out);
    for (const std::string& f : emit(p, dir)) std::cout << (dir / f).string() << "\n";
    return 0;
}

int run_simulate(const CommonOpts& c, const std::string& model_path,
                 const std::string& trace_path) {
    const RunConfig cfg = resolve(c);
    const Characterization ch = characterization(cfg);
    const DnnModel m = dnn_model_from_json(slurp(model_path));
    const SimTrace trace = simulate_dnn(m, cfg.device, ch);
    check_trace(trace);
    if (!trace_path.empty()) spit(trace_path, trace_to_json(trace));

    const double sim_cycles = static_cast<double>(trace.total_cycles);
    const double est = dnn_latency_cycles(m, cfg.device.bw_bytes_per_cycle, ch);
    const double gap = std::abs(est - sim_cycles) / sim_cycles;
    std::printf("simulated: %.0f cycles (%.3f ms), stall %lld, transfer %lld\n", sim_cycles,
                cycles_to_ms(sim_cycles, cfg.device.clock_mhz),
                static_cast<long long>(trace.stall_cycles),
                static_cast<long long>(trace.transfer_cycles));
    std::printf("estimate:  %.0f cycles (%.3f ms), rel gap %.4f\n", est,
                cycles_to_ms(est, cfg.device.clock_mhz), gap);
    return 0;
}

int run_pipeline_cmd(const CommonOpts& c, bool quiet) {
    const RunConfig cfg = resolve(c);
    const PipelineResult result = run_pipeline(cfg, quiet ? nullptr : &std::cerr);
    for (const TargetOutcome& t : result.targets) {
        int accepted = 0;
        for (const BundleOutcome& b : t.bundles) accepted += static_cast<int>(b.models.size());
        std::printf("target %-8s %s (%d accepted model(s))\n", t.target.label.c_str(),
                    t.met ? "met" : "UNMET", accepted);
    }
    std::cout << "report: " << (fs::path(cfg.out_dir) / "report.json").string() << "\n";
    return result.all_met ? 0 : 2;
}

int run_verify(const CommonOpts& c) {
    const RunConfig cfg = resolve(c);
    const std::vector<Violation> violations = verify_run(cfg);
    for (const Violation& v : violations) {
        std::cout << v.where << ": " << v.what << "\n";
    }
    if (violations.empty()) {
        std::cout << "ok: no violations in " << cfg.out_dir << "\n";
        return 0;
    }
    std::cout << violations.size() << " violation(s)\n";
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hardware-aware DNN/accelerator co-design explorer"};
    app.require_subcommand(1);
    int rc = 0;

    CommonOpts enum_c;
    std::string enum_calibration;
    auto* sc_enum = app.add_subcommand("enumerate-bundles", "List all candidate bundles as JSON");
    add_common(sc_enum, enum_c);
    sc_enum->add_option("--out", enum_c.out, "Output file (default stdout)");
    sc_enum->add_option("--calibration", enum_calibration, "Apply a calibration JSON first");
    sc_enum->callback([&] { rc = run_enumerate(enum_c, enum_calibration); });

    CommonOpts cal_c;
    auto* sc_cal = app.add_subcommand("calibrate", "Fit latency/resource models to the simulator");
    add_common(sc_cal, cal_c);
    sc_cal->add_option("--out", cal_c.out, "Calibration JSON file (default stdout)");
    sc_cal->callback([&] { rc = run_calibrate(cal_c); });

    CommonOpts eval_c;
    std::string eval_calibration;
    auto* sc_eval = app.add_subcommand("evaluate", "Coarse/fine accuracy-latency evaluation");
    add_common(sc_eval, eval_c);
    sc_eval->add_option("--out", eval_c.out, "Output directory (default from config)");
    sc_eval->add_option("--calibration", eval_calibration, "Reuse an existing calibration JSON");
    sc_eval->callback([&] { rc = run_evaluate(eval_c, eval_calibration); });

    CommonOpts search_c;
    std::string search_bundle;
    double search_target = 0.0, search_eps = 0.0;
    int search_k = 0, search_iters = 0;
    auto* sc_search = app.add_subcommand("search", "Search DNNs for one bundle and target");
    add_common(sc_search, search_c);
    sc_search->add_option("--bundle", search_bundle, "Bundle id to search")->required();
    sc_search->add_option("--target-ms", search_target, "Latency target in ms");
    sc_search->add_option("--epsilon-ms", search_eps, "Acceptance half-width in ms");
    sc_search->add_option("--k", search_k, "Accepted models to collect");
    sc_search->add_option("--max-iters", search_iters, "Iteration cap");
    sc_search->add_option("--out", search_c.out, "Output directory");
    sc_search->callback([&] {
        rc = run_search(search_c, search_bundle, search_target, search_eps, search_k,
                        search_iters);
    });

    CommonOpts gen_c;
    std::string gen_model;
    auto* sc_gen = app.add_subcommand("codegen", "Emit accelerator C sources for a DNN model");
    add_common(sc_gen, gen_c);
    sc_gen->add_option("--model", gen_model, "DNN model JSON")->required();
    sc_gen->add_option("--out", gen_c.out, "Output directory");
    sc_gen->callback([&] { rc = run_codegen(gen_c, gen_model); });

    CommonOpts sim_c;
    std::string sim_model, sim_trace;
    auto* sc_sim = app.add_subcommand("simulate", "Cycle-simulate a DNN model");
    add_common(sc_sim, sim_c);
    sc_sim->add_option("--model", sim_model, "DNN model JSON")->required();
    sc_sim->add_option("--trace", sim_trace, "Write the tile-level trace JSON here");
    sc_sim->callback([&] { rc = run_simulate(sim_c, sim_model, sim_trace); });

    CommonOpts pipe_c;
    bool pipe_quiet = false;
    auto* sc_pipe = app.add_subcommand("pipeline", "Calibrate, evaluate, search, and generate");
    add_common(sc_pipe, pipe_c);
    sc_pipe->add_option("--out", pipe_c.out, "Output directory (default from config)");
    sc_pipe->add_flag("--quiet", pipe_quiet, "Suppress progress lines");
    sc_pipe->callback([&] { rc = run_pipeline_cmd(pipe_c, pipe_quiet); });

    CommonOpts ver_c;
    auto* sc_ver = app.add_subcommand("verify", "Re-check every claim of a finished run");
    add_common(sc_ver, ver_c);
    sc_ver->add_option("--out", ver_c.out, "Run directory (default from config)");
    sc_ver->callback([&] { rc = run_verify(ver_c); });

    try {
        CLI11_PARSE(app, argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
