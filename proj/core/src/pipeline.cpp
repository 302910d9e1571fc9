// SPDX-License-Identifier: Apache-2.0
#include "codesign/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <ostream>
#include <sstream>

#include "codesign/codegen.hpp"
#include "codesign/errors.hpp"
#include "codesign/sim.hpp"
#include "json_util.hpp"

namespace codesign {

namespace fs = std::filesystem;

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    // splitmix64 over the packed run index.
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (a * 1000003ull + b + 1ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace {

using detail::json;

void write_text(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void log(std::ostream* progress, const std::string& line) {
    if (progress) *progress << line << "\n" << std::flush;
}

Characterization make_characterization(const RunConfig& cfg) {
    CharTable table =
        cfg.char_table_path.empty() ? default_char_table() : load_char_table(cfg.char_table_path);
    return Characterization(std::move(table), cfg.tile);
}

std::unique_ptr<AccuracyEvaluator> make_evaluator(const RunConfig& cfg,
                                                  const Characterization& ch) {
    if (cfg.evaluator_type == "external") {
        return std::make_unique<ExternalCommandEvaluator>(cfg.evaluator_command);
    }
    return std::make_unique<SyntheticProxyEvaluator>(ch, cfg.eval_seed, cfg.proxy);
}

DeviceSpec target_device(const RunConfig& cfg, const TargetSpec& t) {
    DeviceSpec dev = cfg.device;
    if (t.clock_mhz > 0.0) dev.clock_mhz = t.clock_mhz;
    return dev;
}

// pf carried into the fine phase: the fittest coarse record of this bundle
// (within budget if possible, fastest among those).
int pick_pf(const std::vector<EvalRecord>& coarse, const std::string& id,
            const ResourceVector& budget) {
    int best_pf = 0;
    bool best_fits = false;
    double best_lat = 0.0;
    for (const EvalRecord& r : coarse) {
        if (r.bundle_id != id || !r.valid) continue;
        const bool fits = r.resource.all_leq(budget);
        const bool better = best_pf == 0 || (fits && !best_fits) ||
                            (fits == best_fits && r.latency_ms < best_lat);
        if (better) {
            best_pf = r.pf;
            best_fits = fits;
            best_lat = r.latency_ms;
        }
    }
    return best_pf;
}

json resource_json(const ResourceVector& r) {
    return {{"dsp", r.dsp}, {"lut", r.lut}, {"ff", r.ff}, {"bram_kbit", r.bram_kbit}};
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct SearchJob {
    std::size_t target_idx;
    std::size_t bundle_idx;
    Bundle skeleton;
};

BundleOutcome run_search_job(const RunConfig& cfg, const Characterization& ch,
                             const DnnCalibration& dnn_calib, const TargetSpec& target,
                             const SearchJob& job) {
    BundleOutcome outcome;
    outcome.bundle_id = job.skeleton.id;
    const DeviceSpec dev = target_device(cfg, target);

    DnnModel initial;
    try {
        initial = initialize_dnn(job.skeleton, dev, job.skeleton.instances.front().quant,
                                 cfg.input_dims, ch, InitOptions{cfg.init_n_rep, 2});
    } catch (const InfeasibleError& e) {
        outcome.failure = e.what();
        return outcome;
    }
    initial.calib = dnn_calib;

    SearchConfig scfg;
    scfg.lat_targ_ms = target.latency_ms;
    scfg.epsilon_ms = target.epsilon_ms;
    scfg.res_max = dev.budget;
    scfg.k = cfg.search_k;
    scfg.seed = derive_seed(cfg.seed, job.target_idx, job.bundle_idx);
    scfg.max_iters = cfg.max_iters;

    const AnalyticalOracle oracle(dev, ch);
    SearchResult res = scd_search(initial, scfg, oracle);
    outcome.iterations = res.iterations;
    outcome.warning = res.warning;

    const fs::path base = fs::path(cfg.out_dir) / "targets" / target.label / job.skeleton.id;
    write_text(base / "search.log", trace_to_text(res.trace));
    for (std::size_t i = 0; i < res.models.size(); ++i) {
        AcceptedModel am;
        am.model = res.models[i];
        am.latency_ms = oracle.latency_ms(am.model);
        am.resource = oracle.resource(am.model);

        const fs::path rel = fs::path("targets") / target.label / job.skeleton.id;
        am.model_file = (rel / ("model_" + std::to_string(i) + ".json")).string();
        am.estimate_file = (rel / ("model_" + std::to_string(i) + ".estimate.json")).string();
        write_text(fs::path(cfg.out_dir) / am.model_file, to_json(am.model));
        write_text(fs::path(cfg.out_dir) / am.estimate_file,
                   estimate_report(am.model, dev, ch));
        try {
            const CodegenPlan p = plan(am.model, cfg.tile, ch, dev, cfg.codegen);
            am.codegen_dir = (rel / ("codegen_" + std::to_string(i))).string();
            emit(p, fs::path(cfg.out_dir) / am.codegen_dir);
        } catch (const PlanError& e) {
            am.codegen_dir.clear();
            am.codegen_error = e.what();
        }
        outcome.models.push_back(std::move(am));
    }
    return outcome;
}

json report_json(const RunConfig& cfg, const PipelineResult& result,
                 const std::string& timestamp) {
    json jcal = json::array();
    for (std::size_t i = 0; i < result.calibration.bundles.size(); ++i) {
        const Bundle& b = result.calibration.bundles[i];
        const BundleFit& f = result.calibration.fits[i];
        jcal.push_back({{"id", b.id},
                        {"alpha", b.calib.alpha},
                        {"beta", b.calib.beta},
                        {"max_train_rel_err", f.max_train_rel_err}});
    }
    json jtargets = json::array();
    for (const TargetOutcome& t : result.targets) {
        json jbundles = json::array();
        for (const BundleOutcome& b : t.bundles) {
            json jmodels = json::array();
            for (const AcceptedModel& m : b.models) {
                json jm = {{"model_file", m.model_file},
                           {"estimate_file", m.estimate_file},
                           {"codegen_dir", m.codegen_dir},
                           {"latency_ms", m.latency_ms},
                           {"resource", resource_json(m.resource)},
                           {"accuracy", m.accuracy}};
                if (!m.codegen_error.empty()) jm["codegen_error"] = m.codegen_error;
                jmodels.push_back(std::move(jm));
            }
            json jb = {{"bundle", b.bundle_id},
                       {"iterations", b.iterations},
                       {"models", jmodels}};
            if (!b.warning.empty()) jb["warning"] = b.warning;
            if (!b.failure.empty()) jb["failure"] = b.failure;
            jbundles.push_back(std::move(jb));
        }
        jtargets.push_back({{"label", t.target.label},
                            {"latency_ms", t.target.latency_ms},
                            {"epsilon_ms", t.target.epsilon_ms},
                            {"clock_mhz", t.target.clock_mhz},
                            {"met", t.met},
                            {"bundles", jbundles}});
    }
    return {{"schema_version", 1},
            {"timestamp", timestamp},
            {"config", detail::parse_json(to_json(cfg), "config echo")},
            {"calibration",
             {{"bundles", jcal},
              {"dnn",
               {{"phi", result.calibration.dnn.phi},
                {"lat_dm", result.calibration.dnn.lat_dm},
                {"gamma_ctl", result.calibration.dnn.gamma_ctl},
                {"res_ctl", resource_json(result.calibration.dnn.res_ctl)}}}}},
            {"evaluation",
             {{"coarse_records", result.coarse.size()},
              {"selected", result.selected},
              {"fine_records", result.fine.size()},
              {"top", result.top}}},
            {"targets", jtargets},
            {"all_met", result.all_met}};
}

} // namespace

PipelineResult run_pipeline(const RunConfig& cfg, std::ostream* progress) {
    validate(cfg);
    const Characterization ch = make_characterization(cfg);
    const fs::path out(cfg.out_dir);
    fs::create_directories(out);
    write_text(out / "config.json", to_json(cfg));

    // Step 1: enumerate and calibrate against the simulator.
    log(progress, "step 1: enumerating bundles and calibrating models");
    std::vector<Bundle> bundles = enumerate_bundles(builtin_templates());
    write_text(out / "bundles.json", bundles_to_json(bundles, false));
    PipelineResult result;
    result.calibration = calibrate(bundles, default_sample_configs(), ch);
    write_text(out / "calibration.json", calibration_to_json(result.calibration));

    // Step 2: coarse evaluation, Pareto selection, fine evaluation.
    log(progress, "step 2: evaluating and selecting bundles");
    std::unique_ptr<AccuracyEvaluator> evaluator = make_evaluator(cfg, ch);
    EvalOptions eopts;
    eopts.input_dims = cfg.input_dims;
    eopts.task = cfg.task;
    eopts.dnn_calib = result.calibration.dnn;

    std::vector<Bundle> calibrated;
    for (const Bundle& b : result.calibration.bundles) {
        calibrated.push_back(with_config(b, b.instances.front().pf, cfg.quant));
    }
    result.coarse = coarse_evaluate(calibrated, cfg.pf_set, *evaluator, cfg.device, ch, eopts);
    write_text(out / "evaluation" / "coarse.json", records_to_json(result.coarse));
    write_text(out / "evaluation" / "coarse.csv", records_to_csv(result.coarse));

    result.selected = pareto_select(result.coarse, 0.2 * cfg.device.budget.dsp);
    write_text(out / "evaluation" / "selected.json",
               json{{"schema_version", 1}, {"selected", result.selected}}.dump(2) + "\n");

    std::vector<Bundle> selected_bundles;
    for (const std::string& id : result.selected) {
        const auto it = std::find_if(calibrated.begin(), calibrated.end(),
                                     [&](const Bundle& b) { return b.id == id; });
        const int pf = pick_pf(result.coarse, id, cfg.device.budget);
        if (it != calibrated.end() && pf > 0) {
            selected_bundles.push_back(with_config(*it, pf, cfg.quant));
        }
    }

    std::vector<Bundle> top_bundles;
    if (!selected_bundles.empty()) {
        result.fine = fine_evaluate(selected_bundles, cfg.rep_counts, cfg.clips, *evaluator,
                                    cfg.device, ch, eopts);
        write_text(out / "evaluation" / "fine.json", records_to_json(result.fine));
        write_text(out / "evaluation" / "fine.csv", records_to_csv(result.fine));

        // Rank and keep the top_n bundles, fixing each one's best clip.
        for (const EvalRecord& r : rank_records(result.fine)) {
            if (!r.valid) continue;
            if (std::find(result.top.begin(), result.top.end(), r.bundle_id) !=
                result.top.end()) {
                continue;
            }
            if (static_cast<int>(result.top.size()) == cfg.top_n) break;
            result.top.push_back(r.bundle_id);
            const auto it =
                std::find_if(selected_bundles.begin(), selected_bundles.end(),
                             [&](const Bundle& b) { return b.id == r.bundle_id; });
            QuantScheme q = cfg.quant;
            q.activation_clip = r.quant.activation_clip;
            top_bundles.push_back(with_config(*it, it->instances.front().pf, q));
        }
    }

    // Step 3: per-target searches, estimates, code generation.
    log(progress, "step 3: searching DNNs per target");
    for (std::size_t ti = 0; ti < cfg.targets.size(); ++ti) {
        TargetOutcome to;
        to.target = cfg.targets[ti];
        std::vector<std::future<BundleOutcome>> futures;
        for (std::size_t bi = 0; bi < top_bundles.size(); ++bi) {
            SearchJob job{ti, bi, top_bundles[bi]};
            futures.push_back(std::async(std::launch::async, [&cfg, &ch, &result, job,
                                                              &to]() {
                return run_search_job(cfg, ch, result.calibration.dnn, to.target, job);
            }));
        }
        for (auto& f : futures) to.bundles.push_back(f.get());
        for (BundleOutcome& b : to.bundles) {
            if (!b.models.empty()) to.met = true;
        }
        result.targets.push_back(std::move(to));
    }

    // Accuracy of accepted models, evaluated after the search.
    for (TargetOutcome& t : result.targets) {
        for (BundleOutcome& b : t.bundles) {
            for (AcceptedModel& m : b.models) {
                try {
                    m.accuracy = evaluator->evaluate(m.model, cfg.task);
                } catch (const std::exception&) {
                    m.accuracy = 0.0;
                }
            }
        }
    }

    result.all_met = !result.targets.empty();
    for (const TargetOutcome& t : result.targets) {
        if (!t.met) result.all_met = false;
    }

    write_text(out / "report.json",
               report_json(cfg, result, iso_timestamp()).dump(2) + "\n");
    log(progress, std::string("pipeline finished: ") +
                      (result.all_met ? "every target met" : "some targets unmet"));
    return result;
}

std::vector<Violation> verify_run(const RunConfig& cfg) {
    std::vector<Violation> violations;
    const fs::path out(cfg.out_dir);
    const Characterization ch = make_characterization(cfg);

    json report;
    try {
        report = detail::parse_json(read_text(out / "report.json"), "report");
    } catch (const std::exception& e) {
        violations.push_back({"report.json", e.what()});
        return violations;
    }

    for (const auto& jt : report.at("targets")) {
        const std::string label = jt.at("label").get<std::string>();
        TargetSpec target;
        target.label = label;
        target.latency_ms = jt.at("latency_ms").get<double>();
        target.epsilon_ms = jt.at("epsilon_ms").get<double>();
        target.clock_mhz = jt.at("clock_mhz").get<double>();
        const DeviceSpec dev = target_device(cfg, target);

        for (const auto& jb : jt.at("bundles")) {
            for (const auto& jm : jb.at("models")) {
                const std::string file = jm.at("model_file").get<std::string>();
                const std::string where = label + "/" + file;
                DnnModel m;
                try {
                    m = dnn_model_from_json(read_text(out / file));
                } catch (const std::exception& e) {
                    violations.push_back({where, std::string("unreadable model: ") + e.what()});
                    continue;
                }
                const double lat = dnn_latency_ms(m, dev, ch);
                if (!(std::abs(target.latency_ms - lat) < target.epsilon_ms)) {
                    violations.push_back(
                        {where, "latency " + std::to_string(lat) + " ms misses target " +
                                    std::to_string(target.latency_ms) + " +- " +
                                    std::to_string(target.epsilon_ms) + " ms"});
                }
                const ResourceVector res = dnn_resource(m, ch);
                if (!res.all_leq(dev.budget)) {
                    violations.push_back(
                        {where, "resources exceed the device budget: " +
                                    first_overflow(res, dev.budget)});
                }
                const double recorded = jm.at("latency_ms").get<double>();
                if (std::abs(recorded - lat) > 1e-9 * std::max(1.0, std::abs(lat))) {
                    violations.push_back({where, "reported latency " +
                                                     std::to_string(recorded) +
                                                     " ms does not match recomputed " +
                                                     std::to_string(lat) + " ms"});
                }
                try {
                    check_trace(simulate_dnn(m, dev, ch));
                } catch (const std::exception& e) {
                    violations.push_back({where, std::string("trace causality: ") + e.what()});
                }
            }
        }
    }
    return violations;
}

} // namespace codesign
