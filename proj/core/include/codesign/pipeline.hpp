// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "codesign/calibrate.hpp"
#include "codesign/config.hpp"
#include "codesign/eval.hpp"
#include "codesign/search.hpp"

namespace codesign {

struct AcceptedModel {
    DnnModel model;
    double latency_ms = 0.0;
    ResourceVector resource;
    double accuracy = 0.0;
    std::string model_file;    // paths relative to the output directory
    std::string estimate_file;
    std::string codegen_dir;
    std::string codegen_error; // set when planning failed; model still counts
};

struct BundleOutcome {
    std::string bundle_id;
    int iterations = 0;
    std::vector<AcceptedModel> models;
    std::string warning; // partial acceptance
    std::string failure; // initialization infeasible
};

struct TargetOutcome {
    TargetSpec target;
    std::vector<BundleOutcome> bundles;
    bool met = false; // at least one accepted model
};

struct PipelineResult {
    CalibrationResult calibration;
    std::vector<EvalRecord> coarse;
    std::vector<std::string> selected; // Pareto winners
    std::vector<EvalRecord> fine;
    std::vector<std::string> top;      // bundles carried into the search
    std::vector<TargetOutcome> targets;
    bool all_met = false;
};

// Derived per-run seed so concurrent searches stay reproducible.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

// Runs the three co-design steps (calibrate, evaluate/select, search +
// estimate + codegen) and writes every artifact under cfg.out_dir, including
// report.json. Rerunning with the same config reproduces every byte except
// the report timestamp. `progress` (optional) receives one line per step.
PipelineResult run_pipeline(const RunConfig& cfg, std::ostream* progress = nullptr);

struct Violation {
    std::string where;
    std::string what;
};

// Standalone audit of a finished run directory: re-reads every accepted model
// and re-checks the acceptance predicates (|target - latency| < epsilon,
// resources within budget), model validity, and simulator trace causality.
std::vector<Violation> verify_run(const RunConfig& cfg);

} // namespace codesign
