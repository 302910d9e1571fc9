// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codesign/codegen.hpp"
#include "codesign/device.hpp"
#include "codesign/eval.hpp"
#include "codesign/ip.hpp"

namespace codesign {

// One latency target. Configs may give fps instead (latency = 1000/fps);
// the two are mutually exclusive per target.
struct TargetSpec {
    std::string label;
    double latency_ms = 0.0;
    double epsilon_ms = 0.0; // defaults to 5% of latency_ms
    double clock_mhz = 0.0;  // 0 = use the device clock
};

struct RunConfig {
    DeviceSpec device;
    std::vector<TargetSpec> targets; // default: 10/15/20 fps
    TileShape tile;
    FeatureDims input_dims{64, 64, 32};
    QuantScheme quant;
    std::vector<int> pf_set{2, 4, 8};
    std::vector<int> rep_counts{1, 2, 3};
    std::vector<ActivationClip> clips{ActivationClip::relu, ActivationClip::relu4,
                                      ActivationClip::relu8};
    int top_n = 5;      // bundles carried into the search phase
    int init_n_rep = 3; // replications of the initial DNN
    int search_k = 3;   // accepted DNNs per (bundle, target)
    int max_iters = 1000;
    std::uint64_t seed = 1;
    std::string evaluator_type = "proxy"; // proxy | external
    std::string evaluator_command;        // external only
    std::uint64_t eval_seed = 7;
    SyntheticProxyEvaluator::Coefficients proxy;
    std::string char_table_path; // empty = shipped defaults
    std::string out_dir = "out";
    std::string task = "default";
    PlanOptions codegen;
};

// Shipped defaults: PYNQ-Z1, 10/15/20 fps at the device clock.
RunConfig default_run_config();

void validate(const RunConfig& cfg);

// Strict parser: unknown keys anywhere in the document are rejected.
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);
std::string to_json(const RunConfig& cfg);

} // namespace codesign
