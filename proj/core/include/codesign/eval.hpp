// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codesign/bundle.hpp"
#include "codesign/characterization.hpp"
#include "codesign/device.hpp"
#include "codesign/dnn.hpp"

namespace codesign {

enum class BuildMethod { fixed_head_tail, pure_replication };
std::string to_string(BuildMethod m);

// One evaluated candidate. Latency/resource come from the analytical models,
// accuracy from the configured evaluator. `valid` is false when the evaluator
// failed; `error` then carries the reason and the run continues.
struct EvalRecord {
    std::string bundle_id;
    BuildMethod method = BuildMethod::fixed_head_tail;
    int pf = 1;
    QuantScheme quant;
    int n_rep = 1;
    double latency_ms = 0.0;
    ResourceVector resource;
    double accuracy = 0.0; // in [0,1]
    bool valid = true;
    std::string error;
};

// Accuracy oracle seam. Implementations must be deterministic for a fixed
// seed and return a score in [0,1]; failures are reported by throwing.
class AccuracyEvaluator {
public:
    virtual ~AccuracyEvaluator() = default;
    virtual double evaluate(const DnnModel& m, const std::string& task) = 0;
};

// Default evaluator: a monotone proxy over model size,
// sigmoid(a*log(params) + b*log(ops) + kind/quant bonuses + seeded noise).
// Independent of pf, so records differing only in pf share one accuracy.
class SyntheticProxyEvaluator final : public AccuracyEvaluator {
public:
    struct Coefficients {
        double a = 0.30;           // weight of log parameter count
        double b = 0.25;           // weight of log MAC count
        double kind_bonus = 0.05;  // per distinct computational kind
        double wide_quant = 0.08;  // 16-bit weights
        double clip_bonus = 0.02;  // bounded activations (relu4/relu8)
        double noise = 0.01;       // amplitude of the seeded noise term
        double bias = -7.0;
    };

    SyntheticProxyEvaluator(const Characterization& ch, std::uint64_t seed);
    SyntheticProxyEvaluator(const Characterization& ch, std::uint64_t seed, Coefficients coeff);
    double evaluate(const DnnModel& m, const std::string& task) override;

private:
    const Characterization* ch_;
    std::uint64_t seed_;
    Coefficients coeff_;
};

// Runs `command` with the DnnModel JSON on its standard input and parses the
// first line of its output as the score. Non-zero exit, unparsable output,
// or a score outside [0,1] throw ConfigError.
class ExternalCommandEvaluator final : public AccuracyEvaluator {
public:
    explicit ExternalCommandEvaluator(std::string command);
    double evaluate(const DnnModel& m, const std::string& task) override;

private:
    std::string command_;
};

// Total parameter and multiply-accumulate counts of a model, from the layer
// dims (pf/quant independent).
std::int64_t model_param_count(const DnnModel& m, const TileShape& tile);
std::int64_t model_op_count(const DnnModel& m, const TileShape& tile);

// fixed_head_tail: conv3x3 stem + n replications + global pool / pointwise
// tail. pure_replication: n replications only. Dims stay constant across
// replications (no down-sampling, unit channel factors).
DnnModel build_eval_dnn(const Bundle& b, BuildMethod method, int n,
                        const FeatureDims& input_dims);

struct EvalOptions {
    FeatureDims input_dims{64, 64, 32};
    std::string task = "default";
    DnnCalibration dnn_calib; // applied to every evaluated model
};

// One record per (bundle, pf), method fixed_head_tail with a single
// replication. Accuracy is shared across pf for the same bundle.
std::vector<EvalRecord> coarse_evaluate(const std::vector<Bundle>& bundles,
                                        const std::vector<int>& pf_set,
                                        AccuracyEvaluator& evaluator, const DeviceSpec& device,
                                        const Characterization& ch, const EvalOptions& opts = {});

// Partitions records into DSP-usage bands of the given width and extracts the
// (latency min, accuracy max) Pareto front per band; returns the union of
// front members' bundle ids in first-appearance order. Invalid records are
// ignored. band_width_dsp > 0.
std::vector<std::string> pareto_select(const std::vector<EvalRecord>& records,
                                       double band_width_dsp);

// Grid evaluation of pre-configured bundles over replication counts and
// activation clip variants, method pure_replication.
std::vector<EvalRecord> fine_evaluate(const std::vector<Bundle>& bundles,
                                      const std::vector<int>& rep_counts,
                                      const std::vector<ActivationClip>& clips,
                                      AccuracyEvaluator& evaluator, const DeviceSpec& device,
                                      const Characterization& ch, const EvalOptions& opts = {});

// Valid records ranked accuracy-descending, latency ascending on ties.
std::vector<EvalRecord> rank_records(std::vector<EvalRecord> records);

std::string records_to_json(const std::vector<EvalRecord>& records);
std::string records_to_csv(const std::vector<EvalRecord>& records);
std::vector<EvalRecord> records_from_json(const std::string& text);

} // namespace codesign
