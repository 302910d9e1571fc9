// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "codesign/bundle.hpp"
#include "codesign/characterization.hpp"
#include "codesign/dnn.hpp"
#include "codesign/ip.hpp"

namespace codesign {

// One calibration sample point: a boundary feature map plus the hardware
// knobs it is simulated under.
struct SampleConfig {
    FeatureDims dims{32, 32, 16};
    int pf = 4;
    QuantScheme quant;
    double bw = 16.0;
};

// Deterministic 16-point grid over feature size, pf, and bandwidth. Even
// indices make a natural training split, odd indices a held-out split; both
// halves cover the full range of every axis.
std::vector<SampleConfig> default_sample_configs();

// Ordinary least squares through the origin with two features:
// y ~ a*x0 + b*x1. Throws CalibrationError when the normal matrix is
// singular (rank-deficient sample set) or fewer than 2 points are given.
std::pair<double, double> fit_scale2(const std::vector<std::array<double, 2>>& x,
                                     const std::vector<double>& y);

struct BundleFit {
    std::string bundle_id;
    double alpha = 1.0;
    double beta = 1.0;
    double max_train_rel_err = 0.0;
    std::vector<std::string> warnings;
};

struct CalibrationResult {
    std::vector<Bundle> bundles; // inputs with calib filled in
    DnnCalibration dnn;
    std::vector<BundleFit> fits;
};

// Structural overhead terms (no fitting): per-stage control logic plus
// depth-1 inter-stage tile slots for the bundle; device-level FSM footprint
// for the DNN controller.
ResourceVector structural_overhead(const Bundle& b, const Characterization& ch);
ResourceVector structural_res_ctl(const Characterization& ch);

// Fits alpha/beta per bundle by OLS of simulated totals against
// (sum of computation latencies, traffic/bw); fills Gamma and the DNN-level
// constants. phi is measured from multi-replication simulator runs. Values
// outside (0, 1.5] are clamped and reported as warnings. Requires >= 4
// samples; throws CalibrationError on rank deficiency.
CalibrationResult calibrate(const std::vector<Bundle>& bundles,
                            const std::vector<SampleConfig>& samples,
                            const Characterization& ch);

// Relative errors |estimate - simulated| / simulated of a calibrated bundle
// on the given configs.
std::vector<double> fidelity_errors(const Bundle& calibrated,
                                    const std::vector<SampleConfig>& configs,
                                    const Characterization& ch);

std::string calibration_to_json(const CalibrationResult& result);

// Applies a calibration JSON document to a bundle list (matched by id) and a
// DNN calibration. Throws ConfigError on unknown bundle ids or bad schema.
void apply_calibration_json(std::vector<Bundle>& bundles, DnnCalibration& dnn,
                            const std::string& text);

} // namespace codesign
