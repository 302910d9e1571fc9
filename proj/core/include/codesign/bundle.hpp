// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codesign/characterization.hpp"
#include "codesign/ip.hpp"
#include "codesign/resource.hpp"

namespace codesign {

// Pipelining/transfer overlap factors plus structural resource overhead,
// fitted per bundle against the tile simulator. alpha/beta outside (0, 1.5]
// indicate model misuse and are clamped with a warning by the calibrator.
struct BundleCalibration {
    double alpha = 1.0;
    double beta = 1.0;
    ResourceVector gamma_res;
};

// Ordered list of IP instances forming the basic DNN building block. The
// instance order is the execution order of the bundle's layers, at most two
// of them computational.
struct Bundle {
    std::string id;
    std::vector<IpInstance> instances;
    BundleCalibration calib;

    std::size_t computational_count() const;
};
void validate(const Bundle& b); // non-empty, <= 2 computational instances

// Deterministic skeleton enumeration over a template catalog: one bundle per
// computational template, plus one per (standard conv, second op) ordered
// pair where the second op is a depthwise conv or max pool. Normalization and
// activation are appended as non-computational tail layers when present in
// the catalog. The full builtin catalog yields exactly 18 bundles (pf/quant
// left at defaults).
std::vector<Bundle> enumerate_bundles(const std::vector<IpTemplate>& catalog);

// Copy of `b` with a uniform parallel factor and quantization scheme.
Bundle with_config(const Bundle& b, int pf, const QuantScheme& quant);

// Per-execution off-chip traffic of one bundle at the given boundary dims.
struct DataFootprint {
    std::int64_t bytes_in = 0;
    std::int64_t bytes_out = 0;
    std::int64_t bytes_weights = 0;

    std::int64_t total() const { return bytes_in + bytes_out + bytes_weights; }
};

// Traffic crosses the bundle boundary only; intra-bundle tiles stay on-chip.
// `dims` holds one LayerDims per instance, in execution order.
DataFootprint data_footprint(const Bundle& b, const std::vector<LayerDims>& dims,
                             const Characterization& ch);

// Bundle resource: sum of instance resources plus the calibration overhead.
ResourceVector bundle_resource(const Bundle& b, const Characterization& ch);

// Computation latency of one instance over one layer: reuse count times
// per-invocation cycles.
std::int64_t comp_latency(const IpInstance& inst, const LayerDims& dims, const TileShape& tile,
                          const Characterization& ch);

// Bundle latency estimate: alpha * sum of per-instance computation latencies
// plus beta * traffic / bw. bw is in bytes per cycle; throws DomainError when
// bw <= 0.
double bundle_latency(const Bundle& b, const std::vector<LayerDims>& dims,
                      const TileShape& tile, double bw, const Characterization& ch);

// JSON export of a bundle list (id, instance kinds, calibration constants).
std::string bundles_to_json(const std::vector<Bundle>& bundles, bool calibrated);

} // namespace codesign
