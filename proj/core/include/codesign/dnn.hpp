// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "codesign/bundle.hpp"
#include "codesign/device.hpp"

namespace codesign {

// DNN-level calibration: inter-bundle data movement (phi * lat_dm, cycles)
// and control-logic overhead (gamma_ctl * res_ctl).
struct DnnCalibration {
    double phi = 0.0;
    double lat_dm = 0.0;
    double gamma_ctl = 1.0;
    ResourceVector res_ctl;
};

// A DNN built by replicating one configured bundle n_rep times, with
// down-sampling spots (x_ds, factor f_ds) and channel-expansion factors
// (pi_ch) at the n_rep-1 replication boundaries. All instances share one
// pf/quant policy so IPs are reused across layers. head/tail carry the
// optional fixed stem and classifier used by bundle evaluation; both are
// empty for search-phase models.
struct DnnModel {
    Bundle bundle;
    int n_rep = 1;
    std::vector<int> x_ds;     // 0/1, length n_rep - 1
    int f_ds = 2;
    std::vector<double> pi_ch; // length n_rep - 1, values from the factor ladder
    FeatureDims input_dims;
    std::vector<IpKind> head;
    std::vector<IpKind> tail;
    DnnCalibration calib;

    int pf() const;                  // the uniform parallel factor
    const QuantScheme& quant() const;
    std::size_t layer_count() const; // head + n_rep * bundle layers + tail
};

// Channel-expansion factor ladder used by initialization and search moves.
inline constexpr std::array<double, 6> kChannelFactorLadder = {1.0, 1.2, 1.3, 1.5, 1.75, 2.0};

void validate(const DnnModel& m); // structural invariants; throws DomainError

// Feature-map dims of each replication, threading input_dims through the
// head stem (if any) and the boundary down-sampling/expansion transforms.
// Channel counts are rounded up to a multiple of tile.channels.
std::vector<FeatureDims> replication_dims(const DnnModel& m, const TileShape& tile);

// Layer dims in execution order: head layers, then every replication's
// bundle layers, then tail layers.
std::vector<LayerDims> layer_dims(const DnnModel& m, const TileShape& tile);

// Distinct IP instances of the model (one per kind, uniform pf/quant).
std::vector<IpInstance> distinct_instances(const DnnModel& m);

// Map instance kind -> layer indices it executes; every layer appears in
// exactly one list.
std::map<std::string, std::vector<std::size_t>> layer_assignment(const DnnModel& m);

// Overall DNN latency: per-replication bundle latencies at their own dims
// (plus head/tail parts when present) plus phi * lat_dm.
double dnn_latency_cycles(const DnnModel& m, double bw, const Characterization& ch);
double dnn_latency_ms(const DnnModel& m, const DeviceSpec& device, const Characterization& ch);

// Overall DNN resource: bundle resource (over the model's distinct
// instances) plus gamma_ctl * res_ctl. Independent of n_rep/x_ds/pi_ch.
ResourceVector dnn_resource(const DnnModel& m, const Characterization& ch);

struct InitOptions {
    int n_rep = 3;
    int f_ds = 2;
};

// Initial DNN for one bundle: n_rep replications with every down-sampling
// spot active, channel expansion 2 after down-sampled boundaries, uniform
// quant, and the largest pf candidate whose resource fits the device budget.
// Throws InfeasibleError (naming the binding resource) when pf=1 does not fit.
DnnModel initialize_dnn(const Bundle& skeleton, const DeviceSpec& device,
                        const QuantScheme& quant, const FeatureDims& input_dims,
                        const Characterization& ch, const InitOptions& opts = {});

// Lossless JSON round-trip.
std::string to_json(const DnnModel& m);
DnnModel dnn_model_from_json(const std::string& text);

} // namespace codesign
