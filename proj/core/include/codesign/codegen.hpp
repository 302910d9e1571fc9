// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "codesign/characterization.hpp"
#include "codesign/device.hpp"
#include "codesign/dnn.hpp"
#include "codesign/resource.hpp"

namespace codesign {

struct BufferSpec {
    std::string name;
    std::int64_t bytes = 0;
    bool on_chip = false;
};

// One scheduled layer execution. Layers of one group (head, a replication,
// tail) chain tile-by-tile through the on-chip ping/pong buffers; the first
// and last step of a group also name the off-chip map they load from / store
// to. Fused layers (pointwise ops folded into the preceding computational
// call when loop fusion is on) are listed on the step that absorbs them.
struct CallStep {
    std::size_t layer = 0; // execution index in the DnnModel
    std::size_t group = 0; // pipelined group index
    IpKind kind = IpKind::conv3x3;
    std::string function;
    LayerDims dims;
    std::int64_t tiles = 0;
    std::string in_buffer;         // on-chip tile buffer the IP reads
    std::string out_buffer;        // on-chip tile buffer the IP writes
    std::string load_from;         // off-chip map, first step of a group only
    std::string store_to;          // off-chip map, last step of a group only
    std::int64_t weight_bytes = 0;
    std::int64_t weight_offset = 0;     // into the off-chip weight array
    std::int64_t weight_buf_offset = 0; // this stage's slot in the weight buffer
    std::vector<std::size_t> fused_layers;
    std::vector<IpKind> fused_kinds;
};

// Optional passes mirroring the usual by-hand optimizations; off by default.
struct PlanOptions {
    bool buffer_reuse = false; // collapse boundary maps into two ping/pong arrays
    bool loop_fusion = false;  // fold norm/activation into the preceding compute call
};

struct CodegenPlan {
    DnnModel model;
    TileShape tile;
    DeviceSpec device;
    PlanOptions options;
    std::vector<IpInstance> instances; // one emitted function per entry
    std::vector<BufferSpec> buffers;
    std::vector<CallStep> schedule;
    std::int64_t on_chip_bytes = 0;
    std::int64_t off_chip_bytes = 0;
    std::int64_t weight_total_bytes = 0;
    // Analytical estimates captured at planning time for the manifest.
    double est_cycles = 0.0;
    double est_ms = 0.0;
    ResourceVector est_res;
};

// Deterministic plan: one function per distinct IP instance, every layer
// scheduled exactly once, intra-bundle edges routed through on-chip tile
// buffers and bundle boundaries through off-chip maps. Throws PlanError
// naming the overflowing buffer when on-chip bytes exceed the device BRAM.
CodegenPlan plan(const DnnModel& m, const TileShape& tile, const Characterization& ch,
                 const DeviceSpec& device, const PlanOptions& opts = {});

// Writes accel.h, accel_top.c, one ip_<kind>.c per instance, and
// manifest.json under outdir. Byte-identical output for identical plans.
// Returns the written file names in emission order.
std::vector<std::string> emit(const CodegenPlan& p, const std::filesystem::path& outdir);

// JSON report: analytical latency (cycles, ms at device clock), resources
// with utilization against the device budget, and the simulator cross-check.
std::string estimate_report(const DnnModel& m, const DeviceSpec& device,
                            const Characterization& ch);

} // namespace codesign
