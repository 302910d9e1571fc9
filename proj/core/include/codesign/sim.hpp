// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codesign/bundle.hpp"
#include "codesign/characterization.hpp"
#include "codesign/device.hpp"
#include "codesign/dnn.hpp"
#include "codesign/ip.hpp"

namespace codesign {

// One stage of the tile pipeline. Transfer stages carry no IP instance.
struct PipelineStage {
    std::string name;
    std::int64_t per_tile_cycles = 0; // > 0
    bool transfer = false;
};

// Per-stage schedule of one pipeline segment. Within a stage, tile k+1 starts
// no earlier than tile k finishes; stage s of tile k starts no earlier than
// stage s-1 of tile k finishes.
struct StageTiming {
    PipelineStage stage;
    std::vector<std::int64_t> start;
    std::vector<std::int64_t> finish;
};

// One contiguously pipelined stage group (a bundle launch). Segments run
// sequentially; `base_cycle` is the segment's global start time.
struct SimSegment {
    std::string name;
    std::int64_t base_cycle = 0;
    std::int64_t tiles = 0;
    std::vector<StageTiming> stages;
    std::int64_t total_cycles = 0;    // span of this segment
    std::int64_t stall_cycles = 0;    // deposit-blocking time across stages
    std::int64_t transfer_cycles = 0; // busy cycles of transfer stages + preload
};

struct SimTrace {
    std::vector<SimSegment> segments;
    std::int64_t total_cycles = 0;
    std::int64_t stall_cycles = 0;
    std::int64_t transfer_cycles = 0;
};

struct SimOptions {
    bool include_transfers = true;
    int buffer_depth = 1; // inter-stage slots; >= 1
};

// Event-driven schedule of T tiles through the bundle's stages with
// depth-limited inter-stage buffers. T is the reuse count of the last
// instance's output dims; per-stage per-tile cost spreads that instance's
// total computation over T tiles. With transfers enabled, a load stage
// (offset by the weight preload) and a store stage stream the bundle's
// boundary traffic at `bw` bytes per cycle, overlapped with compute.
// `dims` holds one LayerDims per instance. Throws DomainError on bad inputs.
SimTrace simulate_bundle(const Bundle& b, const std::vector<LayerDims>& dims,
                         const TileShape& tile, double bw, const Characterization& ch,
                         const SimOptions& opts = {});

// Sequential simulation of head, N bundle replications, and tail. Each launch
// is one segment and incurs the characterization's fixed DRAM burst overhead.
SimTrace simulate_dnn(const DnnModel& m, const DeviceSpec& device, const Characterization& ch,
                      const SimOptions& opts = {});

// Verifies the causality invariants of every segment; throws DomainError with
// the offending stage/tile on violation.
void check_trace(const SimTrace& trace);

// Per-tile timings as JSON, for inspection.
std::string trace_to_json(const SimTrace& trace);

} // namespace codesign
