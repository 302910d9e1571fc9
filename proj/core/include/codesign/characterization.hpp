// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "codesign/ip.hpp"
#include "codesign/resource.hpp"

namespace codesign {

// Per-kind coefficients of the closed-form characterization model. DSP count
// and cycle count are structural (kernel size, tile volume, parallel factor);
// LUT/FF scale affinely with DSP, BRAM comes from tile and weight buffer
// footprints.
struct KindCoefficients {
    double lut_base = 0.0;
    double lut_per_dsp = 0.0;
    double ff_base = 0.0;
    double ff_per_dsp = 0.0;
    // Multiplier on the per-element cycle count of non-computational kinds.
    double cycle_scale = 1.0;
    // Extra fixed BRAM (line buffers etc.), kilobits.
    double bram_fixed_kbit = 0.0;
};

struct CharTable {
    std::map<std::string, KindCoefficients> kinds;
    // Control-logic overheads used by calibration as structural ground truth.
    double ctl_lut_per_stage = 180.0;
    double ctl_ff_per_stage = 120.0;
    double fsm_lut = 1200.0;
    double fsm_ff = 800.0;
    // Per-boundary DRAM transaction overhead charged by the DNN-level
    // simulator; doubles as the Lat_DM unit during calibration.
    double dram_overhead_cycles = 200.0;
};

// Shipped defaults (stand-ins for HLS-derived numbers).
CharTable default_char_table();

// Parse/serialize the external JSON table format. Unknown keys are rejected.
CharTable char_table_from_json(const std::string& text);
std::string to_json(const CharTable& table);
CharTable load_char_table(const std::string& path);

// Latency/resource model for configured IP instances. Bound to the
// accelerator's common tile at construction: BRAM sizing needs the tile
// footprint while keeping res() a function of (template, pf, quant) only.
class Characterization {
public:
    Characterization(CharTable table, TileShape tile);

    const TileShape& tile() const { return tile_; }
    const CharTable& table() const { return table_; }

    // Resource usage of one instance. Monotone non-decreasing in pf.
    ResourceVector resources(const IpInstance& inst) const;

    // Cycles for one invocation on one tile. Monotone non-increasing in pf
    // for computational kinds; doubling pf exactly halves the count when pf
    // divides tile.channels.
    std::int64_t latency_cycles(const IpInstance& inst, const TileShape& tile) const;

    // Both of the above in one call.
    std::pair<ResourceVector, std::int64_t> characterize(const IpInstance& inst,
                                                         const TileShape& tile) const;

    // Full-layer weight bytes for an instance at the given layer dims
    // (DRAM traffic, not the on-chip working set).
    std::int64_t weight_bytes(const IpInstance& inst, const LayerDims& dims) const;

private:
    const KindCoefficients& coeffs(IpKind kind) const; // throws ConfigError if missing
    CharTable table_;
    TileShape tile_;
};

} // namespace codesign
