// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "codesign/characterization.hpp"
#include "codesign/device.hpp"
#include "codesign/dnn.hpp"
#include "codesign/resource.hpp"

namespace codesign {

// Search coordinates: replication count, channel expansion vector,
// down-sampling toggle vector.
enum class Coord { N, Pi, X };
std::string to_string(Coord c);

struct SearchConfig {
    double lat_targ_ms = 0.0;
    double epsilon_ms = 0.0; // > 0
    ResourceVector res_max;
    int k = 1;               // >= 1, number of DNNs to produce
    std::uint64_t seed = 0;
    int max_iters = 1000;    // >= 1
};
void validate(const SearchConfig& cfg);

// Latency/resource estimate seam so searches can run against the analytical
// models or a synthetic stand-in.
class LatResOracle {
public:
    virtual ~LatResOracle() = default;
    virtual double latency_ms(const DnnModel& m) const = 0;
    virtual ResourceVector resource(const DnnModel& m) const = 0;
};

class AnalyticalOracle final : public LatResOracle {
public:
    AnalyticalOracle(const DeviceSpec& device, const Characterization& ch)
        : device_(&device), ch_(&ch) {}
    double latency_ms(const DnnModel& m) const override;
    ResourceVector resource(const DnnModel& m) const override;

private:
    const DeviceSpec* device_;
    const Characterization* ch_;
};

// Shared context of one search run's moves. The oracle steers X toggles and
// the RNG picks the edited channel-expansion entry.
struct MoveContext {
    const LatResOracle* oracle = nullptr;
    double lat_targ_ms = 0.0;
    std::mt19937_64* rng = nullptr;
};

// One coordinate move of |steps| units; throws MoveError when the move would
// break model invariants (n_rep < 1, ladder edge, no useful toggle).
//   N:  n_rep += steps; new boundaries appended inactive (x=0, pi=1).
//   Pi: per unit, one RNG-picked boundary entry advances one position
//       through the ordered factor ladder (sign of steps = direction).
//   X:  per unit, toggles the entry whose flip moves latency toward the
//       target most, ties broken by lowest index.
DnnModel coordinate_move(const DnnModel& m, Coord coord, int steps, MoveContext& ctx);

struct TraceEntry {
    int iter = 0;
    std::string event; // accept | move | resource-reject | perturb | stuck
    std::string coord; // coordinate name or "-"
    int steps = 0;
    double lat_ms = 0.0;
    ResourceVector res;
};
std::string trace_to_text(const std::vector<TraceEntry>& trace);

struct SearchState {
    DnnModel current;
    std::vector<DnnModel> accepted;
    int iteration = 0;
    std::mt19937_64 rng;
};

struct SearchResult {
    std::vector<DnnModel> models;
    std::vector<TraceEntry> trace;
    int iterations = 0;
    std::string warning; // non-empty when fewer than k models were accepted
};

// Stochastic coordinate descent. Per iteration: accept the current model when
// |lat_targ - Lat| < epsilon and Res <= res_max (then force one random
// perturbation); otherwise probe the latency delta of a unit move toward the
// target along each coordinate, pick uniformly among the non-flat ones, and,
// if the probed model satisfies Est_Res < res_max, step by
// max(1, floor(|lat_targ - Lat| / |dLat|)) units. Stops at k accepted models
// or max_iters. Deterministic for a fixed seed.
SearchResult scd_search(const DnnModel& initial, const SearchConfig& cfg,
                        const LatResOracle& oracle);

} // namespace codesign
