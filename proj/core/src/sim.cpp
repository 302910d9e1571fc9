// SPDX-License-Identifier: Apache-2.0
#include "codesign/sim.hpp"

#include <algorithm>
#include <cmath>

#include "codesign/errors.hpp"
#include "json_util.hpp"

namespace codesign {

namespace {

std::int64_t ceil_div64(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::int64_t transfer_cycles_for(std::int64_t bytes, double bw) {
    if (bytes <= 0) return 0;
    return static_cast<std::int64_t>(std::ceil(static_cast<double>(bytes) / bw));
}

// Schedules T tiles through `stages` with depth-limited inter-stage buffers.
// A stage may not finish a tile until its consumer has freed a slot: stage s
// holds tile k until stage s+1 has started tile k-depth.
SimSegment run_segment(std::string name, const std::vector<PipelineStage>& stages,
                       std::int64_t tiles, std::int64_t preload, int depth) {
    if (depth < 1) throw DomainError("buffer depth must be >= 1");
    if (tiles < 1) throw DomainError("segment must process >= 1 tile");

    SimSegment seg;
    seg.name = std::move(name);
    seg.tiles = tiles;
    seg.stages.reserve(stages.size());
    for (const auto& st : stages) {
        if (st.per_tile_cycles <= 0) {
            throw DomainError("stage '" + st.name + "' has non-positive per-tile cycles");
        }
        StageTiming t;
        t.stage = st;
        t.start.assign(static_cast<std::size_t>(tiles), 0);
        t.finish.assign(static_cast<std::size_t>(tiles), 0);
        seg.stages.push_back(std::move(t));
    }

    const std::size_t n = seg.stages.size();
    for (std::int64_t k = 0; k < tiles; ++k) {
        for (std::size_t s = 0; s < n; ++s) {
            auto& st = seg.stages[s];
            const std::int64_t own_prev =
                k > 0 ? st.finish[static_cast<std::size_t>(k - 1)] : (s == 0 ? preload : 0);
            const std::int64_t input_ready =
                s > 0 ? seg.stages[s - 1].finish[static_cast<std::size_t>(k)] : 0;
            const std::int64_t start = std::max(own_prev, input_ready);
            std::int64_t finish = start + st.stage.per_tile_cycles;
            if (s + 1 < n && k >= depth) {
                // Deposit blocks until the consumer frees a slot.
                finish = std::max(finish,
                                  seg.stages[s + 1].start[static_cast<std::size_t>(k - depth)]);
            }
            st.start[static_cast<std::size_t>(k)] = start;
            st.finish[static_cast<std::size_t>(k)] = finish;
            seg.stall_cycles += finish - start - st.stage.per_tile_cycles;
            if (st.stage.transfer) seg.transfer_cycles += st.stage.per_tile_cycles;
        }
    }
    seg.transfer_cycles += preload;
    seg.total_cycles = seg.stages.back().finish[static_cast<std::size_t>(tiles - 1)];
    return seg;
}

SimTrace trace_of(SimSegment seg) {
    SimTrace tr;
    tr.total_cycles = seg.total_cycles;
    tr.stall_cycles = seg.stall_cycles;
    tr.transfer_cycles = seg.transfer_cycles;
    tr.segments.push_back(std::move(seg));
    return tr;
}

} // namespace

SimTrace simulate_bundle(const Bundle& b, const std::vector<LayerDims>& dims,
                         const TileShape& tile, double bw, const Characterization& ch,
                         const SimOptions& opts) {
    validate(b);
    validate(tile);
    if (bw <= 0.0) throw DomainError("off-chip bandwidth must be > 0");
    if (dims.size() != b.instances.size()) {
        throw DomainError("need one LayerDims entry per bundle instance");
    }

    const std::int64_t tiles = reuse_count(dims.back(), tile);
    std::vector<PipelineStage> stages;
    std::int64_t preload = 0;

    if (opts.include_transfers) {
        const DataFootprint fp = data_footprint(b, dims, ch);
        preload = transfer_cycles_for(fp.bytes_weights, bw);
        PipelineStage load;
        load.name = "load";
        load.per_tile_cycles = std::max<std::int64_t>(
            1, ceil_div64(transfer_cycles_for(fp.bytes_in, bw), tiles));
        load.transfer = true;
        stages.push_back(load);
    }
    for (std::size_t i = 0; i < b.instances.size(); ++i) {
        const std::int64_t comp = comp_latency(b.instances[i], dims[i], tile, ch);
        PipelineStage st;
        st.name = to_string(b.instances[i].kind);
        st.per_tile_cycles = std::max<std::int64_t>(1, ceil_div64(comp, tiles));
        stages.push_back(st);
    }
    if (opts.include_transfers) {
        const DataFootprint fp = data_footprint(b, dims, ch);
        PipelineStage store;
        store.name = "store";
        store.per_tile_cycles = std::max<std::int64_t>(
            1, ceil_div64(transfer_cycles_for(fp.bytes_out, bw), tiles));
        store.transfer = true;
        stages.push_back(store);
    }

    return trace_of(run_segment("bundle:" + b.id, stages, tiles, preload, opts.buffer_depth));
}

SimTrace simulate_dnn(const DnnModel& m, const DeviceSpec& device, const Characterization& ch,
                      const SimOptions& opts) {
    validate(m);
    validate(device);
    const TileShape& tile = ch.tile();
    const std::vector<LayerDims> all_dims = layer_dims(m, tile);
    const double bw = device.bw_bytes_per_cycle;
    const std::int64_t burst = ch.table().dram_overhead_cycles;

    struct Launch {
        Bundle bundle;
        std::vector<LayerDims> dims;
    };
    std::vector<Launch> launches;
    std::size_t at = 0;
    if (!m.head.empty()) {
        Bundle hb;
        hb.id = "head";
        for (IpKind k : m.head) hb.instances.push_back(IpInstance{k, m.pf(), m.quant()});
        launches.push_back({hb, {all_dims.begin() + at, all_dims.begin() + at + m.head.size()}});
        at += m.head.size();
    }
    const std::size_t per_rep = m.bundle.instances.size();
    for (int r = 0; r < m.n_rep; ++r) {
        Bundle rb = m.bundle;
        rb.id = m.bundle.id + "#" + std::to_string(r);
        launches.push_back({rb, {all_dims.begin() + at, all_dims.begin() + at + per_rep}});
        at += per_rep;
    }
    if (!m.tail.empty()) {
        Bundle tb;
        tb.id = "tail";
        for (IpKind k : m.tail) tb.instances.push_back(IpInstance{k, m.pf(), m.quant()});
        launches.push_back({tb, {all_dims.begin() + at, all_dims.end()}});
    }

    SimTrace tr;
    std::int64_t now = 0;
    for (const auto& l : launches) {
        SimTrace part = simulate_bundle(l.bundle, l.dims, tile, bw, ch, opts);
        SimSegment seg = std::move(part.segments.front());
        seg.base_cycle = now;
        now += seg.total_cycles + burst;
        tr.stall_cycles += seg.stall_cycles;
        tr.transfer_cycles += seg.transfer_cycles + burst;
        tr.segments.push_back(std::move(seg));
    }
    tr.total_cycles = now;
    return tr;
}

void check_trace(const SimTrace& trace) {
    for (const auto& seg : trace.segments) {
        for (std::size_t s = 0; s < seg.stages.size(); ++s) {
            const auto& st = seg.stages[s];
            for (std::int64_t k = 0; k < seg.tiles; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                const std::string where = "segment '" + seg.name + "' stage '" + st.stage.name +
                                          "' tile " + std::to_string(k);
                if (st.finish[ku] - st.start[ku] < st.stage.per_tile_cycles) {
                    throw DomainError(where + ": finished before per-tile cycles elapsed");
                }
                if (k > 0 && st.start[ku] < st.finish[ku - 1]) {
                    throw DomainError(where + ": started before previous tile finished");
                }
                if (s > 0 && st.start[ku] < seg.stages[s - 1].finish[ku]) {
                    throw DomainError(where + ": started before producer finished");
                }
            }
        }
    }
}

std::string trace_to_json(const SimTrace& trace) {
    using detail::json;
    json segs = json::array();
    for (const auto& seg : trace.segments) {
        json stages = json::array();
        for (const auto& st : seg.stages) {
            stages.push_back({{"name", st.stage.name},
                              {"per_tile_cycles", st.stage.per_tile_cycles},
                              {"transfer", st.stage.transfer},
                              {"start", st.start},
                              {"finish", st.finish}});
        }
        segs.push_back({{"name", seg.name},
                        {"base_cycle", seg.base_cycle},
                        {"tiles", seg.tiles},
                        {"total_cycles", seg.total_cycles},
                        {"stall_cycles", seg.stall_cycles},
                        {"transfer_cycles", seg.transfer_cycles},
                        {"stages", stages}});
    }
    json j = {{"schema_version", 1},
              {"total_cycles", trace.total_cycles},
              {"stall_cycles", trace.stall_cycles},
              {"transfer_cycles", trace.transfer_cycles},
              {"segments", segs}};
    return j.dump(2) + "\n";
}

} // namespace codesign
