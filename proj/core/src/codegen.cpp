// SPDX-License-Identifier: Apache-2.0
#include "codesign/codegen.hpp"

#include <algorithm>
#include <fstream>

#include "codesign/errors.hpp"
#include "codesign/sim.hpp"
#include "json_util.hpp"

namespace codesign {

namespace {

// Layer kinds in execution order (head, replications, tail).
std::vector<IpKind> execution_kinds(const DnnModel& m) {
    std::vector<IpKind> kinds(m.head);
    for (int r = 0; r < m.n_rep; ++r) {
        for (const auto& inst : m.bundle.instances) kinds.push_back(inst.kind);
    }
    kinds.insert(kinds.end(), m.tail.begin(), m.tail.end());
    return kinds;
}

// Size of each pipelined group: head, one per replication, tail.
std::vector<std::size_t> group_sizes(const DnnModel& m) {
    std::vector<std::size_t> sizes;
    if (!m.head.empty()) sizes.push_back(m.head.size());
    for (int r = 0; r < m.n_rep; ++r) sizes.push_back(m.bundle.instances.size());
    if (!m.tail.empty()) sizes.push_back(m.tail.size());
    return sizes;
}

// On-chip weight slice one pipeline stage holds while computing, bytes.
std::int64_t weight_slice_bytes(IpKind kind, const QuantScheme& q, const TileShape& tile) {
    const std::int64_t ks = kernel_size(kind);
    const std::int64_t wb = q.weight_bits / 8;
    if (is_standard_conv(kind)) return ks * ks * tile.channels * tile.channels * wb;
    if (is_depthwise_conv(kind)) return ks * ks * tile.channels * wb;
    if (kind == IpKind::normalization) return 2LL * tile.channels * wb;
    return 0;
}

std::int64_t fmap_bytes(const FeatureDims& d, const QuantScheme& q) {
    return d.volume() * q.activation_bits / 8;
}

bool fusible(IpKind k) { return k == IpKind::normalization || k == IpKind::activation; }

} // namespace

CodegenPlan plan(const DnnModel& m, const TileShape& tile, const Characterization& ch,
                 const DeviceSpec& device, const PlanOptions& opts) {
    validate(m);
    validate(tile);
    validate(device);

    CodegenPlan p;
    p.model = m;
    p.tile = tile;
    p.device = device;
    p.options = opts;
    p.instances = distinct_instances(m);

    const std::vector<IpKind> kinds = execution_kinds(m);
    const std::vector<LayerDims> dims = layer_dims(m, tile);
    const std::vector<std::size_t> groups = group_sizes(m);
    const QuantScheme& q = m.quant();

    // Boundary feature maps. Group g reads edge g and writes edge g+1; edge 0
    // is the model input, the last edge the model output.
    std::vector<std::string> edge_names(groups.size() + 1);
    std::vector<std::int64_t> edge_bytes(groups.size() + 1);
    {
        std::size_t layer = 0;
        edge_names.front() = "fmap_in";
        edge_bytes.front() = fmap_bytes(dims.front().in, q);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            layer += groups[g];
            edge_names[g + 1] = "fmap_edge_" + std::to_string(g + 1);
            edge_bytes[g + 1] = fmap_bytes(dims[layer - 1].out, q);
        }
        edge_names.back() = "fmap_out";
        if (opts.buffer_reuse && groups.size() > 2) {
            // Interior edges collapse into two alternating arrays.
            std::int64_t sized[2] = {0, 0};
            for (std::size_t e = 1; e + 1 < edge_names.size(); ++e) {
                sized[e % 2] = std::max(sized[e % 2], edge_bytes[e]);
            }
            for (std::size_t e = 1; e + 1 < edge_names.size(); ++e) {
                edge_names[e] = e % 2 ? "fmap_ping" : "fmap_pong";
                edge_bytes[e] = sized[e % 2];
            }
        }
    }

    // One step per layer, then optional fusion of pointwise followers into
    // their computational producer within the same group.
    {
        std::size_t layer = 0;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            std::vector<CallStep> steps;
            for (std::size_t i = 0; i < groups[g]; ++i, ++layer) {
                CallStep step;
                step.layer = layer;
                step.group = g;
                step.kind = kinds[layer];
                step.function = "ip_" + to_string(kinds[layer]);
                step.dims = dims[layer];
                step.tiles = reuse_count(dims[layer], tile);
                step.weight_bytes =
                    ch.weight_bytes(IpInstance{kinds[layer], m.pf(), q}, dims[layer]);
                if (opts.loop_fusion && !steps.empty() && fusible(step.kind) &&
                    is_computational(steps.back().kind)) {
                    CallStep& host = steps.back();
                    host.fused_layers.push_back(step.layer);
                    host.fused_kinds.push_back(step.kind);
                    host.weight_bytes += step.weight_bytes;
                    host.dims.out = step.dims.out;
                } else {
                    steps.push_back(std::move(step));
                }
            }
            // Ping/pong assignment after fusion so chained steps stay paired.
            for (std::size_t j = 0; j < steps.size(); ++j) {
                steps[j].in_buffer = j % 2 ? "tile_buf_b" : "tile_buf_a";
                steps[j].out_buffer = j % 2 ? "tile_buf_a" : "tile_buf_b";
            }
            steps.front().load_from = edge_names[g];
            steps.back().store_to = edge_names[g + 1];
            for (CallStep& s : steps) p.schedule.push_back(std::move(s));
        }
    }

    // Weight layout: off-chip array in schedule order; on-chip buffer holds
    // one group's slices at a time.
    std::int64_t weight_offset = 0;
    std::int64_t group_slice_max = 0;
    {
        std::size_t g = 0;
        std::int64_t buf_offset = 0;
        for (CallStep& step : p.schedule) {
            if (step.group != g) {
                g = step.group;
                buf_offset = 0;
            }
            step.weight_offset = weight_offset;
            weight_offset += step.weight_bytes;
            step.weight_buf_offset = buf_offset;
            std::int64_t slice = weight_slice_bytes(step.kind, q, tile);
            for (IpKind fk : step.fused_kinds) slice += weight_slice_bytes(fk, q, tile);
            buf_offset += slice;
            group_slice_max = std::max(group_slice_max, buf_offset);
        }
    }
    p.weight_total_bytes = weight_offset;

    const std::int64_t tile_bytes =
        static_cast<std::int64_t>(tile.width) * tile.height * tile.channels *
        q.activation_bits / 8;
    p.buffers.push_back({"tile_buf_a", tile_bytes, true});
    p.buffers.push_back({"tile_buf_b", tile_bytes, true});
    p.buffers.push_back({"weight_buf", std::max<std::int64_t>(group_slice_max, 1), true});
    {
        std::vector<std::string> seen;
        for (std::size_t e = 0; e < edge_names.size(); ++e) {
            if (std::find(seen.begin(), seen.end(), edge_names[e]) != seen.end()) continue;
            seen.push_back(edge_names[e]);
            p.buffers.push_back({edge_names[e], edge_bytes[e], false});
        }
    }
    p.buffers.push_back({"weights_rom", std::max<std::int64_t>(p.weight_total_bytes, 1), false});

    double on_chip_kbit = 0.0;
    for (const BufferSpec& b : p.buffers) {
        if (b.on_chip) {
            p.on_chip_bytes += b.bytes;
            on_chip_kbit += static_cast<double>(b.bytes) * 8.0 / 1024.0;
            if (on_chip_kbit > device.budget.bram_kbit) {
                throw PlanError("buffer plan exceeds device BRAM: buffer '" + b.name + "' (" +
                                std::to_string(b.bytes) + " bytes) pushes on-chip total to " +
                                std::to_string(on_chip_kbit) + " kbit against a budget of " +
                                std::to_string(device.budget.bram_kbit) + " kbit");
            }
        } else {
            p.off_chip_bytes += b.bytes;
        }
    }

    p.est_cycles = dnn_latency_cycles(m, device.bw_bytes_per_cycle, ch);
    p.est_ms = dnn_latency_ms(m, device, ch);
    p.est_res = dnn_resource(m, ch);
    return p;
}

namespace {

std::string act_type(const QuantScheme& q) {
    return q.activation_bits == 16 ? "int16_t" : "int8_t";
}
std::string weight_type(const QuantScheme& q) {
    return q.weight_bits == 16 ? "int16_t" : "int8_t";
}

int clip_max(const QuantScheme& q) {
    switch (q.activation_clip) {
    case ActivationClip::relu4: return 4;
    case ActivationClip::relu8: return 8;
    case ActivationClip::relu: break;
    }
    return 0; // 0 = unbounded relu
}

std::string header_source(const CodegenPlan& p) {
    const QuantScheme& q = p.model.quant();
    std::string s;
    s += "/* Generated accelerator interface. Do not edit. */\n";
    s += "#ifndef ACCEL_H\n#define ACCEL_H\n\n#include <stdint.h>\n\n";
    s += "typedef " + act_type(q) + " act_t;\n";
    s += "typedef " + weight_type(q) + " weight_t;\n";
    s += "typedef int32_t acc_t;\n\n";
    s += "#define TILE_W " + std::to_string(p.tile.width) + "\n";
    s += "#define TILE_H " + std::to_string(p.tile.height) + "\n";
    s += "#define TILE_C " + std::to_string(p.tile.channels) + "\n";
    s += "#define PF " + std::to_string(p.model.pf()) + "\n";
    s += "#define ACT_CLIP_MAX " + std::to_string(clip_max(q)) + " /* 0 = unbounded */\n\n";
    s += "act_t accel_clip(acc_t v);\n";
    s += "void load_tile(const act_t* src, long offset, act_t* dst, long count);\n";
    s += "void store_tile(const act_t* src, act_t* dst, long offset, long count);\n";
    s += "void load_weights(const weight_t* src, long offset, weight_t* dst, long count);\n\n";
    for (const IpInstance& inst : p.instances) {
        s += "void ip_" + to_string(inst.kind) +
             "(const act_t* in, const weight_t* w, act_t* out, int in_c, int out_c);\n";
    }
    s += "\nvoid accel_top(const act_t* fmap_in, act_t* fmap_out, const weight_t* weights);\n";
    s += "\n#endif /* ACCEL_H */\n";
    return s;
}

void emit_conv_body(std::string& s, int ks, bool depthwise) {
    const std::string kmax = std::to_string(ks);
    const std::string pad = std::to_string(ks / 2);
    s += "    for (int oy = 0; oy < TILE_H; ++oy) {\n";
    s += "        for (int ox = 0; ox < TILE_W; ++ox) {\n";
    s += "            for (int oc = 0; oc < out_c; ++oc) {\n";
    s += "                /* #pragma HLS unroll factor=PF */\n";
    s += "                acc_t acc = 0;\n";
    if (depthwise) {
        s += "                for (int ky = 0; ky < " + kmax + "; ++ky) {\n";
        s += "                    for (int kx = 0; kx < " + kmax + "; ++kx) {\n";
        s += "                        int iy = oy + ky - " + pad + ";\n";
        s += "                        int ix = ox + kx - " + pad + ";\n";
        s += "                        if (iy < 0 || iy >= TILE_H || ix < 0 || ix >= TILE_W) {\n";
        s += "                            continue;\n";
        s += "                        }\n";
        s += "                        acc += (acc_t)in[(iy * TILE_W + ix) * in_c + oc] *\n";
        s += "                               (acc_t)w[(ky * " + kmax + " + kx) * out_c + oc];\n";
        s += "                    }\n";
        s += "                }\n";
    } else {
        s += "                for (int ic = 0; ic < in_c; ++ic) {\n";
        s += "                    for (int ky = 0; ky < " + kmax + "; ++ky) {\n";
        s += "                        for (int kx = 0; kx < " + kmax + "; ++kx) {\n";
        s += "                            int iy = oy + ky - " + pad + ";\n";
        s += "                            int ix = ox + kx - " + pad + ";\n";
        s += "                            if (iy < 0 || iy >= TILE_H || ix < 0 ||\n";
        s += "                                ix >= TILE_W) {\n";
        s += "                                continue;\n";
        s += "                            }\n";
        s += "                            acc += (acc_t)in[(iy * TILE_W + ix) * in_c + ic] *\n";
        s += "                                   (acc_t)w[((ky * " + kmax +
             " + kx) * in_c + ic) * out_c + oc];\n";
        s += "                        }\n";
        s += "                    }\n";
        s += "                }\n";
    }
    s += "                out[(oy * TILE_W + ox) * out_c + oc] = accel_clip(acc);\n";
    s += "            }\n";
    s += "        }\n";
    s += "    }\n";
}

void emit_pool_body(std::string& s, bool max_pool) {
    s += "    for (int oy = 0; oy < TILE_H; ++oy) {\n";
    s += "        for (int ox = 0; ox < TILE_W; ++ox) {\n";
    s += "            for (int oc = 0; oc < out_c; ++oc) {\n";
    s += "                /* #pragma HLS pipeline II=1 */\n";
    if (max_pool) {
        s += "                act_t best = in[(oy * TILE_W + ox) * in_c + oc];\n";
        s += "                if (oy + 1 < TILE_H) {\n";
        s += "                    act_t v = in[((oy + 1) * TILE_W + ox) * in_c + oc];\n";
        s += "                    if (v > best) {\n";
        s += "                        best = v;\n";
        s += "                    }\n";
        s += "                }\n";
        s += "                if (ox + 1 < TILE_W) {\n";
        s += "                    act_t v = in[(oy * TILE_W + ox + 1) * in_c + oc];\n";
        s += "                    if (v > best) {\n";
        s += "                        best = v;\n";
        s += "                    }\n";
        s += "                }\n";
        s += "                out[(oy * TILE_W + ox) * out_c + oc] = best;\n";
    } else {
        s += "                acc_t sum = in[(oy * TILE_W + ox) * in_c + oc];\n";
        s += "                int n = 1;\n";
        s += "                if (oy + 1 < TILE_H) {\n";
        s += "                    sum += in[((oy + 1) * TILE_W + ox) * in_c + oc];\n";
        s += "                    ++n;\n";
        s += "                }\n";
        s += "                if (ox + 1 < TILE_W) {\n";
        s += "                    sum += in[(oy * TILE_W + ox + 1) * in_c + oc];\n";
        s += "                    ++n;\n";
        s += "                }\n";
        s += "                out[(oy * TILE_W + ox) * out_c + oc] = (act_t)(sum / n);\n";
    }
    s += "            }\n";
    s += "        }\n";
    s += "    }\n";
}

void emit_norm_body(std::string& s) {
    s += "    for (int oy = 0; oy < TILE_H; ++oy) {\n";
    s += "        for (int ox = 0; ox < TILE_W; ++ox) {\n";
    s += "            for (int oc = 0; oc < out_c; ++oc) {\n";
    s += "                /* #pragma HLS pipeline II=1 */\n";
    s += "                acc_t scaled = (acc_t)in[(oy * TILE_W + ox) * in_c + oc] *\n";
    s += "                                   (acc_t)w[oc] +\n";
    s += "                               (acc_t)w[out_c + oc];\n";
    s += "                out[(oy * TILE_W + ox) * out_c + oc] = accel_clip(scaled >> 6);\n";
    s += "            }\n";
    s += "        }\n";
    s += "    }\n";
}

void emit_act_body(std::string& s) {
    s += "    for (int oy = 0; oy < TILE_H; ++oy) {\n";
    s += "        for (int ox = 0; ox < TILE_W; ++ox) {\n";
    s += "            for (int oc = 0; oc < out_c; ++oc) {\n";
    s += "                /* #pragma HLS pipeline II=1 */\n";
    s += "                out[(oy * TILE_W + ox) * out_c + oc] =\n";
    s += "                    accel_clip((acc_t)in[(oy * TILE_W + ox) * in_c + oc]);\n";
    s += "            }\n";
    s += "        }\n";
    s += "    }\n";
}

std::string instance_source(const IpInstance& inst) {
    std::string s;
    const std::string kind = to_string(inst.kind);
    s += "/* Generated IP template instance: " + kind + ", PF=" + std::to_string(inst.pf) +
         ". Do not edit. */\n";
    s += "#include \"accel.h\"\n\n";
    s += "/* One output tile per call; zero padding at the tile border. */\n";
    s += "void ip_" + kind + "(const act_t* in, const weight_t* w, act_t* out, int in_c, "
                             "int out_c)\n{\n";
    switch (inst.kind) {
    case IpKind::conv1x1:
    case IpKind::conv3x3:
    case IpKind::conv5x5: emit_conv_body(s, kernel_size(inst.kind), false); break;
    case IpKind::dwconv3x3:
    case IpKind::dwconv5x5:
    case IpKind::dwconv7x7: emit_conv_body(s, kernel_size(inst.kind), true); break;
    case IpKind::max_pool: emit_pool_body(s, true); break;
    case IpKind::avg_pool: emit_pool_body(s, false); break;
    case IpKind::normalization: emit_norm_body(s); break;
    case IpKind::activation: emit_act_body(s); break;
    }
    s += "}\n";
    return s;
}

std::string top_source(const CodegenPlan& p) {
    const QuantScheme& q = p.model.quant();
    const int act_bytes = q.activation_bits / 8;
    const int w_bytes = q.weight_bits / 8;
    const std::int64_t tile_elems =
        static_cast<std::int64_t>(p.tile.width) * p.tile.height * p.tile.channels;

    std::string s;
    s += "/* Generated accelerator top. Do not edit. */\n";
    s += "#include \"accel.h\"\n\n";
    for (const BufferSpec& b : p.buffers) {
        if (b.name == "fmap_in" || b.name == "fmap_out" || b.name == "weights_rom") continue;
        const bool weights = b.name == "weight_buf";
        const std::int64_t elems = b.bytes / (weights ? w_bytes : act_bytes);
        s += "static " + std::string(weights ? "weight_t " : "act_t ") + b.name + "[" +
             std::to_string(elems) + "]; /* " + (b.on_chip ? "on-chip BRAM" : "off-chip DRAM") +
             ", " + std::to_string(b.bytes) + " bytes */\n";
    }
    s += "\nact_t accel_clip(acc_t v)\n{\n";
    s += "    if (v < 0) {\n        v = 0;\n    }\n";
    s += "#if ACT_CLIP_MAX > 0\n";
    s += "    if (v > ACT_CLIP_MAX) {\n        v = ACT_CLIP_MAX;\n    }\n";
    s += "#endif\n";
    s += "    return (act_t)v;\n}\n\n";
    s += "void load_tile(const act_t* src, long offset, act_t* dst, long count)\n{\n";
    s += "    /* #pragma HLS pipeline II=1 */\n";
    s += "    for (long i = 0; i < count; ++i) {\n        dst[i] = src[offset + i];\n    }\n";
    s += "}\n\n";
    s += "void store_tile(const act_t* src, act_t* dst, long offset, long count)\n{\n";
    s += "    /* #pragma HLS pipeline II=1 */\n";
    s += "    for (long i = 0; i < count; ++i) {\n        dst[offset + i] = src[i];\n    }\n";
    s += "}\n\n";
    s += "void load_weights(const weight_t* src, long offset, weight_t* dst, long count)\n{\n";
    s += "    /* #pragma HLS pipeline II=1 */\n";
    s += "    for (long i = 0; i < count; ++i) {\n        dst[i] = src[offset + i];\n    }\n";
    s += "}\n\n";
    s += "void accel_top(const act_t* fmap_in, act_t* fmap_out, const weight_t* weights)\n{\n";
    s += "    /* #pragma HLS interface m_axi port=fmap_in,fmap_out,weights */\n";

    std::size_t i = 0;
    while (i < p.schedule.size()) {
        std::size_t end = i;
        std::int64_t group_tiles = 0;
        while (end < p.schedule.size() && p.schedule[end].group == p.schedule[i].group) {
            group_tiles = std::max(group_tiles, p.schedule[end].tiles);
            ++end;
        }
        s += "\n    /* group " + std::to_string(p.schedule[i].group) + ": tile-pipelined, " +
             std::to_string(group_tiles) + " tiles */\n";
        for (std::size_t j = i; j < end; ++j) {
            const CallStep& st = p.schedule[j];
            s += "    load_weights(weights, " + std::to_string(st.weight_offset / w_bytes) +
                 ", weight_buf + " + std::to_string(st.weight_buf_offset / w_bytes) + ", " +
                 std::to_string(st.weight_bytes / w_bytes) + "); /* layer " +
                 std::to_string(st.layer) + " */\n";
        }
        s += "    for (long t = 0; t < " + std::to_string(group_tiles) + "; ++t) {\n";
        s += "        /* #pragma HLS dataflow */\n";
        for (std::size_t j = i; j < end; ++j) {
            const CallStep& st = p.schedule[j];
            std::string body;
            if (!st.load_from.empty()) {
                body += "load_tile(" + st.load_from + ", t * " + std::to_string(tile_elems) +
                        ", " + st.in_buffer + ", " + std::to_string(tile_elems) + ");\n";
            }
            body += "/* layer " + std::to_string(st.layer) + ": " + to_string(st.kind);
            for (std::size_t f = 0; f < st.fused_layers.size(); ++f) {
                body += " + fused layer " + std::to_string(st.fused_layers[f]) + " (" +
                        to_string(st.fused_kinds[f]) + ")";
            }
            body += ", " + std::to_string(st.dims.in.width) + "x" +
                    std::to_string(st.dims.in.height) + "x" +
                    std::to_string(st.dims.in.channels) + " -> " +
                    std::to_string(st.dims.out.width) + "x" +
                    std::to_string(st.dims.out.height) + "x" +
                    std::to_string(st.dims.out.channels) + " */\n";
            body += st.function + "(" + st.in_buffer + ", weight_buf + " +
                    std::to_string(st.weight_buf_offset / w_bytes) + ", " + st.out_buffer +
                    ", " + std::to_string(st.dims.in.channels) + ", " +
                    std::to_string(st.dims.out.channels) + ");\n";
            if (!st.store_to.empty()) {
                body += "store_tile(" + st.out_buffer + ", " + st.store_to + ", t * " +
                        std::to_string(tile_elems) + ", " + std::to_string(tile_elems) + ");\n";
            }
            const bool guarded = st.tiles != group_tiles;
            const std::string indent = guarded ? "            " : "        ";
            if (guarded) {
                s += "        if (t < " + std::to_string(st.tiles) + ") {\n";
            }
            std::size_t pos = 0;
            while (pos < body.size()) {
                const std::size_t eol = body.find('\n', pos);
                s += indent + body.substr(pos, eol - pos) + "\n";
                pos = eol + 1;
            }
            if (guarded) {
                s += "        }\n";
            }
        }
        s += "    }\n";
        i = end;
    }
    s += "}\n";
    return s;
}

using detail::json;

json resource_json(const ResourceVector& r) {
    return {{"dsp", r.dsp}, {"lut", r.lut}, {"ff", r.ff}, {"bram_kbit", r.bram_kbit}};
}

std::string manifest_source(const CodegenPlan& p) {
    json buffers = json::array();
    for (const BufferSpec& b : p.buffers) {
        buffers.push_back({{"name", b.name}, {"bytes", b.bytes}, {"on_chip", b.on_chip}});
    }
    json schedule = json::array();
    for (const CallStep& s : p.schedule) {
        json fused = json::array();
        for (std::size_t i = 0; i < s.fused_layers.size(); ++i) {
            fused.push_back(
                {{"layer", s.fused_layers[i]}, {"kind", to_string(s.fused_kinds[i])}});
        }
        schedule.push_back({{"layer", s.layer},
                            {"group", s.group},
                            {"kind", to_string(s.kind)},
                            {"function", s.function},
                            {"tiles", s.tiles},
                            {"in_buffer", s.in_buffer},
                            {"out_buffer", s.out_buffer},
                            {"load_from", s.load_from},
                            {"store_to", s.store_to},
                            {"weight_bytes", s.weight_bytes},
                            {"weight_offset", s.weight_offset},
                            {"weight_buf_offset", s.weight_buf_offset},
                            {"fused", fused}});
    }
    json instances = json::array();
    for (const IpInstance& inst : p.instances) {
        instances.push_back({{"kind", to_string(inst.kind)}, {"pf", inst.pf}});
    }
    const ResourceVector& budget = p.device.budget;
    json j = {
        {"schema_version", 1},
        {"model",
         {{"bundle", p.model.bundle.id},
          {"n_rep", p.model.n_rep},
          {"pf", p.model.pf()},
          {"weight_bits", p.model.quant().weight_bits},
          {"activation_bits", p.model.quant().activation_bits},
          {"layers", p.model.layer_count()}}},
        {"tile",
         {{"width", p.tile.width}, {"height", p.tile.height}, {"channels", p.tile.channels}}},
        {"device", p.device.name},
        {"options",
         {{"buffer_reuse", p.options.buffer_reuse}, {"loop_fusion", p.options.loop_fusion}}},
        {"instances", instances},
        {"buffers", buffers},
        {"schedule", schedule},
        {"totals",
         {{"on_chip_bytes", p.on_chip_bytes},
          {"off_chip_bytes", p.off_chip_bytes},
          {"weight_bytes", p.weight_total_bytes}}},
        {"estimate",
         {{"latency_cycles", p.est_cycles},
          {"latency_ms", p.est_ms},
          {"resource", resource_json(p.est_res)},
          {"utilization_pct",
           {{"dsp", 100.0 * p.est_res.dsp / budget.dsp},
            {"lut", 100.0 * p.est_res.lut / budget.lut},
            {"ff", 100.0 * p.est_res.ff / budget.ff},
            {"bram", 100.0 * p.est_res.bram_kbit / budget.bram_kbit}}}}},
    };
    return j.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

} // namespace

std::vector<std::string> emit(const CodegenPlan& p, const std::filesystem::path& outdir) {
    std::filesystem::create_directories(outdir);
    std::vector<std::string> files;

    files.push_back("accel.h");
    write_file(outdir / "accel.h", header_source(p));
    files.push_back("accel_top.c");
    write_file(outdir / "accel_top.c", top_source(p));
    for (const IpInstance& inst : p.instances) {
        const std::string name = "ip_" + to_string(inst.kind) + ".c";
        files.push_back(name);
        write_file(outdir / name, instance_source(inst));
    }
    files.push_back("manifest.json");
    write_file(outdir / "manifest.json", manifest_source(p));
    return files;
}

std::string estimate_report(const DnnModel& m, const DeviceSpec& device,
                            const Characterization& ch) {
    const double cycles = dnn_latency_cycles(m, device.bw_bytes_per_cycle, ch);
    const double ms = dnn_latency_ms(m, device, ch);
    const ResourceVector res = dnn_resource(m, ch);
    const SimTrace tr = simulate_dnn(m, device, ch);
    const double sim_ms = cycles_to_ms(static_cast<double>(tr.total_cycles), device.clock_mhz);
    const ResourceVector& budget = device.budget;
    json j = {
        {"schema_version", 1},
        {"device", device.name},
        {"clock_mhz", device.clock_mhz},
        {"latency", {{"cycles", cycles}, {"ms", ms}}},
        {"resource", resource_json(res)},
        {"utilization_pct",
         {{"dsp", 100.0 * res.dsp / budget.dsp},
          {"lut", 100.0 * res.lut / budget.lut},
          {"ff", 100.0 * res.ff / budget.ff},
          {"bram", 100.0 * res.bram_kbit / budget.bram_kbit}}},
        {"simulator",
         {{"cycles", tr.total_cycles},
          {"ms", sim_ms},
          {"rel_gap", std::abs(cycles - static_cast<double>(tr.total_cycles)) /
                          static_cast<double>(tr.total_cycles)}}},
    };
    return j.dump(2) + "\n";
}

} // namespace codesign
