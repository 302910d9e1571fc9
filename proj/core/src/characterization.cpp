// SPDX-License-Identifier: Apache-2.0
#include "codesign/characterization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "codesign/errors.hpp"
#include "json_util.hpp"

namespace codesign {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

} // namespace

CharTable default_char_table() {
    CharTable t;
    auto put = [&](const char* kind, double lb, double lpd, double fb, double fpd) {
        KindCoefficients c;
        c.lut_base = lb;
        c.lut_per_dsp = lpd;
        c.ff_base = fb;
        c.ff_per_dsp = fpd;
        t.kinds[kind] = c;
    };
    put("conv1x1", 350, 95, 260, 55);
    put("conv3x3", 420, 110, 320, 60);
    put("conv5x5", 480, 115, 360, 62);
    put("dwconv3x3", 300, 100, 240, 52);
    put("dwconv5x5", 340, 105, 270, 55);
    put("dwconv7x7", 380, 108, 300, 58);
    put("max_pool", 240, 0, 170, 0);
    put("avg_pool", 260, 0, 190, 0);
    put("normalization", 300, 0, 220, 0);
    put("activation", 140, 0, 90, 0);
    return t;
}

Characterization::Characterization(CharTable table, TileShape tile)
    : table_(std::move(table)), tile_(tile) {
    validate(tile_);
}

const KindCoefficients& Characterization::coeffs(IpKind kind) const {
    auto it = table_.kinds.find(to_string(kind));
    if (it == table_.kinds.end()) {
        throw ConfigError("characterization table has no entry for kind '" + to_string(kind) +
                          "'");
    }
    return it->second;
}

ResourceVector Characterization::resources(const IpInstance& inst) const {
    validate(inst.quant);
    if (!is_valid_pf(inst.pf)) throw DomainError("parallel factor must be a power of two <= 32");
    const KindCoefficients& c = coeffs(inst.kind);

    ResourceVector r;
    const int k = kernel_size(inst.kind);
    if (is_computational(inst.kind)) {
        r.dsp = static_cast<double>(k) * k * inst.pf * (inst.quant.weight_bits / 8);
    }
    r.lut = c.lut_base + c.lut_per_dsp * r.dsp;
    r.ff = c.ff_base + c.ff_per_dsp * r.dsp;

    // In/out tile buffers plus the per-invocation weight working set.
    const double tile_bits = 2.0 * tile_.width * tile_.height * tile_.channels *
                             inst.quant.activation_bits;
    double weight_bits = 0.0;
    if (is_standard_conv(inst.kind)) {
        weight_bits = static_cast<double>(k) * k * tile_.channels * tile_.channels *
                      inst.quant.weight_bits;
    } else if (is_depthwise_conv(inst.kind)) {
        weight_bits = static_cast<double>(k) * k * tile_.channels * inst.quant.weight_bits;
    }
    r.bram_kbit = (tile_bits + weight_bits) / 1024.0 + c.bram_fixed_kbit;
    return r;
}

std::int64_t Characterization::latency_cycles(const IpInstance& inst,
                                              const TileShape& tile) const {
    validate(tile);
    validate(inst.quant);
    if (!is_valid_pf(inst.pf)) throw DomainError("parallel factor must be a power of two <= 32");
    const KindCoefficients& c = coeffs(inst.kind);

    const std::int64_t plane = static_cast<std::int64_t>(tile.width) * tile.height;
    const int k = kernel_size(inst.kind);
    if (is_standard_conv(inst.kind)) {
        // Output-channel parallelism; the invocation reduces over one input
        // channel tile.
        return plane * k * k * tile.channels * ceil_div(tile.channels, inst.pf);
    }
    if (is_depthwise_conv(inst.kind)) {
        return plane * k * k * ceil_div(tile.channels, inst.pf);
    }
    // Element-wise pass over the tile, pf lanes wide.
    const double cycles = static_cast<double>(plane) * tile.channels * c.cycle_scale / inst.pf;
    return static_cast<std::int64_t>(std::ceil(cycles));
}

std::pair<ResourceVector, std::int64_t> Characterization::characterize(
    const IpInstance& inst, const TileShape& tile) const {
    return {resources(inst), latency_cycles(inst, tile)};
}

std::int64_t Characterization::weight_bytes(const IpInstance& inst,
                                            const LayerDims& dims) const {
    const int k = kernel_size(inst.kind);
    const int wb = inst.quant.weight_bits;
    if (is_standard_conv(inst.kind)) {
        return static_cast<std::int64_t>(k) * k * dims.in.channels * dims.out.channels * wb / 8;
    }
    if (is_depthwise_conv(inst.kind)) {
        return static_cast<std::int64_t>(k) * k * dims.out.channels * wb / 8;
    }
    if (inst.kind == IpKind::normalization) {
        // Scale and shift per channel.
        return static_cast<std::int64_t>(2) * dims.out.channels * wb / 8;
    }
    return 0;
}

// --- JSON table format -------------------------------------------------------

namespace {

using detail::json;

KindCoefficients kind_coeffs_from_json(const json& j, const std::string& where) {
    detail::expect_keys(j, where,
                        {"lut_base", "lut_per_dsp", "ff_base", "ff_per_dsp", "cycle_scale",
                         "bram_fixed_kbit"});
    KindCoefficients c;
    c.lut_base = detail::get_or(j, "lut_base", c.lut_base);
    c.lut_per_dsp = detail::get_or(j, "lut_per_dsp", c.lut_per_dsp);
    c.ff_base = detail::get_or(j, "ff_base", c.ff_base);
    c.ff_per_dsp = detail::get_or(j, "ff_per_dsp", c.ff_per_dsp);
    c.cycle_scale = detail::get_or(j, "cycle_scale", c.cycle_scale);
    c.bram_fixed_kbit = detail::get_or(j, "bram_fixed_kbit", c.bram_fixed_kbit);
    return c;
}

} // namespace

CharTable char_table_from_json(const std::string& text) {
    json j = detail::parse_json(text, "characterization table");
    detail::expect_keys(j, "characterization table", {"schema_version", "control", "kinds"});
    const int version = detail::get_or(j, "schema_version", 1);
    if (version != 1) throw ConfigError("unsupported characterization table schema_version");

    CharTable t = default_char_table();
    if (j.contains("control")) {
        const json& c = j.at("control");
        detail::expect_keys(c, "control",
                            {"ctl_lut_per_stage", "ctl_ff_per_stage", "fsm_lut", "fsm_ff",
                             "dram_overhead_cycles"});
        t.ctl_lut_per_stage = detail::get_or(c, "ctl_lut_per_stage", t.ctl_lut_per_stage);
        t.ctl_ff_per_stage = detail::get_or(c, "ctl_ff_per_stage", t.ctl_ff_per_stage);
        t.fsm_lut = detail::get_or(c, "fsm_lut", t.fsm_lut);
        t.fsm_ff = detail::get_or(c, "fsm_ff", t.fsm_ff);
        t.dram_overhead_cycles = detail::get_or(c, "dram_overhead_cycles", t.dram_overhead_cycles);
    }
    if (j.contains("kinds")) {
        for (const auto& [name, entry] : j.at("kinds").items()) {
            ip_kind_from_string(name); // reject unknown kinds
            t.kinds[name] = kind_coeffs_from_json(entry, "kinds." + name);
        }
    }
    return t;
}

std::string to_json(const CharTable& t) {
    json j;
    j["schema_version"] = 1;
    j["control"] = {
        {"ctl_lut_per_stage", t.ctl_lut_per_stage},
        {"ctl_ff_per_stage", t.ctl_ff_per_stage},
        {"fsm_lut", t.fsm_lut},
        {"fsm_ff", t.fsm_ff},
        {"dram_overhead_cycles", t.dram_overhead_cycles},
    };
    json kinds = json::object();
    for (const auto& [name, c] : t.kinds) {
        kinds[name] = {
            {"lut_base", c.lut_base},         {"lut_per_dsp", c.lut_per_dsp},
            {"ff_base", c.ff_base},           {"ff_per_dsp", c.ff_per_dsp},
            {"cycle_scale", c.cycle_scale},   {"bram_fixed_kbit", c.bram_fixed_kbit},
        };
    }
    j["kinds"] = kinds;
    return j.dump(2) + "\n";
}

CharTable load_char_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open characterization table: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return char_table_from_json(ss.str());
}

} // namespace codesign
