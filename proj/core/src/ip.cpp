// SPDX-License-Identifier: Apache-2.0
#include "codesign/ip.hpp"

#include <algorithm>

#include "codesign/errors.hpp"
#include "codesign/resource.hpp"

namespace codesign {

namespace {

struct KindInfo {
    IpKind kind;
    const char* name;
    int kernel;
    bool standard_conv;
    bool depthwise;
};

constexpr std::array<KindInfo, kIpKindCount> kKinds = {{
    {IpKind::conv1x1, "conv1x1", 1, true, false},
    {IpKind::conv3x3, "conv3x3", 3, true, false},
    {IpKind::conv5x5, "conv5x5", 5, true, false},
    {IpKind::dwconv3x3, "dwconv3x3", 3, false, true},
    {IpKind::dwconv5x5, "dwconv5x5", 5, false, true},
    {IpKind::dwconv7x7, "dwconv7x7", 7, false, true},
    {IpKind::max_pool, "max_pool", 0, false, false},
    {IpKind::avg_pool, "avg_pool", 0, false, false},
    {IpKind::normalization, "normalization", 0, false, false},
    {IpKind::activation, "activation", 0, false, false},
}};

const KindInfo& info(IpKind k) { return kKinds[static_cast<std::size_t>(k)]; }

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

} // namespace

std::string to_string(IpKind k) { return info(k).name; }

IpKind ip_kind_from_string(const std::string& s) {
    for (const auto& ki : kKinds) {
        if (s == ki.name) return ki.kind;
    }
    throw ConfigError("unknown IP kind: '" + s + "'");
}

int kernel_size(IpKind k) { return info(k).kernel; }
bool is_standard_conv(IpKind k) { return info(k).standard_conv; }
bool is_depthwise_conv(IpKind k) { return info(k).depthwise; }
bool is_computational(IpKind k) { return info(k).standard_conv || info(k).depthwise; }

const std::vector<IpTemplate>& builtin_templates() {
    static const std::vector<IpTemplate> catalog = [] {
        std::vector<IpTemplate> out;
        out.reserve(kIpKindCount);
        for (const auto& ki : kKinds) {
            out.push_back(IpTemplate{ki.name, ki.kind, is_computational(ki.kind)});
        }
        return out;
    }();
    return catalog;
}

std::string to_string(ActivationClip c) {
    switch (c) {
        case ActivationClip::relu: return "relu";
        case ActivationClip::relu4: return "relu4";
        case ActivationClip::relu8: return "relu8";
    }
    return "relu";
}

ActivationClip activation_clip_from_string(const std::string& s) {
    if (s == "relu") return ActivationClip::relu;
    if (s == "relu4") return ActivationClip::relu4;
    if (s == "relu8") return ActivationClip::relu8;
    throw ConfigError("unknown activation clip: '" + s + "'");
}

void validate(const QuantScheme& q) {
    auto ok = [](int bits) { return bits == 8 || bits == 16; };
    if (!ok(q.weight_bits) || !ok(q.activation_bits)) {
        throw DomainError("quantization bit-widths must be 8 or 16");
    }
}

bool is_valid_pf(int pf) {
    return std::find(kPfCandidates.begin(), kPfCandidates.end(), pf) != kPfCandidates.end();
}

void validate(const TileShape& t) {
    if (t.width < 1 || t.height < 1 || t.channels < 1) {
        throw DomainError("tile dimensions must be >= 1");
    }
}

std::int64_t reuse_count(const LayerDims& dims, const TileShape& tile) {
    validate(tile);
    if (dims.out.width < 1 || dims.out.height < 1 || dims.out.channels < 1 ||
        dims.in.width < 1 || dims.in.height < 1 || dims.in.channels < 1) {
        throw DomainError("layer dims must be >= 1 in every dimension");
    }
    return ceil_div(dims.out.width, tile.width) * ceil_div(dims.out.height, tile.height) *
           ceil_div(dims.out.channels, tile.channels);
}

std::string first_overflow(const ResourceVector& use, const ResourceVector& budget) {
    if (use.dsp > budget.dsp) return "dsp";
    if (use.lut > budget.lut) return "lut";
    if (use.ff > budget.ff) return "ff";
    if (use.bram_kbit > budget.bram_kbit) return "bram";
    return "";
}

} // namespace codesign
