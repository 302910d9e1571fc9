// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace codesign {

// The ten built-in layer/IP kinds. Enumerator order is the catalog order.
enum class IpKind {
    conv1x1,
    conv3x3,
    conv5x5,
    dwconv3x3,
    dwconv5x5,
    dwconv7x7,
    max_pool,
    avg_pool,
    normalization,
    activation,
};
inline constexpr std::size_t kIpKindCount = 10;

std::string to_string(IpKind k);
IpKind ip_kind_from_string(const std::string& s); // throws ConfigError on unknown names

// Kernel edge length for conv/dwconv kinds, 0 otherwise.
int kernel_size(IpKind k);
bool is_standard_conv(IpKind k);
bool is_depthwise_conv(IpKind k);
// conv* and dwconv* are computational; pool/norm/activation are not.
bool is_computational(IpKind k);

struct IpTemplate {
    std::string id;
    IpKind kind;
    bool computational;
};

// The catalog of the ten built-in templates, stable order.
const std::vector<IpTemplate>& builtin_templates();

enum class ActivationClip { relu, relu4, relu8 };
std::string to_string(ActivationClip c);
ActivationClip activation_clip_from_string(const std::string& s);

struct QuantScheme {
    int weight_bits = 8;     // 8 or 16
    int activation_bits = 8; // 8 or 16
    ActivationClip activation_clip = ActivationClip::relu;

    bool operator==(const QuantScheme&) const = default;
};
void validate(const QuantScheme& q); // throws DomainError on bit-widths outside {8,16}

// Parallel factor candidates, ascending.
inline constexpr std::array<int, 6> kPfCandidates = {1, 2, 4, 8, 16, 32};
bool is_valid_pf(int pf);

// A configured IP: template kind plus the two hardware knobs.
struct IpInstance {
    IpKind kind;
    int pf = 1;
    QuantScheme quant;

    bool operator==(const IpInstance&) const = default;
};

// Common tile size shared by all layers of one accelerator.
struct TileShape {
    int width = 16;
    int height = 16;
    int channels = 8;

    bool operator==(const TileShape&) const = default;
};
void validate(const TileShape& t); // all dims >= 1

struct FeatureDims {
    int width = 0;
    int height = 0;
    int channels = 0;

    std::int64_t volume() const {
        return static_cast<std::int64_t>(width) * height * channels;
    }
    bool operator==(const FeatureDims&) const = default;
};

// Input/output feature-map dims of one layer execution.
struct LayerDims {
    FeatureDims in;
    FeatureDims out;
};

// Invocations of an IP instance needed to cover one layer:
// ceil(W/tile.w) * ceil(H/tile.h) * ceil(C_out/tile.c) over the output map.
// Partial tiles cost a full invocation. Throws DomainError on zero-sized dims.
std::int64_t reuse_count(const LayerDims& dims, const TileShape& tile);

} // namespace codesign
