// SPDX-License-Identifier: Apache-2.0
#include "codesign/bundle.hpp"

#include <algorithm>

#include "codesign/errors.hpp"
#include "json_util.hpp"

namespace codesign {

std::size_t Bundle::computational_count() const {
    return static_cast<std::size_t>(
        std::count_if(instances.begin(), instances.end(),
                      [](const IpInstance& i) { return is_computational(i.kind); }));
}

void validate(const Bundle& b) {
    if (b.instances.empty()) throw DomainError("bundle '" + b.id + "' has no instances");
    if (b.computational_count() > 2) {
        throw DomainError("bundle '" + b.id + "' exceeds the two-computational-IP limit");
    }
}

std::vector<Bundle> enumerate_bundles(const std::vector<IpTemplate>& catalog) {
    std::vector<IpKind> comps;
    std::vector<IpKind> convs;
    std::vector<IpKind> seconds;
    std::vector<IpKind> tail;
    for (const auto& t : catalog) {
        if (t.computational) comps.push_back(t.kind);
        if (is_standard_conv(t.kind)) convs.push_back(t.kind);
        if (is_depthwise_conv(t.kind) || t.kind == IpKind::max_pool) seconds.push_back(t.kind);
        if (t.kind == IpKind::normalization || t.kind == IpKind::activation)
            tail.push_back(t.kind);
    }

    std::vector<std::vector<IpKind>> skeletons;
    for (IpKind c : comps) skeletons.push_back({c});
    for (IpKind c : convs) {
        for (IpKind s : seconds) skeletons.push_back({c, s});
    }

    std::vector<Bundle> out;
    out.reserve(skeletons.size());
    int n = 0;
    for (auto& body : skeletons) {
        Bundle b;
        ++n;
        b.id = "b" + std::string(n < 10 ? "0" : "") + std::to_string(n);
        for (IpKind k : body) b.instances.push_back(IpInstance{k, 1, QuantScheme{}});
        for (IpKind k : tail) b.instances.push_back(IpInstance{k, 1, QuantScheme{}});
        validate(b);
        out.push_back(std::move(b));
    }
    return out;
}

Bundle with_config(const Bundle& b, int pf, const QuantScheme& quant) {
    if (!is_valid_pf(pf)) throw DomainError("parallel factor must be a power of two <= 32");
    validate(quant);
    Bundle out = b;
    for (auto& inst : out.instances) {
        inst.pf = pf;
        inst.quant = quant;
    }
    return out;
}

DataFootprint data_footprint(const Bundle& b, const std::vector<LayerDims>& dims,
                             const Characterization& ch) {
    if (dims.size() != b.instances.size()) {
        throw DomainError("data_footprint: dims count does not match instance count");
    }
    DataFootprint fp;
    const int ab_first = b.instances.front().quant.activation_bits;
    const int ab_last = b.instances.back().quant.activation_bits;
    fp.bytes_in = dims.front().in.volume() * ab_first / 8;
    fp.bytes_out = dims.back().out.volume() * ab_last / 8;
    for (std::size_t i = 0; i < b.instances.size(); ++i) {
        fp.bytes_weights += ch.weight_bytes(b.instances[i], dims[i]);
    }
    return fp;
}

ResourceVector bundle_resource(const Bundle& b, const Characterization& ch) {
    validate(b);
    ResourceVector total = b.calib.gamma_res;
    for (const auto& inst : b.instances) total += ch.resources(inst);
    return total;
}

std::int64_t comp_latency(const IpInstance& inst, const LayerDims& dims, const TileShape& tile,
                          const Characterization& ch) {
    return reuse_count(dims, tile) * ch.latency_cycles(inst, tile);
}

double bundle_latency(const Bundle& b, const std::vector<LayerDims>& dims,
                      const TileShape& tile, double bw, const Characterization& ch) {
    validate(b);
    if (bw <= 0.0) throw DomainError("off-chip bandwidth must be > 0");
    if (dims.size() != b.instances.size()) {
        throw DomainError("bundle_latency: dims count does not match instance count");
    }
    double comp_sum = 0.0;
    for (std::size_t i = 0; i < b.instances.size(); ++i) {
        comp_sum += static_cast<double>(comp_latency(b.instances[i], dims[i], tile, ch));
    }
    const DataFootprint fp = data_footprint(b, dims, ch);
    return b.calib.alpha * comp_sum + b.calib.beta * static_cast<double>(fp.total()) / bw;
}

std::string bundles_to_json(const std::vector<Bundle>& bundles, bool calibrated) {
    using detail::json;
    json arr = json::array();
    for (const auto& b : bundles) {
        json jb;
        jb["id"] = b.id;
        json kinds = json::array();
        for (const auto& inst : b.instances) kinds.push_back(to_string(inst.kind));
        jb["instances"] = kinds;
        jb["computational"] = b.computational_count();
        if (calibrated) {
            jb["alpha"] = b.calib.alpha;
            jb["beta"] = b.calib.beta;
            jb["gamma_res"] = {{"dsp", b.calib.gamma_res.dsp},
                               {"lut", b.calib.gamma_res.lut},
                               {"ff", b.calib.gamma_res.ff},
                               {"bram_kbit", b.calib.gamma_res.bram_kbit}};
        }
        arr.push_back(jb);
    }
    json j;
    j["schema_version"] = 1;
    j["bundles"] = arr;
    return j.dump(2) + "\n";
}

} // namespace codesign
