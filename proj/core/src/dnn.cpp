// SPDX-License-Identifier: Apache-2.0
#include "codesign/dnn.hpp"

#include <algorithm>
#include <cmath>

#include "codesign/errors.hpp"
#include "json_util.hpp"

namespace codesign {

namespace {

int round_up_multiple(int value, int multiple) {
    return ((value + multiple - 1) / multiple) * multiple;
}

int ceil_div_int(int a, int b) { return (a + b - 1) / b; }

bool on_factor_ladder(double f) {
    return std::any_of(kChannelFactorLadder.begin(), kChannelFactorLadder.end(),
                       [f](double v) { return std::abs(v - f) < 1e-9; });
}

// Layer kinds in execution order.
std::vector<IpKind> layer_kinds(const DnnModel& m) {
    std::vector<IpKind> kinds;
    kinds.insert(kinds.end(), m.head.begin(), m.head.end());
    for (int r = 0; r < m.n_rep; ++r) {
        for (const auto& inst : m.bundle.instances) kinds.push_back(inst.kind);
    }
    kinds.insert(kinds.end(), m.tail.begin(), m.tail.end());
    return kinds;
}

// Pseudo-bundle wrapping the head or tail layers; uncalibrated (alpha=beta=1).
Bundle part_bundle(const std::string& id, const std::vector<IpKind>& kinds, int pf,
                   const QuantScheme& quant) {
    Bundle b;
    b.id = id;
    for (IpKind k : kinds) b.instances.push_back(IpInstance{k, pf, quant});
    return b;
}

} // namespace

int DnnModel::pf() const { return bundle.instances.front().pf; }
const QuantScheme& DnnModel::quant() const { return bundle.instances.front().quant; }

std::size_t DnnModel::layer_count() const {
    return head.size() + static_cast<std::size_t>(n_rep) * bundle.instances.size() + tail.size();
}

void validate(const DnnModel& m) {
    validate(m.bundle);
    if (m.n_rep < 1) throw DomainError("n_rep must be >= 1");
    const std::size_t boundaries = static_cast<std::size_t>(m.n_rep) - 1;
    if (m.x_ds.size() != boundaries) throw DomainError("x_ds length must be n_rep - 1");
    if (m.pi_ch.size() != boundaries) throw DomainError("pi_ch length must be n_rep - 1");
    for (int x : m.x_ds) {
        if (x != 0 && x != 1) throw DomainError("x_ds entries must be 0 or 1");
    }
    for (double f : m.pi_ch) {
        if (!on_factor_ladder(f)) {
            throw DomainError("pi_ch entry " + std::to_string(f) +
                              " is not an allowed channel expansion factor");
        }
    }
    if (m.f_ds < 2) throw DomainError("down-sampling factor must be >= 2");
    if (m.input_dims.width < 1 || m.input_dims.height < 1 || m.input_dims.channels < 1) {
        throw DomainError("input dims must be >= 1 in every dimension");
    }
    const int pf = m.bundle.instances.front().pf;
    const QuantScheme& q = m.bundle.instances.front().quant;
    if (!is_valid_pf(pf)) throw DomainError("parallel factor must be a power of two <= 32");
    validate(q);
    for (const auto& inst : m.bundle.instances) {
        if (inst.pf != pf || !(inst.quant == q)) {
            throw DomainError("pf and quant must be uniform across all IP instances");
        }
    }
}

std::vector<FeatureDims> replication_dims(const DnnModel& m, const TileShape& tile) {
    validate(tile);
    FeatureDims d = m.input_dims;
    d.channels = round_up_multiple(d.channels, tile.channels);
    if (!m.head.empty()) {
        // Stride-2 stem.
        d.width = ceil_div_int(m.input_dims.width, 2);
        d.height = ceil_div_int(m.input_dims.height, 2);
        d.channels = round_up_multiple(std::max(m.input_dims.channels, tile.channels),
                                       tile.channels);
    }
    std::vector<FeatureDims> dims;
    dims.reserve(static_cast<std::size_t>(m.n_rep));
    dims.push_back(d);
    for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(m.n_rep); ++i) {
        if (m.x_ds[i] == 1) {
            d.width = ceil_div_int(d.width, m.f_ds);
            d.height = ceil_div_int(d.height, m.f_ds);
        }
        const int expanded = static_cast<int>(std::ceil(m.pi_ch[i] * d.channels));
        d.channels = round_up_multiple(expanded, tile.channels);
        if (d.width < 1 || d.height < 1 || d.channels < 1) {
            throw DomainError("feature map dims collapsed at replication boundary " +
                              std::to_string(i));
        }
        dims.push_back(d);
    }
    return dims;
}

std::vector<LayerDims> layer_dims(const DnnModel& m, const TileShape& tile) {
    validate(m);
    const std::vector<FeatureDims> reps = replication_dims(m, tile);
    std::vector<LayerDims> out;
    out.reserve(m.layer_count());

    if (!m.head.empty()) {
        out.push_back(LayerDims{m.input_dims, reps.front()}); // stem
        for (std::size_t i = 1; i < m.head.size(); ++i) {
            out.push_back(LayerDims{reps.front(), reps.front()});
        }
    }
    for (int r = 0; r < m.n_rep; ++r) {
        for (std::size_t i = 0; i < m.bundle.instances.size(); ++i) {
            out.push_back(LayerDims{reps[r], reps[r]});
        }
    }
    FeatureDims cur = reps.back();
    for (IpKind k : m.tail) {
        if (k == IpKind::avg_pool || k == IpKind::max_pool) {
            // Global pooling.
            FeatureDims pooled{1, 1, cur.channels};
            out.push_back(LayerDims{cur, pooled});
            cur = pooled;
        } else if (is_standard_conv(k)) {
            FeatureDims proj{cur.width, cur.height, tile.channels};
            out.push_back(LayerDims{cur, proj});
            cur = proj;
        } else {
            out.push_back(LayerDims{cur, cur});
        }
    }
    return out;
}

std::vector<IpInstance> distinct_instances(const DnnModel& m) {
    std::vector<IpInstance> out;
    auto add = [&](IpKind k) {
        for (const auto& inst : out) {
            if (inst.kind == k) return;
        }
        out.push_back(IpInstance{k, m.pf(), m.quant()});
    };
    for (IpKind k : m.head) add(k);
    for (const auto& inst : m.bundle.instances) add(inst.kind);
    for (IpKind k : m.tail) add(k);
    return out;
}

std::map<std::string, std::vector<std::size_t>> layer_assignment(const DnnModel& m) {
    std::map<std::string, std::vector<std::size_t>> out;
    const std::vector<IpKind> kinds = layer_kinds(m);
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        out[to_string(kinds[i])].push_back(i);
    }
    return out;
}

double dnn_latency_cycles(const DnnModel& m, double bw, const Characterization& ch) {
    validate(m);
    if (bw <= 0.0) throw DomainError("off-chip bandwidth must be > 0");
    const TileShape& tile = ch.tile();
    const std::vector<LayerDims> all_dims = layer_dims(m, tile);

    double total = 0.0;
    std::size_t at = 0;
    if (!m.head.empty()) {
        Bundle hb = part_bundle("head", m.head, m.pf(), m.quant());
        std::vector<LayerDims> hd(all_dims.begin() + at, all_dims.begin() + at + m.head.size());
        total += bundle_latency(hb, hd, tile, bw, ch);
        at += m.head.size();
    }
    const std::size_t per_rep = m.bundle.instances.size();
    for (int r = 0; r < m.n_rep; ++r) {
        std::vector<LayerDims> rd(all_dims.begin() + at, all_dims.begin() + at + per_rep);
        total += bundle_latency(m.bundle, rd, tile, bw, ch);
        at += per_rep;
    }
    if (!m.tail.empty()) {
        Bundle tb = part_bundle("tail", m.tail, m.pf(), m.quant());
        std::vector<LayerDims> td(all_dims.begin() + at, all_dims.end());
        total += bundle_latency(tb, td, tile, bw, ch);
    }
    total += m.calib.phi * m.calib.lat_dm;
    return total;
}

double dnn_latency_ms(const DnnModel& m, const DeviceSpec& device, const Characterization& ch) {
    return cycles_to_ms(dnn_latency_cycles(m, device.bw_bytes_per_cycle, ch), device.clock_mhz);
}

ResourceVector dnn_resource(const DnnModel& m, const Characterization& ch) {
    validate(m);
    ResourceVector total = m.bundle.calib.gamma_res;
    for (const auto& inst : distinct_instances(m)) total += ch.resources(inst);
    total += m.calib.gamma_ctl * m.calib.res_ctl;
    return total;
}

DnnModel initialize_dnn(const Bundle& skeleton, const DeviceSpec& device,
                        const QuantScheme& quant, const FeatureDims& input_dims,
                        const Characterization& ch, const InitOptions& opts) {
    validate(device);
    if (opts.n_rep < 1) throw DomainError("initial replication count must be >= 1");

    DnnModel m;
    m.n_rep = opts.n_rep;
    m.f_ds = opts.f_ds;
    m.x_ds.assign(static_cast<std::size_t>(opts.n_rep) - 1, 1);
    for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(opts.n_rep); ++i) {
        m.pi_ch.push_back(m.x_ds[i] == 1 ? 2.0 : 1.0);
    }
    m.input_dims = input_dims;

    for (auto it = kPfCandidates.rbegin(); it != kPfCandidates.rend(); ++it) {
        m.bundle = with_config(skeleton, *it, quant);
        if (dnn_resource(m, ch).all_leq(device.budget)) return m;
    }

    m.bundle = with_config(skeleton, 1, quant);
    const std::string binding = first_overflow(dnn_resource(m, ch), device.budget);
    throw InfeasibleError("bundle '" + skeleton.id + "' does not fit device '" + device.name +
                              "' at pf=1; binding resource: " + binding,
                          binding);
}

// --- serialization -----------------------------------------------------------

namespace {

using detail::json;

json to_json_obj(const ResourceVector& r) {
    return {{"dsp", r.dsp}, {"lut", r.lut}, {"ff", r.ff}, {"bram_kbit", r.bram_kbit}};
}

ResourceVector resource_from_json(const json& j, const std::string& where) {
    detail::expect_keys(j, where, {"dsp", "lut", "ff", "bram_kbit"});
    ResourceVector r;
    r.dsp = detail::get_or(j, "dsp", 0.0);
    r.lut = detail::get_or(j, "lut", 0.0);
    r.ff = detail::get_or(j, "ff", 0.0);
    r.bram_kbit = detail::get_or(j, "bram_kbit", 0.0);
    return r;
}

json to_json_obj(const QuantScheme& q) {
    return {{"weight_bits", q.weight_bits},
            {"activation_bits", q.activation_bits},
            {"activation_clip", to_string(q.activation_clip)}};
}

QuantScheme quant_from_json(const json& j, const std::string& where) {
    detail::expect_keys(j, where, {"weight_bits", "activation_bits", "activation_clip"});
    QuantScheme q;
    q.weight_bits = detail::get_or(j, "weight_bits", 8);
    q.activation_bits = detail::get_or(j, "activation_bits", 8);
    q.activation_clip =
        activation_clip_from_string(detail::get_or<std::string>(j, "activation_clip", "relu"));
    return q;
}

json to_json_obj(const FeatureDims& d) {
    return {{"width", d.width}, {"height", d.height}, {"channels", d.channels}};
}

FeatureDims dims_from_json(const json& j, const std::string& where) {
    detail::expect_keys(j, where, {"width", "height", "channels"});
    FeatureDims d;
    d.width = detail::get_req<int>(j, "width", where);
    d.height = detail::get_req<int>(j, "height", where);
    d.channels = detail::get_req<int>(j, "channels", where);
    return d;
}

json to_json_obj(const Bundle& b) {
    json insts = json::array();
    for (const auto& inst : b.instances) {
        insts.push_back({{"kind", to_string(inst.kind)},
                         {"pf", inst.pf},
                         {"quant", to_json_obj(inst.quant)}});
    }
    return {{"id", b.id},
            {"instances", insts},
            {"calib",
             {{"alpha", b.calib.alpha},
              {"beta", b.calib.beta},
              {"gamma_res", to_json_obj(b.calib.gamma_res)}}}};
}

Bundle bundle_from_json(const json& j) {
    detail::expect_keys(j, "bundle", {"id", "instances", "calib"});
    Bundle b;
    b.id = detail::get_req<std::string>(j, "id", "bundle");
    for (const auto& ji : j.at("instances")) {
        detail::expect_keys(ji, "bundle.instances[]", {"kind", "pf", "quant"});
        IpInstance inst;
        inst.kind = ip_kind_from_string(detail::get_req<std::string>(ji, "kind", "instance"));
        inst.pf = detail::get_or(ji, "pf", 1);
        inst.quant = quant_from_json(ji.at("quant"), "instance.quant");
        b.instances.push_back(inst);
    }
    if (j.contains("calib")) {
        const json& jc = j.at("calib");
        detail::expect_keys(jc, "bundle.calib", {"alpha", "beta", "gamma_res"});
        b.calib.alpha = detail::get_or(jc, "alpha", 1.0);
        b.calib.beta = detail::get_or(jc, "beta", 1.0);
        if (jc.contains("gamma_res")) {
            b.calib.gamma_res = resource_from_json(jc.at("gamma_res"), "bundle.calib.gamma_res");
        }
    }
    return b;
}

} // namespace

std::string to_json(const DnnModel& m) {
    json j;
    j["schema_version"] = 1;
    j["bundle"] = to_json_obj(m.bundle);
    j["n_rep"] = m.n_rep;
    j["x_ds"] = m.x_ds;
    j["f_ds"] = m.f_ds;
    j["pi_ch"] = m.pi_ch;
    j["input_dims"] = to_json_obj(m.input_dims);
    json head = json::array();
    for (IpKind k : m.head) head.push_back(to_string(k));
    j["head"] = head;
    json tail = json::array();
    for (IpKind k : m.tail) tail.push_back(to_string(k));
    j["tail"] = tail;
    json assign = json::object();
    for (const auto& [kind, layers] : layer_assignment(m)) assign[kind] = layers;
    j["layer_assignment"] = assign;
    j["calib"] = {{"phi", m.calib.phi},
                  {"lat_dm", m.calib.lat_dm},
                  {"gamma_ctl", m.calib.gamma_ctl},
                  {"res_ctl", to_json_obj(m.calib.res_ctl)}};
    return j.dump(2) + "\n";
}

DnnModel dnn_model_from_json(const std::string& text) {
    json j = detail::parse_json(text, "DNN model");
    detail::expect_keys(j, "DNN model",
                        {"schema_version", "bundle", "n_rep", "x_ds", "f_ds", "pi_ch",
                         "input_dims", "head", "tail", "layer_assignment", "calib"});
    if (detail::get_or(j, "schema_version", 1) != 1) {
        throw ConfigError("unsupported DNN model schema_version");
    }
    DnnModel m;
    m.bundle = bundle_from_json(j.at("bundle"));
    m.n_rep = detail::get_req<int>(j, "n_rep", "DNN model");
    m.x_ds = detail::get_or(j, "x_ds", std::vector<int>{});
    m.f_ds = detail::get_or(j, "f_ds", 2);
    m.pi_ch = detail::get_or(j, "pi_ch", std::vector<double>{});
    m.input_dims = dims_from_json(j.at("input_dims"), "input_dims");
    for (const auto& k : detail::get_or(j, "head", std::vector<std::string>{})) {
        m.head.push_back(ip_kind_from_string(k));
    }
    for (const auto& k : detail::get_or(j, "tail", std::vector<std::string>{})) {
        m.tail.push_back(ip_kind_from_string(k));
    }
    if (j.contains("calib")) {
        const json& jc = j.at("calib");
        detail::expect_keys(jc, "calib", {"phi", "lat_dm", "gamma_ctl", "res_ctl"});
        m.calib.phi = detail::get_or(jc, "phi", 0.0);
        m.calib.lat_dm = detail::get_or(jc, "lat_dm", 0.0);
        m.calib.gamma_ctl = detail::get_or(jc, "gamma_ctl", 1.0);
        if (jc.contains("res_ctl")) {
            m.calib.res_ctl = resource_from_json(jc.at("res_ctl"), "calib.res_ctl");
        }
    }
    validate(m);
    if (j.contains("layer_assignment")) {
        json expected = json::object();
        for (const auto& [kind, layers] : layer_assignment(m)) expected[kind] = layers;
        if (j.at("layer_assignment") != expected) {
            throw ConfigError("layer_assignment is inconsistent with the model structure");
        }
    }
    return m;
}

} // namespace codesign
