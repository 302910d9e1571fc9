// SPDX-License-Identifier: Apache-2.0
#include "codesign/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <unistd.h>

#include "codesign/errors.hpp"
#include "json_util.hpp"

namespace codesign {

namespace {

// FNV-1a, fixed width for platform-stable seeded noise.
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
    std::uint64_t h = 1469598103934665603ull ^ seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::int64_t layer_params(IpKind k, const LayerDims& d) {
    const std::int64_t ks = kernel_size(k);
    if (is_standard_conv(k)) return ks * ks * d.in.channels * d.out.channels;
    if (is_depthwise_conv(k)) return ks * ks * d.out.channels;
    if (k == IpKind::normalization) return 2LL * d.out.channels;
    return 0;
}

std::int64_t layer_ops(IpKind k, const LayerDims& d) {
    const std::int64_t plane = static_cast<std::int64_t>(d.out.width) * d.out.height;
    const std::int64_t ks = kernel_size(k);
    if (is_standard_conv(k)) return plane * ks * ks * d.in.channels * d.out.channels;
    if (is_depthwise_conv(k)) return plane * ks * ks * d.out.channels;
    if (k == IpKind::normalization) return 2 * plane * d.out.channels;
    return plane * d.out.channels;
}

std::vector<IpKind> all_layer_kinds(const DnnModel& m) {
    std::vector<IpKind> kinds(m.head);
    for (int r = 0; r < m.n_rep; ++r) {
        for (const auto& inst : m.bundle.instances) kinds.push_back(inst.kind);
    }
    kinds.insert(kinds.end(), m.tail.begin(), m.tail.end());
    return kinds;
}

// Structure key for the noise term: everything that may shift accuracy,
// never pf (records differing only in pf must share one score).
std::string structure_key(const DnnModel& m, const std::string& task) {
    std::string key = task + "|" + m.bundle.id + "|n" + std::to_string(m.n_rep) + "|";
    for (IpKind k : all_layer_kinds(m)) key += to_string(k) + ",";
    const QuantScheme& q = m.quant();
    key += "|w" + std::to_string(q.weight_bits) + "a" + std::to_string(q.activation_bits) + "|" +
           to_string(q.activation_clip);
    for (int x : m.x_ds) key += x ? "d" : "-";
    for (double f : m.pi_ch) key += "/" + std::to_string(f);
    return key;
}

} // namespace

std::string to_string(BuildMethod m) {
    return m == BuildMethod::fixed_head_tail ? "fixed_head_tail" : "pure_replication";
}

std::int64_t model_param_count(const DnnModel& m, const TileShape& tile) {
    const std::vector<LayerDims> dims = layer_dims(m, tile);
    const std::vector<IpKind> kinds = all_layer_kinds(m);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < kinds.size(); ++i) total += layer_params(kinds[i], dims[i]);
    return total;
}

std::int64_t model_op_count(const DnnModel& m, const TileShape& tile) {
    const std::vector<LayerDims> dims = layer_dims(m, tile);
    const std::vector<IpKind> kinds = all_layer_kinds(m);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < kinds.size(); ++i) total += layer_ops(kinds[i], dims[i]);
    return total;
}

SyntheticProxyEvaluator::SyntheticProxyEvaluator(const Characterization& ch, std::uint64_t seed)
    : SyntheticProxyEvaluator(ch, seed, Coefficients{}) {}

SyntheticProxyEvaluator::SyntheticProxyEvaluator(const Characterization& ch, std::uint64_t seed,
                                                 Coefficients coeff)
    : ch_(&ch), seed_(seed), coeff_(coeff) {}

double SyntheticProxyEvaluator::evaluate(const DnnModel& m, const std::string& task) {
    const auto params = static_cast<double>(std::max<std::int64_t>(
        1, model_param_count(m, ch_->tile())));
    const auto ops = static_cast<double>(std::max<std::int64_t>(
        1, model_op_count(m, ch_->tile())));

    std::set<IpKind> comp_kinds;
    for (const auto& inst : m.bundle.instances) {
        if (is_computational(inst.kind)) comp_kinds.insert(inst.kind);
    }
    const QuantScheme& q = m.quant();
    double x = coeff_.a * std::log(params) + coeff_.b * std::log(ops) + coeff_.bias;
    x += coeff_.kind_bonus * static_cast<double>(comp_kinds.size());
    if (q.weight_bits == 16) x += coeff_.wide_quant;
    if (q.activation_clip != ActivationClip::relu) x += coeff_.clip_bonus;

    const std::uint64_t h = fnv1a(structure_key(m, task), seed_);
    const double unit = static_cast<double>(h % (1ull << 20)) / static_cast<double>(1ull << 20);
    x += coeff_.noise * (2.0 * unit - 1.0);
    return sigmoid(x);
}

ExternalCommandEvaluator::ExternalCommandEvaluator(std::string command)
    : command_(std::move(command)) {
    if (command_.empty()) throw ConfigError("external evaluator command is empty");
}

double ExternalCommandEvaluator::evaluate(const DnnModel& m, const std::string&) {
    static std::atomic<unsigned> counter{0};
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / ("codesign-eval-" + std::to_string(::getpid()) + "-" +
                             std::to_string(counter.fetch_add(1)) + ".json");
    {
        std::ofstream out(path);
        out << to_json(m);
    }
    const std::string cmd = command_ + " < '" + path.string() + "'";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        std::filesystem::remove(path);
        throw ConfigError("failed to spawn evaluator command: " + command_);
    }
    std::string output;
    char buf[256];
    while (std::fgets(buf, sizeof(buf), pipe)) output += buf;
    const int status = ::pclose(pipe);
    std::filesystem::remove(path);
    if (status != 0) {
        throw ConfigError("evaluator command exited with status " + std::to_string(status));
    }
    const std::size_t eol = output.find('\n');
    const std::string line = eol == std::string::npos ? output : output.substr(0, eol);
    std::size_t consumed = 0;
    double score = 0.0;
    try {
        score = std::stod(line, &consumed);
    } catch (const std::exception&) {
        throw ConfigError("evaluator output is not a number: '" + line + "'");
    }
    if (consumed == 0 || score < 0.0 || score > 1.0) {
        throw ConfigError("evaluator score out of range [0,1]: '" + line + "'");
    }
    return score;
}

DnnModel build_eval_dnn(const Bundle& b, BuildMethod method, int n,
                        const FeatureDims& input_dims) {
    if (n < 1) throw DomainError("replication count must be >= 1");
    DnnModel m;
    m.bundle = b;
    m.n_rep = n;
    m.x_ds.assign(static_cast<std::size_t>(n) - 1, 0);
    m.pi_ch.assign(static_cast<std::size_t>(n) - 1, 1.0);
    m.input_dims = input_dims;
    if (method == BuildMethod::fixed_head_tail) {
        m.head = {IpKind::conv3x3};
        m.tail = {IpKind::avg_pool, IpKind::conv1x1};
    }
    validate(m);
    return m;
}

namespace {

EvalRecord make_record(const Bundle& b, BuildMethod method, int n, AccuracyEvaluator& evaluator,
                       const DeviceSpec& device, const Characterization& ch,
                       const EvalOptions& opts) {
    EvalRecord rec;
    rec.bundle_id = b.id;
    rec.method = method;
    rec.pf = b.instances.front().pf;
    rec.quant = b.instances.front().quant;
    rec.n_rep = n;
    DnnModel m = build_eval_dnn(b, method, n, opts.input_dims);
    m.calib = opts.dnn_calib;
    rec.latency_ms = dnn_latency_ms(m, device, ch);
    rec.resource = dnn_resource(m, ch);
    try {
        rec.accuracy = evaluator.evaluate(m, opts.task);
    } catch (const std::exception& e) {
        rec.valid = false;
        rec.error = e.what();
    }
    return rec;
}

} // namespace

std::vector<EvalRecord> coarse_evaluate(const std::vector<Bundle>& bundles,
                                        const std::vector<int>& pf_set,
                                        AccuracyEvaluator& evaluator, const DeviceSpec& device,
                                        const Characterization& ch, const EvalOptions& opts) {
    if (pf_set.empty()) throw DomainError("pf set must be non-empty");
    std::vector<EvalRecord> records;
    records.reserve(bundles.size() * pf_set.size());
    for (const Bundle& b : bundles) {
        for (int pf : pf_set) {
            const Bundle cfg = with_config(b, pf, b.instances.front().quant);
            records.push_back(make_record(cfg, BuildMethod::fixed_head_tail, 1, evaluator,
                                          device, ch, opts));
        }
    }
    return records;
}

std::vector<std::string> pareto_select(const std::vector<EvalRecord>& records,
                                       double band_width_dsp) {
    if (records.empty()) throw DomainError("no records to select from");
    if (band_width_dsp <= 0.0) throw DomainError("band width must be > 0");

    std::map<long long, std::vector<std::size_t>> bands;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].valid) continue;
        bands[static_cast<long long>(std::floor(records[i].resource.dsp / band_width_dsp))]
            .push_back(i);
    }

    std::vector<bool> selected(records.size(), false);
    for (auto& [band, idxs] : bands) {
        std::sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
            if (records[a].latency_ms != records[b].latency_ms) {
                return records[a].latency_ms < records[b].latency_ms;
            }
            return records[a].accuracy > records[b].accuracy;
        });
        // A record is on the front iff no faster record matches its accuracy
        // and no equal-latency record beats it.
        double best_prev = -1.0; // max accuracy among strictly faster records
        std::size_t g = 0;
        while (g < idxs.size()) {
            std::size_t h = g;
            double group_max = -1.0;
            while (h < idxs.size() &&
                   records[idxs[h]].latency_ms == records[idxs[g]].latency_ms) {
                group_max = std::max(group_max, records[idxs[h]].accuracy);
                ++h;
            }
            for (std::size_t i = g; i < h; ++i) {
                const EvalRecord& r = records[idxs[i]];
                if (r.accuracy == group_max && r.accuracy > best_prev) selected[idxs[i]] = true;
            }
            best_prev = std::max(best_prev, group_max);
            g = h;
        }
    }

    std::vector<std::string> ids;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (selected[i] &&
            std::find(ids.begin(), ids.end(), records[i].bundle_id) == ids.end()) {
            ids.push_back(records[i].bundle_id);
        }
    }
    return ids;
}

std::vector<EvalRecord> fine_evaluate(const std::vector<Bundle>& bundles,
                                      const std::vector<int>& rep_counts,
                                      const std::vector<ActivationClip>& clips,
                                      AccuracyEvaluator& evaluator, const DeviceSpec& device,
                                      const Characterization& ch, const EvalOptions& opts) {
    if (bundles.empty()) throw DomainError("no bundles selected for fine evaluation");
    if (rep_counts.empty() || clips.empty()) {
        throw DomainError("fine evaluation grid must be non-empty");
    }
    std::vector<EvalRecord> records;
    records.reserve(bundles.size() * rep_counts.size() * clips.size());
    for (const Bundle& b : bundles) {
        for (int n : rep_counts) {
            for (ActivationClip clip : clips) {
                QuantScheme q = b.instances.front().quant;
                q.activation_clip = clip;
                const Bundle cfg = with_config(b, b.instances.front().pf, q);
                records.push_back(make_record(cfg, BuildMethod::pure_replication, n, evaluator,
                                              device, ch, opts));
            }
        }
    }
    return records;
}

std::vector<EvalRecord> rank_records(std::vector<EvalRecord> records) {
    std::sort(records.begin(), records.end(), [](const EvalRecord& a, const EvalRecord& b) {
        if (a.valid != b.valid) return a.valid;
        if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
        if (a.latency_ms != b.latency_ms) return a.latency_ms < b.latency_ms;
        if (a.bundle_id != b.bundle_id) return a.bundle_id < b.bundle_id;
        return a.n_rep < b.n_rep;
    });
    return records;
}

namespace {

using detail::json;

json record_to_json_obj(const EvalRecord& r) {
    return {{"bundle_id", r.bundle_id},
            {"method", to_string(r.method)},
            {"pf", r.pf},
            {"weight_bits", r.quant.weight_bits},
            {"activation_bits", r.quant.activation_bits},
            {"activation_clip", to_string(r.quant.activation_clip)},
            {"n_rep", r.n_rep},
            {"latency_ms", r.latency_ms},
            {"resource",
             {{"dsp", r.resource.dsp},
              {"lut", r.resource.lut},
              {"ff", r.resource.ff},
              {"bram_kbit", r.resource.bram_kbit}}},
            {"accuracy", r.accuracy},
            {"valid", r.valid},
            {"error", r.error}};
}

} // namespace

std::string records_to_json(const std::vector<EvalRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(record_to_json_obj(r));
    return arr.dump(2) + "\n";
}

std::string records_to_csv(const std::vector<EvalRecord>& records) {
    std::string out = "bundle_id,method,pf,weight_bits,activation_bits,activation_clip,n_rep,"
                      "latency_ms,dsp,lut,ff,bram_kbit,accuracy,valid\n";
    for (const auto& r : records) {
        out += r.bundle_id + "," + to_string(r.method) + "," + std::to_string(r.pf) + "," +
               std::to_string(r.quant.weight_bits) + "," +
               std::to_string(r.quant.activation_bits) + "," +
               to_string(r.quant.activation_clip) + "," + std::to_string(r.n_rep) + "," +
               std::to_string(r.latency_ms) + "," + std::to_string(r.resource.dsp) + "," +
               std::to_string(r.resource.lut) + "," + std::to_string(r.resource.ff) + "," +
               std::to_string(r.resource.bram_kbit) + "," + std::to_string(r.accuracy) + "," +
               (r.valid ? "1" : "0") + "\n";
    }
    return out;
}

std::vector<EvalRecord> records_from_json(const std::string& text) {
    json arr = detail::parse_json(text, "evaluation records");
    if (!arr.is_array()) throw ConfigError("evaluation records must be a JSON array");
    std::vector<EvalRecord> out;
    for (const auto& j : arr) {
        detail::expect_keys(j, "record",
                            {"bundle_id", "method", "pf", "weight_bits", "activation_bits",
                             "activation_clip", "n_rep", "latency_ms", "resource", "accuracy",
                             "valid", "error"});
        EvalRecord r;
        r.bundle_id = detail::get_req<std::string>(j, "bundle_id", "record");
        r.method = detail::get_or<std::string>(j, "method", "fixed_head_tail") ==
                           "pure_replication"
                       ? BuildMethod::pure_replication
                       : BuildMethod::fixed_head_tail;
        r.pf = detail::get_or(j, "pf", 1);
        r.quant.weight_bits = detail::get_or(j, "weight_bits", 8);
        r.quant.activation_bits = detail::get_or(j, "activation_bits", 8);
        r.quant.activation_clip =
            activation_clip_from_string(detail::get_or<std::string>(j, "activation_clip",
                                                                    "relu"));
        r.n_rep = detail::get_or(j, "n_rep", 1);
        r.latency_ms = detail::get_or(j, "latency_ms", 0.0);
        const json& jr = j.at("resource");
        r.resource.dsp = detail::get_or(jr, "dsp", 0.0);
        r.resource.lut = detail::get_or(jr, "lut", 0.0);
        r.resource.ff = detail::get_or(jr, "ff", 0.0);
        r.resource.bram_kbit = detail::get_or(jr, "bram_kbit", 0.0);
        r.accuracy = detail::get_or(j, "accuracy", 0.0);
        r.valid = detail::get_or(j, "valid", true);
        r.error = detail::get_or<std::string>(j, "error", "");
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace codesign
