// SPDX-License-Identifier: Apache-2.0
#include "codesign/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "codesign/errors.hpp"
#include "json_util.hpp"

namespace codesign {

namespace {

std::string default_label(double fps, double latency_ms) {
    char buf[48];
    if (fps > 0.0) {
        std::snprintf(buf, sizeof(buf), "%gfps", fps);
    } else {
        std::snprintf(buf, sizeof(buf), "%gms", latency_ms);
    }
    return buf;
}

TargetSpec make_fps_target(double fps) {
    TargetSpec t;
    t.latency_ms = 1000.0 / fps;
    t.epsilon_ms = 0.05 * t.latency_ms;
    t.label = default_label(fps, 0.0);
    return t;
}

} // namespace

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.device = pynq_z1();
    cfg.targets = {make_fps_target(10.0), make_fps_target(15.0), make_fps_target(20.0)};
    return cfg;
}

void validate(const RunConfig& cfg) {
    validate(cfg.device);
    validate(cfg.tile);
    validate(cfg.quant);
    if (cfg.targets.empty()) throw ConfigError("config needs at least one target");
    for (const TargetSpec& t : cfg.targets) {
        if (t.latency_ms <= 0.0) throw ConfigError("target latency must be > 0");
        if (t.epsilon_ms <= 0.0) throw ConfigError("target epsilon must be > 0");
        if (t.clock_mhz < 0.0) throw ConfigError("target clock must be >= 0");
        if (t.label.empty()) throw ConfigError("target label must be non-empty");
    }
    if (cfg.input_dims.width < 1 || cfg.input_dims.height < 1 || cfg.input_dims.channels < 1) {
        throw ConfigError("input dims must be >= 1");
    }
    if (cfg.pf_set.empty()) throw ConfigError("pf_set must be non-empty");
    for (int pf : cfg.pf_set) {
        if (!is_valid_pf(pf)) throw ConfigError("pf_set entry " + std::to_string(pf) +
                                                " is not a power of two <= 32");
    }
    if (cfg.rep_counts.empty()) throw ConfigError("rep_counts must be non-empty");
    for (int n : cfg.rep_counts) {
        if (n < 1) throw ConfigError("rep_counts entries must be >= 1");
    }
    if (cfg.clips.empty()) throw ConfigError("activation_variants must be non-empty");
    if (cfg.top_n < 1) throw ConfigError("top_n must be >= 1");
    if (cfg.init_n_rep < 1) throw ConfigError("init_n_rep must be >= 1");
    if (cfg.search_k < 1) throw ConfigError("search.k must be >= 1");
    if (cfg.max_iters < 1) throw ConfigError("search.max_iters must be >= 1");
    if (cfg.evaluator_type != "proxy" && cfg.evaluator_type != "external") {
        throw ConfigError("evaluator.type must be 'proxy' or 'external'");
    }
    if (cfg.evaluator_type == "external" && cfg.evaluator_command.empty()) {
        throw ConfigError("external evaluator needs a command");
    }
    if (cfg.out_dir.empty()) throw ConfigError("out_dir must be non-empty");
}

namespace {

using detail::json;

void parse_device(const json& j, DeviceSpec& d) {
    detail::expect_keys(j, "device",
                        {"name", "budget", "clock_mhz", "bw_bytes_per_cycle"});
    d.name = detail::get_or<std::string>(j, "name", d.name);
    if (j.contains("budget")) {
        const json& jb = j.at("budget");
        detail::expect_keys(jb, "device.budget", {"dsp", "lut", "ff", "bram_kbit"});
        d.budget.dsp = detail::get_or(jb, "dsp", d.budget.dsp);
        d.budget.lut = detail::get_or(jb, "lut", d.budget.lut);
        d.budget.ff = detail::get_or(jb, "ff", d.budget.ff);
        d.budget.bram_kbit = detail::get_or(jb, "bram_kbit", d.budget.bram_kbit);
    }
    d.clock_mhz = detail::get_or(j, "clock_mhz", d.clock_mhz);
    d.bw_bytes_per_cycle = detail::get_or(j, "bw_bytes_per_cycle", d.bw_bytes_per_cycle);
}

TargetSpec parse_target(const json& j) {
    detail::expect_keys(j, "target", {"label", "fps", "latency_ms", "epsilon_ms", "clock_mhz"});
    const bool has_fps = j.contains("fps");
    const bool has_lat = j.contains("latency_ms");
    if (has_fps == has_lat) {
        throw ConfigError("each target needs exactly one of fps or latency_ms");
    }
    TargetSpec t;
    double fps = 0.0;
    if (has_fps) {
        fps = detail::get_req<double>(j, "fps", "target");
        if (fps <= 0.0) throw ConfigError("target fps must be > 0");
        t.latency_ms = 1000.0 / fps;
    } else {
        t.latency_ms = detail::get_req<double>(j, "latency_ms", "target");
    }
    t.epsilon_ms = detail::get_or(j, "epsilon_ms", 0.05 * t.latency_ms);
    t.clock_mhz = detail::get_or(j, "clock_mhz", 0.0);
    t.label = detail::get_or<std::string>(j, "label", default_label(fps, t.latency_ms));
    return t;
}

void parse_dims(const json& j, const std::string& where, FeatureDims& d) {
    detail::expect_keys(j, where, {"width", "height", "channels"});
    d.width = detail::get_or(j, "width", d.width);
    d.height = detail::get_or(j, "height", d.height);
    d.channels = detail::get_or(j, "channels", d.channels);
}

} // namespace

RunConfig run_config_from_json(const std::string& text) {
    json j = detail::parse_json(text, "run config");
    detail::expect_keys(j, "run config",
                        {"schema_version", "device", "targets", "tile", "input_dims", "quant",
                         "pf_set", "rep_counts", "activation_variants", "top_n", "init_n_rep",
                         "search", "evaluator", "char_table", "out_dir", "task", "codegen"});
    if (detail::get_or(j, "schema_version", 1) != 1) {
        throw ConfigError("unsupported run config schema_version");
    }
    RunConfig cfg = default_run_config();
    if (j.contains("device")) parse_device(j.at("device"), cfg.device);
    if (j.contains("targets")) {
        cfg.targets.clear();
        for (const auto& jt : j.at("targets")) cfg.targets.push_back(parse_target(jt));
    }
    if (j.contains("tile")) {
        const json& jt = j.at("tile");
        detail::expect_keys(jt, "tile", {"width", "height", "channels"});
        cfg.tile.width = detail::get_or(jt, "width", cfg.tile.width);
        cfg.tile.height = detail::get_or(jt, "height", cfg.tile.height);
        cfg.tile.channels = detail::get_or(jt, "channels", cfg.tile.channels);
    }
    if (j.contains("input_dims")) parse_dims(j.at("input_dims"), "input_dims", cfg.input_dims);
    if (j.contains("quant")) {
        const json& jq = j.at("quant");
        detail::expect_keys(jq, "quant", {"weight_bits", "activation_bits", "activation_clip"});
        cfg.quant.weight_bits = detail::get_or(jq, "weight_bits", cfg.quant.weight_bits);
        cfg.quant.activation_bits =
            detail::get_or(jq, "activation_bits", cfg.quant.activation_bits);
        cfg.quant.activation_clip = activation_clip_from_string(
            detail::get_or<std::string>(jq, "activation_clip", "relu"));
    }
    if (j.contains("pf_set")) cfg.pf_set = j.at("pf_set").get<std::vector<int>>();
    if (j.contains("rep_counts")) cfg.rep_counts = j.at("rep_counts").get<std::vector<int>>();
    if (j.contains("activation_variants")) {
        cfg.clips.clear();
        for (const auto& jc : j.at("activation_variants")) {
            cfg.clips.push_back(activation_clip_from_string(jc.get<std::string>()));
        }
    }
    cfg.top_n = detail::get_or(j, "top_n", cfg.top_n);
    cfg.init_n_rep = detail::get_or(j, "init_n_rep", cfg.init_n_rep);
    if (j.contains("search")) {
        const json& js = j.at("search");
        detail::expect_keys(js, "search", {"k", "max_iters", "seed"});
        cfg.search_k = detail::get_or(js, "k", cfg.search_k);
        cfg.max_iters = detail::get_or(js, "max_iters", cfg.max_iters);
        cfg.seed = detail::get_or<std::uint64_t>(js, "seed", cfg.seed);
    }
    if (j.contains("evaluator")) {
        const json& je = j.at("evaluator");
        detail::expect_keys(je, "evaluator", {"type", "command", "seed", "coefficients"});
        cfg.evaluator_type = detail::get_or<std::string>(je, "type", cfg.evaluator_type);
        cfg.evaluator_command = detail::get_or<std::string>(je, "command", "");
        cfg.eval_seed = detail::get_or<std::uint64_t>(je, "seed", cfg.eval_seed);
        if (je.contains("coefficients")) {
            const json& jc = je.at("coefficients");
            detail::expect_keys(jc, "evaluator.coefficients",
                                {"a", "b", "kind_bonus", "wide_quant", "clip_bonus", "noise",
                                 "bias"});
            cfg.proxy.a = detail::get_or(jc, "a", cfg.proxy.a);
            cfg.proxy.b = detail::get_or(jc, "b", cfg.proxy.b);
            cfg.proxy.kind_bonus = detail::get_or(jc, "kind_bonus", cfg.proxy.kind_bonus);
            cfg.proxy.wide_quant = detail::get_or(jc, "wide_quant", cfg.proxy.wide_quant);
            cfg.proxy.clip_bonus = detail::get_or(jc, "clip_bonus", cfg.proxy.clip_bonus);
            cfg.proxy.noise = detail::get_or(jc, "noise", cfg.proxy.noise);
            cfg.proxy.bias = detail::get_or(jc, "bias", cfg.proxy.bias);
        }
    }
    cfg.char_table_path = detail::get_or<std::string>(j, "char_table", cfg.char_table_path);
    cfg.out_dir = detail::get_or<std::string>(j, "out_dir", cfg.out_dir);
    cfg.task = detail::get_or<std::string>(j, "task", cfg.task);
    if (j.contains("codegen")) {
        const json& jc = j.at("codegen");
        detail::expect_keys(jc, "codegen", {"buffer_reuse", "loop_fusion"});
        cfg.codegen.buffer_reuse = detail::get_or(jc, "buffer_reuse", false);
        cfg.codegen.loop_fusion = detail::get_or(jc, "loop_fusion", false);
    }
    validate(cfg);
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return run_config_from_json(ss.str());
}

std::string to_json(const RunConfig& cfg) {
    json targets = json::array();
    for (const TargetSpec& t : cfg.targets) {
        targets.push_back({{"label", t.label},
                           {"latency_ms", t.latency_ms},
                           {"epsilon_ms", t.epsilon_ms},
                           {"clock_mhz", t.clock_mhz}});
    }
    json clips = json::array();
    for (ActivationClip c : cfg.clips) clips.push_back(to_string(c));
    json j = {
        {"schema_version", 1},
        {"device",
         {{"name", cfg.device.name},
          {"budget",
           {{"dsp", cfg.device.budget.dsp},
            {"lut", cfg.device.budget.lut},
            {"ff", cfg.device.budget.ff},
            {"bram_kbit", cfg.device.budget.bram_kbit}}},
          {"clock_mhz", cfg.device.clock_mhz},
          {"bw_bytes_per_cycle", cfg.device.bw_bytes_per_cycle}}},
        {"targets", targets},
        {"tile",
         {{"width", cfg.tile.width},
          {"height", cfg.tile.height},
          {"channels", cfg.tile.channels}}},
        {"input_dims",
         {{"width", cfg.input_dims.width},
          {"height", cfg.input_dims.height},
          {"channels", cfg.input_dims.channels}}},
        {"quant",
         {{"weight_bits", cfg.quant.weight_bits},
          {"activation_bits", cfg.quant.activation_bits},
          {"activation_clip", to_string(cfg.quant.activation_clip)}}},
        {"pf_set", cfg.pf_set},
        {"rep_counts", cfg.rep_counts},
        {"activation_variants", clips},
        {"top_n", cfg.top_n},
        {"init_n_rep", cfg.init_n_rep},
        {"search", {{"k", cfg.search_k}, {"max_iters", cfg.max_iters}, {"seed", cfg.seed}}},
        {"evaluator",
         {{"type", cfg.evaluator_type},
          {"command", cfg.evaluator_command},
          {"seed", cfg.eval_seed},
          {"coefficients",
           {{"a", cfg.proxy.a},
            {"b", cfg.proxy.b},
            {"kind_bonus", cfg.proxy.kind_bonus},
            {"wide_quant", cfg.proxy.wide_quant},
            {"clip_bonus", cfg.proxy.clip_bonus},
            {"noise", cfg.proxy.noise},
            {"bias", cfg.proxy.bias}}}}},
        {"char_table", cfg.char_table_path},
        {"out_dir", cfg.out_dir},
        {"task", cfg.task},
        {"codegen",
         {{"buffer_reuse", cfg.codegen.buffer_reuse},
          {"loop_fusion", cfg.codegen.loop_fusion}}},
    };
    return j.dump(2) + "\n";
}

} // namespace codesign
