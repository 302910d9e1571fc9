// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "codesign/characterization.hpp"
#include "codesign/errors.hpp"

using namespace codesign;

namespace {

Characterization make_ch() { return Characterization(default_char_table(), TileShape{16, 16, 8}); }

IpInstance inst(IpKind k, int pf = 4, int wb = 8, int ab = 8) {
    return IpInstance{k, pf, QuantScheme{wb, ab, ActivationClip::relu}};
}

} // namespace

TEST_CASE("DSP usage follows kernel size, pf, and weight width") {
    const Characterization ch = make_ch();
    CHECK(ch.resources(inst(IpKind::conv1x1, 4)).dsp == 4);
    CHECK(ch.resources(inst(IpKind::conv3x3, 4)).dsp == 36);
    CHECK(ch.resources(inst(IpKind::conv5x5, 2)).dsp == 50);
    CHECK(ch.resources(inst(IpKind::dwconv7x7, 2)).dsp == 98);
    CHECK(ch.resources(inst(IpKind::conv3x3, 4, 16)).dsp == 72); // 16-bit doubles multipliers
    CHECK(ch.resources(inst(IpKind::max_pool, 8)).dsp == 0);
    CHECK(ch.resources(inst(IpKind::normalization, 8)).dsp == 0);
}

TEST_CASE("LUT and FF are affine in DSP count") {
    const Characterization ch = make_ch();
    const auto& c = default_char_table().kinds.at("conv3x3");
    const ResourceVector r = ch.resources(inst(IpKind::conv3x3, 4));
    CHECK(r.lut == c.lut_base + c.lut_per_dsp * r.dsp);
    CHECK(r.ff == c.ff_base + c.ff_per_dsp * r.dsp);
}

TEST_CASE("BRAM covers tile IO and the weight working set") {
    const Characterization ch = make_ch();
    // 2 * 16*16*8 * 8 bits of tile IO = 32 kbit; conv3x3 weights 9*8*8*8 bits.
    const ResourceVector r = ch.resources(inst(IpKind::conv3x3, 4));
    CHECK(r.bram_kbit == doctest::Approx(32.0 + 9.0 * 8 * 8 * 8 / 1024.0));
    const ResourceVector p = ch.resources(inst(IpKind::max_pool, 4));
    CHECK(p.bram_kbit == doctest::Approx(32.0));
}

TEST_CASE("invocation latency halves as pf doubles, with ceil saturation") {
    const Characterization ch = make_ch();
    const TileShape tile{16, 16, 8};
    // conv: plane * k^2 * C * ceil(C/pf).
    CHECK(ch.latency_cycles(inst(IpKind::conv3x3, 1), tile) == 256 * 9 * 8 * 8);
    CHECK(ch.latency_cycles(inst(IpKind::conv3x3, 2), tile) == 256 * 9 * 8 * 4);
    CHECK(ch.latency_cycles(inst(IpKind::conv3x3, 8), tile) == 256 * 9 * 8 * 1);
    // pf beyond the channel tile saturates.
    CHECK(ch.latency_cycles(inst(IpKind::conv3x3, 32), tile) ==
          ch.latency_cycles(inst(IpKind::conv3x3, 8), tile));
    // dwconv: plane * k^2 * ceil(C/pf).
    CHECK(ch.latency_cycles(inst(IpKind::dwconv5x5, 4), tile) == 256 * 25 * 2);
    // elementwise: plane * C / pf lanes.
    CHECK(ch.latency_cycles(inst(IpKind::activation, 1), tile) == 2048);
    CHECK(ch.latency_cycles(inst(IpKind::activation, 8), tile) == 256);
    CHECK(ch.latency_cycles(inst(IpKind::max_pool, 2), tile) == 1024);
}

TEST_CASE("elementwise latency scales with the table's cycle_scale") {
    CharTable t = default_char_table();
    t.kinds["activation"].cycle_scale = 2.5;
    const Characterization ch(std::move(t), TileShape{16, 16, 8});
    CHECK(ch.latency_cycles(inst(IpKind::activation, 1), TileShape{16, 16, 8}) ==
          static_cast<std::int64_t>(2048 * 2.5));
}

TEST_CASE("weight bytes by kind") {
    const Characterization ch = make_ch();
    const LayerDims d{{32, 32, 16}, {32, 32, 24}};
    CHECK(ch.weight_bytes(inst(IpKind::conv3x3), d) == 9LL * 16 * 24);
    CHECK(ch.weight_bytes(inst(IpKind::conv3x3, 4, 16), d) == 2 * 9LL * 16 * 24);
    CHECK(ch.weight_bytes(inst(IpKind::dwconv3x3), d) == 9LL * 24);
    CHECK(ch.weight_bytes(inst(IpKind::normalization), d) == 2LL * 24);
    CHECK(ch.weight_bytes(inst(IpKind::max_pool), d) == 0);
    CHECK(ch.weight_bytes(inst(IpKind::activation), d) == 0);
}

TEST_CASE("invalid knobs are rejected") {
    const Characterization ch = make_ch();
    CHECK_THROWS_AS(ch.resources(inst(IpKind::conv3x3, 3)), DomainError);
    CHECK_THROWS_AS(ch.resources(inst(IpKind::conv3x3, 4, 12)), DomainError);
    CHECK_THROWS_AS(ch.latency_cycles(inst(IpKind::conv3x3, 0), TileShape{16, 16, 8}),
                    DomainError);
}

TEST_CASE("characterization table JSON round-trip") {
    const CharTable t = default_char_table();
    const CharTable back = char_table_from_json(to_json(t));
    CHECK(back.kinds.size() == t.kinds.size());
    for (const auto& [name, c] : t.kinds) {
        CHECK(back.kinds.at(name).lut_base == c.lut_base);
        CHECK(back.kinds.at(name).cycle_scale == c.cycle_scale);
    }
    CHECK(back.ctl_lut_per_stage == t.ctl_lut_per_stage);
    CHECK(back.dram_overhead_cycles == t.dram_overhead_cycles);
}

TEST_CASE("table JSON rejects unknown kinds, keys, and versions") {
    CHECK_THROWS_AS(char_table_from_json(R"({"schema_version":1,"kinds":{"conv9x9":{}}})"),
                    ConfigError);
    CHECK_THROWS_AS(char_table_from_json(R"({"schema_version":1,"typo":true})"), ConfigError);
    CHECK_THROWS_AS(
        char_table_from_json(R"({"schema_version":1,"kinds":{"conv3x3":{"lut_bass":1}}})"),
        ConfigError);
    CHECK_THROWS_AS(char_table_from_json(R"({"schema_version":2})"), ConfigError);
    CHECK_THROWS_AS(char_table_from_json("not json"), ConfigError);
}
