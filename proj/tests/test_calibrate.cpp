// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <set>

#include "codesign/calibrate.hpp"
#include "codesign/errors.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace codesign;

namespace {

std::vector<SampleConfig> split(const std::vector<SampleConfig>& all, int parity) {
    std::vector<SampleConfig> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (static_cast<int>(i % 2) == parity) out.push_back(all[i]);
    }
    return out;
}

} // namespace

TEST_CASE("two-parameter scale fit recovers exact linear coefficients") {
    const std::vector<std::array<double, 2>> features = {
        {1.0e5, 2.0e3}, {3.0e5, 1.0e3}, {7.0e4, 9.0e3}, {2.2e5, 4.0e3},
        {5.0e5, 2.5e3}, {1.2e5, 8.0e3},
    };
    for (const auto& [alpha, beta] : std::vector<std::pair<double, double>>{
             {1.0, 1.0}, {0.83, 0.41}, {0.05, 1.45}, {1.5, 0.001}}) {
        const std::vector<double> y = oracles::exact_latency_targets(features, alpha, beta);
        const auto [a, b] = fit_scale2(features, y);
        CHECK(std::abs(a - alpha) < 1e-9);
        CHECK(std::abs(b - beta) < 1e-9);
    }
}

TEST_CASE("scale fit rejects rank-deficient and undersized sample sets") {
    // Proportional columns: the normal matrix is singular.
    const std::vector<std::array<double, 2>> collinear = {
        {1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}, {4.0, 8.0}};
    CHECK_THROWS_AS(fit_scale2(collinear, {1.0, 2.0, 3.0, 4.0}), CalibrationError);
    CHECK_THROWS_AS(fit_scale2({{1.0, 2.0}}, {1.0}), CalibrationError);
    CHECK_THROWS_AS(fit_scale2({{1.0, 2.0}, {2.0, 1.0}}, {1.0}), CalibrationError);
}

TEST_CASE("default sample grid interleaves axes so both parity splits cover them") {
    const auto all = default_sample_configs();
    REQUIRE(all.size() == 16);
    for (int parity : {0, 1}) {
        std::set<std::string> dims;
        std::set<int> pfs;
        std::set<double> bws;
        for (const auto& s : split(all, parity)) {
            dims.insert(std::to_string(s.dims.width) + "x" + std::to_string(s.dims.height) +
                        "x" + std::to_string(s.dims.channels));
            pfs.insert(s.pf);
            bws.insert(s.bw);
        }
        CHECK(dims.size() == 4);
        CHECK(pfs == std::set<int>{2, 8});
        CHECK(bws == std::set<double>{4.0, 16.0});
    }
}

TEST_CASE("calibration fits every bundle within the holdout fidelity bound") {
    const Characterization ch(default_char_table(), TileShape{16, 16, 8});
    const auto bundles = enumerate_bundles(builtin_templates());
    const auto all = default_sample_configs();
    const auto train = split(all, 0);
    const auto holdout = split(all, 1);

    const CalibrationResult res = calibrate(bundles, train, ch);
    REQUIRE(res.bundles.size() == bundles.size());
    REQUIRE(res.fits.size() == bundles.size());

    for (std::size_t i = 0; i < res.bundles.size(); ++i) {
        const Bundle& b = res.bundles[i];
        const BundleFit& f = res.fits[i];
        CHECK(f.bundle_id == b.id);
        CHECK(b.calib.alpha > 0.0);
        CHECK(b.calib.alpha <= 1.5);
        CHECK(b.calib.beta > 0.0);
        CHECK(b.calib.beta <= 1.5);
        CHECK(f.warnings.empty());
        CHECK(b.calib.gamma_res == structural_overhead(b, ch));

        // Held-out fidelity: the estimate tracks the simulator on unseen
        // configurations to within 10% relative error.
        for (double e : fidelity_errors(b, holdout, ch)) CHECK(e <= 0.10);
        CHECK(f.max_train_rel_err <= 0.10);
    }

    // The inter-bundle term measures the mean launch count over the 1..4
    // replication sweep, in units of the DRAM burst.
    CHECK(res.dnn.phi == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(res.dnn.lat_dm ==
          doctest::Approx(default_char_table().dram_overhead_cycles).epsilon(1e-9));
    CHECK(res.dnn.gamma_ctl == 1.0);
    CHECK(res.dnn.res_ctl == structural_res_ctl(ch));
}

TEST_CASE("calibrated estimates beat or match uncalibrated ones on holdout") {
    const Characterization ch(default_char_table(), TileShape{16, 16, 8});
    const auto bundles = enumerate_bundles(builtin_templates());
    const auto all = default_sample_configs();
    const CalibrationResult res = calibrate(bundles, split(all, 0), ch);

    double calibrated_worst = 0.0;
    double raw_worst = 0.0;
    for (std::size_t i = 0; i < res.bundles.size(); ++i) {
        for (double e : fidelity_errors(res.bundles[i], split(all, 1), ch)) {
            calibrated_worst = std::max(calibrated_worst, e);
        }
        for (double e : fidelity_errors(bundles[i], split(all, 1), ch)) {
            raw_worst = std::max(raw_worst, e);
        }
    }
    CHECK(calibrated_worst <= raw_worst);
}

TEST_CASE("calibration requires a minimally informative sample set") {
    const Characterization ch(default_char_table(), TileShape{16, 16, 8});
    const auto bundles = enumerate_bundles(builtin_templates());
    const auto all = default_sample_configs();
    CHECK_THROWS_AS(
        calibrate(bundles, std::vector<SampleConfig>(all.begin(), all.begin() + 3), ch),
        CalibrationError);
}

TEST_CASE("calibration JSON applies losslessly and rejects tampering") {
    const Characterization ch(default_char_table(), TileShape{16, 16, 8});
    const auto bundles = enumerate_bundles(builtin_templates());
    const CalibrationResult res = calibrate(bundles, split(default_sample_configs(), 0), ch);
    const std::string text = calibration_to_json(res);

    std::vector<Bundle> fresh = enumerate_bundles(builtin_templates());
    DnnCalibration dnn;
    apply_calibration_json(fresh, dnn, text);
    for (std::size_t i = 0; i < fresh.size(); ++i) {
        CHECK(fresh[i].calib.alpha == res.bundles[i].calib.alpha);
        CHECK(fresh[i].calib.beta == res.bundles[i].calib.beta);
        CHECK(fresh[i].calib.gamma_res == res.bundles[i].calib.gamma_res);
    }
    CHECK(dnn.phi == res.dnn.phi);
    CHECK(dnn.lat_dm == res.dnn.lat_dm);
    CHECK(dnn.res_ctl == res.dnn.res_ctl);

    auto j = nlohmann::json::parse(text);
    auto unknown_id = j;
    unknown_id["bundles"][0]["id"] = "zz99";
    std::vector<Bundle> v1 = enumerate_bundles(builtin_templates());
    CHECK_THROWS_AS(apply_calibration_json(v1, dnn, unknown_id.dump()), ConfigError);

    auto extra_key = j;
    extra_key["bundles"][0]["surprise"] = 1;
    std::vector<Bundle> v2 = enumerate_bundles(builtin_templates());
    CHECK_THROWS_AS(apply_calibration_json(v2, dnn, extra_key.dump()), ConfigError);
}
