#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "rpmi/opll.hpp"

using namespace rpmi;

namespace {

OpllConfig reference_config() {
    OpllConfig cfg;
    cfg.noise_psd = 1e-16;
    cfg.loop_bandwidth = 1e4;
    cfg.transimpedance = 1e4;
    cfg.responsivity = 0.8;
    cfg.received_power = 1e-6;
    return cfg;
}

}  // namespace

TEST_CASE("detector gain is twice the transimpedance-responsivity-power product") {
    CHECK(detector_gain(reference_config()) == 0.016);
    auto doubled = reference_config();
    doubled.received_power *= 2.0;
    CHECK(detector_gain(doubled) == 0.032);
}

TEST_CASE("steady-state phase error follows the noise-to-gain square root") {
    // sqrt(1e-16 * 1e4) / 0.016 = 1e-6 / 0.016
    CHECK(residual_phase_error(reference_config()) == 6.25e-5);
}

TEST_CASE("phase error grows with noise and bandwidth, shrinks with gain") {
    const double base = residual_phase_error(reference_config());
    auto noisier = reference_config();
    noisier.noise_psd *= 4.0;
    CHECK(residual_phase_error(noisier) == doctest::Approx(2.0 * base).epsilon(1e-12));
    auto wider = reference_config();
    wider.loop_bandwidth *= 9.0;
    CHECK(residual_phase_error(wider) == doctest::Approx(3.0 * base).epsilon(1e-12));
    auto hotter = reference_config();
    hotter.received_power *= 10.0;
    CHECK(residual_phase_error(hotter) == doctest::Approx(base / 10.0).epsilon(1e-12));
}

TEST_CASE("validation rejects nonpositive parameters field by field") {
    CHECK_NOTHROW(reference_config().validate());
    auto expect_invalid = [](auto mutate) {
        auto cfg = reference_config();
        mutate(cfg);
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        CHECK_THROWS_AS(residual_phase_error(cfg), std::invalid_argument);
    };
    expect_invalid([](auto& c) { c.noise_psd = 0.0; });
    expect_invalid([](auto& c) { c.loop_bandwidth = -1.0; });
    expect_invalid([](auto& c) { c.transimpedance = 0.0; });
    expect_invalid([](auto& c) { c.responsivity = 0.0; });
    expect_invalid([](auto& c) { c.received_power = -1e-6; });
}

TEST_CASE("default operating point locks at three tenths of a degree") {
    const auto cfg = default_opll_config();
    CHECK_NOTHROW(cfg.validate());
    const double residual = residual_phase_error(cfg);
    CHECK(residual == 0.3 * std::numbers::pi / 180.0);
    CHECK(residual * 180.0 / std::numbers::pi == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(detector_gain(cfg) == 0.016);
    CHECK(cfg.loop_bandwidth == 1e4);
}
