#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rpmi/correlator.hpp"
#include "rpmi/errors.hpp"
#include "rpmi/interferometer.hpp"
#include "rpmi/pnseq.hpp"

using namespace rpmi;

namespace {

constexpr double kPi = std::numbers::pi;

InterferometerConfig config_for(int slots, int units, double n_photons = 1000.0) {
    InterferometerConfig cfg;
    cfg.n_photons = n_photons;
    cfg.slots = slots;
    cfg.phase_units = units;
    return cfg;
}

IntensityRecord record_with(const InterferometerConfig& cfg, const RowMatrix& values) {
    return IntensityRecord{.values = values, .config = cfg, .noise = {}, .period_index = 0};
}

}  // namespace

TEST_CASE("correlation of a single column is the plain product") {
    RowMatrix values(2, 1);
    values.at(0, 0) = 3.0;
    values.at(1, 0) = -2.0;
    const auto out = correlate(record_with(config_for(2, 1), values));
    CHECK(out.s_n == -6.0);
    CHECK_FALSE(out.residual.has_value());

    RowMatrix three(3, 1);
    three.at(0, 0) = 2.0;
    three.at(1, 0) = -3.0;
    three.at(2, 0) = 0.5;
    CHECK(correlate(record_with(config_for(3, 1), three)).s_n == -3.0);
}

TEST_CASE("correlation averages column products in declaration order") {
    RowMatrix values(2, 4);
    const double top[] = {1.0, 2.0, 3.0, 4.0};
    const double bot[] = {5.0, -6.0, 7.0, -8.0};
    for (int j = 0; j < 4; ++j) {
        values.at(0, j) = top[j];
        values.at(1, j) = bot[j];
    }
    // (5 - 12 + 21 - 32)/4 = -18/4
    CHECK(correlate(record_with(config_for(2, 4), values)).s_n == -4.5);

    RowMatrix tiny(1, 1);
    CHECK_THROWS_AS(correlate(record_with(config_for(2, 1), tiny)), std::invalid_argument);
}

TEST_CASE("fringe amplitude follows the slot-count power law") {
    CHECK(leading_amplitude(config_for(2, 4, 1000.0)) == 7812.5);  // 2*(1000/16)^2
    auto half = config_for(2, 4, 1000.0);
    half.photon_budget = 0.5;
    CHECK(leading_amplitude(half) == 2.0 * std::pow(500.0 / 16.0, 2.0));
    CHECK(expected_sn(0.3, config_for(2, 4, 1000.0)) ==
          doctest::Approx(6447.934491481862).epsilon(1e-14));
    CHECK(expected_sn(0.0, config_for(2, 4, 1000.0)) == 7812.5);
}

TEST_CASE("noiseless two-slot correlation lands on the closed form") {
    const auto cfg = config_for(2, 4, 1000.0);
    const auto set = build_phase_set(GeneratorPolynomial::primitive(2), 2);
    for (double theta : {0.0, 0.1, 0.3, 0.7, 1.2, kPi / 2}) {
        const auto rec =
            simulate_sampling_period(cfg, PhaseSignal::constant(theta), set, NoiseModel{});
        const auto out = correlate(rec, theta);
        CHECK(out.s_n == doctest::Approx(expected_sn(theta, cfg)).epsilon(1e-12));
        CHECK(out.leading_amplitude == 7812.5);
        REQUIRE(out.residual.has_value());
        CHECK(std::fabs(*out.residual) <= 1e-9 * out.leading_amplitude);
        CHECK(out.n_fold_angle ==
              doctest::Approx(std::acos(std::cos(2.0 * theta))).epsilon(1e-9));
    }
}

TEST_CASE("n-fold angle is NaN when the fringe amplitude vanishes") {
    auto cfg = config_for(2, 1);
    cfg.n_photons = 0.0;  // never passes validate(); exercises the raw branch
    RowMatrix values(2, 1);
    values.at(0, 0) = 1.0;
    values.at(1, 0) = 1.0;
    CHECK(std::isnan(correlate(record_with(cfg, values)).n_fold_angle));
}

TEST_CASE("subset-XOR-free designs cancel every cross term") {
    for (int slots = 2; slots <= 6; ++slots) {
        const int order = std::max(2, slots - 1);
        const auto set = build_phase_set(GeneratorPolynomial::primitive(order), slots);
        REQUIRE(set.design->subset_xor_free);
        for (int k = 0; k < 60; ++k) {
            const double theta = 0.01 + 0.1 * k;
            CHECK(std::fabs(normalized_residual(set, theta)) <= 1e-12);
            CHECK(normalized_correlation(set, theta) ==
                  doctest::Approx(std::cos(slots * theta)).epsilon(5e-11));
        }
    }
}

TEST_CASE("the padded ten-slot design leaves exactly one surviving term") {
    // Nine shifts of the order-8 generator are never subset-XOR free; the
    // padded selection leaves a single constant (angle-free) cross term of
    // unit normalized size on top of cos(N*theta).
    const auto set =
        build_phase_set_best_effort(GeneratorPolynomial::parse("1+x^2+x^3+x^4+x^8"), 10);
    REQUIRE_FALSE(set.design->subset_xor_free);
    for (int k = 0; k < 40; ++k) {
        const double theta = 0.001 + 0.0077 * k;
        CHECK(normalized_residual(set, theta) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("expansion oracle agrees with direct products on random sets") {
    std::mt19937_64 rng(321);
    int cases = 0;
    for (int slots = 2; slots <= 10; ++slots) {
        for (int rep = 0; rep < 12; ++rep) {
            const int units = 1 + static_cast<int>(rng() % 16);
            const auto set = random_phase_set(slots, units, rng());
            const double theta = 2.0 * kPi * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
            const double direct = normalized_correlation(set, theta);
            const double oracle = normalized_correlation_expansion(set, theta);
            const double scale = std::max({std::fabs(direct), std::fabs(oracle), 1.0});
            CHECK(std::fabs(direct - oracle) <= 1e-12 * scale);
            CHECK(std::isfinite(normalized_residual(set, theta)));
            ++cases;
        }
    }
    CHECK(cases == 108);
}

TEST_CASE("expansion oracle refuses slot counts past its term budget") {
    const auto set = random_phase_set(25, 2, 1);
    CHECK_THROWS_AS(normalized_correlation_expansion(set, 0.1), std::invalid_argument);
}

TEST_CASE("uniform random sets have zero-mean residual across sets") {
    const int kSets = 300;
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < kSets; ++s) {
        const double r = normalized_residual(random_phase_set(3, 16, 20000 + s), 0.37);
        sum += r;
        sumsq += r * r;
    }
    const double mean = sum / kSets;
    const double sd = std::sqrt((sumsq / kSets - mean * mean) * kSets / (kSets - 1.0));
    CHECK(std::fabs(mean) <= 3.0 * sd / std::sqrt(static_cast<double>(kSets)));
}

TEST_CASE("physical residual scales the normalized one by the amplitude") {
    const auto cfg = config_for(2, 4, 1000.0);
    const auto set = build_phase_set(GeneratorPolynomial::primitive(2), 2);
    CHECK(std::fabs(cross_term_residual(set, 0.4, cfg)) <= 1e-12 * leading_amplitude(cfg));

    const auto mismatched = build_phase_set(GeneratorPolynomial::primitive(2), 3);
    CHECK_THROWS_AS(cross_term_residual(mismatched, 0.4, cfg), std::invalid_argument);
}

TEST_CASE("theta estimation inverts the closed form on the principal branch") {
    for (int slots : {2, 3, 5}) {
        const auto cfg = config_for(slots, 8, 5000.0);
        for (int k = 1; k < 20; ++k) {
            const double theta = k * kPi / (20.0 * slots);
            CHECK(estimate_theta(expected_sn(theta, cfg), cfg) ==
                  doctest::Approx(theta).epsilon(1e-10));
        }
        const double amp = leading_amplitude(cfg);
        CHECK(estimate_theta(amp, cfg) == 0.0);
        CHECK(estimate_theta(-amp, cfg) == doctest::Approx(kPi / slots).epsilon(1e-15));
        CHECK(estimate_theta(0.0, cfg) == doctest::Approx(kPi / (2.0 * slots)).epsilon(1e-15));
    }
}

TEST_CASE("out-of-range correlations clamp inside tolerance and fail beyond") {
    const auto cfg = config_for(2, 4, 1000.0);
    const double amp = leading_amplitude(cfg);
    CHECK(estimate_theta(amp * (1.0 + 5e-10), cfg) == 0.0);  // clamps with a warning
    CHECK(estimate_theta(-amp * (1.0 + 5e-10), cfg) ==
          doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK_THROWS_AS(estimate_theta(amp * (1.0 + 1e-8), cfg), OutOfRangeError);
    CHECK_THROWS_AS(estimate_theta(-amp * (1.0 + 1e-8), cfg), OutOfRangeError);

    auto dead = cfg;
    dead.n_photons = 0.0;
    CHECK_THROWS_AS(estimate_theta(0.0, dead), std::invalid_argument);
}

TEST_CASE("propagated error matches a finite-difference probe mid-fringe") {
    const auto cfg = config_for(2, 4, 1000.0);
    const double theta = 0.39;  // N*theta near the steepest point
    const double s0 = expected_sn(theta, cfg);
    const double ds = leading_amplitude(cfg) * 1e-7;
    const double probe = std::fabs(estimate_theta(s0 - ds, cfg) - estimate_theta(s0, cfg));
    CHECK(error_propagation(ds, theta, cfg) == doctest::Approx(probe).epsilon(1e-3));
    CHECK(error_propagation(0.0, theta, cfg) == 0.0);
}

TEST_CASE("propagation refuses fringe turning points") {
    const auto cfg = config_for(2, 4, 1000.0);
    CHECK_THROWS_AS(error_propagation(1.0, 0.0, cfg), SingularOperatingPointError);
    CHECK_THROWS_AS(error_propagation(1.0, kPi / 2, cfg), SingularOperatingPointError);
    CHECK_THROWS_AS(error_propagation(1.0, 1e-12, cfg), SingularOperatingPointError);
    CHECK_NOTHROW(error_propagation(1.0, 0.3, cfg));
}

TEST_CASE("error budget reproduces the reference operating point") {
    auto cfg = config_for(10, 256, 1e6);
    const double dphi = 0.3 * kPi / 180.0;
    const auto budget = error_budget(cfg, dphi);
    CHECK(budget.shot_term == doctest::Approx(3.1622776601683794e-4).epsilon(1e-15));
    CHECK(budget.modulation_term * 180.0 / kPi ==
          doctest::Approx(0.7024922359499621).epsilon(1e-13));
    CHECK(budget.total == budget.shot_term + budget.modulation_term);

    const auto quiet = error_budget(cfg, 0.0);
    CHECK(quiet.modulation_term == 0.0);
    CHECK(quiet.total == quiet.shot_term);
    CHECK_THROWS_AS(error_budget(cfg, -0.1), std::invalid_argument);

    // Shot term drops with both slot count and photon number.
    CHECK(error_budget(config_for(10, 256, 1e6), 0.0).shot_term <
          error_budget(config_for(5, 256, 1e6), 0.0).shot_term);
    CHECK(error_budget(config_for(10, 256, 1e8), 0.0).shot_term <
          error_budget(config_for(10, 256, 1e6), 0.0).shot_term);
}
