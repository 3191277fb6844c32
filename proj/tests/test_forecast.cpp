#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "outsideview/forecast.hpp"
#include "outsideview/normal.hpp"

#include "helpers.hpp"

using namespace outsideview;
using testutil::thrown_code;

namespace {

DownsideClaim claim(double shortfall, double confidence) {
    DownsideClaim c;
    c.shortfall_fraction = shortfall;
    c.confidence = confidence;
    return c;
}

// Bisection on the CDF, independent of the closed-form inverse.
double oracle_z(double p) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("implied sd from a shortfall-at-confidence claim") {
    const double sd = implied_sd(claim(0.15, 0.95));
    REQUIRE_THAT(100.0 * sd, Catch::Matchers::WithinAbs(9.1194, 1e-3));
    REQUIRE_THAT(sd, Catch::Matchers::WithinAbs(0.15 / oracle_z(0.95), 1e-10));

    REQUIRE_THAT(100.0 * implied_sd(claim(0.20, 0.95)),
                 Catch::Matchers::WithinAbs(12.16, 5e-3));

    REQUIRE(thrown_code([] { implied_sd(claim(0.15, 0.5)); }) ==
            ErrorCode::DegenerateConfidence);
    REQUIRE(thrown_code([] { implied_sd(claim(0.15, 0.4)); }) ==
            ErrorCode::DegenerateConfidence);
    REQUIRE(thrown_code([] { implied_sd(DownsideClaim{}); }) == ErrorCode::BadInput);
}

TEST_CASE("implied sd matches the z oracle across claims", "[property]") {
    std::mt19937_64 rng(444);
    std::uniform_real_distribution<double> sfr(0.01, 0.9), conf(0.55, 0.999);
    for (int i = 0; i < 1000; ++i) {
        const double s = sfr(rng), c = conf(rng);
        REQUIRE_THAT(implied_sd(claim(s, c)),
                     Catch::Matchers::WithinAbs(s / oracle_z(c), 1e-9));
    }
}

TEST_CASE("claimed shortfall probability inverts the claim", "[property]") {
    // By construction: P(shortfall >= s) under the claimed normal is 1 - confidence.
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> sfr(0.01, 0.9), conf(0.55, 0.999);
    for (int i = 0; i < 1000; ++i) {
        const double s = sfr(rng), c = conf(rng);
        REQUIRE_THAT(claimed_shortfall_probability(claim(s, c), s),
                     Catch::Matchers::WithinAbs(1.0 - c, 1e-6));
    }

    REQUIRE(claimed_shortfall_probability(claim(0.15, 0.95), 0.0) == 0.5);
    DownsideClaim zero_sd;
    zero_sd.claimed_sd = 0.0;
    REQUIRE(claimed_shortfall_probability(zero_sd, 0.0) == 0.5);
    REQUIRE(claimed_shortfall_probability(zero_sd, 0.1) == 0.0);
}

TEST_CASE("downside claims validate ranges and cross-consistency") {
    REQUIRE(thrown_code([] { validate_downside(DownsideClaim{}); }) == ErrorCode::BadInput);

    DownsideClaim only_conf;
    only_conf.confidence = 0.9;
    REQUIRE(thrown_code([&] { validate_downside(only_conf); }) == ErrorCode::BadInput);

    REQUIRE(thrown_code([] { validate_downside(claim(1.0, 0.9)); }) == ErrorCode::BadInput);
    REQUIRE(thrown_code([] { validate_downside(claim(-0.1, 0.9)); }) == ErrorCode::BadInput);
    REQUIRE(thrown_code([] { validate_downside(claim(0.15, 1.0)); }) == ErrorCode::BadInput);

    DownsideClaim sd_only;
    sd_only.claimed_sd = 0.12;
    REQUIRE(thrown_code([&] { validate_downside(sd_only); }) == std::nullopt);
    sd_only.claimed_sd = -0.1;
    REQUIRE(thrown_code([&] { validate_downside(sd_only); }) == ErrorCode::BadInput);

    // Agreement is measured in shortfall space to 1e-3.
    DownsideClaim both = claim(0.15, 0.95);
    const double z95 = inverse_normal_cdf(0.95);
    both.claimed_sd = implied_sd(claim(0.15, 0.95)) + 0.0009 / z95;
    REQUIRE(thrown_code([&] { validate_downside(both); }) == std::nullopt);
    both.claimed_sd = implied_sd(claim(0.15, 0.95)) + 0.002 / z95;
    REQUIRE(thrown_code([&] { validate_downside(both); }) ==
            ErrorCode::InconsistentDownsideClaim);

    // An explicit sd wins over the implied one.
    DownsideClaim pref = claim(0.15, 0.95);
    pref.claimed_sd = 0.0915;
    REQUIRE(resolve_sd(pref) == 0.0915);
    REQUIRE(resolve_sd(claim(0.15, 0.95)) == implied_sd(claim(0.15, 0.95)));
}

TEST_CASE("ramp-up profile metrics") {
    RampUpMetrics m = rampup_metrics({60, 75, 85, 95, 100});
    REQUIRE(m.year1_level == 60.0);
    REQUIRE(m.total_rise_pp == 40.0);
    REQUIRE(m.final_level == 100.0);

    m = rampup_metrics({80});
    REQUIRE(m.year1_level == 80.0);
    REQUIRE(m.total_rise_pp == 0.0);
}

TEST_CASE("forecast json round trips and validates") {
    ForecastUnderReview fc = testutil::load_forecast_fixture();
    REQUIRE(fc.name == "A-Train");
    REQUIRE(fc.first_year_forecast == 14.1);
    REQUIRE(fc.later_year_forecast == 17.7);
    REQUIRE(fc.later_year_index == 10);
    REQUIRE(fc.downside.shortfall_fraction == 0.15);
    REQUIRE(fc.downside.confidence == 0.95);
    REQUIRE(fc.rampup_pct_of_forecast == std::vector<double>{60, 75, 85, 95, 100});
    REQUIRE(fc.forecaster_id == "F1");
    REQUIRE(fc.funding == Funding::Private);

    ForecastUnderReview back = forecast_from_json(forecast_to_json(fc));
    REQUIRE(back.name == fc.name);
    REQUIRE(back.first_year_forecast == fc.first_year_forecast);
    REQUIRE(back.later_year_forecast == fc.later_year_forecast);
    REQUIRE(back.downside.shortfall_fraction == fc.downside.shortfall_fraction);
    REQUIRE(back.downside.confidence == fc.downside.confidence);
    REQUIRE(back.rampup_pct_of_forecast == fc.rampup_pct_of_forecast);
    REQUIRE(back.forecaster_id == fc.forecaster_id);
    REQUIRE(back.funding == fc.funding);

    ForecastUnderReview bad = fc;
    bad.first_year_forecast = 0.0;
    REQUIRE(thrown_code([&] { validate_forecast(bad); }) == ErrorCode::BadInput);
    bad = fc;
    bad.rampup_pct_of_forecast = {60, 250};
    REQUIRE(thrown_code([&] { validate_forecast(bad); }) == ErrorCode::BadInput);
    bad = fc;
    bad.later_year_index = 1;
    REQUIRE(thrown_code([&] { validate_forecast(bad); }) == ErrorCode::BadInput);
}
