#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "outsideview/errors.hpp"
#include "outsideview/normal.hpp"
#include "outsideview/refclass.hpp"

namespace outsideview {

// The forecaster's stated adverse scenario: either "shortfall of X with
// confidence C of doing better" or a direct SD claim, or both (consistently).
struct DownsideClaim {
    std::optional<double> shortfall_fraction;  // in [0,1)
    std::optional<double> confidence;          // in (0,1)
    std::optional<double> claimed_sd;          // fraction, >= 0
};

// Standard deviation the shortfall/confidence pair implies under a normal
// model centered on the forecast.
inline double implied_sd(const DownsideClaim& claim) {
    if (!claim.shortfall_fraction || !claim.confidence) {
        throw Error(ErrorCode::BadInput, "implied_sd needs both shortfall_fraction and confidence");
    }
    if (*claim.confidence <= 0.5) {
        throw Error(ErrorCode::DegenerateConfidence,
                    "confidence must exceed 0.5 for a positive normal quantile");
    }
    return *claim.shortfall_fraction / inverse_normal_cdf(*claim.confidence);
}

// Validates field ranges and, when both claim forms are present, that they
// agree under the normal model to 1e-3.
inline void validate_downside(const DownsideClaim& claim) {
    const bool pair_present = claim.shortfall_fraction.has_value() && claim.confidence.has_value();
    if (claim.shortfall_fraction.has_value() != claim.confidence.has_value()) {
        throw Error(ErrorCode::BadInput,
                    "shortfall_fraction and confidence must be given together");
    }
    if (!pair_present && !claim.claimed_sd) {
        throw Error(ErrorCode::BadInput,
                    "downside claim needs shortfall_fraction+confidence or claimed_sd");
    }
    if (claim.shortfall_fraction &&
        !(*claim.shortfall_fraction >= 0.0 && *claim.shortfall_fraction < 1.0)) {
        throw Error(ErrorCode::BadInput, "shortfall_fraction must be in [0,1)");
    }
    if (claim.confidence && !(*claim.confidence > 0.0 && *claim.confidence < 1.0)) {
        throw Error(ErrorCode::BadInput, "confidence must be in (0,1)");
    }
    if (claim.claimed_sd && !(*claim.claimed_sd >= 0.0)) {
        throw Error(ErrorCode::BadInput, "claimed_sd must be >= 0");
    }
    if (pair_present && claim.claimed_sd) {
        if (*claim.confidence <= 0.5) {
            throw Error(ErrorCode::DegenerateConfidence,
                        "confidence must exceed 0.5 for a positive normal quantile");
        }
        const double implied_shortfall = *claim.claimed_sd * inverse_normal_cdf(*claim.confidence);
        if (std::fabs(implied_shortfall - *claim.shortfall_fraction) > 1e-3) {
            throw Error(ErrorCode::InconsistentDownsideClaim,
                        "claimed_sd*z(confidence)=" + fmt_double(implied_shortfall) +
                            " disagrees with shortfall_fraction=" +
                            fmt_double(*claim.shortfall_fraction) + " beyond 1e-3");
        }
    }
}

// The SD the claim works out to: the direct claim when given, else implied.
inline double resolve_sd(const DownsideClaim& claim) {
    if (claim.claimed_sd) return *claim.claimed_sd;
    return implied_sd(claim);
}

// Probability of a shortfall of s or more under the forecaster's own normal
// model: 1 - Phi(s / sd). A zero-SD claim admits no shortfall at all.
inline double claimed_shortfall_probability(const DownsideClaim& claim, double s) {
    if (!(s >= 0.0)) throw Error(ErrorCode::OutOfDomain, "shortfall s must be >= 0");
    const double sd = resolve_sd(claim);
    if (s == 0.0) return 0.5;
    if (sd == 0.0) return 0.0;
    return normal_upper_tail(s / sd);
}

struct RampUpMetrics {
    double year1_level = 0.0;    // percent of forecast in year 1
    double total_rise_pp = 0.0;  // final minus first, percentage points
    double final_level = 0.0;
};

inline RampUpMetrics rampup_metrics(const std::vector<double>& profile) {
    if (profile.empty()) throw Error(ErrorCode::BadInput, "ramp-up profile is empty");
    return {profile.front(), profile.back() - profile.front(), profile.back()};
}

// The forecast under review, as the forecaster states it.
struct ForecastUnderReview {
    std::string name;
    std::string unit;
    double first_year_forecast = 0.0;             // > 0
    std::optional<double> later_year_forecast;    // > 0
    std::optional<int> later_year_index;          // >= 2
    DownsideClaim downside;
    std::vector<double> rampup_pct_of_forecast;   // per year from year 1; each in [0,200]
    std::string forecaster_id;                    // empty = not identified
    Funding funding = Funding::Unknown;
};

inline void validate_forecast(const ForecastUnderReview& fc) {
    if (!(fc.first_year_forecast > 0.0)) {
        throw Error(ErrorCode::BadInput, "first_year_forecast must be > 0");
    }
    if (fc.later_year_forecast && !(*fc.later_year_forecast > 0.0)) {
        throw Error(ErrorCode::BadInput, "later_year_forecast must be > 0");
    }
    if (fc.later_year_index && *fc.later_year_index < 2) {
        throw Error(ErrorCode::BadInput, "later_year_index must be >= 2");
    }
    for (double pct : fc.rampup_pct_of_forecast) {
        if (!(pct >= 0.0 && pct <= 200.0)) {
            throw Error(ErrorCode::BadInput, "ramp-up percentages must be in [0,200]");
        }
    }
    validate_downside(fc.downside);
}

inline ForecastUnderReview forecast_from_json(const nlohmann::json& j) {
    try {
        ForecastUnderReview fc;
        fc.name = j.value("name", std::string{});
        fc.unit = j.value("unit", std::string{});
        fc.first_year_forecast = j.at("first_year_forecast").get<double>();
        if (j.contains("later_year_forecast")) {
            fc.later_year_forecast = j["later_year_forecast"].get<double>();
        }
        if (j.contains("later_year_index")) {
            fc.later_year_index = j["later_year_index"].get<int>();
        }
        if (j.contains("downside")) {
            const auto& d = j["downside"];
            if (d.contains("shortfall_fraction")) {
                fc.downside.shortfall_fraction = d["shortfall_fraction"].get<double>();
            }
            if (d.contains("confidence")) fc.downside.confidence = d["confidence"].get<double>();
            if (d.contains("claimed_sd")) fc.downside.claimed_sd = d["claimed_sd"].get<double>();
        }
        if (j.contains("rampup_pct_of_forecast")) {
            fc.rampup_pct_of_forecast = j["rampup_pct_of_forecast"].get<std::vector<double>>();
        }
        fc.forecaster_id = j.value("forecaster_id", std::string{});
        fc.funding = funding_from_string(j.value("funding", std::string{"unknown"}));
        validate_forecast(fc);
        return fc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadInput, std::string("forecast JSON: ") + e.what());
    }
}

inline nlohmann::ordered_json forecast_to_json(const ForecastUnderReview& fc) {
    nlohmann::ordered_json j;
    j["name"] = fc.name;
    j["unit"] = fc.unit;
    j["first_year_forecast"] = fc.first_year_forecast;
    if (fc.later_year_forecast) j["later_year_forecast"] = *fc.later_year_forecast;
    if (fc.later_year_index) j["later_year_index"] = *fc.later_year_index;
    nlohmann::ordered_json d;
    if (fc.downside.shortfall_fraction) d["shortfall_fraction"] = *fc.downside.shortfall_fraction;
    if (fc.downside.confidence) d["confidence"] = *fc.downside.confidence;
    if (fc.downside.claimed_sd) d["claimed_sd"] = *fc.downside.claimed_sd;
    j["downside"] = std::move(d);
    if (!fc.rampup_pct_of_forecast.empty()) {
        j["rampup_pct_of_forecast"] = fc.rampup_pct_of_forecast;
    }
    if (!fc.forecaster_id.empty()) j["forecaster_id"] = fc.forecaster_id;
    j["funding"] = to_string(fc.funding);
    return j;
}

}  // namespace outsideview
