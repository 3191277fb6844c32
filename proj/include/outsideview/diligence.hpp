#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "outsideview/empirics.hpp"
#include "outsideview/errors.hpp"
#include "outsideview/forecast.hpp"
#include "outsideview/refclass.hpp"

namespace outsideview {

// Step 3a: the forecaster's variance claim against the benchmark.
struct VarianceComparison {
    double claimed_sd = 0.0;
    double benchmark_sd = 0.0;
    double claimed_q05_shortfall = 0.0;    // shortfall the claim puts at the 95% level
    double benchmark_q05_shortfall = 0.0;  // 1 - quantile(dist, 0.05)
    double claimed_p_shortfall_s = 0.0;    // P(shortfall >= s) under the claim
    double benchmark_p_shortfall_s = 0.0;  // same probability in the benchmark
    double s = 0.0;
    double risk_ratio = 0.0;  // benchmark_p / claimed_p; +inf when claimed_p is 0
    std::vector<std::string> warnings;
};

inline VarianceComparison compare_variance(const ForecastUnderReview& fc,
                                           const BenchmarkDistribution& dist, double s) {
    VarianceComparison cmp;
    cmp.s = s;
    cmp.claimed_sd = resolve_sd(fc.downside);
    cmp.benchmark_sd = dist.sd;
    cmp.claimed_q05_shortfall = cmp.claimed_sd * inverse_normal_cdf(0.95);
    cmp.benchmark_q05_shortfall = 1.0 - quantile(dist, 0.05);
    cmp.claimed_p_shortfall_s = claimed_shortfall_probability(fc.downside, s);
    auto bench = shortfall_probability_ex(dist, s);
    cmp.benchmark_p_shortfall_s = bench.p;
    if (bench.warning) cmp.warnings.push_back(*bench.warning);
    if (cmp.claimed_p_shortfall_s > 0.0) {
        cmp.risk_ratio = cmp.benchmark_p_shortfall_s / cmp.claimed_p_shortfall_s;
    } else {
        cmp.risk_ratio = std::numeric_limits<double>::infinity();
        cmp.warnings.push_back("claimed shortfall probability is 0; risk ratio unbounded");
    }
    return cmp;
}

// Step 3b: claimed ramp-up profile against the class's realized profiles.
struct RampUpYearRow {
    int year = 0;
    double claimed_pct = 0.0;
    double benchmark_pct = 0.0;
    double overestimate_pct = 0.0;  // 100*(claimed/benchmark - 1)
};

struct RampUpComparison {
    std::vector<RampUpYearRow> per_year;  // overlapping years, ascending
    double year1_overestimate_pct = 0.0;
    std::optional<double> rise_ratio;  // absent when the benchmark rise is 0
    int benchmark_n = 0;               // projects contributing observations
    std::vector<std::string> warnings;
};

inline RampUpComparison compare_rampup(const ForecastUnderReview& fc, const ReferenceClass& cls) {
    if (fc.rampup_pct_of_forecast.empty()) {
        throw Error(ErrorCode::NoRampUpData, "forecast has no ramp-up profile");
    }
    if (cls.rampups.empty()) {
        throw Error(ErrorCode::NoRampUpData, "reference class has no ramp-up observations");
    }
    // Benchmark level per year: mean across the projects reporting that year.
    std::map<int, std::pair<double, int>> sums;  // year -> (sum, count)
    std::set<std::string> projects;
    for (const auto& ob : cls.rampups) {
        auto& [sum, count] = sums[ob.year_index];
        sum += ob.actual_pct_of_forecast;
        ++count;
        projects.insert(ob.project_id);
    }

    RampUpComparison cmp;
    cmp.benchmark_n = static_cast<int>(projects.size());
    const int claimed_years = static_cast<int>(fc.rampup_pct_of_forecast.size());
    for (const auto& [year, sc] : sums) {
        if (year > claimed_years) continue;
        RampUpYearRow row;
        row.year = year;
        row.claimed_pct = fc.rampup_pct_of_forecast[static_cast<std::size_t>(year - 1)];
        row.benchmark_pct = sc.first / sc.second;
        row.overestimate_pct = row.benchmark_pct > 0.0
                                   ? 100.0 * (row.claimed_pct / row.benchmark_pct - 1.0)
                                   : std::numeric_limits<double>::infinity();
        cmp.per_year.push_back(row);
    }
    if (cmp.per_year.empty()) {
        throw Error(ErrorCode::NoRampUpData, "no overlapping ramp-up years to compare");
    }

    const auto& first = cmp.per_year.front();
    cmp.year1_overestimate_pct = first.overestimate_pct;
    if (first.year != 1) {
        cmp.warnings.push_back("benchmark has no year-1 observations; year " +
                               std::to_string(first.year) + " used for the level comparison");
    }
    const auto& last = cmp.per_year.back();
    const double claimed_rise = last.claimed_pct - first.claimed_pct;
    const double benchmark_rise = last.benchmark_pct - first.benchmark_pct;
    if (benchmark_rise == 0.0) {
        cmp.warnings.push_back(
            "benchmark profile is flat over years " + std::to_string(first.year) + "-" +
            std::to_string(last.year) + "; rise ratio undefined");
    } else {
        cmp.rise_ratio = claimed_rise / benchmark_rise;
    }
    return cmp;
}

// Step 4: what happened the last time this forecaster made such claims.
struct TrackRecordFinding {
    std::string forecaster_id;
    int n_found = 0;
    std::optional<double> mean_first_year_overestimate_pct;  // present iff n_found > 0
    std::optional<double> mean_later_year_overestimate_pct;  // needs later-year ramp data
    std::optional<std::pair<int, int>> later_year_range;     // year indices averaged over
    std::optional<double> ratio_to_benchmark;                // vs the benchmark mean overestimate
    std::string narrative;
};

// Audits the forecaster's own completed projects inside the class. First-year
// overestimates come from the record ratios; later-year ones from each
// project's latest ramp-up year >= 2, mirroring how track records cite the
// latest available assessment year.
inline TrackRecordFinding track_record(const ReferenceClass& cls, const std::string& forecaster_id,
                                       const BenchmarkDistribution& dist) {
    TrackRecordFinding finding;
    finding.forecaster_id = forecaster_id;
    std::vector<const ProjectRecord*> own;
    for (const auto& r : cls.records) {
        if (!forecaster_id.empty() && r.forecaster_id == forecaster_id) own.push_back(&r);
    }
    finding.n_found = static_cast<int>(own.size());
    if (own.empty()) {
        finding.narrative = "no documented track record for forecaster '" + forecaster_id + "'";
        return finding;
    }

    double sum_first = 0.0;
    for (const auto* r : own) sum_first += overestimate_from_accuracy(accuracy(*r));
    finding.mean_first_year_overestimate_pct = sum_first / static_cast<double>(own.size());

    // Later years: latest ramp-up observation per project, year >= 2.
    double sum_later = 0.0;
    int n_later = 0;
    int year_lo = std::numeric_limits<int>::max(), year_hi = 0;
    for (const auto* r : own) {
        const RampUpObservation* latest = nullptr;
        for (const auto& ob : cls.rampups) {
            if (ob.project_id != r->project_id || ob.year_index < 2) continue;
            if (!latest || ob.year_index > latest->year_index) latest = &ob;
        }
        if (latest && latest->actual_pct_of_forecast > 0.0) {
            sum_later += 100.0 * (100.0 / latest->actual_pct_of_forecast - 1.0);
            ++n_later;
            year_lo = std::min(year_lo, latest->year_index);
            year_hi = std::max(year_hi, latest->year_index);
        }
    }
    if (n_later > 0) {
        finding.mean_later_year_overestimate_pct = sum_later / n_later;
        finding.later_year_range = {year_lo, year_hi};
    }

    const double benchmark_overestimate = overestimate_from_accuracy(dist.mean);
    if (benchmark_overestimate != 0.0) {
        finding.ratio_to_benchmark = *finding.mean_first_year_overestimate_pct / benchmark_overestimate;
    } else {
        finding.ratio_to_benchmark =
            *finding.mean_first_year_overestimate_pct == 0.0
                ? 0.0
                : std::numeric_limits<double>::infinity();
    }
    finding.narrative = "found " + std::to_string(finding.n_found) +
                        " completed project(s) by this forecaster in the reference class";
    return finding;
}

// Step 5: the operator-curated register of case-specific risks.
enum class RiskDirection { IncreasesRisk, DecreasesRisk };
enum class RiskWeight { Low, Medium, High };

inline RiskDirection risk_direction_from_string(const std::string& s) {
    if (s == "increases_risk") return RiskDirection::IncreasesRisk;
    if (s == "decreases_risk") return RiskDirection::DecreasesRisk;
    throw Error(ErrorCode::BadInput, "risk direction must be increases_risk or decreases_risk");
}

inline const char* to_string(RiskDirection d) {
    return d == RiskDirection::IncreasesRisk ? "increases_risk" : "decreases_risk";
}

inline RiskWeight risk_weight_from_string(const std::string& s) {
    if (s == "low") return RiskWeight::Low;
    if (s == "medium") return RiskWeight::Medium;
    if (s == "high") return RiskWeight::High;
    throw Error(ErrorCode::BadInput, "risk weight must be low|medium|high");
}

inline const char* to_string(RiskWeight w) {
    switch (w) {
        case RiskWeight::Low: return "low";
        case RiskWeight::Medium: return "medium";
        case RiskWeight::High: return "high";
    }
    return "low";
}

struct RiskRegisterEntry {
    std::string id;
    std::string description;
    RiskDirection direction = RiskDirection::IncreasesRisk;
    RiskWeight weight = RiskWeight::Low;
    std::string evidence;
};

enum class NetRiskDirection { IncreasesRisk, Neutral, DecreasesRisk };

inline const char* to_string(NetRiskDirection d) {
    switch (d) {
        case NetRiskDirection::IncreasesRisk: return "increases_risk";
        case NetRiskDirection::Neutral: return "neutral";
        case NetRiskDirection::DecreasesRisk: return "decreases_risk";
    }
    return "neutral";
}

struct RiskAssessment {
    int n_entries = 0;
    int high_count = 0;        // high-weight entries, either direction
    int increasing_high = 0;
    int decreasing_high = 0;
    int increasing_total = 0;
    int decreasing_total = 0;
    NetRiskDirection net = NetRiskDirection::Neutral;
    std::string narrative;
};

// Net direction is decided by the high-weight entries alone; the rest inform
// the narrative but carry no verdict weight.
inline RiskAssessment assess_risk_register(const std::vector<RiskRegisterEntry>& entries) {
    RiskAssessment a;
    a.n_entries = static_cast<int>(entries.size());
    for (const auto& e : entries) {
        const bool up = e.direction == RiskDirection::IncreasesRisk;
        (up ? a.increasing_total : a.decreasing_total) += 1;
        if (e.weight == RiskWeight::High) {
            a.high_count += 1;
            (up ? a.increasing_high : a.decreasing_high) += 1;
        }
    }
    if (a.increasing_high > a.decreasing_high) {
        a.net = NetRiskDirection::IncreasesRisk;
    } else if (a.decreasing_high > a.increasing_high) {
        a.net = NetRiskDirection::DecreasesRisk;
    } else {
        a.net = NetRiskDirection::Neutral;
    }
    a.narrative = std::to_string(a.n_entries) + " register entries (" +
                  std::to_string(a.increasing_total) + " increasing risk, " +
                  std::to_string(a.decreasing_total) + " decreasing, " +
                  std::to_string(a.high_count) + " high weight); net direction: " +
                  to_string(a.net);
    return a;
}

// Step 6: expected outcome and confidence intervals read off the benchmark.
struct OutcomeRow {
    double level = 0.0;
    Interval accuracy;  // benchmark quantile pair at (1±level)/2
    Interval value;     // accuracy bounds times the forecast
};

struct OutcomeTable {
    double expected_accuracy = 0.0;
    double expected_value = 0.0;  // forecast units
    std::vector<OutcomeRow> rows;
    std::vector<std::string> warnings;
};

inline OutcomeTable expected_outcome(const ForecastUnderReview& fc,
                                     const BenchmarkDistribution& dist,
                                     const std::vector<double>& levels) {
    OutcomeTable table;
    table.expected_accuracy = dist.mean;
    table.expected_value = fc.first_year_forecast * dist.mean;
    for (double level : levels) {
        if (!(level > 0.0 && level < 1.0)) {
            throw Error(ErrorCode::BadInput, "confidence level must be in (0,1)");
        }
        OutcomeRow row;
        row.level = level;
        row.accuracy.level = level;
        row.accuracy.lower = quantile(dist, (1.0 - level) / 2.0);
        row.accuracy.upper = quantile(dist, (1.0 + level) / 2.0);
        row.value.level = level;
        row.value.lower = fc.first_year_forecast * row.accuracy.lower;
        row.value.upper = fc.first_year_forecast * row.accuracy.upper;
        table.rows.push_back(row);
    }
    return table;
}

// Step 7: subgroup spreads, e.g. private vs public funding.
struct SubgroupFinding {
    std::string attribute;  // "funding" or "category"
    std::string key;
    int n = 0;
    double mean_accuracy = 0.0;
    // Both aggregation views: the mean of per-record overestimates and the
    // overestimate of the mean accuracy. They differ; the report shows both.
    std::optional<double> mean_overestimate_pct;      // absent if a record has accuracy 0
    std::optional<double> overestimate_of_mean_pct;   // absent if the mean is 0
};

struct SubgroupAnalysis {
    std::string attribute;
    std::vector<SubgroupFinding> groups;
    std::optional<double> weighted_mean;  // record-weighted mean over reported groups
    double overall_mean = 0.0;
    std::vector<std::string> warnings;
};

enum class SubgroupAttribute { Funding, Category };

// Groups records by funding or category and compares accuracy per group.
// Unknown-funding records participate in overall statistics but not in the
// funding split, so the reconciliation is reported against the labeled total.
inline SubgroupAnalysis subgroup_analysis(const ReferenceClass& cls, SubgroupAttribute attribute,
                                          const BenchmarkDistribution& dist_overall) {
    SubgroupAnalysis out;
    out.attribute = attribute == SubgroupAttribute::Funding ? "funding" : "category";
    out.overall_mean = dist_overall.mean;

    std::map<std::string, std::vector<double>> buckets;
    for (const auto& r : cls.records) {
        if (attribute == SubgroupAttribute::Funding) {
            if (r.funding == Funding::Unknown) continue;
            buckets[to_string(r.funding)].push_back(accuracy(r));
        } else {
            buckets[r.category.empty() ? "(uncategorized)" : r.category].push_back(accuracy(r));
        }
    }
    if (buckets.empty()) {
        out.warnings.push_back("no labeled records for attribute '" + out.attribute + "'");
        return out;
    }

    double weighted_sum = 0.0;
    int weighted_n = 0;
    for (auto& [key, acc] : buckets) {
        SubgroupFinding g;
        g.attribute = out.attribute;
        g.key = key;
        g.n = static_cast<int>(acc.size());
        g.mean_accuracy = mean_of(acc);
        bool has_zero = false;
        double over_sum = 0.0;
        for (double a : acc) {
            if (a > 0.0) {
                over_sum += overestimate_from_accuracy(a);
            } else {
                has_zero = true;
            }
        }
        if (!has_zero) {
            g.mean_overestimate_pct = over_sum / static_cast<double>(acc.size());
        } else {
            out.warnings.push_back("subgroup '" + key +
                                   "' has zero-accuracy records; per-record overestimate mean omitted");
        }
        if (g.mean_accuracy > 0.0) {
            g.overestimate_of_mean_pct = overestimate_from_accuracy(g.mean_accuracy);
        }
        weighted_sum += g.mean_accuracy * g.n;
        weighted_n += g.n;
        out.groups.push_back(std::move(g));
    }
    if (weighted_n > 0) out.weighted_mean = weighted_sum / weighted_n;
    return out;
}

// Step 7: the forecaster's reply to the draft findings.
struct ForecasterResponse {
    std::string narrative;
    bool claims_contradicted = false;  // operator's judgment after review
};

inline ForecasterResponse response_from_json(const nlohmann::json& j) {
    try {
        ForecasterResponse r;
        r.narrative = j.value("narrative", std::string{});
        r.claims_contradicted = j.value("claims_contradicted", false);
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadInput, std::string("forecaster response JSON: ") + e.what());
    }
}

inline std::vector<RiskRegisterEntry> risk_register_from_json(const nlohmann::json& j) {
    try {
        std::vector<RiskRegisterEntry> entries;
        for (const auto& item : j) {
            RiskRegisterEntry e;
            e.id = item.at("id").get<std::string>();
            e.description = item.value("description", std::string{});
            e.direction = risk_direction_from_string(item.at("direction").get<std::string>());
            e.weight = risk_weight_from_string(item.at("weight").get<std::string>());
            e.evidence = item.value("evidence", std::string{});
            entries.push_back(std::move(e));
        }
        return entries;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadInput, std::string("risk register JSON: ") + e.what());
    }
}

// Step 8: red flags and the verdict rubric.
struct RedFlag {
    std::string code;  // RF1..RF7
    bool triggered = false;
    std::string detail;
};

enum class Verdict { NoMaterialBiasDetected, OverestimateLikely, OverestimateHighlyLikely };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::NoMaterialBiasDetected: return "NO_MATERIAL_BIAS_DETECTED";
        case Verdict::OverestimateLikely: return "OVERESTIMATE_LIKELY";
        case Verdict::OverestimateHighlyLikely: return "OVERESTIMATE_HIGHLY_LIKELY";
    }
    return "NO_MATERIAL_BIAS_DETECTED";
}

struct Conclusion {
    Verdict verdict = Verdict::NoMaterialBiasDetected;
    std::vector<RedFlag> flags;
    std::string summary;
};

namespace detail {

inline std::string fmt1(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

inline std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace detail

// Applies the red-flag rubric to whatever findings exist. The benchmark and
// the variance comparison are the core evidence; everything else degrades to
// an untriggered flag whose detail says the step was not assessed.
//   RF1  benchmark mean overestimate > 25%
//   RF2  claimed SD < half the benchmark SD
//   RF3  ramp-up year-1 overestimate > 20% or rise ratio > 2
//   RF4  track record absent, none found, or worse than benchmark (ratio > 1)
//   RF5  the subgroup matching the forecast's funding is worse than overall
//   RF6  risk register nets to increases_risk
//   RF7  forecaster claims contradicted by the data (operator-asserted)
// Verdict: >= 4 flags or (RF2 and RF4) -> OVERESTIMATE_HIGHLY_LIKELY;
//          2-3 flags -> OVERESTIMATE_LIKELY; else NO_MATERIAL_BIAS_DETECTED.
inline Conclusion conclude(const std::optional<BenchmarkDistribution>& dist,
                           const std::optional<VarianceComparison>& variance,
                           const std::optional<RampUpComparison>& rampup,
                           const std::optional<TrackRecordFinding>& track,
                           const std::optional<RiskAssessment>& risks,
                           const std::optional<SubgroupAnalysis>& funding_groups,
                           const std::optional<ForecasterResponse>& response,
                           Funding forecast_funding, Direction direction) {
    if (!dist) {
        throw Error(ErrorCode::MissingCoreFindings, "no benchmark distribution to conclude from");
    }
    if (!variance) {
        throw Error(ErrorCode::MissingCoreFindings, "no variance comparison to conclude from");
    }

    Conclusion con;
    auto add = [&](const char* code, bool triggered, std::string detail) {
        con.flags.push_back({code, triggered, std::move(detail)});
    };

    // RF1: average practice in the class is itself heavily biased.
    {
        double over = -100.0;
        bool ok = dist->mean > 0.0;
        if (ok) over = overestimate_from_accuracy(dist->mean);
        const bool trig = ok && over > 25.0;
        add("RF1", trig,
            ok ? "benchmark mean accuracy " + detail::fmt2(dist->mean) + " = mean overestimate " +
                     detail::fmt1(over) + "% (threshold 25%)"
               : "benchmark mean accuracy is 0; overestimate unbounded");
    }
    // RF2: the claimed variance is far tighter than the class's.
    {
        const bool trig = variance->claimed_sd < variance->benchmark_sd / 2.0;
        add("RF2", trig,
            "claimed SD " + detail::fmt1(variance->claimed_sd * 100.0) + "% vs benchmark SD " +
                detail::fmt1(variance->benchmark_sd * 100.0) + "% (threshold: half)");
    }
    // RF3: the claimed ramp-up outruns anything the class achieved.
    if (rampup) {
        const bool by_level = rampup->year1_overestimate_pct > 20.0;
        const bool by_rise = rampup->rise_ratio && *rampup->rise_ratio > 2.0;
        std::string detail = "year-1 overestimate " + detail::fmt1(rampup->year1_overestimate_pct) +
                             "% (threshold 20%)";
        if (rampup->rise_ratio) {
            detail += ", rise ratio " + detail::fmt2(*rampup->rise_ratio) + " (threshold 2)";
        } else {
            detail += ", rise ratio undefined (flat benchmark)";
        }
        add("RF3", by_level || by_rise, std::move(detail));
    } else {
        add("RF3", false, "not assessed: no ramp-up comparison available");
    }
    // RF4: the forecaster's own history argues against the forecast.
    if (!track) {
        add("RF4", true, "no track record provided or assessable; treated as adverse evidence");
    } else if (track->n_found == 0) {
        add("RF4", true, "no documented track record for forecaster '" + track->forecaster_id + "'");
    } else {
        const bool worse = track->ratio_to_benchmark && *track->ratio_to_benchmark > 1.0;
        std::string detail =
            "mean first-year overestimate " + detail::fmt1(*track->mean_first_year_overestimate_pct) +
            "%";
        if (track->ratio_to_benchmark) {
            detail += ", " + detail::fmt2(*track->ratio_to_benchmark) + "x the benchmark";
        }
        add("RF4", worse, std::move(detail));
    }
    // RF5: the slice of the class this forecast belongs to does worse still.
    {
        bool trig = false;
        std::string detail;
        if (forecast_funding == Funding::Unknown) {
            detail = "not assessed: forecast funding is unknown";
        } else if (!funding_groups) {
            detail = "not assessed: no funding subgroup comparison available";
        } else {
            const std::string key = to_string(forecast_funding);
            detail = "not assessed: class has no records with funding '" + key + "'";
            for (const auto& g : funding_groups->groups) {
                if (g.key != key) continue;
                trig = direction == Direction::BenefitLike
                           ? g.mean_accuracy < funding_groups->overall_mean
                           : g.mean_accuracy > funding_groups->overall_mean;
                detail = key + " subgroup mean accuracy " + detail::fmt2(g.mean_accuracy) +
                         " vs overall " + detail::fmt2(funding_groups->overall_mean);
                break;
            }
        }
        add("RF5", trig, std::move(detail));
    }
    // RF6: the case-specific risks point the same way.
    if (risks) {
        add("RF6", risks->net == NetRiskDirection::IncreasesRisk, risks->narrative);
    } else {
        add("RF6", false, "not assessed: no risk register supplied");
    }
    // RF7: the forecaster's rebuttal did not survive contact with the data.
    if (response) {
        add("RF7", response->claims_contradicted,
            response->claims_contradicted ? "forecaster claims contradicted by the class data"
                                          : "forecaster response consistent with the data");
    } else {
        add("RF7", false, "not assessed: no forecaster response recorded");
    }

    int triggered = 0;
    bool rf2 = false, rf4 = false;
    for (const auto& f : con.flags) {
        if (!f.triggered) continue;
        ++triggered;
        if (f.code == "RF2") rf2 = true;
        if (f.code == "RF4") rf4 = true;
    }
    if (triggered >= 4 || (rf2 && rf4)) {
        con.verdict = Verdict::OverestimateHighlyLikely;
    } else if (triggered >= 2) {
        con.verdict = Verdict::OverestimateLikely;
    } else {
        con.verdict = Verdict::NoMaterialBiasDetected;
    }
    con.summary = std::to_string(triggered) + " of " + std::to_string(con.flags.size()) +
                  " red flags triggered; verdict " + to_string(con.verdict);
    return con;
}

// --- the eight-step orchestration --------------------------------------------

struct DiligenceOptions {
    std::vector<double> levels = {0.5, 0.8, 0.9};
    double shortfall_s = 0.15;
    OutlierPolicy outlier_policy = OutlierPolicy::Manual;
    std::uint64_t seed = 42;
    int bootstrap_resamples = 2000;
    // Pessimistic mode bases the expected outcome on the conditional mean over
    // overestimated projects instead of the class mean.
    bool pessimistic = false;
};

struct DiligenceInputs {
    std::optional<ReferenceClass> cls;             // raw records, when available
    std::optional<BenchmarkDistribution> summary;  // published summary, when given
    std::vector<RiskRegisterEntry> risks;
    bool risks_supplied = false;
    std::optional<ForecasterResponse> response;
};

// One section of the report: either assessed content or the reason it is not.
struct SectionStatus {
    bool assessed = false;
    std::string reason;  // set when not assessed

    static SectionStatus ok() { return {true, {}}; }
    static SectionStatus skipped(std::string why) { return {false, std::move(why)}; }
};

struct DueDiligenceReport {
    // step 1: identification
    ForecastUnderReview forecast;
    std::string provenance;

    // step 2: benchmark
    BenchmarkDistribution benchmark;               // drives steps 3a, 4, 6
    std::optional<BenchmarkDistribution> records_dist;  // class recomputation, when both given
    std::optional<Interval> mean_ci, median_ci;
    SectionStatus bootstrap_status;

    // step 3: variance and ramp-up
    std::optional<VarianceComparison> variance;
    SectionStatus variance_status;
    std::optional<RampUpComparison> rampup;
    SectionStatus rampup_status;

    // step 4: track record
    std::optional<TrackRecordFinding> track;
    SectionStatus track_status;

    // step 5: risks
    std::vector<RiskRegisterEntry> risks;
    std::optional<RiskAssessment> risk_assessment;
    SectionStatus risk_status;

    // step 6: expected outcome
    std::optional<OutcomeTable> outcome;
    SectionStatus outcome_status;
    std::optional<ConditionalMean> conditional;  // pessimistic-mode basis, when available

    // step 7: subgroups and forecaster response
    std::optional<SubgroupAnalysis> funding_subgroups;
    std::optional<SubgroupAnalysis> category_subgroups;
    SectionStatus subgroup_status;
    std::optional<ForecasterResponse> response;

    // step 8: conclusion
    Conclusion conclusion;

    DiligenceOptions options;
};

// Runs steps 1-8 in order. Every step that cannot run records why and the
// report still concludes, except when the core findings (benchmark, variance)
// cannot be established at all.
inline DueDiligenceReport run_due_diligence(const ForecastUnderReview& fc,
                                            const DiligenceInputs& in,
                                            const DiligenceOptions& opt) {
    validate_forecast(fc);
    for (double level : opt.levels) {
        if (!(level > 0.0 && level < 1.0)) {
            throw Error(ErrorCode::BadInput, "confidence levels must be in (0,1)");
        }
    }
    if (!(opt.shortfall_s >= 0.0 && opt.shortfall_s <= 1.0)) {
        throw Error(ErrorCode::BadInput, "shortfall s must be in [0,1]");
    }
    if (!in.cls && !in.summary) {
        throw Error(ErrorCode::MissingCoreFindings, "no reference class and no benchmark summary");
    }

    DueDiligenceReport rep;
    rep.forecast = fc;
    rep.options = opt;

    // Step 2: benchmark. A supplied summary is authoritative for the claim
    // comparisons; raw records power everything that needs samples. A class
    // that cannot be summarized is fatal only when it is the sole benchmark.
    std::optional<ReferenceClass> working;
    if (in.cls) {
        try {
            working = flag_outliers(*in.cls, opt.outlier_policy);
            rep.records_dist = summarize(*working, /*exclude_outliers=*/true);
        } catch (const Error&) {
            if (!in.summary) throw;
            working.reset();
        }
    }
    if (in.summary) {
        rep.benchmark = *in.summary;
    } else {
        rep.benchmark = *rep.records_dist;
    }
    {
        std::string src = in.summary ? "published summary" : "reference-class records";
        rep.provenance = "benchmark: " + src;
        if (working) {
            rep.provenance += "; class of " + std::to_string(working->records.size()) +
                              " records, " + std::to_string(working->rampups.size()) +
                              " ramp-up observations";
        }
    }

    // Benchmark uncertainty (bootstrap) needs raw samples.
    if (rep.records_dist && rep.records_dist->n >= 5) {
        rep.mean_ci = bootstrap_ci(*rep.records_dist, BootstrapStatistic::mean(), 0.95,
                                   opt.bootstrap_resamples, opt.seed);
        rep.median_ci = bootstrap_ci(*rep.records_dist, BootstrapStatistic::median(), 0.95,
                                     opt.bootstrap_resamples, opt.seed);
        rep.bootstrap_status = SectionStatus::ok();
    } else if (rep.records_dist) {
        rep.bootstrap_status = SectionStatus::skipped("too few records for bootstrap (n < 5)");
    } else {
        rep.bootstrap_status = SectionStatus::skipped("summary-only benchmark: no raw samples");
    }

    // Step 3a: variance. Core: failure here leaves nothing to conclude on.
    try {
        rep.variance = compare_variance(fc, rep.benchmark, opt.shortfall_s);
        rep.variance_status = SectionStatus::ok();
    } catch (const Error& e) {
        rep.variance_status = SectionStatus::skipped(e.what());
    }

    // Step 3b: ramp-up.
    if (fc.rampup_pct_of_forecast.empty()) {
        rep.rampup_status = SectionStatus::skipped("forecast states no ramp-up profile");
    } else if (!working || working->rampups.empty()) {
        rep.rampup_status = SectionStatus::skipped("reference class has no ramp-up observations");
    } else {
        try {
            rep.rampup = compare_rampup(fc, *working);
            rep.rampup_status = SectionStatus::ok();
        } catch (const Error& e) {
            rep.rampup_status = SectionStatus::skipped(e.what());
        }
    }

    // Step 4: track record.
    if (fc.forecaster_id.empty()) {
        rep.track_status = SectionStatus::skipped("forecast does not identify the forecaster");
    } else if (!working) {
        rep.track_status = SectionStatus::skipped("no record-level data to audit against");
    } else {
        try {
            rep.track = track_record(*working, fc.forecaster_id, rep.benchmark);
            rep.track_status = SectionStatus::ok();
        } catch (const Error& e) {
            rep.track_status = SectionStatus::skipped(e.what());
        }
    }

    // Step 5: risk register.
    rep.risks = in.risks;
    if (in.risks_supplied) {
        rep.risk_assessment = assess_risk_register(in.risks);
        rep.risk_status = SectionStatus::ok();
    } else {
        rep.risk_status = SectionStatus::skipped("no risk register supplied");
    }

    // Step 6: expected outcome.
    try {
        rep.outcome = expected_outcome(fc, rep.benchmark, opt.levels);
        if (rep.records_dist) {
            try {
                rep.conditional = conditional_mean_overestimated(*rep.records_dist);
            } catch (const Error&) {
                // no overestimated samples: pessimistic basis simply unavailable
            }
        }
        if (opt.pessimistic) {
            if (rep.conditional) {
                rep.outcome->expected_accuracy = rep.conditional->mean;
                rep.outcome->expected_value = fc.first_year_forecast * rep.conditional->mean;
                rep.outcome->warnings.push_back(
                    "pessimistic mode: expected outcome uses the conditional mean over "
                    "overestimated projects");
            } else {
                rep.outcome->warnings.push_back(
                    "pessimistic mode requested but no conditional mean available; "
                    "class mean used");
            }
        }
        rep.outcome_status = SectionStatus::ok();
    } catch (const Error& e) {
        rep.outcome_status = SectionStatus::skipped(e.what());
    }

    // Step 7: subgroups plus the forecaster's response.
    if (working) {
        rep.funding_subgroups =
            subgroup_analysis(*working, SubgroupAttribute::Funding, rep.benchmark);
        std::set<std::string> categories;
        for (const auto& r : working->records) categories.insert(r.category);
        if (categories.size() > 1) {
            rep.category_subgroups =
                subgroup_analysis(*working, SubgroupAttribute::Category, rep.benchmark);
        }
        rep.subgroup_status = SectionStatus::ok();
    } else {
        rep.subgroup_status = SectionStatus::skipped("no record-level data for subgroups");
    }
    rep.response = in.response;

    // Step 8: conclusion.
    rep.conclusion = conclude(rep.benchmark, rep.variance, rep.rampup, rep.track,
                              rep.risk_assessment, rep.funding_subgroups, rep.response,
                              fc.funding, rep.benchmark.direction);
    return rep;
}

}  // namespace outsideview
