#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "outsideview/diligence.hpp"
#include "outsideview/empirics.hpp"

namespace outsideview {

// Display rules, applied uniformly: accuracy ratios and other ratios at 2
// decimals, percents whole, SDs-as-percent at 1 decimal, unit values at 1
// decimal. JSON carries full precision beside each display string; Markdown
// prints only the display strings, so the two can never disagree.
namespace display {

inline std::string fixed(double v, int dp) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", dp, v);
    return buf;
}

inline std::string ratio2(double v) { return fixed(v, 2); }
inline std::string percent_whole(double pct) { return fixed(pct, 0) + "%"; }
inline std::string percent_1dp(double pct) { return fixed(pct, 1) + "%"; }
inline std::string value1(double v) { return fixed(v, 1); }

}  // namespace display

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson num(double value, std::string display_text) {
    ojson j;
    if (std::isfinite(value)) {
        j["value"] = value;
    } else {
        j["value"] = nullptr;
        display_text = "n/a";
    }
    j["display"] = std::move(display_text);
    return j;
}

inline ojson num_ratio(double v) { return num(v, display::ratio2(v)); }
inline ojson num_value(double v) { return num(v, display::value1(v)); }
// Percent quantities already expressed in percent units (e.g. 46.3 -> "46%").
inline ojson num_pct(double pct) { return num(pct, display::percent_whole(pct)); }
// Fractions displayed as whole percents (e.g. 0.80 -> "80%").
inline ojson num_frac_pct(double frac) { return num(frac, display::percent_whole(frac * 100.0)); }
// Fractions displayed as 1-decimal percents; used for SDs (0.0912 -> "9.1%").
inline ojson num_frac_pct1(double frac) { return num(frac, display::percent_1dp(frac * 100.0)); }

inline ojson dist_json(const BenchmarkDistribution& dist) {
    ojson j;
    j["label"] = dist.label;
    j["source"] = dist.source == DistSource::Records ? "records" : "summary";
    j["direction"] = to_string(dist.direction);
    j["n"] = dist.n;
    j["mean"] = num_ratio(dist.mean);
    j["median"] = num_ratio(dist.median);
    j["sd"] = num_ratio(dist.sd);
    ojson q = ojson::object();
    for (const auto& [p, v] : dist.quantiles) q[fmt_double(p)] = num_ratio(v);
    j["quantiles"] = std::move(q);
    if (!dist.warnings.empty()) j["warnings"] = dist.warnings;
    return j;
}

inline ojson interval_json(const Interval& ci) {
    ojson j;
    j["level"] = num_frac_pct(ci.level);
    j["lower"] = num_ratio(ci.lower);
    j["upper"] = num_ratio(ci.upper);
    return j;
}

inline void put_status(ojson& j, const SectionStatus& st) {
    j["assessed"] = st.assessed;
    if (!st.assessed) j["reason"] = st.reason;
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const DueDiligenceReport& rep) {
    using detail::ojson;
    using namespace detail;

    ojson j;
    j["report"] = "forecast-due-diligence";
    j["forecast_name"] = rep.forecast.name;
    {
        ojson opt;
        opt["levels"] = rep.options.levels;
        opt["shortfall_s"] = rep.options.shortfall_s;
        switch (rep.options.outlier_policy) {
            case OutlierPolicy::None: opt["outlier_policy"] = "none"; break;
            case OutlierPolicy::Manual: opt["outlier_policy"] = "manual"; break;
            case OutlierPolicy::Auto: opt["outlier_policy"] = "auto"; break;
        }
        opt["seed"] = rep.options.seed;
        opt["bootstrap_resamples"] = rep.options.bootstrap_resamples;
        opt["pessimistic"] = rep.options.pessimistic;
        j["options"] = std::move(opt);
    }

    // 1. identification
    {
        ojson s;
        s["forecast"] = forecast_to_json(rep.forecast);
        s["first_year_forecast"] = num_value(rep.forecast.first_year_forecast);
        if (rep.forecast.later_year_forecast) {
            s["later_year_forecast"] = num_value(*rep.forecast.later_year_forecast);
        }
        ojson d = ojson::object();
        if (rep.forecast.downside.shortfall_fraction) {
            d["shortfall_fraction"] = num_frac_pct(*rep.forecast.downside.shortfall_fraction);
        }
        if (rep.forecast.downside.confidence) {
            d["confidence"] = num_frac_pct(*rep.forecast.downside.confidence);
        }
        if (rep.forecast.downside.claimed_sd) {
            d["claimed_sd"] = num_frac_pct1(*rep.forecast.downside.claimed_sd);
        }
        s["downside"] = std::move(d);
        s["provenance"] = rep.provenance;
        j["step1_identification"] = std::move(s);
    }

    // 2. benchmark
    {
        ojson s;
        s["assessed"] = true;
        s["distribution"] = dist_json(rep.benchmark);
        if (rep.records_dist && rep.benchmark.source == DistSource::Summary) {
            s["records_recomputation"] = dist_json(*rep.records_dist);
        }
        ojson b;
        put_status(b, rep.bootstrap_status);
        if (rep.mean_ci) b["mean_ci"] = interval_json(*rep.mean_ci);
        if (rep.median_ci) b["median_ci"] = interval_json(*rep.median_ci);
        s["bootstrap"] = std::move(b);
        j["step2_benchmark"] = std::move(s);
    }

    // 3. variance and ramp-up
    {
        ojson s;
        put_status(s, rep.variance_status);
        if (rep.variance) {
            const auto& v = *rep.variance;
            s["s"] = num_frac_pct(v.s);
            s["claimed_sd"] = num_frac_pct1(v.claimed_sd);
            s["benchmark_sd"] = num_frac_pct1(v.benchmark_sd);
            s["claimed_q05_shortfall"] = num_frac_pct(v.claimed_q05_shortfall);
            s["benchmark_q05_shortfall"] = num_frac_pct(v.benchmark_q05_shortfall);
            s["claimed_p_shortfall_s"] = num_frac_pct(v.claimed_p_shortfall_s);
            s["benchmark_p_shortfall_s"] = num_frac_pct(v.benchmark_p_shortfall_s);
            s["risk_ratio"] = num_ratio(v.risk_ratio);
            if (!v.warnings.empty()) s["warnings"] = v.warnings;
        }
        j["step3_variance"] = std::move(s);

        ojson r;
        put_status(r, rep.rampup_status);
        if (rep.rampup) {
            const auto& c = *rep.rampup;
            r["benchmark_n"] = c.benchmark_n;
            ojson rows = ojson::array();
            for (const auto& row : c.per_year) {
                ojson one;
                one["year"] = row.year;
                one["claimed_pct"] = num_pct(row.claimed_pct);
                one["benchmark_pct"] = num_pct(row.benchmark_pct);
                one["overestimate_pct"] = num_pct(row.overestimate_pct);
                rows.push_back(std::move(one));
            }
            r["per_year"] = std::move(rows);
            r["year1_overestimate_pct"] = num_pct(c.year1_overestimate_pct);
            if (c.rise_ratio) {
                r["rise_ratio"] = num_ratio(*c.rise_ratio);
            } else {
                r["rise_ratio"] = nullptr;
            }
            if (!c.warnings.empty()) r["warnings"] = c.warnings;
        }
        j["step3_rampup"] = std::move(r);
    }

    // 4. track record
    {
        ojson s;
        put_status(s, rep.track_status);
        if (rep.track) {
            const auto& t = *rep.track;
            s["forecaster_id"] = t.forecaster_id;
            s["n_found"] = t.n_found;
            if (t.mean_first_year_overestimate_pct) {
                s["mean_first_year_overestimate_pct"] =
                    num_pct(*t.mean_first_year_overestimate_pct);
            }
            if (t.mean_later_year_overestimate_pct) {
                s["mean_later_year_overestimate_pct"] =
                    num_pct(*t.mean_later_year_overestimate_pct);
            }
            if (t.later_year_range) {
                s["later_year_range"] = "years " + std::to_string(t.later_year_range->first) +
                                        "-" + std::to_string(t.later_year_range->second);
            }
            if (t.ratio_to_benchmark) s["ratio_to_benchmark"] = num_ratio(*t.ratio_to_benchmark);
            s["narrative"] = t.narrative;
        }
        j["step4_track_record"] = std::move(s);
    }

    // 5. risks
    {
        ojson s;
        put_status(s, rep.risk_status);
        ojson entries = ojson::array();
        for (const auto& e : rep.risks) {
            ojson one;
            one["id"] = e.id;
            one["description"] = e.description;
            one["direction"] = to_string(e.direction);
            one["weight"] = to_string(e.weight);
            one["evidence"] = e.evidence;
            entries.push_back(std::move(one));
        }
        s["entries"] = std::move(entries);
        if (rep.risk_assessment) {
            const auto& a = *rep.risk_assessment;
            ojson asj;
            asj["n_entries"] = a.n_entries;
            asj["high_count"] = a.high_count;
            asj["increasing_high"] = a.increasing_high;
            asj["decreasing_high"] = a.decreasing_high;
            asj["increasing_total"] = a.increasing_total;
            asj["decreasing_total"] = a.decreasing_total;
            asj["net_direction"] = to_string(a.net);
            asj["narrative"] = a.narrative;
            s["assessment"] = std::move(asj);
        }
        j["step5_risks"] = std::move(s);
    }

    // 6. expected outcome
    {
        ojson s;
        put_status(s, rep.outcome_status);
        if (rep.outcome) {
            const auto& o = *rep.outcome;
            s["unit"] = rep.forecast.unit;
            s["expected_accuracy"] = num_ratio(o.expected_accuracy);
            s["expected_value"] = num_value(o.expected_value);
            ojson rows = ojson::array();
            for (const auto& row : o.rows) {
                ojson one;
                one["level"] = num_frac_pct(row.level);
                one["accuracy_lower"] = num_ratio(row.accuracy.lower);
                one["accuracy_upper"] = num_ratio(row.accuracy.upper);
                one["value_lower"] = num_value(row.value.lower);
                one["value_upper"] = num_value(row.value.upper);
                rows.push_back(std::move(one));
            }
            s["rows"] = std::move(rows);
            if (rep.conditional) {
                ojson c;
                c["mean"] = num_ratio(rep.conditional->mean);
                c["count"] = rep.conditional->count;
                s["conditional_mean_overestimated"] = std::move(c);
            }
            if (!o.warnings.empty()) s["warnings"] = o.warnings;
        }
        j["step6_outcome"] = std::move(s);
    }

    // 7. subgroups and forecaster response
    {
        ojson s;
        put_status(s, rep.subgroup_status);
        auto groups_json = [](const SubgroupAnalysis& an) {
            ojson g;
            g["attribute"] = an.attribute;
            ojson rows = ojson::array();
            for (const auto& grp : an.groups) {
                ojson one;
                one["key"] = grp.key;
                one["n"] = grp.n;
                one["mean_accuracy"] = detail::num_ratio(grp.mean_accuracy);
                if (grp.mean_overestimate_pct) {
                    one["mean_overestimate_pct"] = detail::num_pct(*grp.mean_overestimate_pct);
                }
                if (grp.overestimate_of_mean_pct) {
                    one["overestimate_of_mean_pct"] =
                        detail::num_pct(*grp.overestimate_of_mean_pct);
                }
                rows.push_back(std::move(one));
            }
            g["groups"] = std::move(rows);
            if (an.weighted_mean) g["weighted_mean"] = detail::num_ratio(*an.weighted_mean);
            g["overall_mean"] = detail::num_ratio(an.overall_mean);
            if (!an.warnings.empty()) g["warnings"] = an.warnings;
            return g;
        };
        if (rep.funding_subgroups) s["funding_subgroups"] = groups_json(*rep.funding_subgroups);
        if (rep.category_subgroups) s["category_subgroups"] = groups_json(*rep.category_subgroups);
        if (rep.response) {
            ojson r;
            r["narrative"] = rep.response->narrative;
            r["claims_contradicted"] = rep.response->claims_contradicted;
            s["forecaster_response"] = std::move(r);
        }
        j["step7_comments"] = std::move(s);
    }

    // 8. conclusion
    {
        ojson s;
        ojson flags = ojson::array();
        int triggered = 0;
        for (const auto& f : rep.conclusion.flags) {
            ojson one;
            one["code"] = f.code;
            one["triggered"] = f.triggered;
            one["detail"] = f.detail;
            flags.push_back(std::move(one));
            if (f.triggered) ++triggered;
        }
        s["flags"] = std::move(flags);
        s["triggered_count"] = triggered;
        s["verdict"] = to_string(rep.conclusion.verdict);
        s["summary"] = rep.conclusion.summary;
        j["step8_conclusion"] = std::move(s);
    }

    return j;
}

namespace detail {

// Markdown helpers read display strings straight out of the report JSON.
inline std::string disp(const ojson& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return "n/a";
    const auto& field = j[key];
    if (field.is_object() && field.contains("display")) {
        return field["display"].get<std::string>();
    }
    if (field.is_string()) return field.get<std::string>();
    return field.dump();
}

inline void md_warnings(std::ostringstream& md, const ojson& j) {
    if (!j.contains("warnings")) return;
    for (const auto& w : j["warnings"]) {
        md << "- warning: " << w.get<std::string>() << "\n";
    }
}

}  // namespace detail

// Renders the eight-section human report. Every number is the JSON display
// string; the final line is the verdict.
inline std::string report_to_markdown(const nlohmann::ordered_json& j) {
    using detail::disp;
    std::ostringstream md;
    const std::string name = j["forecast_name"].get<std::string>();
    md << "# Forecast Due Diligence: " << name << "\n\n";

    {  // 1
        const auto& s = j["step1_identification"];
        const auto& fc = s["forecast"];
        md << "## 1. Identification\n\n";
        md << "- Forecast: " << name << ", first year " << disp(s, "first_year_forecast") << " "
           << fc["unit"].get<std::string>() << "\n";
        if (s.contains("later_year_forecast")) {
            md << "- Later year: " << disp(s, "later_year_forecast");
            if (fc.contains("later_year_index")) {
                md << " (year " << fc["later_year_index"].dump() << ")";
            }
            md << "\n";
        }
        const auto& d = s["downside"];
        std::string downside_text;
        if (d.contains("shortfall_fraction")) {
            downside_text = disp(d, "shortfall_fraction") + " shortfall at " +
                            disp(d, "confidence") + " confidence";
        }
        if (d.contains("claimed_sd")) {
            if (!downside_text.empty()) downside_text += "; ";
            downside_text += "claimed SD " + disp(d, "claimed_sd");
        }
        md << "- Downside claim: " << downside_text << "\n";
        if (fc.contains("forecaster_id")) {
            md << "- Forecaster: " << fc["forecaster_id"].get<std::string>() << "\n";
        }
        md << "- Funding: " << fc["funding"].get<std::string>() << "\n";
        md << "- Inputs: " << s["provenance"].get<std::string>() << "\n\n";
    }

    {  // 2
        const auto& s = j["step2_benchmark"];
        const auto& d = s["distribution"];
        md << "## 2. Benchmark\n\n";
        md << "- Class: " << d["label"].get<std::string>() << " (" << d["source"].get<std::string>()
           << ", n=" << d["n"].dump() << ", " << d["direction"].get<std::string>() << ")\n";
        md << "- Mean " << disp(d, "mean") << ", median " << disp(d, "median") << ", SD "
           << disp(d, "sd") << "\n";
        md << "\n| p | accuracy |\n|---|---|\n";
        for (const auto& [p, q] : d["quantiles"].items()) {
            md << "| " << p << " | " << q["display"].get<std::string>() << " |\n";
        }
        detail::md_warnings(md, d);
        const auto& b = s["bootstrap"];
        if (b["assessed"].get<bool>()) {
            md << "\n- Bootstrap " << disp(b["mean_ci"], "level") << " CI for the mean: "
               << disp(b["mean_ci"], "lower") << " to " << disp(b["mean_ci"], "upper") << "\n";
            md << "- Bootstrap " << disp(b["median_ci"], "level") << " CI for the median: "
               << disp(b["median_ci"], "lower") << " to " << disp(b["median_ci"], "upper") << "\n";
        } else {
            md << "\n- Bootstrap: not assessable (" << b["reason"].get<std::string>() << ")\n";
        }
        md << "\n";
    }

    {  // 3
        const auto& s = j["step3_variance"];
        md << "## 3. Variance Benchmarking\n\n";
        if (s["assessed"].get<bool>()) {
            md << "| measure | forecast claim | benchmark |\n|---|---|---|\n";
            md << "| SD of outcomes | " << disp(s, "claimed_sd") << " | " << disp(s, "benchmark_sd")
               << " |\n";
            md << "| shortfall at the 95% level | " << disp(s, "claimed_q05_shortfall") << " | "
               << disp(s, "benchmark_q05_shortfall") << " |\n";
            md << "| P(shortfall >= " << disp(s, "s") << ") | " << disp(s, "claimed_p_shortfall_s")
               << " | " << disp(s, "benchmark_p_shortfall_s") << " |\n";
            md << "\n- Risk ratio (benchmark / claimed): " << disp(s, "risk_ratio") << "\n";
            detail::md_warnings(md, s);
        } else {
            md << "Not assessable: " << s["reason"].get<std::string>() << "\n";
        }
        md << "\n";

        const auto& r = j["step3_rampup"];
        md << "### 3b. Ramp-Up\n\n";
        if (r["assessed"].get<bool>()) {
            md << "| year | claimed | benchmark (" << r["benchmark_n"].dump()
               << " projects) | overestimate |\n|---|---|---|---|\n";
            for (const auto& row : r["per_year"]) {
                md << "| " << row["year"].dump() << " | " << disp(row, "claimed_pct") << " | "
                   << disp(row, "benchmark_pct") << " | " << disp(row, "overestimate_pct")
                   << " |\n";
            }
            md << "\n- Year-1 overestimate: " << disp(r, "year1_overestimate_pct") << "\n";
            md << "- Rise ratio (claimed / benchmark): " << disp(r, "rise_ratio") << "\n";
            detail::md_warnings(md, r);
        } else {
            md << "Not assessed: " << r["reason"].get<std::string>() << "\n";
        }
        md << "\n";
    }

    {  // 4
        const auto& s = j["step4_track_record"];
        md << "## 4. Forecaster Track Record\n\n";
        if (s["assessed"].get<bool>()) {
            md << "- Forecaster: " << s["forecaster_id"].get<std::string>() << ", projects found: "
               << s["n_found"].dump() << "\n";
            if (s.contains("mean_first_year_overestimate_pct")) {
                md << "- Mean first-year overestimate: "
                   << disp(s, "mean_first_year_overestimate_pct") << "\n";
            }
            if (s.contains("mean_later_year_overestimate_pct")) {
                md << "- Mean later-year overestimate ("
                   << s["later_year_range"].get<std::string>()
                   << "): " << disp(s, "mean_later_year_overestimate_pct") << "\n";
            }
            if (s.contains("ratio_to_benchmark")) {
                md << "- Ratio to benchmark overestimate: " << disp(s, "ratio_to_benchmark")
                   << "\n";
            }
            md << "- " << s["narrative"].get<std::string>() << "\n";
        } else {
            md << "Not assessed: " << s["reason"].get<std::string>() << "\n";
        }
        md << "\n";
    }

    {  // 5
        const auto& s = j["step5_risks"];
        md << "## 5. Further Risks\n\n";
        if (s["assessed"].get<bool>()) {
            if (s["entries"].empty()) {
                md << "Risk register is empty.\n";
            } else {
                md << "| id | weight | direction | description |\n|---|---|---|---|\n";
                for (const auto& e : s["entries"]) {
                    md << "| " << e["id"].get<std::string>() << " | "
                       << e["weight"].get<std::string>() << " | "
                       << e["direction"].get<std::string>() << " | "
                       << e["description"].get<std::string>() << " |\n";
                }
            }
            md << "\n- " << s["assessment"]["narrative"].get<std::string>() << "\n";
        } else {
            md << "Not assessed: " << s["reason"].get<std::string>() << "\n";
        }
        md << "\n";
    }

    {  // 6
        const auto& s = j["step6_outcome"];
        md << "## 6. Expected Outcome\n\n";
        if (s["assessed"].get<bool>()) {
            md << "- Expected accuracy " << disp(s, "expected_accuracy") << ", expected outcome "
               << disp(s, "expected_value") << " " << s["unit"].get<std::string>() << "\n";
            md << "\n| confidence | accuracy | outcome (" << s["unit"].get<std::string>()
               << ") |\n|---|---|---|\n";
            for (const auto& row : s["rows"]) {
                md << "| " << disp(row, "level") << " | " << disp(row, "accuracy_lower") << " to "
                   << disp(row, "accuracy_upper") << " | " << disp(row, "value_lower") << " to "
                   << disp(row, "value_upper") << " |\n";
            }
            if (s.contains("conditional_mean_overestimated")) {
                const auto& c = s["conditional_mean_overestimated"];
                md << "\n- Given an overestimate, mean accuracy " << disp(c, "mean") << " over "
                   << c["count"].dump() << " projects\n";
            }
            detail::md_warnings(md, s);
        } else {
            md << "Not assessable: " << s["reason"].get<std::string>() << "\n";
        }
        md << "\n";
    }

    {  // 7
        const auto& s = j["step7_comments"];
        md << "## 7. Subgroups and Forecaster Comments\n\n";
        auto render_groups = [&md](const nlohmann::ordered_json& g) {
            md << "### " << g["attribute"].get<std::string>() << " subgroups\n\n";
            md << "| group | n | mean accuracy | mean overestimate | overestimate of mean "
                  "|\n|---|---|---|---|---|\n";
            for (const auto& row : g["groups"]) {
                md << "| " << row["key"].get<std::string>() << " | " << row["n"].dump() << " | "
                   << disp(row, "mean_accuracy") << " | " << disp(row, "mean_overestimate_pct")
                   << " | " << disp(row, "overestimate_of_mean_pct") << " |\n";
            }
            md << "\n- Weighted mean " << disp(g, "weighted_mean") << " vs overall "
               << disp(g, "overall_mean") << "\n";
            detail::md_warnings(md, g);
            md << "\n";
        };
        if (s["assessed"].get<bool>()) {
            if (s.contains("funding_subgroups")) render_groups(s["funding_subgroups"]);
            if (s.contains("category_subgroups")) render_groups(s["category_subgroups"]);
        } else {
            md << "Subgroups not assessed: " << s["reason"].get<std::string>() << "\n\n";
        }
        if (s.contains("forecaster_response")) {
            const auto& r = s["forecaster_response"];
            md << "### Forecaster response\n\n";
            md << r["narrative"].get<std::string>() << "\n\n";
            md << "- Claims contradicted by the data: "
               << (r["claims_contradicted"].get<bool>() ? "yes" : "no") << "\n";
        } else {
            md << "No forecaster response recorded.\n";
        }
        md << "\n";
    }

    {  // 8
        const auto& s = j["step8_conclusion"];
        md << "## 8. Conclusion\n\n";
        md << "| flag | triggered | detail |\n|---|---|---|\n";
        for (const auto& f : s["flags"]) {
            md << "| " << f["code"].get<std::string>() << " | "
               << (f["triggered"].get<bool>() ? "yes" : "no") << " | "
               << f["detail"].get<std::string>() << " |\n";
        }
        md << "\n" << s["summary"].get<std::string>() << "\n\n";
        md << "VERDICT: " << s["verdict"].get<std::string>() << "\n";
    }

    return md.str();
}

inline std::string report_to_markdown(const DueDiligenceReport& rep) {
    return report_to_markdown(report_to_json(rep));
}

// Plot-ready data behind the step-6 table, full precision.
inline std::string outcome_table_csv(const OutcomeTable& table) {
    std::ostringstream out;
    out << "level,acc_lo,acc_hi,val_lo,val_hi\n";
    for (const auto& row : table.rows) {
        out << fmt_double(row.level) << ',' << fmt_double(row.accuracy.lower) << ','
            << fmt_double(row.accuracy.upper) << ',' << fmt_double(row.value.lower) << ','
            << fmt_double(row.value.upper) << '\n';
    }
    return out.str();
}

// One-screen summary table for the benchmark subcommand.
inline std::string render_benchmark_text(const BenchmarkDistribution& dist) {
    std::ostringstream out;
    out << "benchmark: " << (dist.label.empty() ? "(unlabeled)" : dist.label) << " ("
        << (dist.source == DistSource::Records ? "records" : "summary") << ", n=" << dist.n
        << ", " << to_string(dist.direction) << ")\n";
    out << "  mean " << display::ratio2(dist.mean) << "  median " << display::ratio2(dist.median)
        << "  sd " << display::ratio2(dist.sd) << "\n";
    out << "  quantiles:";
    for (const auto& [p, q] : dist.quantiles) {
        out << "  p" << fmt_double(p * 100.0) << "=" << display::ratio2(q);
    }
    out << "\n";
    const char* kind = dist.direction == Direction::BenefitLike ? "shortfall" : "overrun";
    out << "  " << kind << " probabilities:";
    for (double s : {0.15, 0.25, 0.50}) {
        ProbeResult pr = dist.direction == Direction::BenefitLike
                             ? shortfall_probability_ex(dist, s)
                             : overrun_probability_ex(dist, s);
        out << "  >=" << fmt_double(s * 100.0) << "%: " << display::percent_whole(pr.p * 100.0);
    }
    out << "\n";
    for (const auto& w : dist.warnings) out << "  warning: " << w << "\n";
    return out.str();
}

}  // namespace outsideview
