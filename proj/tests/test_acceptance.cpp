// Acceptance gate: one PASS/FAIL line per criterion, exit code = number of
// failures. Run as: acceptance <data_dir> <cli_path>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "outsideview/outsideview.hpp"

using namespace outsideview;
namespace fs = std::filesystem;

namespace {

std::string g_data;
std::string g_cli;
std::vector<std::string> g_notes;

bool check(bool ok, const std::string& what) {
    if (!ok) g_notes.push_back(what);
    return ok;
}

bool near(double got, double want, double tol, const std::string& what) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want << " +- " << tol;
    return check(std::isfinite(got) && std::fabs(got - want) <= tol, os.str());
}

bool same(const std::string& got, const std::string& want, const std::string& what) {
    return check(got == want, what + ": got '" + got + "', want '" + want + "'");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json load_json(const std::string& name) {
    return nlohmann::json::parse(slurp(g_data + "/" + name));
}

ReferenceClass load_class(const std::string& records, const std::string& rampups = "") {
    std::istringstream rec(slurp(g_data + "/" + records));
    ReferenceClass cls = parse_reference_csv(rec, "rail-61", Direction::BenefitLike);
    if (!rampups.empty()) {
        std::istringstream ram(slurp(g_data + "/" + rampups));
        cls = parse_rampup_csv(ram, cls);
    }
    return cls;
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 1. Accuracy-to-overestimate conversions reproduce the published figures.
bool criterion_conversions() {
    const std::pair<double, double> cases[] = {
        {0.59, 69.0}, {0.51, 96.0}, {0.35, 186.0}, {0.78, 28.0}, {0.485, 106.0}};
    bool ok = true;
    for (const auto& [a, pct] : cases) {
        ok &= near(overestimate_from_accuracy(a), pct, 1.0,
                   "overestimate at accuracy " + std::to_string(a));
    }
    return ok;
}

// 2. A downside claim of a 15% shortfall at 95% confidence implies an SD
//    near 9.1% of the forecast.
bool criterion_implied_sd() {
    DownsideClaim claim;
    claim.shortfall_fraction = 0.15;
    claim.confidence = 0.95;
    return near(100.0 * implied_sd(claim), 9.1, 0.05, "implied SD in percent");
}

// 3. The variance comparison reproduces the claim-vs-benchmark table.
bool criterion_variance_table() {
    ForecastUnderReview fc = forecast_from_json(load_json("atrain_forecast.json"));
    BenchmarkDistribution dist = summary_from_json(load_json("atrain_benchmark.json"));
    VarianceComparison cmp = compare_variance(fc, dist, 0.15);
    bool ok = true;
    ok &= near(100.0 * cmp.claimed_sd, 9.1, 0.1, "claimed SD %");
    ok &= near(100.0 * cmp.benchmark_sd, 33.0, 0.1, "benchmark SD %");
    ok &= near(100.0 * cmp.claimed_q05_shortfall, 15.0, 0.1, "claimed q05 shortfall %");
    ok &= near(100.0 * cmp.benchmark_q05_shortfall, 85.0, 0.1, "benchmark q05 shortfall %");
    ok &= near(100.0 * cmp.claimed_p_shortfall_s, 5.0, 0.1, "claimed P(shortfall>=15%)");
    ok &= near(100.0 * cmp.benchmark_p_shortfall_s, 80.0, 0.1, "benchmark P(shortfall>=15%)");
    ok &= near(cmp.risk_ratio, 16.0, 0.1, "risk ratio");
    return ok;
}

// 4. The ramp-up comparison reproduces the per-year benchmark profile.
bool criterion_rampup() {
    ForecastUnderReview fc = forecast_from_json(load_json("atrain_forecast.json"));
    ReferenceClass cls = load_class("rail61.csv", "rampup11.csv");
    RampUpComparison cmp = compare_rampup(fc, cls);
    bool ok = check(cmp.benchmark_n == 11, "benchmark project count is 11");
    ok &= check(cmp.per_year.size() == 5, "five overlapping years");
    const double want[] = {41.0, 49.0, 68.0, 51.0, 55.0};
    for (std::size_t i = 0; i < cmp.per_year.size() && i < 5; ++i) {
        ok &= near(cmp.per_year[i].benchmark_pct, want[i], 0.5,
                   "benchmark year " + std::to_string(i + 1));
    }
    ok &= near(cmp.year1_overestimate_pct, 46.0, 0.5, "year-1 overestimate %");
    ok &= check(cmp.rise_ratio.has_value(), "rise ratio defined");
    if (cmp.rise_ratio) ok &= near(*cmp.rise_ratio, 2.86, 0.01, "rise ratio");
    return ok;
}

// 5. The forecaster's own record: first-year and later-year overestimates and
//    the ratio against the benchmark.
bool criterion_track_record() {
    ReferenceClass cls = load_class("rail61.csv", "rampup_trackrecord.csv");
    BenchmarkDistribution dist = summary_from_json(load_json("atrain_benchmark.json"));
    TrackRecordFinding t = track_record(cls, "F1", dist);
    bool ok = check(t.n_found == 2, "two prior projects found");
    ok &= check(t.mean_first_year_overestimate_pct.has_value(), "first-year mean present");
    if (t.mean_first_year_overestimate_pct) {
        ok &= near(*t.mean_first_year_overestimate_pct, 337.5, 1e-9, "first-year overestimate %");
    }
    ok &= check(t.mean_later_year_overestimate_pct.has_value(), "later-year mean present");
    if (t.mean_later_year_overestimate_pct) {
        ok &= near(*t.mean_later_year_overestimate_pct, 200.0, 1e-9, "later-year overestimate %");
    }
    ok &= check(t.later_year_range && t.later_year_range->first == 4 &&
                    t.later_year_range->second == 5,
                "later years averaged over years 4-5");
    ok &= check(t.ratio_to_benchmark && *t.ratio_to_benchmark >= 4.85 &&
                    *t.ratio_to_benchmark <= 4.90,
                "ratio to benchmark in [4.85, 4.90]");
    return ok;
}

// 6. Expected-outcome table at 50/80/90% confidence, checked at display
//    precision against the published intervals.
bool criterion_outcome_table() {
    ForecastUnderReview fc = forecast_from_json(load_json("atrain_forecast.json"));
    BenchmarkDistribution dist = summary_from_json(load_json("atrain_benchmark.json"));
    OutcomeTable table = expected_outcome(fc, dist, {0.5, 0.8, 0.9});
    bool ok = check(table.rows.size() == 3, "three interval rows");
    if (!ok) return false;
    const char* want[3][4] = {{"0.35", "0.78", "4.9", "11.0"},
                              {"0.23", "1.01", "3.2", "14.2"},
                              {"0.15", "1.10", "2.1", "15.5"}};
    for (int i = 0; i < 3; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        const std::string tag = "row " + std::to_string(i);
        ok &= same(display::ratio2(row.accuracy.lower), want[i][0], tag + " accuracy lower");
        ok &= same(display::ratio2(row.accuracy.upper), want[i][1], tag + " accuracy upper");
        ok &= same(display::value1(row.value.lower), want[i][2], tag + " value lower");
        ok &= same(display::value1(row.value.upper), want[i][3], tag + " value upper");
    }
    ok &= same(display::ratio2(table.expected_accuracy), "0.59", "expected accuracy");
    ok &= same(display::value1(table.expected_value), "8.3", "expected value");
    return ok;
}

// 7. Funding subgroups split the class into materially different means that
//    reconcile with the overall mean.
bool criterion_subgroups() {
    ReferenceClass cls = load_class("rail61.csv");
    BenchmarkDistribution dist = summarize(cls, true);
    SubgroupAnalysis an = subgroup_analysis(cls, SubgroupAttribute::Funding, dist);
    bool ok = check(an.groups.size() == 2, "two funding groups");
    if (!ok) return false;
    const auto& priv = an.groups[0];
    const auto& pub = an.groups[1];
    ok &= check(priv.n == 5, "five private projects");
    ok &= near(priv.mean_accuracy, 0.30, 0.005, "private mean accuracy");
    ok &= check(pub.n == 56, "fifty-six public projects");
    ok &= near(pub.mean_accuracy, 0.62, 0.005, "public mean accuracy");
    ok &= check(an.weighted_mean.has_value(), "weighted mean present");
    if (an.weighted_mean) {
        ok &= same(display::ratio2(*an.weighted_mean), "0.59", "weighted mean display");
    }
    return ok;
}

// 8. Class summaries, quartiles, outlier handling, and the conditional mean.
bool criterion_summaries() {
    ReferenceClass cls61 = load_class("rail61.csv");
    BenchmarkDistribution d61 = summarize(cls61, true);
    bool ok = check(d61.n == 61, "61 records");
    ok &= same(display::ratio2(d61.mean), "0.59", "mean display");
    ok &= same(display::ratio2(d61.sd), "0.33", "sd display");
    ok &= near(d61.quantiles.at(0.25), 0.35, 0.005, "lower quartile");
    ok &= near(d61.quantiles.at(0.50), 0.51, 0.005, "median");
    ok &= near(d61.quantiles.at(0.75), 0.78, 0.005, "upper quartile");

    // A 62nd record with accuracy 2.58 shifts the summary and is exactly what
    // the automatic outlier rule flags.
    ReferenceClass cls62 = load_class("rail62.csv");
    BenchmarkDistribution d62 = summarize(flag_outliers(cls62, OutlierPolicy::None), true);
    ok &= check(d62.n == 62, "62 records when the outlier is kept");
    ok &= same(display::ratio2(d62.mean), "0.63", "mean display with outlier");
    ok &= same(display::ratio2(d62.sd), "0.41", "sd display with outlier");
    ReferenceClass flagged = flag_outliers(cls62, OutlierPolicy::Auto);
    std::set<std::string> flagged_ids;
    for (const auto& r : flagged.records) {
        if (r.outlier_flag) flagged_ids.insert(r.project_id);
    }
    ok &= check(flagged_ids == std::set<std::string>{"P62"},
                "automatic rule flags exactly the added record");

    // Conditional mean over overestimated projects, recomputed directly.
    ConditionalMean cond = conditional_mean_overestimated(d61);
    double sum = 0.0;
    int count = 0;
    for (const auto& r : cls61.records) {
        if (accuracy(r) < 1.0) {
            sum += accuracy(r);
            ++count;
        }
    }
    ok &= check(cond.count == count, "conditional count matches direct recomputation");
    ok &= check(count > 0 && std::fabs(cond.mean - sum / count) <= 1e-12,
                "conditional mean matches direct recomputation");
    ok &= same(display::ratio2(cond.mean), "0.50", "conditional mean display");
    ok &= check(cond.count == 53, "53 overestimated projects");
    return ok;
}

// 9. Randomized property suites, 1000 cases each.
bool criterion_properties() {
    std::mt19937_64 rng(20260817);
    bool ok = true;

    {  // Quantiles are monotone in p.
        int bad = 0;
        for (int i = 0; i < 1000; ++i) {
            std::uniform_int_distribution<int> nd(1, 40);
            std::uniform_real_distribution<double> vd(0.0, 3.0), pd(0.0, 1.0);
            std::vector<double> v(static_cast<std::size_t>(nd(rng)));
            for (auto& x : v) x = vd(rng);
            std::sort(v.begin(), v.end());
            double p1 = pd(rng), p2 = pd(rng);
            if (p1 > p2) std::swap(p1, p2);
            if (quantile_sorted(v, p1) > quantile_sorted(v, p2) + 1e-12) ++bad;
        }
        ok &= check(bad == 0, "quantile monotonicity: " + std::to_string(bad) + " violations");
    }
    {  // Accuracy <-> overestimate round-trips.
        int bad = 0;
        std::uniform_real_distribution<double> ad(0.01, 3.0);
        for (int i = 0; i < 1000; ++i) {
            const double a = ad(rng);
            const double back = accuracy_from_overestimate(overestimate_from_accuracy(a));
            if (std::fabs(back - a) > 1e-12 * a) ++bad;
        }
        ok &= check(bad == 0, "conversion round-trip: " + std::to_string(bad) + " violations");
    }
    {  // Inverse normal: symmetry and agreement with the CDF.
        int bad = 0;
        std::uniform_real_distribution<double> pd(1e-6, 1.0 - 1e-6);
        for (int i = 0; i < 1000; ++i) {
            const double p = pd(rng);
            const double z = inverse_normal_cdf(p);
            if (std::fabs(z + inverse_normal_cdf(1.0 - p)) > 1e-8) ++bad;
            if (std::fabs(normal_cdf(z) - p) > 1e-8) ++bad;
        }
        ok &= check(bad == 0, "inverse normal: " + std::to_string(bad) + " violations");
    }
    {  // Shortfall probability is nonincreasing in the threshold.
        int bad = 0;
        for (int i = 0; i < 1000; ++i) {
            std::uniform_int_distribution<int> nd(3, 25);
            std::uniform_real_distribution<double> vd(0.05, 2.5), sd(0.0, 1.0);
            ReferenceClass cls;
            cls.label = "prop";
            const int n = nd(rng);
            for (int k = 0; k < n; ++k) {
                ProjectRecord r;
                r.project_id = "P" + std::to_string(k);
                r.forecast_first_year = 10.0;
                r.actual_first_year = 10.0 * vd(rng);
                cls.records.push_back(r);
            }
            BenchmarkDistribution dist = summarize(cls, true);
            double s1 = sd(rng), s2 = sd(rng);
            if (s1 > s2) std::swap(s1, s2);
            if (shortfall_probability(dist, s1) + 1e-12 < shortfall_probability(dist, s2)) ++bad;
        }
        ok &= check(bad == 0, "shortfall monotonicity: " + std::to_string(bad) + " violations");
    }
    {  // Higher confidence never narrows the outcome interval.
        int bad = 0;
        ForecastUnderReview fc;
        fc.name = "prop";
        fc.unit = "units";
        fc.first_year_forecast = 10.0;
        for (int i = 0; i < 1000; ++i) {
            std::uniform_int_distribution<int> nd(5, 20);
            std::uniform_real_distribution<double> vd(0.05, 2.5), ld(0.05, 0.95);
            ReferenceClass cls;
            cls.label = "prop";
            const int n = nd(rng);
            for (int k = 0; k < n; ++k) {
                ProjectRecord r;
                r.project_id = "P" + std::to_string(k);
                r.forecast_first_year = 10.0;
                r.actual_first_year = 10.0 * vd(rng);
                cls.records.push_back(r);
            }
            BenchmarkDistribution dist = summarize(cls, true);
            double l1 = ld(rng), l2 = ld(rng);
            if (l1 > l2) std::swap(l1, l2);
            OutcomeTable t = expected_outcome(fc, dist, {l1, l2});
            const auto& narrow = t.rows[0].accuracy;
            const auto& wide = t.rows[1].accuracy;
            if (narrow.lower + 1e-12 < wide.lower || narrow.upper > wide.upper + 1e-12) ++bad;
        }
        ok &= check(bad == 0, "interval nesting: " + std::to_string(bad) + " violations");
    }
    {  // Bootstrap intervals are a pure function of (data, seed).
        int bad = 0;
        for (int i = 0; i < 1000; ++i) {
            std::uniform_int_distribution<int> nd(5, 10);
            std::uniform_real_distribution<double> vd(0.05, 2.5);
            std::uniform_int_distribution<std::uint64_t> seedd(0, 1u << 30);
            ReferenceClass cls;
            cls.label = "prop";
            const int n = nd(rng);
            for (int k = 0; k < n; ++k) {
                ProjectRecord r;
                r.project_id = "P" + std::to_string(k);
                r.forecast_first_year = 10.0;
                r.actual_first_year = 10.0 * vd(rng);
                cls.records.push_back(r);
            }
            BenchmarkDistribution dist = summarize(cls, true);
            const std::uint64_t seed = seedd(rng);
            Interval a = bootstrap_ci(dist, BootstrapStatistic::mean(), 0.95, 1000, seed);
            Interval b = bootstrap_ci(dist, BootstrapStatistic::mean(), 0.95, 1000, seed);
            if (a.lower != b.lower || a.upper != b.upper) ++bad;
        }
        ok &= check(bad == 0, "bootstrap determinism: " + std::to_string(bad) + " violations");
    }
    return ok;
}

// 10. The command-line pipeline end to end: ingest, full review, degraded
//     review, byte-identical reruns.
bool criterion_cli() {
    const fs::path tmp = fs::temp_directory_path() / "ov_acceptance";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    const std::string bundle = (tmp / "bundle.json").string();
    const std::string report = (tmp / "report.md").string();

    bool ok = check(run(g_cli + " ingest --records " + g_data + "/rail61.csv --rampup " + g_data +
                        "/rampup11.csv --label rail-61 --out " + bundle + " > " +
                        (tmp / "ingest.out").string() + " 2>&1") == 0,
                    "ingest exits 0");
    ok &= check(fs::exists(bundle), "bundle written");

    const std::string review = g_cli + " diligence --forecast " + g_data +
                               "/atrain_forecast.json --class " + bundle + " --summary " + g_data +
                               "/atrain_benchmark.json --risk-register " + g_data +
                               "/atrain_risks.json --forecaster-response " + g_data +
                               "/atrain_response.json --out " + report;
    ok &= check(run(review + " > " + (tmp / "run1.out").string() + " 2>" +
                    (tmp / "run1.err").string()) == 0,
                "full review exits 0");
    if (!ok) return false;

    ok &= same(slurp((tmp / "run1.out").string()), "VERDICT: OVERESTIMATE_HIGHLY_LIKELY\n",
               "verdict on stdout");
    const std::string body = slurp(report);
    int sections = 0;
    for (std::size_t pos = 0; (pos = body.find("\n## ", pos)) != std::string::npos; ++pos) {
        ++sections;
    }
    ok &= check(sections == 8, "report has eight sections, found " + std::to_string(sections));
    const std::string tail = "VERDICT: OVERESTIMATE_HIGHLY_LIKELY\n";
    ok &= check(body.size() > tail.size() &&
                    body.compare(body.size() - tail.size(), tail.size(), tail) == 0,
                "report ends with the verdict line");
    ok &= check(fs::exists(tmp / "outcome_table.csv"), "interval table written beside the report");

    ok &= check(run(review + " > /dev/null 2>&1") == 0, "rerun exits 0");
    ok &= check(slurp(report) == body, "rerun is byte-identical");

    const int degraded = run("cd " + tmp.string() + " && " + g_cli + " diligence --forecast " +
                             g_data + "/atrain_forecast.json --summary " + g_data +
                             "/atrain_benchmark.json > degraded.out 2>&1");
    ok &= check(degraded == 0, "summary-only review exits 0");
    ok &= check(slurp((tmp / "degraded.out").string())
                        .find("VERDICT: OVERESTIMATE_HIGHLY_LIKELY") != std::string::npos,
                "summary-only review reaches the same verdict");
    return ok;
}

struct Criterion {
    const char* name;
    bool (*fn)();
};

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance <data_dir> <cli_path>\n");
        return 99;
    }
    // The pipeline criterion changes directory, so both paths must survive it.
    g_data = fs::absolute(argv[1]).string();
    g_cli = fs::absolute(argv[2]).string();

    const Criterion criteria[] = {
        {"accuracy/overestimate conversions", criterion_conversions},
        {"implied SD from a downside claim", criterion_implied_sd},
        {"variance benchmarking table", criterion_variance_table},
        {"ramp-up profile comparison", criterion_rampup},
        {"forecaster track record", criterion_track_record},
        {"expected-outcome intervals", criterion_outcome_table},
        {"funding subgroup split", criterion_subgroups},
        {"class summaries, outliers, conditional mean", criterion_summaries},
        {"randomized property suites", criterion_properties},
        {"command-line pipeline", criterion_cli},
    };

    int failures = 0;
    int idx = 0;
    for (const auto& c : criteria) {
        ++idx;
        bool ok = false;
        g_notes.clear();
        try {
            ok = c.fn();
        } catch (const std::exception& e) {
            g_notes.push_back(std::string("exception: ") + e.what());
        }
        std::printf("criterion %2d [%s] %s\n", idx, ok ? "PASS" : "FAIL", c.name);
        for (const auto& note : g_notes) std::printf("    note: %s\n", note.c_str());
        if (!ok) ++failures;
    }
    std::printf("%d of %d criteria passed\n", idx - failures, idx);
    return failures;
}
