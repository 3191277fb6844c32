#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "outsideview/errors.hpp"
#include "outsideview/normal.hpp"
#include "outsideview/refclass.hpp"
#include "outsideview/stats.hpp"

namespace outsideview {

enum class DistSource { Records, Summary };

// Empirical distribution of accuracy ratios in a reference class, or a
// published summary of one when the raw data is confidential.
struct BenchmarkDistribution {
    int n = 0;
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;                      // sample SD, n-1 denominator
    std::map<double, double> quantiles;   // p -> accuracy, non-decreasing in p
    DistSource source = DistSource::Records;
    std::vector<double> samples;          // sorted; present iff source == Records
    Direction direction = Direction::BenefitLike;
    std::string label;
    std::vector<std::string> warnings;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;  // >= lower
    double level = 0.0;  // in (0,1)
};

// The quantile grid every records-backed summary reports.
inline const std::vector<double>& standard_quantile_grid() {
    static const std::vector<double> ps = {0.0, 0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95, 1.0};
    return ps;
}

// Summarizes a reference class into its accuracy distribution. Flagged
// outliers are dropped when exclude_outliers is set. Quantiles beyond
// min/median/max need n >= 3; n < 20 gets a small-sample warning.
inline BenchmarkDistribution summarize(const ReferenceClass& cls, bool exclude_outliers) {
    std::vector<double> acc;
    acc.reserve(cls.records.size());
    for (const auto& r : cls.records) {
        if (exclude_outliers && r.outlier_flag) continue;
        acc.push_back(accuracy(r));
    }
    if (acc.empty()) {
        throw Error(ErrorCode::InsufficientData, "no usable records to summarize");
    }
    std::sort(acc.begin(), acc.end());

    BenchmarkDistribution dist;
    dist.n = static_cast<int>(acc.size());
    dist.mean = mean_of(acc);
    dist.sd = sample_sd(acc);
    dist.median = median_sorted(acc);
    dist.source = DistSource::Records;
    dist.direction = cls.direction;
    dist.label = cls.label;
    if (acc.size() >= 3) {
        for (double p : standard_quantile_grid()) dist.quantiles[p] = quantile_sorted(acc, p);
    } else {
        for (double p : {0.0, 0.5, 1.0}) dist.quantiles[p] = quantile_sorted(acc, p);
    }
    if (dist.n < 20) {
        dist.warnings.push_back("small sample: n=" + std::to_string(dist.n) +
                                " (< 20); treat quantiles with caution");
    }
    dist.samples = std::move(acc);
    return dist;
}

// Builds a distribution from a published summary. Operations that need the
// raw samples (bootstrap, conditional means) reject the result.
inline BenchmarkDistribution from_summary(int n, double mean, double sd,
                                          const std::map<double, double>& quantiles,
                                          Direction direction, const std::string& label = "") {
    if (quantiles.empty()) {
        throw Error(ErrorCode::NonMonotoneQuantiles, "summary quantile table is empty");
    }
    if (n < 1) throw Error(ErrorCode::BadInput, "summary n must be >= 1");
    if (sd < 0.0) throw Error(ErrorCode::BadInput, "summary sd must be >= 0");
    double prev_q = -std::numeric_limits<double>::infinity();
    for (const auto& [p, q] : quantiles) {
        if (p < 0.0 || p > 1.0) {
            throw Error(ErrorCode::BadInput, "summary quantile p out of [0,1]");
        }
        if (q < prev_q) {
            throw Error(ErrorCode::NonMonotoneQuantiles,
                        "summary quantile values must be non-decreasing in p");
        }
        prev_q = q;
    }
    BenchmarkDistribution dist;
    dist.n = n;
    dist.mean = mean;
    dist.sd = sd;
    dist.quantiles = quantiles;
    dist.source = DistSource::Summary;
    dist.direction = direction;
    dist.label = label;
    // Median: stored point if present, interpolated when 0.5 lies inside the
    // span, otherwise unavailable (the mean stands in, with a warning).
    const double lo_p = dist.quantiles.begin()->first;
    const double hi_p = dist.quantiles.rbegin()->first;
    if (auto it = dist.quantiles.find(0.5); it != dist.quantiles.end()) {
        dist.median = it->second;
    } else if (lo_p <= 0.5 && 0.5 <= hi_p) {
        auto hi = dist.quantiles.lower_bound(0.5);
        auto lo = std::prev(hi);
        const double t = (0.5 - lo->first) / (hi->first - lo->first);
        dist.median = lo->second + t * (hi->second - lo->second);
    } else {
        dist.median = mean;
        dist.warnings.push_back("median outside stored quantile span; mean used as stand-in");
    }
    return dist;
}

// Accuracy at probability p. Records: interpolated order statistics, any p.
// Summary: exact at stored points, linear between them, error beyond the span.
inline double quantile(const BenchmarkDistribution& dist, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::OutOfDomain, "quantile p must be in [0,1]");
    }
    if (dist.source == DistSource::Records) {
        return quantile_sorted(dist.samples, p);
    }
    const double lo_p = dist.quantiles.begin()->first;
    const double hi_p = dist.quantiles.rbegin()->first;
    // Snap rounding noise at the span edges (e.g. (1-0.9)/2 lands a few ulp
    // below 0.05) instead of rejecting it as out of range.
    constexpr double edge_eps = 1e-9;
    if (p < lo_p && p > lo_p - edge_eps) p = lo_p;
    if (p > hi_p && p < hi_p + edge_eps) p = hi_p;
    if (p < lo_p || p > hi_p) {
        throw Error(ErrorCode::OutOfTableRange,
                    "p=" + fmt_double(p) + " outside stored span [" + fmt_double(lo_p) + ", " +
                        fmt_double(hi_p) + "]");
    }
    if (auto it = dist.quantiles.find(p); it != dist.quantiles.end()) return it->second;
    auto hi = dist.quantiles.lower_bound(p);
    auto lo = std::prev(hi);
    const double t = (p - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

// A probability read plus an optional caveat about how it was obtained.
struct ProbeResult {
    double p = 0.0;
    std::optional<std::string> warning;
};

namespace detail {

// Inverse table read: the probability at which the stored quantile curve
// reaches value v. Flat runs resolve to the largest p with q(p) <= v, so a
// shortfall read never understates the benchmark risk. Values outside the
// stored value range clamp to the probability span with a warning.
inline ProbeResult inverse_table_read(const std::map<double, double>& table, double v) {
    ProbeResult res;
    const auto first = table.begin();
    const auto last = std::prev(table.end());
    if (v < first->second) {
        res.p = first->first;
        res.warning = "SpanClamped: value " + fmt_double(v) +
                      " below stored quantile range; probability clamped to p=" +
                      fmt_double(first->first);
        return res;
    }
    if (v >= last->second) {
        res.p = last->first;
        if (v > last->second) {
            res.warning = "SpanClamped: value " + fmt_double(v) +
                          " above stored quantile range; probability clamped to p=" +
                          fmt_double(last->first);
        }
        return res;
    }
    // Walk from the top so ties resolve to the largest probability.
    auto hi = last;
    auto lo = std::prev(hi);
    while (true) {
        if (lo->second <= v) {
            if (lo->second == v || hi->second == lo->second) {
                res.p = lo->first;
            } else {
                const double t = (v - lo->second) / (hi->second - lo->second);
                res.p = lo->first + t * (hi->first - lo->first);
            }
            return res;
        }
        hi = lo;
        lo = std::prev(lo);
    }
}

}  // namespace detail

// P(shortfall of s or more) = P(accuracy <= 1-s), for benefit-like metrics.
inline ProbeResult shortfall_probability_ex(const BenchmarkDistribution& dist, double s) {
    if (dist.direction != Direction::BenefitLike) {
        throw Error(ErrorCode::BadInput,
                    "shortfall_probability needs a benefit_like distribution; use overrun_probability");
    }
    if (!(s >= 0.0 && s <= 1.0)) {
        throw Error(ErrorCode::OutOfDomain, "shortfall s must be in [0,1]");
    }
    const double v = 1.0 - s;
    if (dist.source == DistSource::Records) {
        const auto cnt = std::upper_bound(dist.samples.begin(), dist.samples.end(), v) -
                         dist.samples.begin();
        return {static_cast<double>(cnt) / static_cast<double>(dist.samples.size()), std::nullopt};
    }
    return detail::inverse_table_read(dist.quantiles, v);
}

inline double shortfall_probability(const BenchmarkDistribution& dist, double s) {
    return shortfall_probability_ex(dist, s).p;
}

// P(overrun of s or more) = P(accuracy >= 1+s), for cost-like metrics.
inline ProbeResult overrun_probability_ex(const BenchmarkDistribution& dist, double s) {
    if (dist.direction != Direction::CostLike) {
        throw Error(ErrorCode::BadInput,
                    "overrun_probability needs a cost_like distribution; use shortfall_probability");
    }
    if (!(s >= 0.0)) throw Error(ErrorCode::OutOfDomain, "overrun s must be >= 0");
    const double v = 1.0 + s;
    if (dist.source == DistSource::Records) {
        const auto cnt = dist.samples.end() -
                         std::lower_bound(dist.samples.begin(), dist.samples.end(), v);
        return {static_cast<double>(cnt) / static_cast<double>(dist.samples.size()), std::nullopt};
    }
    // Mirror of the shortfall read: ties resolve to the smallest p with
    // q(p) >= v so the overrun probability is never understated.
    std::map<double, double> neg;
    for (const auto& [p, q] : dist.quantiles) neg[-p] = -q;
    auto res = detail::inverse_table_read(neg, -v);
    res.p = 1.0 - (-res.p);
    if (res.warning) {
        res.warning = "SpanClamped: value " + fmt_double(v) +
                      " outside stored quantile range; probability clamped to p=" +
                      fmt_double(res.p);
    }
    return res;
}

inline double overrun_probability(const BenchmarkDistribution& dist, double s) {
    return overrun_probability_ex(dist, s).p;
}

// Percent by which the forecast overshot the actual: 100*(1/a - 1).
// Negative for a > 1 (the forecast was an underestimate).
inline double overestimate_from_accuracy(double a) {
    if (!(a > 0.0)) {
        throw Error(ErrorCode::ZeroAccuracy, "accuracy must be > 0 for a finite overestimate");
    }
    return 100.0 * (1.0 / a - 1.0);
}

// Inverse of overestimate_from_accuracy; pct must exceed -100.
inline double accuracy_from_overestimate(double pct) {
    if (!(pct > -100.0)) {
        throw Error(ErrorCode::OutOfDomain, "overestimate percent must be > -100");
    }
    return 1.0 / (1.0 + pct / 100.0);
}

struct ConditionalMean {
    double mean = 0.0;
    int count = 0;
};

// Mean accuracy among overestimated projects only (accuracy < 1), i.e. the
// outcome given that the forecast was high.
inline ConditionalMean conditional_mean_overestimated(const BenchmarkDistribution& dist) {
    if (dist.source != DistSource::Records) {
        throw Error(ErrorCode::SummaryOnlyDistribution,
                    "conditional mean needs raw samples, not a summary");
    }
    double sum = 0.0;
    int count = 0;
    for (double a : dist.samples) {
        if (a < 1.0) {
            sum += a;
            ++count;
        }
    }
    if (count == 0) {
        throw Error(ErrorCode::NoOverestimatedSamples, "no samples with accuracy < 1");
    }
    return {sum / count, count};
}

struct BootstrapStatistic {
    enum class Kind { Mean, Median, Sd, Quantile };
    Kind kind = Kind::Mean;
    double p = 0.5;  // used by Kind::Quantile only

    static BootstrapStatistic mean() { return {Kind::Mean, 0.0}; }
    static BootstrapStatistic median() { return {Kind::Median, 0.0}; }
    static BootstrapStatistic sd() { return {Kind::Sd, 0.0}; }
    static BootstrapStatistic quantile(double p) { return {Kind::Quantile, p}; }
};

// Percentile-method bootstrap interval for a summary statistic. Each resample
// draws its engine seed from (seed, ordinal) alone, so the result is
// bit-identical for fixed inputs regardless of evaluation order.
inline Interval bootstrap_ci(const BenchmarkDistribution& dist, BootstrapStatistic stat,
                             double level, int resamples, std::uint64_t seed) {
    if (dist.source != DistSource::Records) {
        throw Error(ErrorCode::SummaryOnlyDistribution, "bootstrap needs raw samples");
    }
    const std::size_t n = dist.samples.size();
    if (n < 5) {
        throw Error(ErrorCode::InsufficientData,
                    "bootstrap needs at least 5 records, got " + std::to_string(n));
    }
    if (resamples < 1000) {
        throw Error(ErrorCode::BadInput, "bootstrap needs at least 1000 resamples");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw Error(ErrorCode::BadInput, "bootstrap level must be in (0,1)");
    }

    std::vector<double> stats(static_cast<std::size_t>(resamples));
    std::vector<double> resample(n);
    for (int r = 0; r < resamples; ++r) {
        std::mt19937_64 eng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        for (std::size_t i = 0; i < n; ++i) resample[i] = dist.samples[bounded_index(eng(), n)];
        switch (stat.kind) {
            case BootstrapStatistic::Kind::Mean:
                stats[static_cast<std::size_t>(r)] = mean_of(resample);
                break;
            case BootstrapStatistic::Kind::Sd:
                stats[static_cast<std::size_t>(r)] = sample_sd(resample);
                break;
            case BootstrapStatistic::Kind::Median:
                stats[static_cast<std::size_t>(r)] = median_of(resample);
                break;
            case BootstrapStatistic::Kind::Quantile: {
                std::vector<double> sorted = resample;
                std::sort(sorted.begin(), sorted.end());
                stats[static_cast<std::size_t>(r)] = quantile_sorted(sorted, stat.p);
                break;
            }
        }
    }
    std::sort(stats.begin(), stats.end());
    Interval ci;
    ci.level = level;
    ci.lower = quantile_sorted(stats, (1.0 - level) / 2.0);
    ci.upper = quantile_sorted(stats, (1.0 + level) / 2.0);
    return ci;
}

// --- summary JSON ------------------------------------------------------------

// {"label":..., "n":61, "mean":0.59, "sd":0.33, "direction":"benefit_like",
//  "quantiles":{"0.05":0.15, ...}} with decimal-string keys.
inline BenchmarkDistribution summary_from_json(const nlohmann::json& j) {
    try {
        std::map<double, double> quantiles;
        for (const auto& [key, value] : j.at("quantiles").items()) {
            quantiles[std::stod(key)] = value.get<double>();
        }
        return from_summary(j.at("n").get<int>(), j.at("mean").get<double>(),
                            j.at("sd").get<double>(), quantiles,
                            direction_from_string(j.value("direction", std::string{"benefit_like"})),
                            j.value("label", std::string{}));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadInput, std::string("summary JSON: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw Error(ErrorCode::BadInput, "summary JSON: quantile keys must be decimal strings");
    }
}

inline nlohmann::ordered_json summary_to_json(const BenchmarkDistribution& dist) {
    nlohmann::ordered_json j;
    j["label"] = dist.label;
    j["n"] = dist.n;
    j["mean"] = dist.mean;
    j["median"] = dist.median;
    j["sd"] = dist.sd;
    j["direction"] = to_string(dist.direction);
    j["source"] = dist.source == DistSource::Records ? "records" : "summary";
    nlohmann::ordered_json q;
    for (const auto& [p, v] : dist.quantiles) q[fmt_double(p)] = v;
    j["quantiles"] = std::move(q);
    if (!dist.warnings.empty()) j["warnings"] = dist.warnings;
    return j;
}

}  // namespace outsideview
