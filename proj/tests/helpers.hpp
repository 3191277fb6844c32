#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "outsideview/outsideview.hpp"

namespace testutil {

using namespace outsideview;

inline std::string data_dir() {
    const char* d = std::getenv("OV_DATA_DIR");
    return d ? d : "data";
}

inline std::string data_path(const std::string& name) { return data_dir() + "/" + name; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("test fixture missing: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs fn and reports which error code it threw, if any.
template <typename F>
std::optional<ErrorCode> thrown_code(F&& fn) {
    try {
        std::forward<F>(fn)();
        return std::nullopt;
    } catch (const Error& e) {
        return e.code();
    }
}

inline ReferenceClass load_class_fixture(const std::string& records_name,
                                         const std::string& rampup_name = "",
                                         const std::string& label = "rail-61") {
    std::ifstream rec(data_path(records_name));
    ReferenceClass cls = parse_reference_csv(rec, label, Direction::BenefitLike);
    if (!rampup_name.empty()) {
        std::ifstream ramp(data_path(rampup_name));
        cls = parse_rampup_csv(ramp, cls);
    }
    return cls;
}

inline BenchmarkDistribution load_summary_fixture(const std::string& name = "atrain_benchmark.json") {
    return summary_from_json(nlohmann::json::parse(slurp(data_path(name))));
}

inline ForecastUnderReview load_forecast_fixture(const std::string& name = "atrain_forecast.json") {
    return forecast_from_json(nlohmann::json::parse(slurp(data_path(name))));
}

// Synthetic reference class with positive accuracies, mixed labels.
inline ReferenceClass random_class(std::mt19937_64& rng, int min_n = 3, int max_n = 30) {
    static const char* cats[] = {"rail", "road", "bridge"};
    static const Funding funds[] = {Funding::Public, Funding::Private, Funding::Unknown};
    std::uniform_int_distribution<int> n_dist(min_n, max_n);
    std::uniform_real_distribution<double> acc(0.05, 2.5);
    std::uniform_int_distribution<int> cat(0, 2), fund(0, 2), fid(0, 3), year(1990, 2020);

    ReferenceClass cls;
    cls.label = "synthetic";
    cls.direction = Direction::BenefitLike;
    const int n = n_dist(rng);
    for (int i = 0; i < n; ++i) {
        ProjectRecord r;
        r.project_id = "S" + std::to_string(i);
        r.category = cats[cat(rng)];
        r.forecast_first_year = 10.0;
        r.actual_first_year = 10.0 * acc(rng);
        r.forecaster_id = "F" + std::to_string(fid(rng));
        r.funding = funds[fund(rng)];
        r.open_year = year(rng);
        cls.records.push_back(std::move(r));
    }
    return cls;
}

}  // namespace testutil
