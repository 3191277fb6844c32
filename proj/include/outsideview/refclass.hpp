#pragma once

#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "outsideview/csv.hpp"
#include "outsideview/errors.hpp"
#include "outsideview/stats.hpp"

namespace outsideview {

enum class Funding { Public, Private, Unknown };

inline Funding funding_from_string(const std::string& s, int line_no = 0) {
    if (s == "public") return Funding::Public;
    if (s == "private") return Funding::Private;
    if (s == "unknown" || s.empty()) return Funding::Unknown;
    throw Error(ErrorCode::MalformedRow,
                "row " + std::to_string(line_no) + ", column funding: expected public|private|unknown, got '" + s + "'");
}

inline const char* to_string(Funding f) {
    switch (f) {
        case Funding::Public: return "public";
        case Funding::Private: return "private";
        case Funding::Unknown: return "unknown";
    }
    return "unknown";
}

// benefit_like: a bad outcome is accuracy < 1 (demand shortfall).
// cost_like: a bad outcome is accuracy > 1 (cost overrun).
enum class Direction { BenefitLike, CostLike };

inline Direction direction_from_string(const std::string& s) {
    if (s == "benefit_like") return Direction::BenefitLike;
    if (s == "cost_like") return Direction::CostLike;
    throw Error(ErrorCode::BadInput, "direction must be benefit_like or cost_like, got '" + s + "'");
}

inline const char* to_string(Direction d) {
    return d == Direction::BenefitLike ? "benefit_like" : "cost_like";
}

// One completed project: what was forecast for the first year of operations
// and what actually happened, plus grouping attributes.
struct ProjectRecord {
    std::string project_id;
    std::string category;
    double forecast_first_year = 0.0;  // > 0
    double actual_first_year = 0.0;    // >= 0
    std::string forecaster_id;         // empty = not recorded
    Funding funding = Funding::Unknown;
    bool outlier_flag = false;
    std::optional<int> open_year;
    std::string notes;

    bool operator==(const ProjectRecord&) const = default;
};

// Actual demand in percent of forecast for one project-year; year 1 is the
// first year of operations.
struct RampUpObservation {
    std::string project_id;
    int year_index = 1;  // >= 1
    double actual_pct_of_forecast = 0.0;

    bool operator==(const RampUpObservation&) const = default;
};

struct ReferenceClass {
    std::vector<ProjectRecord> records;
    std::vector<RampUpObservation> rampups;  // every project_id resolves in records
    Direction direction = Direction::BenefitLike;
    std::string label;

    bool operator==(const ReferenceClass&) const = default;
};

// Accuracy ratio: actual divided by forecast. 1.0 is a perfect forecast;
// 0 is legal (total shortfall).
inline double accuracy(const ProjectRecord& r) {
    return r.actual_first_year / r.forecast_first_year;
}

namespace detail {

// Column layout: four required columns, then optional columns in this fixed
// order. A header must be a prefix of the full list.
inline const std::vector<std::string>& record_columns() {
    static const std::vector<std::string> cols = {
        "project_id", "category",   "forecast_first_year", "actual_first_year",
        "forecaster_id", "funding", "outlier_flag",        "open_year",
        "notes"};
    return cols;
}

inline std::vector<std::string> read_header(std::istream& in, const std::vector<std::string>& full,
                                            std::size_t required, const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::BadInput, std::string("no records: empty ") + what + " input");
    }
    auto fields = split_csv_line(line, 1);
    for (auto& f : fields) f = trim(f);
    if (fields.size() < required || fields.size() > full.size()) {
        throw Error(ErrorCode::MalformedRow, std::string("header: expected ") + what + " columns");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] != full[i]) {
            throw Error(ErrorCode::MalformedRow,
                        "header: column " + std::to_string(i + 1) + " must be '" + full[i] +
                            "', got '" + fields[i] + "'");
        }
    }
    return fields;
}

}  // namespace detail

// Reads project records from CSV. Header required; trailing optional columns
// may be omitted file-wide but every row must match the header's width.
inline ReferenceClass parse_reference_csv(std::istream& in, const std::string& label = "",
                                          Direction direction = Direction::BenefitLike) {
    const auto header =
        detail::read_header(in, detail::record_columns(), 4, "reference-class");
    ReferenceClass cls;
    cls.label = label;
    cls.direction = direction;

    std::set<std::string> seen_ids;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line, line_no);
        if (fields.size() != header.size()) {
            throw Error(ErrorCode::MalformedRow,
                        "row " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        ProjectRecord rec;
        rec.project_id = trim(fields[0]);
        if (rec.project_id.empty()) {
            throw Error(ErrorCode::MalformedRow,
                        "row " + std::to_string(line_no) + ": empty project_id");
        }
        if (!seen_ids.insert(rec.project_id).second) {
            throw Error(ErrorCode::DuplicateProjectId,
                        "row " + std::to_string(line_no) + ": duplicate project_id '" +
                            rec.project_id + "'");
        }
        rec.category = trim(fields[1]);
        rec.forecast_first_year = parse_double_field(fields[2], line_no, "forecast_first_year");
        if (!(rec.forecast_first_year > 0.0)) {
            throw Error(ErrorCode::NonPositiveForecast,
                        "row " + std::to_string(line_no) + ": project '" + rec.project_id +
                            "' has forecast_first_year <= 0");
        }
        rec.actual_first_year = parse_double_field(fields[3], line_no, "actual_first_year");
        if (rec.actual_first_year < 0.0) {
            throw Error(ErrorCode::MalformedRow,
                        "row " + std::to_string(line_no) +
                            ", column actual_first_year: must be >= 0");
        }
        if (header.size() > 4) rec.forecaster_id = trim(fields[4]);
        if (header.size() > 5) rec.funding = funding_from_string(trim(fields[5]), line_no);
        if (header.size() > 6) {
            const long flag = parse_int_field(fields[6], line_no, "outlier_flag");
            if (flag != 0 && flag != 1) {
                throw Error(ErrorCode::MalformedRow,
                            "row " + std::to_string(line_no) + ", column outlier_flag: expected 0 or 1");
            }
            rec.outlier_flag = flag == 1;
        }
        if (header.size() > 7 && !trim(fields[7]).empty()) {
            rec.open_year = static_cast<int>(parse_int_field(fields[7], line_no, "open_year"));
        }
        if (header.size() > 8) rec.notes = fields[8];
        cls.records.push_back(std::move(rec));
    }
    if (cls.records.empty()) {
        throw Error(ErrorCode::BadInput, "no records: reference-class CSV has a header but no rows");
    }
    return cls;
}

// Attaches ramp-up observations to an existing class; returns a new class.
inline ReferenceClass parse_rampup_csv(std::istream& in, const ReferenceClass& base) {
    static const std::vector<std::string> cols = {"project_id", "year_index",
                                                  "actual_pct_of_forecast"};
    detail::read_header(in, cols, 3, "ramp-up");

    std::set<std::string> known_ids;
    for (const auto& r : base.records) known_ids.insert(r.project_id);
    std::set<std::pair<std::string, int>> seen;
    for (const auto& ob : base.rampups) seen.insert({ob.project_id, ob.year_index});

    ReferenceClass cls = base;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line, line_no);
        if (fields.size() != cols.size()) {
            throw Error(ErrorCode::MalformedRow,
                        "row " + std::to_string(line_no) + ": expected 3 fields, got " +
                            std::to_string(fields.size()));
        }
        RampUpObservation ob;
        ob.project_id = trim(fields[0]);
        if (!known_ids.count(ob.project_id)) {
            throw Error(ErrorCode::UnknownProjectId,
                        "row " + std::to_string(line_no) + ": project '" + ob.project_id +
                            "' not in the reference class");
        }
        ob.year_index = static_cast<int>(parse_int_field(fields[1], line_no, "year_index"));
        if (ob.year_index < 1) {
            throw Error(ErrorCode::MalformedRow,
                        "row " + std::to_string(line_no) + ", column year_index: must be >= 1");
        }
        ob.actual_pct_of_forecast = parse_double_field(fields[2], line_no, "actual_pct_of_forecast");
        if (ob.actual_pct_of_forecast < 0.0) {
            throw Error(ErrorCode::MalformedRow,
                        "row " + std::to_string(line_no) +
                            ", column actual_pct_of_forecast: must be >= 0");
        }
        if (!seen.insert({ob.project_id, ob.year_index}).second) {
            throw Error(ErrorCode::DuplicateYearIndex,
                        "row " + std::to_string(line_no) + ": duplicate year " +
                            std::to_string(ob.year_index) + " for project '" + ob.project_id + "'");
        }
        cls.rampups.push_back(std::move(ob));
    }
    return cls;
}

// Attribute predicate for subsetting a class. Unset members match everything.
struct RecordFilter {
    std::optional<std::string> category;
    std::optional<Funding> funding;
    std::optional<std::string> forecaster_id;
    std::optional<int> open_year_min;
    std::optional<int> open_year_max;

    bool matches(const ProjectRecord& r) const {
        if (category && r.category != *category) return false;
        if (funding && r.funding != *funding) return false;
        if (forecaster_id && r.forecaster_id != *forecaster_id) return false;
        if (open_year_min && (!r.open_year || *r.open_year < *open_year_min)) return false;
        if (open_year_max && (!r.open_year || *r.open_year > *open_year_max)) return false;
        return true;
    }
};

// Parses one "key=value" expression into the filter. Throws BadInput on an
// unknown key so CLI typos fail loudly.
inline void apply_filter_expression(RecordFilter& f, const std::string& expr) {
    const auto eq = expr.find('=');
    if (eq == std::string::npos) {
        throw Error(ErrorCode::BadInput, "filter must be key=value, got '" + expr + "'");
    }
    const std::string key = trim(expr.substr(0, eq));
    const std::string value = trim(expr.substr(eq + 1));
    if (key == "category") {
        f.category = value;
    } else if (key == "funding") {
        f.funding = funding_from_string(value);
    } else if (key == "forecaster_id") {
        f.forecaster_id = value;
    } else if (key == "open_year_min") {
        f.open_year_min = std::stoi(value);
    } else if (key == "open_year_max") {
        f.open_year_max = std::stoi(value);
    } else {
        throw Error(ErrorCode::BadInput, "unknown filter key '" + key + "'");
    }
}

// Returns the records matching the predicate plus their ramp-up rows.
// The input class is never modified; an empty result is legal here and only
// surfaces as InsufficientData when statistics are requested.
inline ReferenceClass filter(const ReferenceClass& cls, const RecordFilter& f) {
    ReferenceClass out;
    out.direction = cls.direction;
    out.label = cls.label;
    std::set<std::string> kept;
    for (const auto& r : cls.records) {
        if (f.matches(r)) {
            out.records.push_back(r);
            kept.insert(r.project_id);
        }
    }
    for (const auto& ob : cls.rampups) {
        if (kept.count(ob.project_id)) out.rampups.push_back(ob);
    }
    return out;
}

enum class OutlierPolicy { None, Manual, Auto };

inline OutlierPolicy outlier_policy_from_string(const std::string& s) {
    if (s == "none") return OutlierPolicy::None;
    if (s == "manual") return OutlierPolicy::Manual;
    if (s == "auto") return OutlierPolicy::Auto;
    throw Error(ErrorCode::BadInput, "outlier policy must be none|manual|auto, got '" + s + "'");
}

// Recomputes outlier flags and returns a new class; record count and order
// are preserved, only flags change.
//   none:   clear every flag.
//   manual: keep flags exactly as ingested.
//   auto:   flag |log(accuracy) - median| > 3*MAD on log-accuracy; accuracy 0
//           is always flagged (no finite log); MAD of 0 flags nothing else.
inline ReferenceClass flag_outliers(const ReferenceClass& cls, OutlierPolicy policy) {
    ReferenceClass out = cls;
    if (policy == OutlierPolicy::Manual) return out;
    if (policy == OutlierPolicy::None) {
        for (auto& r : out.records) r.outlier_flag = false;
        return out;
    }
    if (out.records.size() < 5) {
        throw Error(ErrorCode::InsufficientData,
                    "automatic outlier detection needs at least 5 records, got " +
                        std::to_string(out.records.size()));
    }
    std::vector<double> logs;
    logs.reserve(out.records.size());
    for (const auto& r : out.records) {
        const double a = accuracy(r);
        if (a > 0.0) logs.push_back(std::log(a));
    }
    double med = 0.0, mad = 0.0;
    if (!logs.empty()) {
        med = median_of(logs);
        mad = mad_of(logs);
    }
    for (auto& r : out.records) {
        const double a = accuracy(r);
        if (a <= 0.0) {
            r.outlier_flag = true;  // zero accuracy has no log; always an outlier
        } else if (mad > 0.0) {
            r.outlier_flag = std::fabs(std::log(a) - med) > 3.0 * mad;
        } else {
            r.outlier_flag = false;  // degenerate spread: flag nothing
        }
    }
    return out;
}

// --- serialization -----------------------------------------------------------

// Canonical CSV form; parse(serialize(parse(x))) == parse(x).
inline std::string serialize_reference_csv(const ReferenceClass& cls) {
    std::ostringstream out;
    out << "project_id,category,forecast_first_year,actual_first_year,"
           "forecaster_id,funding,outlier_flag,open_year,notes\n";
    for (const auto& r : cls.records) {
        out << csv_escape(r.project_id) << ',' << csv_escape(r.category) << ','
            << fmt_double(r.forecast_first_year) << ',' << fmt_double(r.actual_first_year) << ','
            << csv_escape(r.forecaster_id) << ',' << to_string(r.funding) << ','
            << (r.outlier_flag ? 1 : 0) << ',';
        if (r.open_year) out << *r.open_year;
        out << ',' << csv_escape(r.notes) << '\n';
    }
    return out.str();
}

inline std::string serialize_rampup_csv(const ReferenceClass& cls) {
    std::ostringstream out;
    out << "project_id,year_index,actual_pct_of_forecast\n";
    for (const auto& ob : cls.rampups) {
        out << csv_escape(ob.project_id) << ',' << ob.year_index << ','
            << fmt_double(ob.actual_pct_of_forecast) << '\n';
    }
    return out.str();
}

// Class bundle JSON: the validated, self-contained form `ingest` writes and
// the other subcommands consume.
inline nlohmann::ordered_json to_bundle_json(const ReferenceClass& cls) {
    nlohmann::ordered_json j;
    j["label"] = cls.label;
    j["direction"] = to_string(cls.direction);
    j["records"] = nlohmann::ordered_json::array();
    for (const auto& r : cls.records) {
        nlohmann::ordered_json rec;
        rec["project_id"] = r.project_id;
        rec["category"] = r.category;
        rec["forecast_first_year"] = r.forecast_first_year;
        rec["actual_first_year"] = r.actual_first_year;
        if (!r.forecaster_id.empty()) rec["forecaster_id"] = r.forecaster_id;
        rec["funding"] = to_string(r.funding);
        rec["outlier_flag"] = r.outlier_flag;
        if (r.open_year) rec["open_year"] = *r.open_year;
        if (!r.notes.empty()) rec["notes"] = r.notes;
        j["records"].push_back(std::move(rec));
    }
    j["rampups"] = nlohmann::ordered_json::array();
    for (const auto& ob : cls.rampups) {
        nlohmann::ordered_json row;
        row["project_id"] = ob.project_id;
        row["year_index"] = ob.year_index;
        row["actual_pct_of_forecast"] = ob.actual_pct_of_forecast;
        j["rampups"].push_back(std::move(row));
    }
    return j;
}

inline ReferenceClass from_bundle_json(const nlohmann::json& j) {
    try {
        ReferenceClass cls;
        cls.label = j.value("label", std::string{});
        cls.direction = direction_from_string(j.value("direction", std::string{"benefit_like"}));
        std::set<std::string> ids;
        for (const auto& rec : j.at("records")) {
            ProjectRecord r;
            r.project_id = rec.at("project_id").get<std::string>();
            if (!ids.insert(r.project_id).second) {
                throw Error(ErrorCode::DuplicateProjectId,
                            "bundle: duplicate project_id '" + r.project_id + "'");
            }
            r.category = rec.value("category", std::string{});
            r.forecast_first_year = rec.at("forecast_first_year").get<double>();
            if (!(r.forecast_first_year > 0.0)) {
                throw Error(ErrorCode::NonPositiveForecast,
                            "bundle: project '" + r.project_id + "' has forecast_first_year <= 0");
            }
            r.actual_first_year = rec.at("actual_first_year").get<double>();
            if (r.actual_first_year < 0.0) {
                throw Error(ErrorCode::BadInput,
                            "bundle: project '" + r.project_id + "' has actual_first_year < 0");
            }
            r.forecaster_id = rec.value("forecaster_id", std::string{});
            r.funding = funding_from_string(rec.value("funding", std::string{"unknown"}));
            r.outlier_flag = rec.value("outlier_flag", false);
            if (rec.contains("open_year")) r.open_year = rec["open_year"].get<int>();
            r.notes = rec.value("notes", std::string{});
            cls.records.push_back(std::move(r));
        }
        std::set<std::pair<std::string, int>> seen;
        for (const auto& row : j.value("rampups", nlohmann::json::array())) {
            RampUpObservation ob;
            ob.project_id = row.at("project_id").get<std::string>();
            if (!ids.count(ob.project_id)) {
                throw Error(ErrorCode::UnknownProjectId,
                            "bundle: ramp-up project '" + ob.project_id + "' not in records");
            }
            ob.year_index = row.at("year_index").get<int>();
            if (ob.year_index < 1) {
                throw Error(ErrorCode::BadInput, "bundle: year_index must be >= 1");
            }
            ob.actual_pct_of_forecast = row.at("actual_pct_of_forecast").get<double>();
            if (!seen.insert({ob.project_id, ob.year_index}).second) {
                throw Error(ErrorCode::DuplicateYearIndex,
                            "bundle: duplicate year " + std::to_string(ob.year_index) +
                                " for project '" + ob.project_id + "'");
            }
            cls.rampups.push_back(std::move(ob));
        }
        if (cls.records.empty()) throw Error(ErrorCode::BadInput, "bundle: no records");
        return cls;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadInput, std::string("bundle JSON: ") + e.what());
    }
}

}  // namespace outsideview
