#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "outsideview/outsideview.hpp"

namespace {

using namespace outsideview;
namespace fs = std::filesystem;

// Exit codes: 0 success, 2 malformed input or bad options, 3 a well-formed
// question the data cannot answer, 4 core findings impossible.
int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingCoreFindings:
            return 4;
        case ErrorCode::InsufficientData:
        case ErrorCode::OutOfTableRange:
        case ErrorCode::NoRampUpData:
        case ErrorCode::NoOverestimatedSamples:
        case ErrorCode::SummaryOnlyDistribution:
        case ErrorCode::ZeroAccuracy:
            return 3;
        default:
            return 2;
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BadInput, "cannot open file: " + path);
    return in;
}

nlohmann::json load_json(const std::string& path) {
    auto in = open_input(path);
    return nlohmann::json::parse(in);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::BadInput, "cannot write file: " + path);
    out << content;
}

struct ClassSources {
    std::string class_path;    // bundle JSON
    std::string records_path;  // records CSV
    std::string rampup_path;   // ramp-up CSV, requires records_path
    std::string label;
    std::string direction = "benefit_like";
    std::vector<std::string> filters;
};

bool has_class_input(const ClassSources& src) {
    return !src.class_path.empty() || !src.records_path.empty();
}

// Loads from either source and applies the filters; outlier policy is the
// caller's concern because the report pipeline applies its own.
ReferenceClass load_class(const ClassSources& src) {
    ReferenceClass cls;
    if (!src.class_path.empty()) {
        cls = from_bundle_json(load_json(src.class_path));
    } else {
        auto records = open_input(src.records_path);
        cls = parse_reference_csv(records, src.label, direction_from_string(src.direction));
        if (!src.rampup_path.empty()) {
            auto ramps = open_input(src.rampup_path);
            cls = parse_rampup_csv(ramps, cls);
        }
    }
    if (!src.filters.empty()) {
        RecordFilter f;
        for (const auto& expr : src.filters) apply_filter_expression(f, expr);
        cls = filter(cls, f);
    }
    return cls;
}

void add_class_options(CLI::App* cmd, ClassSources& src, bool with_filters = true) {
    cmd->add_option("--class", src.class_path, "reference-class bundle JSON");
    cmd->add_option("--records", src.records_path, "reference-class records CSV");
    cmd->add_option("--rampup", src.rampup_path, "ramp-up observations CSV (with --records)");
    cmd->add_option("--label", src.label, "class label (with --records)");
    cmd->add_option("--direction", src.direction,
                    "accuracy direction: benefit_like or cost_like (with --records)");
    if (with_filters) {
        cmd->add_option("--filter", src.filters,
                        "record filter key=value (category, funding, forecaster_id, "
                        "open_year_min, open_year_max); repeatable");
    }
}

int cmd_ingest(const ClassSources& src, const std::string& out_path) {
    if (src.records_path.empty()) {
        throw Error(ErrorCode::BadInput, "ingest requires --records");
    }
    ReferenceClass cls = load_class(src);
    std::string body = to_bundle_json(cls).dump(2) + "\n";
    std::ostringstream note;
    note << "ingested " << cls.records.size() << " records, " << cls.rampups.size()
         << " ramp-up observations\n";
    if (!out_path.empty()) {
        write_text(out_path, body);
        std::cout << note.str();
    } else {
        std::cout << body;
        std::cerr << note.str();
    }
    return 0;
}

int cmd_benchmark(const ClassSources& src, const std::string& policy_name,
                  const std::string& out_path) {
    if (!has_class_input(src)) {
        throw Error(ErrorCode::BadInput, "benchmark requires --class or --records");
    }
    ReferenceClass cls = flag_outliers(load_class(src), outlier_policy_from_string(policy_name));
    BenchmarkDistribution dist = summarize(cls, /*exclude_outliers=*/true);
    std::cout << render_benchmark_text(dist);
    if (!out_path.empty()) write_text(out_path, summary_to_json(dist).dump(2) + "\n");
    return 0;
}

int cmd_quantile(const ClassSources& src, const std::string& summary_path,
                 const std::string& policy_name, std::vector<double> ps) {
    if (has_class_input(src) == !summary_path.empty()) {
        throw Error(ErrorCode::BadInput, "quantile requires exactly one of --class/--records or --summary");
    }
    BenchmarkDistribution dist;
    if (!summary_path.empty()) {
        dist = summary_from_json(load_json(summary_path));
    } else {
        ReferenceClass cls =
            flag_outliers(load_class(src), outlier_policy_from_string(policy_name));
        dist = summarize(cls, /*exclude_outliers=*/true);
    }
    if (ps.empty()) ps = standard_quantile_grid();
    std::ostringstream out;
    out << "p,accuracy\n";
    for (double p : ps) out << fmt_double(p) << ',' << fmt_double(quantile(dist, p)) << '\n';
    std::cout << out.str();
    return 0;
}

struct DiligenceArgs {
    ClassSources src;
    std::string forecast_path;
    std::string summary_path;
    std::string risks_path;
    std::string response_path;
    std::string policy_name = "manual";
    std::vector<double> levels = {0.5, 0.8, 0.9};
    double shortfall_s = 0.15;
    std::uint64_t seed = 42;
    int resamples = 2000;
    bool pessimistic = false;
    std::string format = "md";
    std::string out_path;
};

int cmd_diligence(const DiligenceArgs& args) {
    ForecastUnderReview fc = forecast_from_json(load_json(args.forecast_path));

    DiligenceInputs in;
    if (has_class_input(args.src)) in.cls = load_class(args.src);
    if (!args.summary_path.empty()) in.summary = summary_from_json(load_json(args.summary_path));
    if (!args.risks_path.empty()) {
        in.risks = risk_register_from_json(load_json(args.risks_path));
        in.risks_supplied = true;
    }
    if (!args.response_path.empty()) in.response = response_from_json(load_json(args.response_path));

    DiligenceOptions opt;
    opt.levels = args.levels;
    opt.shortfall_s = args.shortfall_s;
    opt.outlier_policy = outlier_policy_from_string(args.policy_name);
    opt.seed = args.seed;
    opt.bootstrap_resamples = args.resamples;
    opt.pessimistic = args.pessimistic;

    if (args.format != "md" && args.format != "json") {
        throw Error(ErrorCode::BadInput, "--format must be md or json");
    }

    DueDiligenceReport rep = run_due_diligence(fc, in, opt);
    nlohmann::ordered_json j = report_to_json(rep);
    std::string body = args.format == "json" ? j.dump(2) + "\n" : report_to_markdown(j);
    std::string verdict_line = std::string("VERDICT: ") + to_string(rep.conclusion.verdict) + "\n";

    // Plot-ready interval data lands beside the report (or in the working
    // directory when the report goes to stdout).
    if (rep.outcome) {
        fs::path csv_path = args.out_path.empty()
                                ? fs::path("outcome_table.csv")
                                : fs::path(args.out_path).parent_path() / "outcome_table.csv";
        write_text(csv_path.string(), outcome_table_csv(*rep.outcome));
    }

    if (!args.out_path.empty()) {
        write_text(args.out_path, body);
        std::cout << verdict_line;
    } else {
        std::cout << body;
        // Markdown already ends with the verdict line.
        if (args.format == "json") std::cout << verdict_line;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"outside-view due diligence for project forecasts"};
    app.require_subcommand(1);

    ClassSources ingest_src;
    std::string ingest_out;
    auto* ingest = app.add_subcommand("ingest", "validate CSVs and emit a class bundle JSON");
    add_class_options(ingest, ingest_src, /*with_filters=*/false);
    ingest->add_option("--out", ingest_out, "bundle output path (default stdout)");

    ClassSources bench_src;
    std::string bench_policy = "manual";
    std::string bench_out;
    auto* bench = app.add_subcommand("benchmark", "summarize a reference class");
    add_class_options(bench, bench_src);
    bench->add_option("--exclude-outliers", bench_policy, "outlier policy: none, manual, auto");
    bench->add_option("--out", bench_out, "also write the summary JSON here");

    ClassSources quant_src;
    std::string quant_summary, quant_policy = "manual";
    std::vector<double> quant_ps;
    auto* quant = app.add_subcommand("quantile", "read accuracy quantiles from a benchmark");
    add_class_options(quant, quant_src);
    quant->add_option("--summary", quant_summary, "benchmark summary JSON");
    quant->add_option("--exclude-outliers", quant_policy, "outlier policy: none, manual, auto");
    quant->add_option("--p", quant_ps, "probabilities to read (default: standard grid)")
        ->delimiter(',');

    DiligenceArgs dil;
    auto* dilig = app.add_subcommand("diligence", "run the eight-step due-diligence report");
    dilig->add_option("--forecast", dil.forecast_path, "forecast under review (JSON)")
        ->required();
    add_class_options(dilig, dil.src);
    dilig->add_option("--summary", dil.summary_path,
                      "published benchmark summary JSON (authoritative when given)");
    dilig->add_option("--risk-register", dil.risks_path, "risk register JSON");
    dilig->add_option("--forecaster-response", dil.response_path, "forecaster response JSON");
    dilig->add_option("--exclude-outliers", dil.policy_name, "outlier policy: none, manual, auto");
    dilig->add_option("--levels", dil.levels, "interval confidence levels")->delimiter(',');
    dilig->add_option("--shortfall", dil.shortfall_s, "shortfall threshold s for step 3");
    dilig->add_option("--seed", dil.seed, "bootstrap seed");
    dilig->add_option("--resamples", dil.resamples, "bootstrap resamples");
    dilig->add_flag("--pessimistic", dil.pessimistic,
                    "base the expected outcome on the conditional mean over overestimates");
    dilig->add_option("--format", dil.format, "report format: md or json");
    dilig->add_option("--out", dil.out_path, "report output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(ingest_src, ingest_out);
        if (bench->parsed()) return cmd_benchmark(bench_src, bench_policy, bench_out);
        if (quant->parsed()) return cmd_quantile(quant_src, quant_summary, quant_policy, quant_ps);
        if (dilig->parsed()) return cmd_diligence(dil);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
