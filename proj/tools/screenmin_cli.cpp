// Command-line front end: analyze a p-value matrix with one of the union
// testing procedures, run a seeded simulation study from a JSON config,
// solve for the oracle threshold, or dump curve data for plotting.
//
// Exit codes: 0 on success, 2 on any usage, input, or config error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <screenmin/screenmin.hpp>

namespace {

using nlohmann::json;

std::string fmt_or_na(double x) {
    return std::isnan(x) ? std::string("NA") : screenmin::format_double(x);
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
    std::string input;
    std::string out;
    std::string method;
    std::string threshold = "default";
    double alpha = 0.05;
};

screenmin::ProcedureResult dispatch_analysis(const AnalyzeArgs& args,
                                             const screenmin::PValueMatrix& pmat) {
    if (args.method == "screenmin") {
        if (args.threshold == "default")
            return screenmin::screenmin(
                pmat, args.alpha,
                screenmin::default_threshold(args.alpha, static_cast<int>(pmat.size())));
        if (args.threshold == "adaptive")
            return screenmin::adaptive_screenmin(pmat, args.alpha);
        if (args.threshold.rfind("fixed:", 0) == 0) {
            const std::string num = args.threshold.substr(6);
            std::size_t used = 0;
            double c = 0.0;
            try {
                c = std::stod(num, &used);
            } catch (const std::exception&) {
                throw std::runtime_error("--threshold fixed:<c>: '" + num +
                                         "' is not a number");
            }
            if (used != num.size() || !(c > 0.0 && c < 1.0))
                throw std::runtime_error("--threshold fixed:<c>: c must lie in (0,1), got '" +
                                         num + "'");
            return screenmin::screenmin(pmat, args.alpha, c);
        }
        throw std::runtime_error("--threshold must be default, adaptive, or fixed:<c>, got '" +
                                 args.threshold + "'");
    }
    if (args.threshold != "default")
        throw std::runtime_error("--threshold applies only to --method screenmin");
    if (args.method == "adaptive") return screenmin::adaptive_screenmin(pmat, args.alpha);
    if (args.method == "bonferroni") return screenmin::bonferroni_max(pmat, args.alpha);
    if (args.method == "holm") return screenmin::holm_max(pmat, args.alpha);
    throw std::runtime_error("unknown method '" + args.method + "'");
}

int run_analyze(const AnalyzeArgs& args) {
    const screenmin::PValueMatrix pmat = screenmin::read_pvalue_csv(args.input);
    const screenmin::ProcedureResult res = dispatch_analysis(args, pmat);
    screenmin::write_result_csv(args.out, pmat, res);

    std::cout << "method: " << res.method << '\n'
              << "alpha: " << screenmin::format_double(res.alpha) << '\n'
              << "selection_threshold: " << fmt_or_na(res.selection_threshold) << '\n'
              << "testing_threshold: "
              << (res.testing_threshold_defined ? screenmin::format_double(res.testing_threshold)
                                                : std::string("NA"))
              << '\n'
              << "selected: " << res.selected_count << '\n'
              << "rejections: " << res.rejected_count << '\n';
    return 0;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string out;
};

[[noreturn]] void config_error(const std::string& field, const std::string& why) {
    throw std::runtime_error("config field '" + field + "': " + why);
}

double require_number(const json& doc, const std::string& field) {
    if (!doc.contains(field)) config_error(field, "missing");
    if (!doc[field].is_number()) config_error(field, "must be a number");
    return doc[field].get<double>();
}

std::int64_t require_integer(const json& doc, const std::string& field) {
    if (!doc.contains(field)) config_error(field, "missing");
    if (!doc[field].is_number_integer()) config_error(field, "must be an integer");
    return doc[field].get<std::int64_t>();
}

screenmin::MethodSpec parse_method(const std::string& name) {
    screenmin::MethodSpec spec;
    spec.label = name;
    if (name == "screenmin-default") spec.kind = screenmin::Method::screenmin_default;
    else if (name == "screenmin-oracle") spec.kind = screenmin::Method::screenmin_oracle;
    else if (name == "adaptive") spec.kind = screenmin::Method::adaptive;
    else if (name == "bonferroni") spec.kind = screenmin::Method::bonferroni;
    else if (name == "holm") spec.kind = screenmin::Method::holm;
    else if (name.rfind("screenmin-fixed:", 0) == 0) {
        spec.kind = screenmin::Method::screenmin_fixed;
        const std::string num = name.substr(16);
        std::size_t used = 0;
        try {
            spec.fixed_c = std::stod(num, &used);
        } catch (const std::exception&) {
            config_error("methods", "'" + name + "' has a malformed threshold");
        }
        if (used != num.size() || !(spec.fixed_c > 0.0 && spec.fixed_c < 1.0))
            config_error("methods", "'" + name + "' needs a threshold in (0,1)");
    } else {
        config_error("methods", "unknown method '" + name + "'");
    }
    return spec;
}

int run_simulate(const SimulateArgs& args) {
    std::ifstream in(args.config);
    if (!in) throw std::runtime_error("cannot open config file: " + args.config);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::runtime_error("config must be a JSON object");

    static const std::vector<std::string> known = {
        "m", "pi0", "pi1", "pi2", "snr1", "snr2", "rho",
        "alpha", "replications", "seed", "methods", "workers"};
    for (const auto& item : doc.items())
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            config_error(item.key(), "unknown field");

    screenmin::SimulationConfig base;
    base.m = static_cast<int>(require_integer(doc, "m"));
    base.pi2 = require_number(doc, "pi2");
    base.snr1 = require_number(doc, "snr1");
    base.snr2 = require_number(doc, "snr2");
    base.rho = require_number(doc, "rho");
    base.alpha = require_number(doc, "alpha");
    base.replications = static_cast<int>(require_integer(doc, "replications"));
    const std::int64_t seed = require_integer(doc, "seed");
    if (seed < 0) config_error("seed", "must be nonnegative");
    base.seed = static_cast<std::uint64_t>(seed);
    if (doc.contains("workers")) {
        if (!doc["workers"].is_number_integer()) config_error("workers", "must be an integer");
        base.workers = doc["workers"].get<int>();
    }

    if (!doc.contains("methods")) config_error("methods", "missing");
    if (!doc["methods"].is_array() || doc["methods"].empty())
        config_error("methods", "must be a non-empty array of strings");
    for (const auto& entry : doc["methods"]) {
        if (!entry.is_string()) config_error("methods", "entries must be strings");
        base.methods.push_back(parse_method(entry.get<std::string>()));
    }

    // pi1 is a scalar or a grid; with a grid, pi0 is derived per point and an
    // explicit pi0 is rejected so no silent inconsistency slips through.
    if (!doc.contains("pi1")) config_error("pi1", "missing");
    std::vector<double> pi1_grid;
    if (doc["pi1"].is_array()) {
        if (doc.contains("pi0"))
            config_error("pi0", "must be omitted when pi1 is a grid (it is derived)");
        if (doc["pi1"].empty()) config_error("pi1", "grid must be non-empty");
        for (const auto& entry : doc["pi1"]) {
            if (!entry.is_number()) config_error("pi1", "grid entries must be numbers");
            pi1_grid.push_back(entry.get<double>());
        }
    } else if (doc["pi1"].is_number()) {
        pi1_grid.push_back(doc["pi1"].get<double>());
    } else {
        config_error("pi1", "must be a number or an array of numbers");
    }

    const bool pi0_given = doc.contains("pi0");
    double pi0_explicit = 0.0;
    if (pi0_given) {
        if (!doc["pi0"].is_number()) config_error("pi0", "must be a number");
        pi0_explicit = doc["pi0"].get<double>();
    }

    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + args.out);
    out << "method,pi1,fwer,fwer_se,power,power_se,rejected_total,rejected_true\n";

    for (double pi1 : pi1_grid) {
        screenmin::SimulationConfig cfg = base;
        cfg.pi1 = pi1;
        cfg.pi0 = pi0_given ? pi0_explicit : 1.0 - pi1 - cfg.pi2;
        if (pi0_given && std::fabs(cfg.pi0 + cfg.pi1 + cfg.pi2 - 1.0) > 1e-9)
            config_error("pi0", "proportions do not sum to 1");
        if (!pi0_given && cfg.pi0 < 0.0)
            config_error("pi1", "pi1 + pi2 exceeds 1 (derived pi0 is negative)");
        try {
            screenmin::validate(cfg);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(std::string("config invalid: ") + e.what());
        }
        const screenmin::SimulationSummary summary = screenmin::run_study(cfg);
        for (const auto& ms : summary.methods) {
            out << ms.label << ',' << screenmin::format_double(pi1) << ','
                << screenmin::format_double(ms.fwer) << ','
                << screenmin::format_double(ms.fwer_se) << ','
                << fmt_or_na(ms.power) << ',' << fmt_or_na(ms.power_se) << ','
                << ms.rejected_total << ',' << ms.rejected_true << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + args.out);
    return 0;
}

// --- oracle -----------------------------------------------------------------

struct OracleArgs {
    double alpha = 0.05;
    int m = 0;
    double pi0 = 0.0, pi1 = 0.0, pi2 = 0.0;
    double snr = 0.0;
};

int run_oracle(const OracleArgs& args) {
    const screenmin::PairMixture mix{args.m, args.pi0, args.pi1, args.pi2,
                                     screenmin::AlternativeLaw{args.snr}};
    screenmin::validate(mix);
    const screenmin::OracleChoice choice = screenmin::oracle_threshold(args.alpha, mix);
    const double cbar_value = screenmin::cbar(args.alpha, mix);
    const bool has_power = args.pi2 > 0.0;

    std::cout << "c_star: " << screenmin::format_double(choice.c) << '\n'
              << "constraint_binds: " << (choice.constraint_binds ? 1 : 0) << '\n'
              << "cbar: " << screenmin::format_double(cbar_value) << '\n'
              << "fwer_approx: " << screenmin::format_double(choice.g_value) << '\n'
              << "expected_selected: " << screenmin::format_double(choice.expected_s) << '\n'
              << "testing_threshold: " << screenmin::format_double(choice.u_value) << '\n'
              << "power_approx: "
              << (has_power
                      ? screenmin::format_double(
                            screenmin::power_approx(choice.c, args.alpha, mix))
                      : std::string("NA"))
              << '\n'
              << "bonferroni_power: "
              << (has_power ? screenmin::format_double(screenmin::bonferroni_power(
                                  args.alpha, args.m, mix.law))
                            : std::string("NA"))
              << '\n';
    return 0;
}

// --- curves -----------------------------------------------------------------

struct CurvesArgs {
    std::string kind;
    std::string out;
    double u = 0.05;
    std::vector<double> cs;
    double snr_min = 0.0, snr_max = 6.0;
    double alpha = 0.05;
    int m = 0;
    double pi0 = 0.0, pi1 = 0.0, pi2 = 0.0;
    double snr = 0.0;
    double c_min = 1e-8, c_max = 0.0;
    int points = 0;
};

std::string short_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

int run_curves(const CurvesArgs& args) {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + args.out);

    if (args.kind == "p0-vs-snr") {
        std::vector<double> cs = args.cs;
        if (cs.empty()) cs = {5e-4, 2.5e-2, 5e-2};
        for (double c : cs)
            if (!(c > 0.0 && c < 1.0))
                throw std::runtime_error("--c values must lie in (0,1)");
        if (!(args.u > 0.0 && args.u < 1.0))
            throw std::runtime_error("--u must lie in (0,1)");
        const int points = args.points > 0 ? args.points : 121;
        if (points < 2) throw std::runtime_error("--points must be at least 2");
        if (!(args.snr_max > args.snr_min) || args.snr_min < 0.0)
            throw std::runtime_error("--snr-min/--snr-max must satisfy 0 <= min < max");

        out << "snr";
        for (double c : cs) out << ",p0_c" << short_number(c);
        out << '\n';
        for (int i = 0; i < points; ++i) {
            const double snr =
                args.snr_min + (args.snr_max - args.snr_min) * i / (points - 1);
            out << screenmin::format_double(snr);
            for (double c : cs)
                out << ','
                    << screenmin::format_double(
                           screenmin::p0(args.u, c, screenmin::AlternativeLaw{snr}));
            out << '\n';
        }
    } else if (args.kind == "fwer-power-vs-c") {
        if (args.m < 1) throw std::runtime_error("--m is required and must be >= 1");
        const screenmin::PairMixture mix{args.m, args.pi0, args.pi1, args.pi2,
                                         screenmin::AlternativeLaw{args.snr}};
        screenmin::validate(mix);
        const double c_max = args.c_max > 0.0 ? args.c_max : args.alpha;
        if (!(args.c_min > 0.0 && args.c_min < c_max && c_max < 1.0))
            throw std::runtime_error("--c-min/--c-max must satisfy 0 < min < max < 1");
        const int points = args.points > 0 ? args.points : 200;
        if (points < 2) throw std::runtime_error("--points must be at least 2");
        const double bonf =
            screenmin::bonferroni_power(args.alpha, args.m, mix.law);

        out << "c,fwer_approx,power_approx,bonferroni_power\n";
        const double lratio = std::log(c_max / args.c_min);
        for (int i = 0; i < points; ++i) {
            const double c = args.c_min * std::exp(lratio * i / (points - 1));
            out << screenmin::format_double(c) << ','
                << screenmin::format_double(screenmin::fwer_approx(c, args.alpha, mix))
                << ','
                << screenmin::format_double(screenmin::power_approx(c, args.alpha, mix))
                << ',' << screenmin::format_double(bonf) << '\n';
        }
    } else {
        throw std::runtime_error("unknown --kind '" + args.kind +
                                 "' (expected p0-vs-snr or fwer-power-vs-c)");
    }
    if (!out) throw std::runtime_error("write failed: " + args.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ScreenMin: two-stage multiple testing for union hypotheses"};
    app.require_subcommand(1);

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "Run a procedure on a CSV of p-value pairs");
    analyze->add_option("--input", analyze_args.input, "input CSV with header id,p1,p2")
        ->required();
    analyze->add_option("--alpha", analyze_args.alpha, "familywise error level")
        ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
    analyze
        ->add_option("--method", analyze_args.method,
                     "screenmin | adaptive | bonferroni | holm")
        ->required()
        ->check(CLI::IsMember({"screenmin", "adaptive", "bonferroni", "holm"}));
    analyze->add_option("--threshold", analyze_args.threshold,
                        "default | adaptive | fixed:<c> (screenmin only)");
    analyze->add_option("--out", analyze_args.out, "output CSV path")->required();

    SimulateArgs simulate_args;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Run a seeded simulation study from a JSON config");
    simulate->add_option("--config", simulate_args.config, "JSON config path")->required();
    simulate->add_option("--out", simulate_args.out, "output CSV path")->required();

    OracleArgs oracle_args;
    CLI::App* oracle = app.add_subcommand(
        "oracle", "Solve for the oracle selection threshold of a mixture");
    oracle->add_option("--alpha", oracle_args.alpha, "familywise error level");
    oracle->add_option("--m", oracle_args.m, "number of hypothesis pairs")->required();
    oracle->add_option("--pi0", oracle_args.pi0, "proportion of both-null pairs")->required();
    oracle->add_option("--pi1", oracle_args.pi1, "proportion of one-false pairs")->required();
    oracle->add_option("--pi2", oracle_args.pi2, "proportion of both-false pairs")->required();
    oracle->add_option("--snr", oracle_args.snr, "mean shift under the alternative")
        ->required();

    CurvesArgs curves_args;
    CLI::App* curves = app.add_subcommand(
        "curves", "Emit plot-ready CSV curves");
    curves->add_option("--kind", curves_args.kind, "p0-vs-snr | fwer-power-vs-c")
        ->required();
    curves->add_option("--out", curves_args.out, "output CSV path")->required();
    curves->add_option("--u", curves_args.u, "p0 evaluation point (p0-vs-snr)");
    curves->add_option("--c", curves_args.cs,
                       "selection thresholds, repeatable (p0-vs-snr)");
    curves->add_option("--snr-min", curves_args.snr_min, "SNR range start (p0-vs-snr)");
    curves->add_option("--snr-max", curves_args.snr_max, "SNR range end (p0-vs-snr)");
    curves->add_option("--alpha", curves_args.alpha, "familywise error level");
    curves->add_option("--m", curves_args.m, "number of pairs (fwer-power-vs-c)");
    curves->add_option("--pi0", curves_args.pi0, "both-null proportion (fwer-power-vs-c)");
    curves->add_option("--pi1", curves_args.pi1, "one-false proportion (fwer-power-vs-c)");
    curves->add_option("--pi2", curves_args.pi2, "both-false proportion (fwer-power-vs-c)");
    curves->add_option("--snr", curves_args.snr, "mean shift (fwer-power-vs-c)");
    curves->add_option("--c-min", curves_args.c_min, "threshold grid start");
    curves->add_option("--c-max", curves_args.c_max, "threshold grid end (default alpha)");
    curves->add_option("--points", curves_args.points, "grid size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) return run_analyze(analyze_args);
        if (simulate->parsed()) return run_simulate(simulate_args);
        if (oracle->parsed()) return run_oracle(oracle_args);
        if (curves->parsed()) return run_curves(curves_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
