#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <screenmin/csv_io.hpp>
#include <screenmin/procedures.hpp>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout and stderr combined
};

RunResult run_cli(const std::string& args) {
    const std::string command = std::string(CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    std::array<char, 4096> buffer;
    while (std::size_t got = std::fread(buffer.data(), 1, buffer.size(), pipe))
        result.output.append(buffer.data(), got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::map<std::string, std::string> parse_summary(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto colon = line.find(": ");
        if (colon != std::string::npos)
            kv[line.substr(0, colon)] = line.substr(colon + 2);
    }
    return kv;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct TempPath {
    std::string path;
    explicit TempPath(const std::string& name) {
        static int counter = 0;
        path = "cli_test_" + std::to_string(counter++) + "_" + name;
    }
    ~TempPath() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("analyze reproduces the navy reanalysis") {
    TempPath out("navy_default.csv");
    const RunResult run = run_cli("analyze --input \"" NAVY_CSV
                                  "\" --method screenmin --out " +
                                  out.path);
    CAPTURE(run.output);
    REQUIRE(run.exit_code == 0);
    const auto kv = parse_summary(run.output);
    CHECK(kv.at("method") == "screenmin");
    CHECK(kv.at("selected") == "13");
    CHECK(kv.at("rejections") == "0");
    CHECK(std::stod(kv.at("selection_threshold")) ==
          Catch::Approx(0.05 / 149).epsilon(1e-14));
    CHECK(std::stod(kv.at("testing_threshold")) ==
          Catch::Approx(0.05 / 13).epsilon(1e-14));

    TempPath out2("navy_adaptive.csv");
    const RunResult ada = run_cli("analyze --input \"" NAVY_CSV
                                  "\" --method adaptive --out " +
                                  out2.path);
    REQUIRE(ada.exit_code == 0);
    const auto kv2 = parse_summary(ada.output);
    CHECK(kv2.at("selected") == "22");
    CHECK(kv2.at("rejections") == "0");
    const double gamma = std::stod(kv2.at("selection_threshold"));
    CHECK(gamma >= 0.05 / 23);
    CHECK(gamma <= 0.05 / 22);
}

TEST_CASE("analyze output re-parses to the in-memory result") {
    TempPath out("roundtrip.csv");
    const RunResult run = run_cli("analyze --input \"" NAVY_CSV
                                  "\" --method screenmin --threshold fixed:0.002 --out " +
                                  out.path);
    REQUIRE(run.exit_code == 0);

    const screenmin::PValueMatrix pmat = screenmin::read_pvalue_csv(NAVY_CSV);
    const screenmin::ProcedureResult expected = screenmin::screenmin(pmat, 0.05, 0.002);

    std::ifstream in(out.path);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "id,p1,p2,pmin,pmax,selected,adjusted_p,rejected");
    for (std::size_t i = 0; i < pmat.size(); ++i) {
        REQUIRE(std::getline(in, line));
        const auto fields = screenmin::split_csv_line(line);
        REQUIRE(fields.size() == 8);
        CHECK(fields[0] == pmat[i].id);
        CHECK(fields[1] == screenmin::format_double(pmat[i].p1));
        CHECK(fields[3] == screenmin::format_double(expected.rows[i].pmin));
        CHECK(fields[4] == screenmin::format_double(expected.rows[i].pmax));
        CHECK(fields[5] == (expected.rows[i].selected ? "1" : "0"));
        CHECK(fields[6] == screenmin::format_double(expected.rows[i].adjusted_p));
        CHECK(fields[7] == (expected.rows[i].rejected ? "1" : "0"));
    }
}

TEST_CASE("analyze dispatches the adaptive threshold for screenmin") {
    TempPath out_a("dispatch_a.csv");
    TempPath out_b("dispatch_b.csv");
    const RunResult via_threshold = run_cli(
        "analyze --input \"" NAVY_CSV "\" --method screenmin --threshold adaptive --out " +
        out_a.path);
    const RunResult direct =
        run_cli("analyze --input \"" NAVY_CSV "\" --method adaptive --out " + out_b.path);
    REQUIRE(via_threshold.exit_code == 0);
    REQUIRE(direct.exit_code == 0);
    CHECK(slurp(out_a.path) == slurp(out_b.path));
    const auto kv = parse_summary(via_threshold.output);
    CHECK(kv.at("method") == "adaptive");
    CHECK(kv.at("selected") == "22");
}

TEST_CASE("analyze rejects malformed input with the line number") {
    TempPath bad("bad.csv");
    {
        std::ofstream f(bad.path);
        f << "id,p1,p2\nrow1,0.5,0.5\nrow2,1.5,0.5\n";
    }
    TempPath out("never_written.csv");
    const RunResult run =
        run_cli("analyze --input " + bad.path + " --method holm --out " + out.path);
    CHECK(run.exit_code == 2);
    CHECK(run.output.find("line 3") != std::string::npos);
}

TEST_CASE("analyze usage errors exit with status 2") {
    TempPath out("unused.csv");
    CHECK(run_cli("analyze --input nonexistent.csv --method holm --out " + out.path)
              .exit_code == 2);
    CHECK(run_cli("analyze --input \"" NAVY_CSV "\" --method guess --out " + out.path)
              .exit_code == 2);
    CHECK(run_cli("analyze --input \"" NAVY_CSV "\" --method holm").exit_code == 2);
    CHECK(run_cli("analyze --input \"" NAVY_CSV
                  "\" --method holm --threshold adaptive --out " +
                  out.path)
              .exit_code == 2);
    CHECK(run_cli("analyze --input \"" NAVY_CSV
                  "\" --method screenmin --threshold fixed:2 --out " +
                  out.path)
              .exit_code == 2);
    TempPath empty("empty.csv");
    { std::ofstream f(empty.path); }
    CHECK(run_cli("analyze --input " + empty.path + " --method holm --out " + out.path)
              .exit_code == 2);
}

TEST_CASE("help is not an error") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("analyze --help").exit_code == 0);
    CHECK(run_cli("").exit_code == 2); // a subcommand is required
}

TEST_CASE("oracle prints the solved thresholds") {
    const RunResult run =
        run_cli("oracle --alpha 0.05 --m 100 --pi0 0.7 --pi1 0.25 --pi2 0.05 --snr 2");
    REQUIRE(run.exit_code == 0);
    const auto kv = parse_summary(run.output);
    CHECK(std::stod(kv.at("c_star")) == Catch::Approx(0.00460246).epsilon(1e-4));
    CHECK(std::stod(kv.at("cbar")) == Catch::Approx(0.00490774).epsilon(1e-4));
    CHECK(kv.at("constraint_binds") == "1");
    CHECK(std::stod(kv.at("power_approx")) >
          std::stod(kv.at("bonferroni_power")));

    const RunResult degenerate =
        run_cli("oracle --alpha 0.05 --m 100 --pi0 0.75 --pi1 0.25 --pi2 0 --snr 2");
    REQUIRE(degenerate.exit_code == 0);
    const auto kv2 = parse_summary(degenerate.output);
    CHECK(kv2.at("power_approx") == "NA");
    CHECK(kv2.at("bonferroni_power") == "NA");

    CHECK(run_cli("oracle --alpha 0.05 --m 100 --pi0 0.9 --pi1 0.25 --pi2 0.05 --snr 2")
              .exit_code == 2);
}

TEST_CASE("curves cover both families") {
    TempPath p0_out("p0.csv");
    const RunResult p0 = run_cli("curves --kind p0-vs-snr --points 11 --out " + p0_out.path);
    REQUIRE(p0.exit_code == 0);
    std::ifstream in(p0_out.path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "snr,p0_c0.0005,p0_c0.025,p0_c0.05");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 11);

    TempPath fp_out("fp.csv");
    const RunResult fp = run_cli(
        "curves --kind fwer-power-vs-c --m 100 --pi0 0.7 --pi1 0.25 --pi2 0.05 "
        "--snr 3 --points 50 --out " +
        fp_out.path);
    REQUIRE(fp.exit_code == 0);
    std::ifstream fin(fp_out.path);
    std::getline(fin, header);
    CHECK(header == "c,fwer_approx,power_approx,bonferroni_power");

    CHECK(run_cli("curves --kind sideways --out nowhere.csv").exit_code == 2);
}

TEST_CASE("simulate is deterministic across runs and workers") {
    TempPath config("sim.json");
    {
        std::ofstream f(config.path);
        f << R"({"m": 60, "pi1": [0.0, 0.3], "pi2": 0.1, "snr1": 3.0, "snr2": 3.0,
                 "rho": 0.0, "alpha": 0.05, "replications": 150, "seed": 7,
                 "methods": ["screenmin-default", "adaptive", "bonferroni",
                             "holm", "screenmin-fixed:0.002"], "workers": 1})";
    }
    TempPath out1("sim1.csv");
    TempPath out2("sim2.csv");
    REQUIRE(run_cli("simulate --config " + config.path + " --out " + out1.path)
                .exit_code == 0);
    REQUIRE(run_cli("simulate --config " + config.path + " --out " + out2.path)
                .exit_code == 0);
    CHECK(slurp(out1.path) == slurp(out2.path));

    TempPath config3(".json");
    {
        std::ifstream src(config.path);
        std::ofstream dst(config3.path);
        std::string text((std::istreambuf_iterator<char>(src)),
                         std::istreambuf_iterator<char>());
        const auto pos = text.find("\"workers\": 1");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 12, "\"workers\": 5");
        dst << text;
    }
    TempPath out3("sim3.csv");
    REQUIRE(run_cli("simulate --config " + config3.path + " --out " + out3.path)
                .exit_code == 0);
    CHECK(slurp(out1.path) == slurp(out3.path));

    // grid points appear as one row per method, labeled by pi1
    std::istringstream rows(slurp(out1.path));
    std::string line;
    std::getline(rows, line);
    CHECK(line == "method,pi1,fwer,fwer_se,power,power_se,rejected_total,rejected_true");
    int count = 0;
    for (; std::getline(rows, line); ++count) {}
    CHECK(count == 10); // 5 methods x 2 grid points
}

TEST_CASE("simulate rejects invalid configs by field") {
    TempPath out("sim_invalid.csv");
    auto run_config = [&](const std::string& body) {
        TempPath config("config.json");
        {
            std::ofstream f(config.path);
            f << body;
        }
        return run_cli("simulate --config " + config.path + " --out " + out.path);
    };

    const RunResult missing = run_config(
        R"({"m": 10, "pi1": 0.5, "pi2": 0.5, "snr1": 1, "snr2": 1, "rho": 0,
            "alpha": 0.05, "seed": 1, "methods": ["holm"]})");
    CHECK(missing.exit_code == 2);
    CHECK(missing.output.find("replications") != std::string::npos);

    const RunResult unknown = run_config(
        R"({"m": 10, "pi1": 0.5, "pi2": 0.5, "snr1": 1, "snr2": 1, "rho": 0,
            "alpha": 0.05, "replications": 5, "seed": 1, "methods": ["holm"],
            "typo_field": true})");
    CHECK(unknown.exit_code == 2);
    CHECK(unknown.output.find("typo_field") != std::string::npos);

    const RunResult bad_method = run_config(
        R"({"m": 10, "pi1": 0.5, "pi2": 0.5, "snr1": 1, "snr2": 1, "rho": 0,
            "alpha": 0.05, "replications": 5, "seed": 1, "methods": ["guesswork"]})");
    CHECK(bad_method.exit_code == 2);
    CHECK(bad_method.output.find("methods") != std::string::npos);

    const RunResult pi0_grid_clash = run_config(
        R"({"m": 10, "pi0": 0.4, "pi1": [0.1, 0.2], "pi2": 0.5, "snr1": 1, "snr2": 1,
            "rho": 0, "alpha": 0.05, "replications": 5, "seed": 1, "methods": ["holm"]})");
    CHECK(pi0_grid_clash.exit_code == 2);
    CHECK(pi0_grid_clash.output.find("pi0") != std::string::npos);

    const RunResult not_json = run_config("{definitely not json");
    CHECK(not_json.exit_code == 2);
}

TEST_CASE("simulate handles a degenerate power case") {
    TempPath config("degenerate.json");
    {
        std::ofstream f(config.path);
        f << R"({"m": 20, "pi1": 1.0, "pi2": 0.0, "snr1": 2.0, "snr2": 2.0,
                 "rho": 0.0, "alpha": 0.05, "replications": 50, "seed": 3,
                 "methods": ["screenmin-default"]})";
    }
    TempPath out("degenerate.csv");
    const RunResult run =
        run_cli("simulate --config " + config.path + " --out " + out.path);
    REQUIRE(run.exit_code == 0);
    const std::string text = slurp(out.path);
    CHECK(text.find(",NA,NA,") != std::string::npos); // power columns undefined
}
