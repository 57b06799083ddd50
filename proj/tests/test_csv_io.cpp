#include <catch2/catch_amalgamated.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>

#include <screenmin/csv_io.hpp>

using namespace screenmin;
using Catch::Approx;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content) {
        static int counter = 0;
        path = "csv_io_test_" + std::to_string(counter++) + ".tmp";
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("formatted doubles round-trip exactly") {
    for (double x : {0.0, 1.0, 0.05, 0.05 / 149, 1.2e-6, 0.9999999999999999,
                     3.0e-4, 2.2250738585072014e-308}) {
        const std::string text = format_double(x);
        double back = 0.0;
        const auto [ptr, ec] =
            std::from_chars(text.data(), text.data() + text.size(), back);
        REQUIRE(ec == std::errc{});
        REQUIRE(ptr == text.data() + text.size());
        CHECK(back == x);
    }
    // formatting is fixed-width scientific: no locale, no surprises
    CHECK(format_double(0.05) == "5.0000000000000003e-02");
}

TEST_CASE("reading a well-formed matrix") {
    TempFile file("id,p1,p2\nalpha,0.5,0.25\nbeta,1e-3,1\n");
    const PValueMatrix pmat = read_pvalue_csv(file.path);
    REQUIRE(pmat.size() == 2);
    CHECK(pmat[0].id == "alpha");
    CHECK(pmat[0].p1 == 0.5);
    CHECK(pmat[0].p2 == 0.25);
    CHECK(pmat[1].p1 == 1e-3);
    CHECK(pmat[1].p2 == 1.0);
}

TEST_CASE("reading tolerates CRLF and blank lines") {
    TempFile file("id,p1,p2\r\nrow1,0.5,0.25\r\n\r\nrow2,0.1,0.2\r\n");
    const PValueMatrix pmat = read_pvalue_csv(file.path);
    REQUIRE(pmat.size() == 2);
    CHECK(pmat[1].id == "row2");
}

TEST_CASE("reader reports the offending line") {
    TempFile bad_header("id;p1;p2\nrow,0.5,0.5\n");
    CHECK_THROWS_MATCHES(read_pvalue_csv(bad_header.path), CsvError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("line 1")));

    TempFile bad_field("id,p1,p2\nrow1,0.5,0.5\nrow2,0.5,oops\n");
    try {
        read_pvalue_csv(bad_field.path);
        FAIL("expected CsvError");
    } catch (const CsvError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("p2") != std::string::npos);
    }

    TempFile out_of_range("id,p1,p2\nrow1,1.5,0.5\n");
    try {
        read_pvalue_csv(out_of_range.path);
        FAIL("expected CsvError");
    } catch (const CsvError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("[0,1]") != std::string::npos);
    }

    TempFile wrong_arity("id,p1,p2\nrow1,0.5\n");
    try {
        read_pvalue_csv(wrong_arity.path);
        FAIL("expected CsvError");
    } catch (const CsvError& e) {
        CHECK(e.line == 2);
    }

    TempFile duplicate("id,p1,p2\nrow,0.5,0.5\nrow,0.4,0.4\n");
    try {
        read_pvalue_csv(duplicate.path);
        FAIL("expected CsvError");
    } catch (const CsvError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("degenerate files are rejected") {
    TempFile empty("");
    CHECK_THROWS_AS(read_pvalue_csv(empty.path), CsvError);
    TempFile header_only("id,p1,p2\n");
    CHECK_THROWS_AS(read_pvalue_csv(header_only.path), CsvError);
    CHECK_THROWS_AS(read_pvalue_csv("does_not_exist_anywhere.csv"), std::runtime_error);
}

TEST_CASE("scientific notation with embedded signs parses as one field") {
    TempFile file("id,p1,p2\nrow,1.5e-3,2.5E-4\n");
    const PValueMatrix pmat = read_pvalue_csv(file.path);
    CHECK(pmat[0].p1 == 1.5e-3);
    CHECK(pmat[0].p2 == 2.5e-4);
}

TEST_CASE("result round trip preserves every field bit for bit") {
    PValueMatrix pmat;
    pmat.push_back({"first", 0.001, 0.012});
    pmat.push_back({"second", 0.4, 0.002});
    pmat.push_back({"third", 0.2, 0.3});
    const ProcedureResult res = screenmin(pmat, 0.05, 0.01);

    TempFile sink("");
    write_result_csv(sink.path, pmat, res);

    std::ifstream in(sink.path, std::ios::binary);
    std::string line;
    std::getline(in, line);
    CHECK(line == "id,p1,p2,pmin,pmax,selected,adjusted_p,rejected");
    for (std::size_t i = 0; i < pmat.size(); ++i) {
        REQUIRE(std::getline(in, line));
        const auto fields = split_csv_line(line);
        REQUIRE(fields.size() == 8);
        CHECK(fields[0] == pmat[i].id);
        auto parse = [](const std::string& s) {
            double v = 0.0;
            std::from_chars(s.data(), s.data() + s.size(), v);
            return v;
        };
        CHECK(parse(fields[1]) == pmat[i].p1);
        CHECK(parse(fields[2]) == pmat[i].p2);
        CHECK(parse(fields[3]) == res.rows[i].pmin);
        CHECK(parse(fields[4]) == res.rows[i].pmax);
        CHECK(fields[5] == (res.rows[i].selected ? "1" : "0"));
        CHECK(parse(fields[6]) == res.rows[i].adjusted_p);
        CHECK(fields[7] == (res.rows[i].rejected ? "1" : "0"));
    }
    CHECK_FALSE(std::getline(in, line));
}
