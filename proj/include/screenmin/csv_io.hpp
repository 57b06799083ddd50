#pragma once

// CSV input/output for the command-line tools. The dialect is deliberately
// rigid: comma separators, a required header, '.' decimal point, UTF-8, no
// quoting — so identical analyses always produce byte-identical files.
// Numbers are written with to_chars in scientific notation at 16 fractional
// digits (17 significant), which round-trips every double exactly and never
// consults the locale.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <unordered_set>
#include <vector>

#include "procedures.hpp"

namespace screenmin {

// Input problem tied to a 1-based line number; the CLI maps this to exit 2.
struct CsvError : std::runtime_error {
    CsvError(std::size_t line_arg, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_arg) + ": " + what),
          line(line_arg) {}
    std::size_t line;
};

inline std::string format_double(double x) {
    char buf[40];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x,
                                         std::chars_format::scientific, 16);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

inline double parse_probability(const std::string& field, std::size_t line,
                                const char* name) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw CsvError(line, std::string(name) + " is not a number: '" + field + "'");
    if (!(value >= 0.0 && value <= 1.0))
        throw CsvError(line, std::string(name) + " outside [0,1]: '" + field + "'");
    return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') { fields.push_back(current); current.clear(); }
        else current.push_back(ch);
    }
    fields.push_back(current);
    return fields;
}

// Reads a p-value matrix with the exact header id,p1,p2. Throws CsvError
// with the offending line number on any malformation.
inline PValueMatrix read_pvalue_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);

    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw CsvError(1, "empty file; expected header id,p1,p2");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,p1,p2")
        throw CsvError(1, "header must be exactly 'id,p1,p2', got '" + line + "'");

    PValueMatrix pmat;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw CsvError(lineno, "expected 3 fields, got " + std::to_string(fields.size()));
        if (fields[0].empty()) throw CsvError(lineno, "empty id");
        if (!seen.insert(fields[0]).second)
            throw CsvError(lineno, "duplicate id '" + fields[0] + "'");
        PValueRow row;
        row.id = fields[0];
        row.p1 = parse_probability(fields[1], lineno, "p1");
        row.p2 = parse_probability(fields[2], lineno, "p2");
        pmat.push_back(std::move(row));
    }
    if (pmat.empty()) throw CsvError(lineno, "no data rows");
    return pmat;
}

inline void write_result_csv(const std::string& path, const PValueMatrix& pmat,
                             const ProcedureResult& res) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "id,p1,p2,pmin,pmax,selected,adjusted_p,rejected\n";
    for (std::size_t i = 0; i < pmat.size(); ++i) {
        const auto& row = res.rows[i];
        out << pmat[i].id << ',' << format_double(pmat[i].p1) << ','
            << format_double(pmat[i].p2) << ',' << format_double(row.pmin) << ','
            << format_double(row.pmax) << ',' << (row.selected ? 1 : 0) << ','
            << format_double(row.adjusted_p) << ',' << (row.rejected ? 1 : 0) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace screenmin
