#pragma once

// End-to-end procedures on an observed p-value matrix: two-stage ScreenMin
// with a fixed or default threshold, adaptive ScreenMin with a single
// data-driven threshold, and the one-stage Bonferroni and Holm baselines on
// the max p-values. Every method fills the same per-row result layout and
// maintains rejected <=> adjusted_p <= alpha.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "thresholds.hpp"

namespace screenmin {

struct PValueRow {
    std::string id;
    double p1 = 1.0;
    double p2 = 1.0;
};

using PValueMatrix = std::vector<PValueRow>;

inline void validate(const PValueMatrix& pmat) {
    if (pmat.empty())
        throw std::invalid_argument("PValueMatrix: at least one row required");
    for (const auto& row : pmat)
        if (!(row.p1 >= 0.0 && row.p1 <= 1.0 && row.p2 >= 0.0 && row.p2 <= 1.0))
            throw std::domain_error("PValueMatrix: p-values must lie in [0,1]");
}

struct ResultRow {
    double pmin = 1.0;
    double pmax = 1.0;
    bool selected = false;
    double adjusted_p = 1.0;
    bool rejected = false;
};

struct ProcedureResult {
    std::string method;
    double alpha = 0.0;
    double selection_threshold = std::numeric_limits<double>::quiet_NaN();
    double testing_threshold = std::numeric_limits<double>::quiet_NaN();
    bool testing_threshold_defined = false;
    std::size_t selected_count = 0;
    std::size_t rejected_count = 0;
    std::vector<ResultRow> rows;
};

namespace detail {

inline ProcedureResult make_result(const PValueMatrix& pmat, std::string method, double alpha) {
    validate(pmat);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("alpha must lie in (0,1)");
    ProcedureResult res;
    res.method = std::move(method);
    res.alpha = alpha;
    res.rows.resize(pmat.size());
    for (std::size_t i = 0; i < pmat.size(); ++i) {
        res.rows[i].pmin = std::min(pmat[i].p1, pmat[i].p2);
        res.rows[i].pmax = std::max(pmat[i].p1, pmat[i].p2);
    }
    return res;
}

} // namespace detail

// Which p-value the ScreenMin adjustment multiplies by |S|. The testing rule
// compares the max p-value to alpha/|S|, so max_p is the faithful adjusted
// p-value; min_p reproduces a variant display where the minimum is adjusted
// instead, kept only for comparison and off by default.
enum class ScreenMinAdjust { max_p, min_p };

// Two-stage procedure at a fixed selection threshold c: select rows with
// min p <= c, then reject selected rows whose adjusted p-value
// min(|S| * pmax, 1) is within alpha — equivalently pmax <= alpha/|S|.
inline ProcedureResult screenmin(const PValueMatrix& pmat, double alpha, double c,
                                 ScreenMinAdjust adjust = ScreenMinAdjust::max_p) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("screenmin: c must lie in (0,1)");
    ProcedureResult res = detail::make_result(pmat, "screenmin", alpha);
    res.selection_threshold = c;

    for (auto& row : res.rows)
        if (row.pmin <= c) { row.selected = true; ++res.selected_count; }

    const double s = static_cast<double>(res.selected_count);
    if (res.selected_count > 0) {
        res.testing_threshold = alpha / s;
        res.testing_threshold_defined = true;
    }
    for (auto& row : res.rows) {
        if (!row.selected) { row.adjusted_p = 1.0; continue; }
        const double base = adjust == ScreenMinAdjust::max_p ? row.pmax : row.pmin;
        row.adjusted_p = std::min(s * base, 1.0);
        row.rejected = row.adjusted_p <= alpha;
        if (row.rejected) ++res.rejected_count;
    }
    return res;
}

// Adaptive ScreenMin: one threshold gamma for both selection and testing.
// The adjusted p-value pmax * alpha / gamma (capped at 1) preserves
// rejected <=> adjusted <= alpha, since gamma <= alpha.
inline ProcedureResult adaptive_screenmin(const PValueMatrix& pmat, double alpha) {
    ProcedureResult res = detail::make_result(pmat, "adaptive", alpha);
    std::vector<double> minima(res.rows.size());
    for (std::size_t i = 0; i < res.rows.size(); ++i) minima[i] = res.rows[i].pmin;
    const double gamma = adaptive_gamma(minima, alpha);

    res.selection_threshold = gamma;
    res.testing_threshold = gamma;
    res.testing_threshold_defined = true;
    for (auto& row : res.rows) {
        if (row.pmin > gamma) { row.adjusted_p = 1.0; continue; }
        row.selected = true;
        ++res.selected_count;
        row.adjusted_p = std::min(row.pmax * alpha / gamma, 1.0);
        row.rejected = row.pmax <= gamma;
        if (row.rejected) ++res.rejected_count;
    }
    return res;
}

// One-stage Bonferroni on the max p-values: adjusted = min(m * pmax, 1).
// No screening stage, so every row counts as entering the test.
inline ProcedureResult bonferroni_max(const PValueMatrix& pmat, double alpha) {
    ProcedureResult res = detail::make_result(pmat, "bonferroni", alpha);
    const double m = static_cast<double>(res.rows.size());
    res.testing_threshold = alpha / m;
    res.testing_threshold_defined = true;
    res.selected_count = res.rows.size();
    for (auto& row : res.rows) {
        row.selected = true;
        row.adjusted_p = std::min(m * row.pmax, 1.0);
        row.rejected = row.adjusted_p <= alpha;
        if (row.rejected) ++res.rejected_count;
    }
    return res;
}

// Holm's step-down on the max p-values: adjusted values are the running
// maximum of (m - rank) * pmax in ascending order, so they are monotone and
// dominate Bonferroni's rejections.
inline ProcedureResult holm_max(const PValueMatrix& pmat, double alpha) {
    ProcedureResult res = detail::make_result(pmat, "holm", alpha);
    const std::size_t m = res.rows.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return res.rows[a].pmax < res.rows[b].pmax;
    });

    res.selected_count = m;
    double running = 0.0;
    for (std::size_t rank = 0; rank < m; ++rank) {
        auto& row = res.rows[order[rank]];
        row.selected = true;
        running = std::max(running,
                           std::min(static_cast<double>(m - rank) * row.pmax, 1.0));
        row.adjusted_p = running;
        row.rejected = row.adjusted_p <= alpha;
        if (row.rejected) ++res.rejected_count;
    }
    return res;
}

} // namespace screenmin
