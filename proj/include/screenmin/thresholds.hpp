#pragma once

// Selection-threshold computations: the default alpha/m, the balance point
// cbar solving c*E|S(c)| = alpha, the model-based oracle threshold that
// maximizes plug-in power subject to the plug-in FWER constraint, and the
// data-adaptive grid threshold gamma with its continuous counterpart.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "error_power.hpp"
#include "screening.hpp"

namespace screenmin {

inline double default_threshold(double alpha, int m) {
    if (m < 1)
        throw std::invalid_argument("default_threshold: m must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("default_threshold: alpha must lie in (0,1)");
    return alpha / m;
}

// Unique root of c * E|S(c)| = alpha; the map is continuous and strictly
// increasing from 0 to m, so plain bisection converges unconditionally.
inline double cbar(double alpha, const PairMixture& mix) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("cbar: alpha must lie in (0,1)");
    validate(mix);
    const auto h = [&](double c) { return c * expected_selected(c, mix) - alpha; };
    double lo = 1e-300, hi = 1.0 - 1e-12;
    while (h(lo) >= 0.0) lo *= 0.5; // h(0+) < 0 analytically; keep the bracket honest
    if (!(h(lo) < 0.0 && h(hi) > 0.0))
        throw std::runtime_error("cbar: bisection bracket invalid");
    for (int it = 0; it < 2000 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    if (std::fabs(h(root)) > 1e-9 * alpha)
        throw std::runtime_error("cbar: residual tolerance not met");
    return root;
}

// Resolved oracle threshold with its diagnostics.
struct OracleChoice {
    double c = 0.0;              // the selection threshold
    bool constraint_binds = true; // false when g <= alpha over the whole scan
                                  // (c then maximizes plug-in power), or in the
                                  // pathological all-infeasible case
    double g_value = 0.0;        // g(c)
    double expected_s = 0.0;     // E|S(c)|
    double u_value = 0.0;        // testing threshold alpha/E|S(c)|
};

// Smallest c whose plug-in FWER stays within alpha from c up to alpha.
//
// g is evaluated on a 2000-point log grid over [1e-10, alpha]. g is not
// monotone: for high-SNR mixtures it dips briefly below alpha where
// E|S(c)| ~ 1 before re-crossing, and only the final downward crossing
// borders the terminal feasible interval that reaches alpha. The scan
// therefore takes the last sign change from above to below and refines it
// by bisection; picking an earlier dip would satisfy the constraint only
// on a sliver and forfeit nearly all power. If the whole grid is feasible
// the constraint never binds and the unconstrained maximizer of the
// plug-in power is returned, flagged; if the whole grid is infeasible
// (no known configuration does this), the argmin of g is returned, flagged.
inline OracleChoice oracle_threshold(double alpha, const PairMixture& mix) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("oracle_threshold: alpha must lie in (0,1)");
    validate(mix);

    constexpr int grid_points = 2000;
    const double lo_edge = 1e-10;
    std::vector<double> grid(grid_points), gval(grid_points);
    const double step = std::log(alpha / lo_edge) / (grid_points - 1);
    for (int i = 0; i < grid_points; ++i) {
        grid[i] = lo_edge * std::exp(step * i);
        gval[i] = fwer_approx(grid[i], alpha, mix);
    }
    grid.back() = alpha; // guard against rounding at the top of the scan

    int cross = -1;
    for (int i = 1; i < grid_points; ++i)
        if (gval[i - 1] > alpha && gval[i] <= alpha) cross = i;

    OracleChoice choice;
    if (cross < 0) {
        bool all_feasible = true;
        for (double g : gval)
            if (g > alpha) { all_feasible = false; break; }
        choice.constraint_binds = false;
        if (all_feasible) {
            double best = grid[0], best_p = -1.0;
            for (int i = 0; i < grid_points; ++i) {
                const double p = power_approx(grid[i], alpha, mix);
                if (p > best_p) { best_p = p; best = grid[i]; }
            }
            choice.c = best;
        } else {
            choice.c = grid[static_cast<std::size_t>(
                std::min_element(gval.begin(), gval.end()) - gval.begin())];
        }
    } else {
        double lo = grid[cross - 1], hi = grid[cross];
        while (hi - lo > 1e-12 * hi) {
            const double mid = 0.5 * (lo + hi);
            (fwer_approx(mid, alpha, mix) > alpha ? lo : hi) = mid;
        }
        choice.c = hi; // the feasible end of the final bracket
        choice.constraint_binds = true;
    }
    choice.g_value = fwer_approx(choice.c, alpha, mix);
    choice.expected_s = expected_selected(choice.c, mix);
    choice.u_value = choice.expected_s > 0.0 ? alpha / choice.expected_s
                                             : std::numeric_limits<double>::infinity();
    return choice;
}

// Data-adaptive threshold over the grid {alpha/m, ..., alpha/2, alpha}:
// the largest grid value c with c * #{min_i <= c} <= alpha. Always defined,
// since c = alpha/m satisfies the inequality trivially.
inline double adaptive_gamma(const std::vector<double>& minima, double alpha) {
    if (minima.empty())
        throw std::invalid_argument("adaptive_gamma: empty input");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("adaptive_gamma: alpha must lie in (0,1)");
    for (double p : minima)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::domain_error("adaptive_gamma: minima must lie in [0,1]");

    std::vector<double> sorted = minima;
    std::sort(sorted.begin(), sorted.end());
    const int m = static_cast<int>(sorted.size());
    for (int k = 1; k <= m; ++k) {
        const double c = alpha / k;
        const auto n = std::upper_bound(sorted.begin(), sorted.end(), c) - sorted.begin();
        if (n <= k) return c;
    }
    return alpha / m; // unreachable: k = m always satisfies n <= m
}

// Continuous counterpart of gamma: the largest usable real threshold that
// reproduces gamma's selected set under <=-thresholding. With K = |S(gamma)|
// and p_(K+1) the next order statistic, any c in [p_(K), min(p_(K+1)-, alpha/K)]
// selects exactly that set and keeps c*K <= alpha; the top of that window is
// returned (one ulp below the next jump when the jump binds, alpha/K when the
// budget binds, capped at alpha for an empty selection). Anchoring to gamma's
// set rather than the raw real-line supremum keeps the two forms selecting
// identical sets on every input, including instances where the supremum sits
// beyond an infeasible grid step.
inline double continuous_adaptive(const std::vector<double>& minima, double alpha) {
    const double gamma = adaptive_gamma(minima, alpha); // validates inputs
    std::vector<double> sorted = minima;
    std::sort(sorted.begin(), sorted.end());
    const int m = static_cast<int>(sorted.size());
    const int K = static_cast<int>(
        std::upper_bound(sorted.begin(), sorted.end(), gamma) - sorted.begin());
    const double next_jump = K < m ? sorted[static_cast<std::size_t>(K)] : 1.0;
    const double below_jump = std::nextafter(next_jump, 0.0);
    if (K == 0) return std::min(below_jump, alpha);
    return std::min(below_jump, alpha / K);
}

} // namespace screenmin
