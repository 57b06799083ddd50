#pragma once

// Familywise error rate and power of the two-stage procedure: select pairs
// with min p <= c, then test the max p of each selected pair against
// alpha/|S|. The error-rate expectation over the exact law of |S| is the
// exact FWER when every pair is one-false (pi1 = 1) and an upper bound
// otherwise; the plug-in curve g(c) replaces |S| by its expectation.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "screening.hpp"

namespace screenmin {

// E[1 - (1 - P0(alpha/|S|, c))^{|S|} ; |S| > 0] over the exact pmf of |S|.
// Exact FWER iff pi1 = 1; an upper bound for mixtures with both-null pairs.
// With no true union hypotheses at all (pi0 = pi1 = 0) the FWER is 0 by
// definition and the one-false law no longer describes anything selected.
inline double fwer_exact(double c, double alpha, const PairMixture& mix) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("fwer_exact: c must lie in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("fwer_exact: alpha must lie in (0,1)");
    validate(mix);
    if (mix.pi0 + mix.pi1 <= 0.0) return 0.0;

    const std::vector<double> pmf = selected_count_pmf(c, mix);
    double total = 0.0, mass = 0.0;
    for (std::size_t s = 1; s < pmf.size(); ++s) {
        const double P0 = p0(alpha / static_cast<double>(s), c, mix.law);
        total += pmf[s] * (P0 >= 1.0
                               ? 1.0
                               : -std::expm1(static_cast<double>(s) * std::log1p(-P0)));
        mass += pmf[s];
        if (mass + pmf[0] > 1.0 - 1e-12) break; // remaining tail is negligible
    }
    return total;
}

// Plug-in bound g(c) = 1 - (1 - P0(alpha/E|S(c)|, c))^{E|S(c)|} with a
// real-valued exponent. Returns 0 when nothing is expected to be selected
// and 1 once the testing threshold alpha/E|S| reaches 1.
inline double fwer_approx(double c, double alpha, const PairMixture& mix) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("fwer_approx: c must lie in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("fwer_approx: alpha must lie in (0,1)");
    const double es = expected_selected(c, mix);
    if (es <= 0.0) return 0.0;
    const double P0 = p0(alpha / es, c, mix.law);
    if (P0 >= 1.0) return 1.0;
    return -std::expm1(es * std::log1p(-P0));
}

// P(reject a given both-false pair | |S| = s): the pair must be selected
// (min <= c) and its max must clear alpha/s. The two branches meet where
// c*s = alpha.
inline double conditional_power(int s, double c, double alpha, const AlternativeLaw& law) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("conditional_power: c must lie in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("conditional_power: alpha must lie in (0,1)");
    if (s <= 0) return 0.0;
    const double u = alpha / static_cast<double>(s);
    const double Fc = alt_cdf(c, law);
    const double Fu = alt_cdf(u, law);
    if (c * static_cast<double>(s) <= alpha) return 2.0 * Fc * Fu - Fc * Fc;
    return Fu * Fu;
}

// Unconditional rejection probability for a fixed both-false pair:
// |S| = 1 + |S_rest| with |S_rest| the selected count among the remaining
// m-1 pairs, so the expectation runs over that reduced convolution pmf.
inline double power_exact(double c, double alpha, const PairMixture& mix) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("power_exact: c must lie in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("power_exact: alpha must lie in (0,1)");
    validate(mix);
    const auto counts = pair_counts(mix);
    if (mix.pi2 <= 0.0 || counts[2] < 1)
        throw std::domain_error("power_exact: no both-false pairs in the mixture");

    const std::vector<double> rest = detail::selected_count_pmf_counts(
        c, mix.law, counts[0], counts[1], counts[2] - 1);
    double total = 0.0;
    for (std::size_t s = 0; s < rest.size(); ++s)
        total += rest[s] * conditional_power(static_cast<int>(s) + 1, c, alpha, mix.law);
    return total;
}

// Plug-in power curve P1(c): the conditional-power form with E|S(c)| in
// place of |S|. Continuous at the threshold-crossing point cbar where
// c * E|S(c)| = alpha, and nonincreasing beyond it.
inline double power_approx(double c, double alpha, const PairMixture& mix) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("power_approx: c must lie in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("power_approx: alpha must lie in (0,1)");
    const double es = expected_selected(c, mix);
    const double u = es > 0.0 ? std::min(alpha / es, 1.0) : 1.0;
    const double Fc = alt_cdf(c, mix.law);
    const double Fu = alt_cdf(u, mix.law);
    if (c * es <= alpha) return 2.0 * Fc * Fu - Fc * Fc;
    return Fu * Fu;
}

// One-stage baseline: Bonferroni on the max p-values rejects a both-false
// pair when both components clear alpha/m.
inline double bonferroni_power(double alpha, int m, const AlternativeLaw& law) {
    if (m < 1)
        throw std::invalid_argument("bonferroni_power: m must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("bonferroni_power: alpha must lie in (0,1)");
    const double Fu = alt_cdf(alpha / m, law);
    return Fu * Fu;
}

} // namespace screenmin
