#pragma once

// Distributions induced by screening on the minimum p-value of a pair:
// per-type selection probabilities, the joint law of (max, min), the
// conditional law of the max given selection, the expected selected-set
// size, and the exact pmf of |S| for a mixture of pair types.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "distributions.hpp"

namespace screenmin {

// Truth pattern of a hypothesis pair (H_i1, H_i2). (0,1) and (1,0) are
// exchangeable under independence and share one representation.
enum class PairType { both_null, one_false, both_false };

// Mixture of m independent pairs with proportions (pi0, pi1, pi2) of
// both-null / one-false / both-false types; non-null p-values follow `law`.
struct PairMixture {
    int m = 0;
    double pi0 = 0.0;
    double pi1 = 0.0;
    double pi2 = 0.0;
    AlternativeLaw law{};
};

inline void validate(const PairMixture& mix) {
    if (mix.m < 1)
        throw std::invalid_argument("PairMixture: m must be >= 1");
    if (!(mix.pi0 >= 0.0 && mix.pi1 >= 0.0 && mix.pi2 >= 0.0))
        throw std::invalid_argument("PairMixture: proportions must be nonnegative");
    if (std::fabs(mix.pi0 + mix.pi1 + mix.pi2 - 1.0) > 1e-12)
        throw std::invalid_argument("PairMixture: proportions must sum to 1");
    validate(mix.law);
}

// Deterministic largest-remainder rounding of (pi0*m, pi1*m, pi2*m) to
// integer counts (both_null, one_false, both_false). Ties in the remainders
// break toward the lower index.
inline std::array<int, 3> pair_counts(const PairMixture& mix) {
    validate(mix);
    const double raw[3] = {mix.pi0 * mix.m, mix.pi1 * mix.m, mix.pi2 * mix.m};
    std::array<int, 3> counts{};
    double rem[3];
    int assigned = 0;
    for (int i = 0; i < 3; ++i) {
        counts[i] = static_cast<int>(std::floor(raw[i]));
        rem[i] = raw[i] - counts[i];
        assigned += counts[i];
    }
    int order[3] = {0, 1, 2};
    std::stable_sort(order, order + 3, [&](int a, int b) { return rem[a] > rem[b]; });
    for (int k = 0; k < mix.m - assigned; ++k) counts[order[k]] += 1;
    return counts;
}

// P(min(p1, p2) <= c) for one pair of the given type.
inline double selection_prob(PairType kind, double c, const AlternativeLaw& law) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("selection_prob: c must lie in (0,1)");
    const double Fc = alt_cdf(c, law);
    switch (kind) {
        case PairType::both_null:  return c * (2.0 - c);
        case PairType::one_false:  return c + Fc - c * Fc;
        case PairType::both_false: return 1.0 - (1.0 - Fc) * (1.0 - Fc);
    }
    return 0.0; // unreachable
}

// P(max <= u, min <= c) for one pair; branches meet continuously at u = c.
inline double joint_cdf_max_min(double u, double c, PairType kind,
                                const AlternativeLaw& law) {
    if (!(u > 0.0 && u < 1.0) || !(c > 0.0 && c < 1.0))
        throw std::domain_error("joint_cdf_max_min: u and c must lie in (0,1)");
    const double Fc = alt_cdf(c, law);
    const double Fu = alt_cdf(u, law);
    switch (kind) {
        case PairType::both_null:
            return u <= c ? u * u : 2.0 * u * c - c * c;
        case PairType::one_false:
            return u <= c ? u * Fu : u * Fc + c * Fu - c * Fc;
        case PairType::both_false:
            return u <= c ? Fu * Fu : 2.0 * Fu * Fc - Fc * Fc;
    }
    return 0.0; // unreachable
}

// Conditional CDF of the max p-value of a one-false pair given selection:
// P(max <= u | min <= c). Denominator is the one-false selection probability.
inline double p0(double u, double c, const AlternativeLaw& law) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("p0: c must lie in (0,1)");
    if (u >= 1.0) return 1.0;
    if (u <= 0.0) return 0.0;
    const double Fc = alt_cdf(c, law);
    if (Fc < 1e-300) {
        // Degenerate-F(c) limit; both branches lose their F(c) terms.
        return u <= c ? u * alt_cdf(u, law) / c : alt_cdf(u, law);
    }
    const double den = Fc + c - c * Fc;
    if (u <= c) return u * alt_cdf(u, law) / den;
    return (c * alt_cdf(u, law) + u * Fc - c * Fc) / den;
}

// Same conditional CDF for a both-null pair; always <= u.
inline double p00(double u, double c) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("p00: c must lie in (0,1)");
    if (u >= 1.0) return 1.0;
    if (u <= 0.0) return 0.0;
    if (u <= c) return u * u / (c * (2.0 - c));
    return (2.0 * u - c) / (2.0 - c);
}

// E|S(c)| for the mixture, using exact proportions (not integer counts).
inline double expected_selected(double c, const PairMixture& mix) {
    validate(mix);
    return mix.m * (mix.pi0 * selection_prob(PairType::both_null, c, mix.law) +
                    mix.pi1 * selection_prob(PairType::one_false, c, mix.law) +
                    mix.pi2 * selection_prob(PairType::both_false, c, mix.law));
}

namespace detail {

// Binomial(n, p) pmf, anchored at the mode via lgamma and extended outward
// by the exact term ratio, so every entry keeps full relative accuracy and
// the vector sums to 1 to ~1e-14 even for large n.
inline std::vector<double> binomial_pmf(int n, double p) {
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    if (n == 0) { pmf[0] = 1.0; return pmf; }
    if (p <= 0.0) { pmf[0] = 1.0; return pmf; }
    if (p >= 1.0) { pmf[static_cast<std::size_t>(n)] = 1.0; return pmf; }
    const int mode = std::min(n, static_cast<int>(std::floor((n + 1) * p)));
    const double logp = std::log(p), logq = std::log1p(-p);
    pmf[static_cast<std::size_t>(mode)] =
        std::exp(std::lgamma(n + 1.0) - std::lgamma(mode + 1.0) -
                 std::lgamma(n - mode + 1.0) + mode * logp + (n - mode) * logq);
    const double ratio = p / (1.0 - p);
    for (int k = mode + 1; k <= n; ++k)
        pmf[static_cast<std::size_t>(k)] =
            pmf[static_cast<std::size_t>(k - 1)] * ratio * (n - k + 1) / k;
    for (int k = mode - 1; k >= 0; --k)
        pmf[static_cast<std::size_t>(k)] =
            pmf[static_cast<std::size_t>(k + 1)] / ratio * (k + 1) / (n - k);
    return pmf;
}

// pmf of |S| for explicit type counts: convolution of three independent
// binomials. Direct dynamic programming with extended-precision accumulation.
inline std::vector<double> selected_count_pmf_counts(double c, const AlternativeLaw& law,
                                                     int n0, int n1, int n2) {
    std::vector<double> pmf{1.0};
    const std::pair<int, PairType> parts[3] = {{n0, PairType::both_null},
                                               {n1, PairType::one_false},
                                               {n2, PairType::both_false}};
    for (const auto& [n, kind] : parts) {
        if (n == 0) continue;
        const std::vector<double> b = binomial_pmf(n, selection_prob(kind, c, law));
        std::vector<double> out(pmf.size() + b.size() - 1, 0.0);
        for (std::size_t s = 0; s < out.size(); ++s) {
            long double acc = 0.0L;
            const std::size_t jlo = s >= pmf.size() ? s - pmf.size() + 1 : 0;
            const std::size_t jhi = std::min(s, b.size() - 1);
            for (std::size_t j = jlo; j <= jhi; ++j)
                acc += static_cast<long double>(b[j]) * pmf[s - j];
            out[s] = static_cast<double>(acc);
        }
        pmf = std::move(out);
    }
    return pmf;
}

} // namespace detail

// Exact pmf of |S(c)| over 0..m, with type counts from largest-remainder
// rounding of the mixture proportions.
inline std::vector<double> selected_count_pmf(double c, const PairMixture& mix) {
    const auto counts = pair_counts(mix);
    auto pmf = detail::selected_count_pmf_counts(c, mix.law, counts[0], counts[1], counts[2]);
    pmf.resize(static_cast<std::size_t>(mix.m) + 1, 0.0);
    return pmf;
}

} // namespace screenmin
