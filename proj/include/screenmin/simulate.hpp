#pragma once

// Seeded Monte Carlo study: generate p-value matrices with a known mixture
// of pair types, run each requested procedure, and estimate FWER and power
// with binomial-style standard errors. Replications are independent work
// units whose results land in per-replication slots, so the reduction is
// identical for any worker count.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "procedures.hpp"
#include "rng.hpp"
#include "screening.hpp"

namespace screenmin {

enum class Method { screenmin_default, screenmin_oracle, screenmin_fixed,
                    adaptive, bonferroni, holm };

struct MethodSpec {
    Method kind = Method::screenmin_default;
    double fixed_c = 0.0; // only for screenmin_fixed
    std::string label;    // how the method appears in summaries
};

struct SimulationConfig {
    int m = 0;
    double pi0 = 0.0, pi1 = 0.0, pi2 = 0.0;
    double snr1 = 0.0, snr2 = 0.0; // mean shifts for false H_i1 / H_i2
    double rho = 0.0;              // within-column equicorrelation
    double alpha = 0.05;
    int replications = 0;
    std::uint64_t seed = 0;
    std::vector<MethodSpec> methods;
    int workers = 1;
};

inline void validate(const SimulationConfig& cfg) {
    PairMixture mix{cfg.m, cfg.pi0, cfg.pi1, cfg.pi2, AlternativeLaw{cfg.snr1}};
    validate(mix);
    if (!(cfg.snr2 >= 0.0))
        throw std::invalid_argument("SimulationConfig: snr2 must be nonnegative");
    if (!(cfg.rho >= 0.0 && cfg.rho < 1.0))
        throw std::invalid_argument("SimulationConfig: rho must lie in [0,1)");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw std::invalid_argument("SimulationConfig: alpha must lie in (0,1)");
    if (cfg.replications < 1)
        throw std::invalid_argument("SimulationConfig: replications must be >= 1");
    if (cfg.methods.empty())
        throw std::invalid_argument("SimulationConfig: at least one method required");
    if (cfg.workers < 1)
        throw std::invalid_argument("SimulationConfig: workers must be >= 1");
}

// Ground-truth labels alongside a generated matrix. Row layout is fixed:
// both-false rows first, then the one-false rows ((1,0) before (0,1)), then
// both-null — immaterial under rho = 0 by exchangeability, and part of the
// documented design for rho > 0.
struct GeneratedMatrix {
    PValueMatrix pmat;
    int n_both_false = 0; // rows [0, n_both_false) are the false unions
};

// One-factor equicorrelated construction within each column:
// Z_ij = sqrt(rho) * W_j + sqrt(1-rho) * eps_ij + mu_ij, p = 1 - Phi(Z).
// The factor W_j is the first draw of the (replication, column) substream.
inline GeneratedMatrix generate_pvalues(const SimulationConfig& cfg,
                                        std::uint64_t replication_index) {
    validate(cfg);
    const PairMixture mix{cfg.m, cfg.pi0, cfg.pi1, cfg.pi2, AlternativeLaw{cfg.snr1}};
    const auto counts = pair_counts(mix);
    const int n2 = counts[2], n1 = counts[1];
    const int n10 = n1 - n1 / 2; // (1,0) gets the odd row

    GeneratedMatrix gen;
    gen.n_both_false = n2;
    gen.pmat.resize(static_cast<std::size_t>(cfg.m));

    const double wfac = std::sqrt(cfg.rho);
    const double efac = std::sqrt(1.0 - cfg.rho);
    for (std::uint32_t col = 0; col < 2; ++col) {
        SubStream stream(cfg.seed, replication_index, col);
        const double w = stream.next_normal();
        for (int i = 0; i < cfg.m; ++i) {
            const bool h1_false = i < n2 || (i >= n2 && i < n2 + n10);
            const bool h2_false = i < n2 || (i >= n2 + n10 && i < n2 + n1);
            const double mu = col == 0 ? (h1_false ? cfg.snr1 : 0.0)
                                       : (h2_false ? cfg.snr2 : 0.0);
            const double z = wfac * w + efac * stream.next_normal() + mu;
            const double p = std_normal_cdf(-z);
            auto& row = gen.pmat[static_cast<std::size_t>(i)];
            if (col == 0) { row.p1 = p; row.id = std::to_string(i + 1); }
            else row.p2 = p;
        }
    }
    return gen;
}

struct MethodSummary {
    std::string label;
    double fwer = 0.0, fwer_se = 0.0;
    double power = 0.0, power_se = 0.0; // NaN when pi2 rounds to zero rows
    bool power_defined = false;
    std::uint64_t rejected_total = 0; // all rejections across replications
    std::uint64_t rejected_true = 0;  // rejections of true union hypotheses
};

struct SimulationSummary {
    std::vector<MethodSummary> methods;
};

namespace detail {

struct RepOutcome {
    bool any_false_rejection = false;
    double power_fraction = 0.0;
    std::uint32_t rejected_total = 0;
    std::uint32_t rejected_true = 0;
};

inline ProcedureResult run_method(const MethodSpec& spec, const PValueMatrix& pmat,
                                  double alpha, double oracle_c) {
    switch (spec.kind) {
        case Method::screenmin_default:
            return screenmin(pmat, alpha, alpha / static_cast<double>(pmat.size()));
        case Method::screenmin_oracle:
            return screenmin(pmat, alpha, oracle_c);
        case Method::screenmin_fixed:
            return screenmin(pmat, alpha, spec.fixed_c);
        case Method::adaptive:
            return adaptive_screenmin(pmat, alpha);
        case Method::bonferroni:
            return bonferroni_max(pmat, alpha);
        case Method::holm:
            return holm_max(pmat, alpha);
    }
    throw std::logic_error("run_method: unknown method");
}

} // namespace detail

// Full study: FWER is the fraction of replications rejecting at least one
// true union hypothesis; power is the per-replication fraction of rejected
// false unions, averaged. The oracle threshold is resolved once per config
// from the mixture (using snr1, even when snr2 differs — the model the
// oracle sees is deliberately the single-law one).
inline SimulationSummary run_study(const SimulationConfig& cfg) {
    validate(cfg);
    const int R = cfg.replications;
    const std::size_t n_methods = cfg.methods.size();

    double oracle_c = 0.0;
    for (const auto& spec : cfg.methods)
        if (spec.kind == Method::screenmin_oracle) {
            const PairMixture mix{cfg.m, cfg.pi0, cfg.pi1, cfg.pi2,
                                  AlternativeLaw{cfg.snr1}};
            oracle_c = oracle_threshold(cfg.alpha, mix).c;
            break;
        }

    // Per-replication outcome slots: indexed [rep][method], written by
    // whichever worker owns the replication, reduced sequentially below.
    std::vector<std::vector<detail::RepOutcome>> slots(
        static_cast<std::size_t>(R), std::vector<detail::RepOutcome>(n_methods));

    const auto worker = [&](int first, int last) {
        for (int rep = first; rep < last; ++rep) {
            const GeneratedMatrix gen =
                generate_pvalues(cfg, static_cast<std::uint64_t>(rep));
            const int n2 = gen.n_both_false;
            for (std::size_t mi = 0; mi < n_methods; ++mi) {
                const ProcedureResult res =
                    detail::run_method(cfg.methods[mi], gen.pmat, cfg.alpha, oracle_c);
                detail::RepOutcome& out = slots[static_cast<std::size_t>(rep)][mi];
                int false_rej = 0;
                for (int i = 0; i < n2; ++i)
                    if (res.rows[static_cast<std::size_t>(i)].rejected) ++false_rej;
                out.rejected_total = static_cast<std::uint32_t>(res.rejected_count);
                out.rejected_true =
                    static_cast<std::uint32_t>(res.rejected_count) -
                    static_cast<std::uint32_t>(false_rej);
                out.any_false_rejection = out.rejected_true > 0;
                out.power_fraction = n2 > 0 ? static_cast<double>(false_rej) / n2 : 0.0;
            }
        }
    };

    const int workers = std::min(cfg.workers, R);
    if (workers <= 1) {
        worker(0, R);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const int chunk = (R + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int first = w * chunk;
            const int last = std::min(R, first + chunk);
            if (first < last) pool.emplace_back(worker, first, last);
        }
        for (auto& t : pool) t.join();
    }

    const PairMixture mix{cfg.m, cfg.pi0, cfg.pi1, cfg.pi2, AlternativeLaw{cfg.snr1}};
    const bool power_defined = pair_counts(mix)[2] > 0;

    SimulationSummary summary;
    summary.methods.resize(n_methods);
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
        MethodSummary& ms = summary.methods[mi];
        ms.label = cfg.methods[mi].label;
        ms.power_defined = power_defined;
        double fw = 0.0, pw_sum = 0.0, pw_sumsq = 0.0;
        for (int rep = 0; rep < R; ++rep) {
            const detail::RepOutcome& out = slots[static_cast<std::size_t>(rep)][mi];
            fw += out.any_false_rejection ? 1.0 : 0.0;
            pw_sum += out.power_fraction;
            pw_sumsq += out.power_fraction * out.power_fraction;
            ms.rejected_total += out.rejected_total;
            ms.rejected_true += out.rejected_true;
        }
        ms.fwer = fw / R;
        ms.fwer_se = std::sqrt(std::max(ms.fwer * (1.0 - ms.fwer), 0.0) / R);
        if (power_defined) {
            ms.power = pw_sum / R;
            const double var =
                R > 1 ? std::max(pw_sumsq - R * ms.power * ms.power, 0.0) / (R - 1) : 0.0;
            ms.power_se = std::sqrt(var / R);
        } else {
            ms.power = std::numeric_limits<double>::quiet_NaN();
            ms.power_se = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return summary;
}

} // namespace screenmin
