#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svf/clusters.hpp"
#include "svf/estimators.hpp"

namespace svf {

// End-to-end Poisson limit check: model bundle plus regions to count over.
// Exactly one region list is populated; scaled regions live inside the
// geometry's shape C, lattice regions inside D_n. eta is the extremal
// functional at unit multiplier scale (regime strata rescale it by s^alpha);
// it must be supplied from the theory module or the eta estimators.
struct LimitTestSpec {
    explicit LimitTestSpec(const ReplicationPlan& plan);

    ReplicationPlan plan;  // thresholds must hold the single test level x
    std::vector<ShapeC> scaled_regions;
    std::vector<Box> lattice_regions;
    double eta = 0.0;
    bool eta_set = false;

    void set_eta(double value);
    void validate() const;
};

// Raw per-replication cluster counts for both rules over the requested regions
// plus the whole index set.
struct LimitCounts {
    std::vector<std::string> labels;     // A1.. / B1..
    std::vector<double> fractions;       // |A|/|C| or |B|/|D_n|, exact
    // [region][replication] counts of clusters meeting the region.
    std::vector<std::vector<std::int64_t>> box_counts;
    std::vector<std::vector<std::int64_t>> prox_counts;
    std::vector<std::int64_t> box_total;   // N_n over the whole index set
    std::vector<std::int64_t> prox_total;  // cluster count Gamma_n
    std::vector<int> regimes;              // -1 without a regime model
    std::int64_t tilde_violations = 0;     // proximity count above box count
};

LimitCounts run_limit_counts(const LimitTestSpec& spec);

struct RegionReport {
    std::string label;
    double fraction = 0.0;
    double lambda = 0.0;  // fraction * x^{-alpha} * eta (regime: * s^alpha)
    double mean = 0.0;
    double mean_se = 0.0;
    std::int64_t reps = 0;
    int regime = -1;
    PoissonGofReport gof;
};

struct PairReport {
    std::size_t first = 0;
    std::size_t second = 0;
    int regime = -1;
    double correlation = 0.0;
    double mean_product = 0.0;  // estimate of E[count_1 count_2]
    double product_se = 0.0;
    double lambda_product = 0.0;
};

struct LimitTestReport {
    ClusterRule rule = ClusterRule::kBox;
    double x = 1.0;
    double eta = 0.0;
    std::int64_t replications = 0;
    bool degenerate = false;           // every count zero
    std::int64_t tilde_violations = 0;
    std::vector<RegionReport> regions;
    std::vector<PairReport> pairs;
};

// Per-region goodness of fit against the Poisson limit and pairwise
// independence diagnostics for the chosen cluster rule. Regime models are
// stratified: one report row per (region, regime).
LimitTestReport poisson_limit_test(const LimitTestSpec& spec, ClusterRule rule);
// Same report from counts already produced by run_limit_counts, letting
// callers score both rules on one simulation sweep.
LimitTestReport report_from_counts(const LimitTestSpec& spec, const LimitCounts& counts,
                                   ClusterRule rule);

struct RuleAgreementReport {
    std::int64_t replications = 0;
    double differ_fraction = 0.0;  // replications with N_n != Gamma_n
    double mean_abs_diff = 0.0;
    std::int64_t tilde_violations = 0;
};

// How often and by how much the two cluster rules disagree on the total
// count over the index set.
RuleAgreementReport rule_agreement(const LimitTestSpec& spec);
RuleAgreementReport agreement_from_counts(const LimitCounts& counts);

}  // namespace svf
