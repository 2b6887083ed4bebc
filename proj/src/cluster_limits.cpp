#include "svf/cluster_limits.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "svf/parallel.hpp"

namespace svf {

LimitTestSpec::LimitTestSpec(const ReplicationPlan& plan_) : plan(plan_) {}

void LimitTestSpec::set_eta(double value) {
    if (!(value > 0.0)) throw std::invalid_argument("eta must be positive");
    eta = value;
    eta_set = true;
}

void LimitTestSpec::validate() const {
    plan.validate();
    if (plan.thresholds.size() != 1)
        throw std::invalid_argument("limit tests take a single threshold level x");
    if (scaled_regions.empty() == lattice_regions.empty())
        throw std::invalid_argument("provide exactly one of scaled and lattice region lists");
    for (const ShapeC& region : scaled_regions) {
        if (region.dimension() != plan.geometry.dimension())
            throw std::invalid_argument("region dimension does not match the geometry");
    }
    for (const Box& region : lattice_regions) {
        if (region.dim != plan.geometry.dimension())
            throw std::invalid_argument("region dimension does not match the geometry");
    }
}

namespace {

void check_disjoint_scaled(const IndexSetGeometry& geom, const std::vector<ShapeC>& regions) {
    for (const Site& v : geom.sites()) {
        int hits = 0;
        for (const ShapeC& region : regions) {
            if (geom.member_scaled(region, v) && ++hits > 1)
                throw std::invalid_argument("scaled regions overlap");
        }
    }
}

void check_disjoint_lattice(const std::vector<Box>& regions) {
    for (std::size_t i = 0; i < regions.size(); ++i) {
        for (std::size_t j = i + 1; j < regions.size(); ++j) {
            bool overlap = true;
            for (int l = 0; l < regions[i].dim; ++l) {
                if (regions[i].hi.c[l] < regions[j].lo.c[l] ||
                    regions[j].hi.c[l] < regions[i].lo.c[l]) {
                    overlap = false;
                    break;
                }
            }
            if (overlap) throw std::invalid_argument("lattice regions overlap");
        }
    }
}

}  // namespace

LimitCounts run_limit_counts(const LimitTestSpec& spec) {
    spec.validate();
    const ReplicationPlan& plan = spec.plan;
    const IndexSetGeometry& geom = plan.geometry;
    const bool scaled = !spec.scaled_regions.empty();
    const std::size_t n_regions =
        scaled ? spec.scaled_regions.size() : spec.lattice_regions.size();

    LimitCounts out;
    if (scaled) {
        check_disjoint_scaled(geom, spec.scaled_regions);
        for (std::size_t g = 0; g < n_regions; ++g) {
            validate_scaled_region(geom, spec.scaled_regions[g]);
            out.labels.push_back("A" + std::to_string(g + 1));
            out.fractions.push_back(spec.scaled_regions[g].volume() / geom.shape().volume());
        }
    } else {
        check_disjoint_lattice(spec.lattice_regions);
        for (std::size_t g = 0; g < n_regions; ++g) {
            validate_lattice_region(geom, spec.lattice_regions[g]);
            out.labels.push_back("B" + std::to_string(g + 1));
            out.fractions.push_back(static_cast<double>(spec.lattice_regions[g].cardinality()) /
                                    static_cast<double>(geom.cardinality()));
        }
    }

    const double threshold = plan.norming() * plan.thresholds.front();
    const std::int64_t reps = plan.replications;

    struct RepCounts {
        std::vector<std::int64_t> box, prox;
        std::int64_t box_total = 0, prox_total = 0;
        int regime = -1;
        bool violated = false;
    };
    std::vector<RepCounts> slots(static_cast<std::size_t>(reps));
    parallel_for(reps, plan.threads, [&](std::int64_t r) {
        RepCounts& slot = slots[static_cast<std::size_t>(r)];
        FieldSample field =
            simulate_plan_field(plan, geom.bounding(), static_cast<std::uint64_t>(r));
        if (field.regime) slot.regime = field.regime->index;
        std::vector<Site> phi = exceedance_set(field, geom, threshold);
        ClusterPartition box_part = box_clusters(phi, geom);
        ClusterPartition prox_part = proximity_clusters(phi, geom.dimension(), geom.t_n());
        slot.box_total = box_part.gamma();
        slot.prox_total = prox_part.gamma();
        if (scaled) {
            slot.box = count_regions_scaled(box_part, geom, spec.scaled_regions, false);
            slot.prox = count_regions_scaled(prox_part, geom, spec.scaled_regions, false);
        } else {
            slot.box = count_regions_lattice(box_part, geom, spec.lattice_regions, false);
            slot.prox = count_regions_lattice(prox_part, geom, spec.lattice_regions, false);
        }
        if (slot.prox_total > slot.box_total) slot.violated = true;
        for (std::size_t g = 0; g < n_regions; ++g) {
            if (slot.prox[g] > slot.box[g]) slot.violated = true;
        }
    });

    out.box_counts.assign(n_regions, {});
    out.prox_counts.assign(n_regions, {});
    for (const RepCounts& slot : slots) {
        for (std::size_t g = 0; g < n_regions; ++g) {
            out.box_counts[g].push_back(slot.box[g]);
            out.prox_counts[g].push_back(slot.prox[g]);
        }
        out.box_total.push_back(slot.box_total);
        out.prox_total.push_back(slot.prox_total);
        out.regimes.push_back(slot.regime);
        if (slot.violated) ++out.tilde_violations;
    }
    return out;
}

namespace {

double safe_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    double corr = pearson_correlation(a, b);
    return std::isfinite(corr) ? corr : 0.0;
}

}  // namespace

LimitTestReport poisson_limit_test(const LimitTestSpec& spec, ClusterRule rule) {
    if (!spec.eta_set) {
        throw std::runtime_error(
            "extremal functional eta missing; compute it with eta-theory or eta-estimate");
    }
    return report_from_counts(spec, run_limit_counts(spec), rule);
}

LimitTestReport report_from_counts(const LimitTestSpec& spec, const LimitCounts& counts,
                                   ClusterRule rule) {
    if (!spec.eta_set) {
        throw std::runtime_error(
            "extremal functional eta missing; compute it with eta-theory or eta-estimate");
    }
    const auto& rule_counts =
        rule == ClusterRule::kBox ? counts.box_counts : counts.prox_counts;
    const std::size_t n_regions = rule_counts.size();
    const double x = spec.plan.thresholds.front();
    const double alpha = spec.plan.rv_index();

    LimitTestReport report;
    report.rule = rule;
    report.x = x;
    report.eta = spec.eta;
    report.replications = spec.plan.replications;
    report.tilde_violations = counts.tilde_violations;

    report.degenerate = true;
    for (const auto& region : rule_counts) {
        for (std::int64_t c : region) {
            if (c != 0) report.degenerate = false;
        }
    }

    // Strata: a single pass for ergodic models, one per regime otherwise.
    std::vector<int> strata{-1};
    if (spec.plan.y.kind() == YKind::kRegime) {
        std::set<int> seen(counts.regimes.begin(), counts.regimes.end());
        strata.assign(seen.begin(), seen.end());
    }

    for (int stratum : strata) {
        double scale_pow = 1.0;
        if (stratum >= 0) {
            scale_pow = std::pow(
                spec.plan.y.regime_scales()[static_cast<std::size_t>(stratum)], alpha);
        }
        std::vector<std::vector<double>> region_values(n_regions);
        for (std::size_t g = 0; g < n_regions; ++g) {
            std::vector<std::int64_t> selected;
            for (std::size_t r = 0; r < rule_counts[g].size(); ++r) {
                if (stratum < 0 || counts.regimes[r] == stratum)
                    selected.push_back(rule_counts[g][r]);
            }
            RegionReport region;
            region.label = counts.labels[g];
            region.fraction = counts.fractions[g];
            region.lambda = counts.fractions[g] * std::pow(x, -alpha) * spec.eta * scale_pow;
            region.regime = stratum;
            RunningStats stats;
            for (std::int64_t c : selected) stats.add(static_cast<double>(c));
            region.mean = stats.mean();
            region.mean_se = stats.std_error();
            region.reps = stats.count();
            region.gof = poisson_gof(selected, region.lambda);
            region_values[g].assign(selected.begin(), selected.end());
            report.regions.push_back(std::move(region));
        }
        for (std::size_t g = 0; g < n_regions; ++g) {
            for (std::size_t h = g + 1; h < n_regions; ++h) {
                PairReport pair;
                pair.first = g;
                pair.second = h;
                pair.regime = stratum;
                pair.correlation = safe_correlation(region_values[g], region_values[h]);
                RunningStats prod;
                for (std::size_t r = 0; r < region_values[g].size(); ++r)
                    prod.add(region_values[g][r] * region_values[h][r]);
                pair.mean_product = prod.mean();
                pair.product_se = prod.std_error();
                double base = std::pow(x, -alpha) * spec.eta * scale_pow;
                pair.lambda_product =
                    counts.fractions[g] * base * counts.fractions[h] * base;
                report.pairs.push_back(pair);
            }
        }
    }
    return report;
}

RuleAgreementReport rule_agreement(const LimitTestSpec& spec) {
    return agreement_from_counts(run_limit_counts(spec));
}

RuleAgreementReport agreement_from_counts(const LimitCounts& counts) {
    RuleAgreementReport report;
    report.replications = static_cast<std::int64_t>(counts.box_total.size());
    report.tilde_violations = counts.tilde_violations;
    std::int64_t differ = 0;
    RunningStats diff;
    for (std::size_t r = 0; r < counts.box_total.size(); ++r) {
        std::int64_t gap = counts.box_total[r] - counts.prox_total[r];
        if (gap != 0) ++differ;
        diff.add(static_cast<double>(std::llabs(gap)));
    }
    report.differ_fraction =
        static_cast<double>(differ) / static_cast<double>(counts.box_total.size());
    report.mean_abs_diff = diff.mean();
    return report;
}

}  // namespace svf
