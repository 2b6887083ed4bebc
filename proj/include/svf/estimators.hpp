#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "svf/field.hpp"
#include "svf/geometry.hpp"
#include "svf/simulate.hpp"
#include "svf/tail_models.hpp"
#include "svf/theory.hpp"

namespace svf {

// Tail behaviour of the volatility path, P(Z > x) ~ scale_c x^{-rv_index};
// required when the plan carries GarchParams (the theory module supplies
// both numbers).
struct GarchNorming {
    double rv_index = 0.0;
    double scale_c = 1.0;
};

// Replication bundle shared by every estimator: model, index-set geometry,
// threshold grid, and seeding. Exactly one of kernel/garch is set.
struct ReplicationPlan {
    ReplicationPlan(std::int64_t replications, const TailModel& tail,
                    const IndexSetGeometry& geometry, std::uint64_t seed);

    std::int64_t replications;
    TailModel tail;
    std::optional<KernelPsi> kernel;
    std::optional<GarchParams> garch;
    std::optional<GarchNorming> garch_norming;
    std::int64_t garch_burn_in = 2000;
    VolModelY y = VolModelY::constant(1.0);
    IndexSetGeometry geometry;
    std::vector<double> thresholds{1.0};
    std::uint64_t seed;
    int threads = 1;

    void validate() const;
    // Regular-variation index of the volatility field Z.
    double rv_index() const;
    // Norming level a_n for the plan's |D_n|.
    double norming() const;
};

struct EstimateRow {
    std::string estimator;
    double x = 1.0;
    double estimate = 0.0;
    double se = 0.0;           // sample SD / sqrt(reps)
    std::int64_t reps = 0;
    std::int64_t n_sites = 0;  // |D_n|
    int regime = -1;           // -1: unconditional; else regime index
};

struct EstimateTable {
    std::vector<EstimateRow> rows;

    const EstimateRow& find(const std::string& estimator, double x, int regime = -1) const;
    std::string to_csv() const;
};

// One realization of X = Y Z on the window; the window must cover whatever
// the caller reads (estimators pad the geometry bounding box by t_n).
FieldSample simulate_plan_field(const ReplicationPlan& plan, const Box& window,
                                std::uint64_t rep);

// All estimators from one replication sweep. Row names: max_cdf (fraction
// of replications with max over D_n at most a_n x), blocks_inner /
// blocks_outer (boxes of P_n / Q_n whose full J_z holds an a_n x
// exceedance), runs (sites exceeding a_n x with no exceedance after them
// within the t_n neighborhood). Regime models add one stratum row per
// realized regime after each unconditional row.
EstimateTable run_plan(const ReplicationPlan& plan);

EstimateTable empirical_max_cdf(const ReplicationPlan& plan);
EstimateTable blocks_estimator_eta(const ReplicationPlan& plan);
EstimateTable runs_estimator_eta(const ReplicationPlan& plan);

// Functional of finitely many relative coordinates: h receives the field
// values on window + v in lex order.
struct WindowFunctional {
    Box window;
    std::function<double(const std::vector<double>&)> h;

    static WindowFunctional value_at_origin(int dimension);
};

struct ErgodicAverage {
    double value = 0.0;
    double se = 0.0;  // sample SD of site values / sqrt(|D_n|)
    std::int64_t count = 0;
};

// Plain spatial average over shifts v in D_n; throws if the shifted window
// leaves the field sample.
ErgodicAverage ergodic_average(const WindowFunctional& h, const FieldSample& field,
                               const IndexSetGeometry& geom);

struct SpectralComparison {
    SpectralAtoms reference;
    std::vector<double> weights;  // empirical mass per reference atom
    double other_weight = 0.0;    // mass farther than the atom tolerance
    double total_variation = 0.0;
    std::int64_t windows = 0;
    std::int64_t kept = 0;
    double radius_quantile = 0.0;
};

// Empirical angular distribution of Z on B^(m): keep windows whose max-norm
// exceeds its empirical u-quantile, assign directions to the nearest
// theoretical atom (max-norm tolerance 0.25, else "other"), and report the
// total-variation distance to the theoretical weights. The tolerance stays
// below half the minimal atom separation for the shipped kernels while
// tail-noise contamination of order radius^-1 still lands on its atom.
SpectralComparison empirical_spectral_measure(const ReplicationPlan& plan, int m, double u);

struct WindowTailRow {
    double x = 1.0;
    double left = 0.0;  // |D_n| P(max over A_0^(m) of y_v Z_v > a_n x), spatial count
    double se = 0.0;
    double right = 0.0;  // x^{-alpha} E(max over A_0^(m) of y_v Theta_v)_+^alpha / E(Theta_0)_+^alpha
    double ratio = 1.0;  // left / right; 1 when both vanish
};

// Window-tail cross-check: y_window holds the origin value followed by the
// A_0^(m) values in lex order (the origin entry never enters either side).
std::vector<WindowTailRow> window_tail_check(const KernelPsi& kernel,
                                          const std::vector<double>& y_window, int m,
                                          const ReplicationPlan& plan);

}  // namespace svf
