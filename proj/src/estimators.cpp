#include "svf/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "svf/parallel.hpp"
#include "svf/stats.hpp"

namespace svf {

ReplicationPlan::ReplicationPlan(std::int64_t replications_, const TailModel& tail_,
                                 const IndexSetGeometry& geometry_, std::uint64_t seed_)
    : replications(replications_), tail(tail_), geometry(geometry_), seed(seed_) {}

void ReplicationPlan::validate() const {
    if (replications < 1) throw std::invalid_argument("replication count must be positive");
    if (kernel.has_value() == garch.has_value())
        throw std::invalid_argument("plan needs exactly one of the kernel and garch models");
    if (kernel && kernel->dimension() != geometry.dimension())
        throw std::invalid_argument("kernel dimension does not match the geometry");
    if (garch) {
        if (geometry.dimension() != 1)
            throw std::invalid_argument("garch paths require a one-dimensional geometry");
        if (!garch_norming)
            throw std::invalid_argument("garch plans need the fitted norming (rv index and scale)");
        if (!(garch_norming->rv_index > 0.0) || !(garch_norming->scale_c > 0.0))
            throw std::invalid_argument("garch norming entries must be positive");
        if (garch_burn_in < 0) throw std::invalid_argument("negative burn-in");
    }
    if (thresholds.empty()) throw std::invalid_argument("threshold grid is empty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0.0)) throw std::invalid_argument("thresholds must be positive");
        if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
            throw std::invalid_argument("thresholds must be strictly increasing");
    }
    if (threads < 1) throw std::invalid_argument("thread count must be positive");
}

double ReplicationPlan::rv_index() const {
    return kernel ? tail.alpha() : garch_norming->rv_index;
}

double ReplicationPlan::norming() const {
    double size = static_cast<double>(geometry.cardinality());
    if (kernel) {
        return norming_a_n(ma_tail_constant(*kernel, tail.alpha(), tail.p_xi()), tail.alpha(),
                           size);
    }
    return std::pow(garch_norming->scale_c * size, 1.0 / garch_norming->rv_index);
}

const EstimateRow& EstimateTable::find(const std::string& estimator, double x,
                                       int regime) const {
    for (const auto& row : rows) {
        if (row.estimator == estimator && row.regime == regime &&
            std::fabs(row.x - x) < 1e-12) {
            return row;
        }
    }
    throw std::out_of_range("no such estimate row: " + estimator);
}

std::string EstimateTable::to_csv() const {
    std::ostringstream out;
    out << "estimator,x,estimate,se,reps,n_sites,regime\n";
    out << std::setprecision(17);
    for (const auto& row : rows) {
        out << row.estimator << ',' << row.x << ',' << row.estimate << ',' << row.se << ','
            << row.reps << ',' << row.n_sites << ',';
        if (row.regime < 0) {
            out << "all";
        } else {
            out << row.regime;
        }
        out << '\n';
    }
    return out.str();
}

FieldSample simulate_plan_field(const ReplicationPlan& plan, const Box& window,
                                std::uint64_t rep) {
    FieldSample z;
    if (plan.kernel) {
        z = simulate_ma(*plan.kernel, plan.tail, window, plan.seed, rep);
    } else {
        z = simulate_garch(*plan.garch, window.cardinality(), plan.garch_burn_in, plan.seed,
                           rep);
        z.window = window;  // relabel the path onto the requested coordinates
    }
    if (plan.y.deterministic() && plan.y.constant_scale() == 1.0) return z;
    FieldSample y = plan.y.sample_field(window, plan.seed, rep);
    return product_field(y, z);
}

namespace {

struct RepOutcome {
    double max_x = 0.0;
    int regime = -1;
    std::vector<std::int64_t> blocks_inner;
    std::vector<std::int64_t> blocks_outer;
    std::vector<std::int64_t> runs;
};

// Per-threshold accumulator with optional regime strata.
struct Collector {
    RunningStats all;
    std::map<int, RunningStats> strata;

    void add(double value, int regime) {
        all.add(value);
        if (regime >= 0) strata[regime].add(value);
    }
};

void emit(EstimateTable& table, const std::string& name, double x, const Collector& col,
          std::int64_t n_sites) {
    EstimateRow row;
    row.estimator = name;
    row.x = x;
    row.estimate = col.all.mean();
    row.se = col.all.std_error();
    row.reps = col.all.count();
    row.n_sites = n_sites;
    table.rows.push_back(row);
    for (const auto& [regime, stats] : col.strata) {
        row.regime = regime;
        row.estimate = stats.mean();
        row.se = stats.std_error();
        row.reps = stats.count();
        table.rows.push_back(row);
    }
}

}  // namespace

EstimateTable run_plan(const ReplicationPlan& plan) {
    plan.validate();
    const IndexSetGeometry& geom = plan.geometry;
    const int d = geom.dimension();
    Site pad{};
    for (int l = 0; l < d; ++l) pad.c[l] = geom.t_n()[static_cast<std::size_t>(l)];
    const Box window = geom.bounding().padded(pad);
    const double a_n = plan.norming();
    const std::vector<double>& xs = plan.thresholds;
    const std::size_t nx = xs.size();
    const double thr_lo = a_n * xs.front();

    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(plan.replications));
    parallel_for(plan.replications, plan.threads, [&](std::int64_t r) {
        RepOutcome& out = outcomes[static_cast<std::size_t>(r)];
        out.blocks_inner.assign(nx, 0);
        out.blocks_outer.assign(nx, 0);
        out.runs.assign(nx, 0);
        FieldSample field = simulate_plan_field(plan, window, static_cast<std::uint64_t>(r));
        if (field.regime) out.regime = field.regime->index;

        double max_x = -kInfinity;
        for (const Site& v : geom.sites()) max_x = std::max(max_x, field.at(v));
        out.max_x = max_x;

        // Exceedances over the padded window at the lowest threshold; all
        // higher thresholds filter this list.
        std::vector<std::pair<Site, double>> list;
        for (std::int64_t i = 0; i < window.cardinality(); ++i) {
            double val = field.values[static_cast<std::size_t>(i)];
            if (val > thr_lo) list.emplace_back(window.site_at(i), val);
        }

        std::vector<Site> boxes;
        for (std::size_t k = 0; k < nx; ++k) {
            const double thr = a_n * xs[k];
            boxes.clear();
            for (const auto& [v, val] : list) {
                if (val > thr) boxes.push_back(geom.box_of(v));
            }
            std::sort(boxes.begin(), boxes.end(), SiteLexLess{});
            boxes.erase(std::unique(boxes.begin(), boxes.end()), boxes.end());
            for (const Site& z : boxes) {
                if (geom.in_inner(z)) ++out.blocks_inner[k];
                if (geom.in_outer(z)) ++out.blocks_outer[k];
            }

            for (const auto& [v, val] : list) {
                if (val <= thr || !geom.member(v)) continue;
                bool inside = true;
                for (int l = 0; l < d; ++l) {
                    std::int64_t t = geom.t_n()[static_cast<std::size_t>(l)];
                    if (v.c[l] - t < window.lo.c[l] || v.c[l] + t > window.hi.c[l]) {
                        inside = false;
                        break;
                    }
                }
                if (!inside) continue;  // neighborhood leaves the simulated window
                bool spoiled = false;
                for (const auto& [u, uval] : list) {
                    if (uval <= thr || !lex_less(v, u)) continue;
                    bool close = true;
                    for (int l = 0; l < d; ++l) {
                        if (std::llabs(u.c[l] - v.c[l]) >
                            geom.t_n()[static_cast<std::size_t>(l)]) {
                            close = false;
                            break;
                        }
                    }
                    if (close) {
                        spoiled = true;
                        break;
                    }
                }
                if (!spoiled) ++out.runs[k];
            }
        }
    });

    EstimateTable table;
    const std::int64_t n_sites = geom.cardinality();
    std::vector<Collector> max_cdf(nx), blocks_inner(nx), blocks_outer(nx), runs(nx);
    for (const RepOutcome& out : outcomes) {
        for (std::size_t k = 0; k < nx; ++k) {
            max_cdf[k].add(out.max_x <= a_n * xs[k] ? 1.0 : 0.0, out.regime);
            blocks_inner[k].add(static_cast<double>(out.blocks_inner[k]), out.regime);
            blocks_outer[k].add(static_cast<double>(out.blocks_outer[k]), out.regime);
            runs[k].add(static_cast<double>(out.runs[k]), out.regime);
        }
    }
    for (std::size_t k = 0; k < nx; ++k) emit(table, "max_cdf", xs[k], max_cdf[k], n_sites);
    for (std::size_t k = 0; k < nx; ++k)
        emit(table, "blocks_inner", xs[k], blocks_inner[k], n_sites);
    for (std::size_t k = 0; k < nx; ++k)
        emit(table, "blocks_outer", xs[k], blocks_outer[k], n_sites);
    for (std::size_t k = 0; k < nx; ++k) emit(table, "runs", xs[k], runs[k], n_sites);
    return table;
}

namespace {

EstimateTable filter_rows(const EstimateTable& table, const std::vector<std::string>& names) {
    EstimateTable out;
    for (const auto& row : table.rows) {
        for (const auto& name : names) {
            if (row.estimator == name) {
                out.rows.push_back(row);
                break;
            }
        }
    }
    return out;
}

}  // namespace

EstimateTable empirical_max_cdf(const ReplicationPlan& plan) {
    return filter_rows(run_plan(plan), {"max_cdf"});
}

EstimateTable blocks_estimator_eta(const ReplicationPlan& plan) {
    return filter_rows(run_plan(plan), {"blocks_inner", "blocks_outer"});
}

EstimateTable runs_estimator_eta(const ReplicationPlan& plan) {
    return filter_rows(run_plan(plan), {"runs"});
}

WindowFunctional WindowFunctional::value_at_origin(int dimension) {
    WindowFunctional f;
    f.window.dim = dimension;
    f.h = [](const std::vector<double>& values) { return values[0]; };
    return f;
}

ErgodicAverage ergodic_average(const WindowFunctional& h, const FieldSample& field,
                               const IndexSetGeometry& geom) {
    if (h.window.dim != geom.dimension())
        throw std::invalid_argument("functional window dimension does not match the geometry");
    const Box& bound = geom.bounding();
    for (int l = 0; l < geom.dimension(); ++l) {
        if (bound.lo.c[l] + h.window.lo.c[l] < field.window.lo.c[l] ||
            bound.hi.c[l] + h.window.hi.c[l] > field.window.hi.c[l]) {
            throw std::invalid_argument("functional window exceeds the field padding");
        }
    }
    std::vector<double> buffer(static_cast<std::size_t>(h.window.cardinality()));
    RunningStats stats;
    for (const Site& v : geom.sites()) {
        std::size_t i = 0;
        for_each_site(h.window, [&](const Site& u) { buffer[i++] = field.at(v + u); });
        stats.add(h.h(buffer));
    }
    return {stats.mean(), stats.std_error(), stats.count()};
}

SpectralComparison empirical_spectral_measure(const ReplicationPlan& plan, int m, double u) {
    plan.validate();
    if (!plan.kernel)
        throw std::invalid_argument("spectral estimation requires the moving-average model");
    if (m < 0) throw std::invalid_argument("window radius must be nonnegative");
    if (!(u > 0.9 && u < 1.0)) throw std::invalid_argument("quantile must lie in (0.9, 1)");

    SpectralComparison out;
    out.reference = ma_spectral_atoms(*plan.kernel, m, plan.tail.alpha(), plan.tail.p_xi());
    out.windows = plan.replications;
    const std::vector<Site>& support = out.reference.support;
    const std::size_t ns = support.size();
    const int d = plan.kernel->dimension();
    const std::int64_t radius = m + plan.kernel->truncation();

    Box noise_box;
    noise_box.dim = d;
    for (int l = 0; l < d; ++l) {
        noise_box.lo.c[l] = -radius;
        noise_box.hi.c[l] = radius;
    }
    const std::int64_t noise_n = noise_box.cardinality();

    auto window_values = [&](std::int64_t rep, std::vector<double>& noise,
                             std::vector<double>& z) {
        CounterKey key{plan.seed, streams::kSpectral, static_cast<std::uint64_t>(rep), 0,
                       Site{}};
        for (std::int64_t i = 0; i < noise_n; ++i) {
            key.site = noise_box.site_at(i);
            noise[static_cast<std::size_t>(i)] = plan.tail.quantile(u01(key));
        }
        for (std::size_t j = 0; j < ns; ++j) {
            double sum = 0.0;
            for (const auto& [offset, coeff] : plan.kernel->support()) {
                sum += coeff * noise[static_cast<std::size_t>(noise_box.index_of(
                                   support[j] - offset))];
            }
            z[j] = sum;
        }
    };

    std::vector<double> norms(static_cast<std::size_t>(plan.replications));
    parallel_for(plan.replications, plan.threads, [&](std::int64_t rep) {
        thread_local std::vector<double> noise, z;
        noise.resize(static_cast<std::size_t>(noise_n));
        z.resize(ns);
        window_values(rep, noise, z);
        double norm = 0.0;
        for (double value : z) norm = std::max(norm, std::fabs(value));
        norms[static_cast<std::size_t>(rep)] = norm;
    });

    out.radius_quantile = empirical_quantile(norms, u);

    const std::vector<SpectralAtom>& atoms = out.reference.atoms;
    std::vector<std::int32_t> code(static_cast<std::size_t>(plan.replications), -2);
    parallel_for(plan.replications, plan.threads, [&](std::int64_t rep) {
        double norm = norms[static_cast<std::size_t>(rep)];
        if (!(norm > out.radius_quantile)) return;
        thread_local std::vector<double> noise, z;
        noise.resize(static_cast<std::size_t>(noise_n));
        z.resize(ns);
        window_values(rep, noise, z);
        std::int32_t best = -1;
        double best_dist = kInfinity;
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            double dist = 0.0;
            for (std::size_t j = 0; j < ns; ++j) {
                dist = std::max(dist, std::fabs(z[j] / norm - atoms[a].theta[j]));
            }
            if (dist < best_dist) {
                best_dist = dist;
                best = static_cast<std::int32_t>(a);
            }
        }
        code[static_cast<std::size_t>(rep)] = best_dist <= 0.25 ? best : -1;
    });

    std::vector<std::int64_t> counts(atoms.size(), 0);
    std::int64_t other = 0, kept = 0;
    for (std::int32_t c : code) {
        if (c == -2) continue;
        ++kept;
        if (c == -1) {
            ++other;
        } else {
            ++counts[static_cast<std::size_t>(c)];
        }
    }
    if (kept == 0) throw std::runtime_error("no windows above the radius quantile");
    out.kept = kept;
    out.weights.resize(atoms.size());
    double tv = 0.0;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        out.weights[a] = static_cast<double>(counts[a]) / static_cast<double>(kept);
        tv += std::fabs(out.weights[a] - atoms[a].weight);
    }
    out.other_weight = static_cast<double>(other) / static_cast<double>(kept);
    out.total_variation = 0.5 * (tv + out.other_weight);
    return out;
}

std::vector<WindowTailRow> window_tail_check(const KernelPsi& kernel,
                                          const std::vector<double>& y_window, int m,
                                          const ReplicationPlan& plan) {
    plan.validate();
    if (m < 0) throw std::invalid_argument("window radius must be nonnegative");
    if (kernel.dimension() != plan.geometry.dimension())
        throw std::invalid_argument("kernel dimension does not match the geometry");
    const double alpha = plan.tail.alpha();
    SpectralAtoms atoms = ma_spectral_atoms(kernel, m, alpha, plan.tail.p_xi());
    if (y_window.size() != atoms.after_origin.size() + 1)
        throw std::invalid_argument("y window must hold the origin plus the A_0^(m) sites");

    double num = 0.0, den = 0.0;
    for (const SpectralAtom& atom : atoms.atoms) {
        double best = 0.0;
        for (std::size_t j = 0; j < atoms.after_origin.size(); ++j) {
            best = std::max(best, y_window[j + 1] * atom.theta[atoms.after_origin[j]]);
        }
        num += atom.weight * std::pow(std::max(best, 0.0), alpha);
        den += atom.weight * std::pow(std::max(atom.theta[atoms.origin], 0.0), alpha);
    }
    if (!(den > 0.0)) throw std::runtime_error("degenerate spectral distribution");

    const IndexSetGeometry& geom = plan.geometry;
    const double a_n =
        norming_a_n(ma_tail_constant(kernel, alpha, plan.tail.p_xi()), alpha,
                    static_cast<double>(geom.cardinality()));
    const Box window = geom.bounding().padded(static_cast<std::int64_t>(m));
    const std::vector<double>& xs = plan.thresholds;
    const double thr_lo = a_n * xs.front();

    // Offsets of A_0^(m) with their y values.
    std::vector<std::pair<Site, double>> active;
    for (std::size_t j = 0; j < atoms.after_origin.size(); ++j) {
        double yv = y_window[j + 1];
        if (yv != 0.0) active.emplace_back(atoms.support[atoms.after_origin[j]], yv);
    }

    std::vector<std::vector<std::int64_t>> slots(
        static_cast<std::size_t>(plan.replications));
    parallel_for(plan.replications, plan.threads, [&](std::int64_t r) {
        FieldSample z = simulate_ma(kernel, plan.tail, window, plan.seed,
                                    static_cast<std::uint64_t>(r));
        // Candidate shifts v with max over A_0^(m) of y_u Z_{v+u} above the
        // lowest threshold, carrying that max for the higher thresholds.
        std::vector<std::pair<Site, double>> hits;
        for (std::int64_t i = 0; i < window.cardinality(); ++i) {
            double zval = z.values[static_cast<std::size_t>(i)];
            for (const auto& [offset, yv] : active) {
                double val = yv * zval;
                if (val > thr_lo) hits.emplace_back(window.site_at(i) - offset, val);
            }
        }
        std::sort(hits.begin(), hits.end(),
                  [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
        std::vector<std::pair<Site, double>> merged;
        for (const auto& [v, val] : hits) {
            if (!merged.empty() && merged.back().first == v) {
                merged.back().second = std::max(merged.back().second, val);
            } else {
                merged.emplace_back(v, val);
            }
        }
        std::vector<std::int64_t> counts(xs.size(), 0);
        for (const auto& [v, val] : merged) {
            if (!geom.member(v)) continue;
            for (std::size_t k = 0; k < xs.size(); ++k) {
                if (val > a_n * xs[k]) ++counts[k];
            }
        }
        slots[static_cast<std::size_t>(r)] = std::move(counts);
    });

    std::vector<WindowTailRow> rows(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        RunningStats stats;
        for (const auto& counts : slots) stats.add(static_cast<double>(counts[k]));
        WindowTailRow& row = rows[k];
        row.x = xs[k];
        row.left = stats.mean();
        row.se = stats.std_error();
        row.right = std::pow(xs[k], -alpha) * num / den;
        if (row.right != 0.0) {
            row.ratio = row.left / row.right;
        } else {
            row.ratio = row.left == 0.0 ? 1.0 : kInfinity;
        }
    }
    return rows;
}

}  // namespace svf
