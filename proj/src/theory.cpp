#include "svf/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "svf/geometry.hpp"
#include "svf/parallel.hpp"
#include "svf/rng.hpp"
#include "svf/stats.hpp"

namespace svf {

namespace {

// (x)_+^kappa
double pos_pow(double x, double kappa) {
    if (x <= 0.0) return 0.0;
    return std::pow(x, kappa);
}

double neg_pow(double x, double kappa) { return pos_pow(-x, kappa); }

std::vector<Site> box_support(int dimension, int m) {
    Box b;
    b.dim = dimension;
    for (int i = 0; i < dimension; ++i) {
        b.lo.c[i] = -m;
        b.hi.c[i] = m;
    }
    std::vector<Site> out;
    for_each_site(b, [&](const Site& v) { out.push_back(v); });
    return out;
}

}  // namespace

double psi_alpha_norm(const KernelPsi& kernel, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("norm order must be positive");
    double s = 0.0;
    for (const auto& [u, c] : kernel.support()) s += std::pow(std::fabs(c), alpha);
    return s;
}

double ma_tail_constant(const KernelPsi& kernel, double alpha, double p_xi) {
    double s = 0.0;
    for (const auto& [u, c] : kernel.support()) {
        s += p_xi * pos_pow(c, alpha) + (1.0 - p_xi) * neg_pow(c, alpha);
    }
    return s;
}

double ma_tail_balance_p(const KernelPsi& kernel, double alpha, double p_xi) {
    return ma_tail_constant(kernel, alpha, p_xi) / psi_alpha_norm(kernel, alpha);
}

double norming_a_n(double tail_constant, double index, double domain_size) {
    if (!(tail_constant > 0.0 && index > 0.0 && domain_size > 0.0)) {
        throw std::invalid_argument("norming inputs must be positive");
    }
    return std::pow(tail_constant * domain_size, 1.0 / index);
}

SpectralAtoms ma_spectral_atoms(const KernelPsi& kernel, int m, double alpha, double p_xi) {
    if (m < 0) throw std::invalid_argument("window radius must be non-negative");
    const int d = kernel.dimension();
    SpectralAtoms out;
    out.dimension = d;
    out.m = m;
    out.support = box_support(d, m);
    const Site origin{};
    for (std::size_t i = 0; i < out.support.size(); ++i) {
        if (out.support[i] == origin) out.origin = i;
        if (lex_less(origin, out.support[i])) out.after_origin.push_back(i);
    }

    // One +/- atom pair per shifted kernel window psi^u = (psi_{-u+v})_v,
    // u in B^(t+m), weights proportional to p_xi ||psi^u||^alpha and
    // (1 - p_xi) ||psi^u||^alpha.
    double total = 0.0;
    std::vector<std::pair<std::vector<double>, double>> windows;  // direction, norm^alpha
    for (const Site& u : box_support(d, kernel.truncation() + m)) {
        std::vector<double> w(out.support.size(), 0.0);
        double norm = 0.0;
        for (std::size_t i = 0; i < out.support.size(); ++i) {
            w[i] = kernel.coefficient(out.support[i] - u);
            norm = std::max(norm, std::fabs(w[i]));
        }
        if (norm == 0.0) continue;
        for (auto& x : w) x /= norm;
        double na = std::pow(norm, alpha);
        total += na;
        windows.emplace_back(std::move(w), na);
    }
    for (auto& [dir, na] : windows) {
        SpectralAtom plus;
        plus.theta = dir;
        plus.weight = p_xi * na / total;
        SpectralAtom minus;
        minus.theta = dir;
        for (auto& x : minus.theta) x = -x;
        minus.weight = (1.0 - p_xi) * na / total;
        // Merge exact duplicates so directions stay unique.
        auto add = [&](SpectralAtom&& a) {
            for (auto& existing : out.atoms) {
                if (existing.theta == a.theta) {
                    existing.weight += a.weight;
                    return;
                }
            }
            out.atoms.push_back(std::move(a));
        };
        add(std::move(plus));
        add(std::move(minus));
    }
    return out;
}

MonteCarloValue breiman_constant(const VolModelY& y, double alpha, double p,
                                 std::int64_t samples, std::uint64_t seed,
                                 bool force_monte_carlo) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("tail balance must be in (0, 1]");
    if (!force_monte_carlo) {
        // All built-in multiplier kinds are non-negative, so the closed form
        // is just the alpha-moment.
        if (auto moment = y.abs_moment(alpha)) return {*moment, 0.0, true};
    }
    RunningStats stats;
    CounterKey key{seed, streams::kTheory, 0, 0, Site{}};
    for (std::int64_t i = 0; i < samples; ++i) {
        key.rep = static_cast<std::uint64_t>(i);
        RegimeLabel reg = y.draw_regime(seed, key.rep);
        double v = y.draw_site(key, reg.scale);
        stats.add(pos_pow(v, alpha) + (1.0 - p) / p * neg_pow(v, alpha));
    }
    return {stats.mean(), stats.std_error(), false};
}

namespace {

// Exact atom enumeration of the eta ratio for constant Y = s.
EtaValue eta_enumerate(const SpectralAtoms& atoms, double s, double K, double kappa) {
    double y = (std::fabs(s) <= K) ? s : 0.0;
    double num = 0.0;
    double denom = 0.0;
    for (const auto& a : atoms.atoms) {
        denom += a.weight * pos_pow(a.theta[atoms.origin], kappa);
        double head = pos_pow(y * a.theta[atoms.origin], kappa);
        double tail_max = 0.0;
        bool first = true;
        for (std::size_t i : atoms.after_origin) {
            double v = y * a.theta[i];
            if (first || v > tail_max) tail_max = v;
            first = false;
        }
        double tail = first ? 0.0 : pos_pow(tail_max, kappa);
        num += a.weight * std::max(head - tail, 0.0);
    }
    if (denom <= 0.0) throw std::runtime_error("degenerate spectral distribution at the origin");
    return {num / denom, 0.0, true};
}

// Monte Carlo over (atom, Y window) pairs; regime scale fixed by caller.
EtaValue eta_sample(const SpectralAtoms& atoms, const VolModelY& y, double regime_scale,
                    double K, double kappa, std::int64_t samples, std::uint64_t seed) {
    double denom = 0.0;
    std::vector<double> cum;
    cum.reserve(atoms.atoms.size());
    double acc = 0.0;
    for (const auto& a : atoms.atoms) {
        denom += a.weight * pos_pow(a.theta[atoms.origin], kappa);
        acc += a.weight;
        cum.push_back(acc);
    }
    if (denom <= 0.0) throw std::runtime_error("degenerate spectral distribution at the origin");

    RunningStats stats;
    for (std::int64_t i = 0; i < samples; ++i) {
        CounterKey key{seed, streams::kTheory, static_cast<std::uint64_t>(i), 0, Site{}};
        double u = u01(key) * acc;
        std::size_t ai = static_cast<std::size_t>(
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        if (ai >= atoms.atoms.size()) ai = atoms.atoms.size() - 1;
        const auto& atom = atoms.atoms[ai];

        key.draw = 1;
        key.site = atoms.support[atoms.origin];
        double y0 = y.draw_site(key, regime_scale);
        if (std::fabs(y0) > K) y0 = 0.0;
        double head = pos_pow(y0 * atom.theta[atoms.origin], kappa);
        double tail_max = 0.0;
        bool first = true;
        for (std::size_t si : atoms.after_origin) {
            key.site = atoms.support[si];
            double yv = y.draw_site(key, regime_scale);
            if (std::fabs(yv) > K) yv = 0.0;
            double v = yv * atom.theta[si];
            if (first || v > tail_max) tail_max = v;
            first = false;
        }
        double tail = first ? 0.0 : pos_pow(tail_max, kappa);
        stats.add(std::max(head - tail, 0.0));
    }
    return {stats.mean() / denom, stats.std_error() / denom, false};
}

}  // namespace

EtaResult eta_tkm(const SpectralAtoms& atoms, const VolModelY& y, double K,
                  double kappa, std::int64_t samples, std::uint64_t seed) {
    if (!(K > 0.0)) throw std::invalid_argument("truncation level must be positive");
    if (!(kappa > 0.0)) throw std::invalid_argument("tail exponent must be positive");
    EtaResult out;
    switch (y.kind()) {
        case YKind::kConstant:
            out.overall = eta_enumerate(atoms, y.constant_scale(), K, kappa);
            return out;
        case YKind::kRegime: {
            double mean = 0.0, var = 0.0;
            bool exact = true;
            for (std::size_t i = 0; i < y.regime_scales().size(); ++i) {
                RegimeLabel label{static_cast<int>(i), y.regime_scales()[i]};
                EtaValue v =
                    y.regime_of_constants()
                        ? eta_enumerate(atoms, y.constant_scale() * label.scale, K, kappa)
                        : eta_sample(atoms, y, label.scale, K, kappa, samples,
                                     seed + 1000 * (i + 1));
                out.per_regime.emplace_back(label, v);
                double q = y.regime_probs()[i];
                mean += q * v.eta;
                var += q * q * v.se * v.se;
                exact = exact && v.exact;
            }
            out.overall = {mean, std::sqrt(var), exact};
            return out;
        }
        default:
            out.overall = eta_sample(atoms, y, 1.0, K, kappa, samples, seed);
            return out;
    }
}

namespace {

// max over the kernel support of p_xi (y_v psi_v)_+^a + (1-p_xi)(y_v psi_v)_-^a
double ma_numerator_term(const KernelPsi& kernel, double alpha, double p_xi,
                         const std::vector<double>& y_values) {
    double m = 0.0;
    for (std::size_t i = 0; i < kernel.support().size(); ++i) {
        double prod = y_values[i] * kernel.support()[i].second;
        double v = p_xi * pos_pow(prod, alpha) + (1.0 - p_xi) * neg_pow(prod, alpha);
        m = std::max(m, v);
    }
    return m;
}

}  // namespace

EtaReport ma_extremal_index(const KernelPsi& kernel, const VolModelY& y, double alpha,
                            double p_xi, std::int64_t samples, std::uint64_t seed) {
    EtaReport report;
    report.alpha_index = alpha;
    report.K = kInfinity;
    report.m = 0;
    report.t = kernel.truncation();
    const double denom = ma_tail_constant(kernel, alpha, p_xi);
    const double p = ma_tail_balance_p(kernel, alpha, p_xi);
    const std::size_t n_support = kernel.support().size();

    auto closed_for = [&](double scale) {
        std::vector<double> ys(n_support, scale);
        return EtaValue{ma_numerator_term(kernel, alpha, p_xi, ys) / denom, 0.0, true};
    };
    auto sampled_for = [&](double regime_scale, std::uint64_t sub_seed) {
        RunningStats stats;
        std::vector<double> ys(n_support);
        for (std::int64_t i = 0; i < samples; ++i) {
            CounterKey key{sub_seed, streams::kTheory, static_cast<std::uint64_t>(i), 2, Site{}};
            for (std::size_t j = 0; j < n_support; ++j) {
                key.site = kernel.support()[j].first;
                ys[j] = y.draw_site(key, regime_scale);
            }
            stats.add(ma_numerator_term(kernel, alpha, p_xi, ys));
        }
        return EtaValue{stats.mean() / denom, stats.std_error() / denom, false};
    };

    switch (y.kind()) {
        case YKind::kConstant:
            report.eta = closed_for(y.constant_scale());
            break;
        case YKind::kRegime: {
            double mean = 0.0, var = 0.0;
            bool exact = true;
            for (std::size_t i = 0; i < y.regime_scales().size(); ++i) {
                RegimeLabel label{static_cast<int>(i), y.regime_scales()[i]};
                EtaValue v = y.regime_of_constants()
                                 ? closed_for(y.constant_scale() * label.scale)
                                 : sampled_for(label.scale, seed + 1000 * (i + 1));
                report.per_regime.emplace_back(label, v);
                double q = y.regime_probs()[i];
                mean += q * v.eta;
                var += q * q * v.se * v.se;
                exact = exact && v.exact;
            }
            report.eta = {mean, std::sqrt(var), exact};
            break;
        }
        default:
            report.eta = sampled_for(1.0, seed);
            break;
    }
    report.breiman = breiman_constant(y, alpha, p, samples, seed + 7);
    report.theta = report.eta.eta / report.breiman.value;
    return report;
}

GarchIndexReport garch_tail_index(const GarchParams& params, std::int64_t samples,
                                  double tol, std::uint64_t seed) {
    GarchIndexReport out;
    const QuadratureRule rule = gauss_hermite(128);
    auto g = [&](double kappa) {
        return normal_expectation(rule, [&](double x) {
                   return std::pow(params.alpha1 * x * x + params.beta1, kappa);
               }) -
               1.0;
    };
    double hi = 1.0;
    while (g(hi) <= 0.0) {
        hi *= 2.0;
        if (hi > 256.0) {
            throw std::runtime_error("moment condition unmet: no positive root of E A^k = 1");
        }
    }
    out.alpha_hat = bisect_root(g, 1e-8, hi, 1e-13);
    out.residual = std::fabs(g(out.alpha_hat));
    if (out.residual > tol) {
        throw std::runtime_error("quadrature root residual exceeds tolerance");
    }

    // Monte Carlo cross-check on the same moment curve.
    std::vector<double> log_a(static_cast<std::size_t>(samples));
    parallel_for(samples, 1, [&](std::int64_t i) {
        CounterKey key{seed, streams::kTheory, static_cast<std::uint64_t>(i), 3, Site{}};
        double xi = normal_draw(key);
        log_a[static_cast<std::size_t>(i)] = std::log(params.alpha1 * xi * xi + params.beta1);
    });
    auto g_mc = [&](double kappa) {
        double s = 0.0;
        for (double la : log_a) s += std::exp(kappa * la);
        return s / static_cast<double>(samples) - 1.0;
    };
    double lo_mc = out.alpha_hat * 0.5, hi_mc = out.alpha_hat * 2.0;
    while (g_mc(lo_mc) >= 0.0) lo_mc *= 0.5;
    while (g_mc(hi_mc) <= 0.0) hi_mc *= 2.0;
    out.alpha_hat_mc = bisect_root(g_mc, lo_mc, hi_mc, 1e-10);

    // Delta method: kappa-hat solves the empirical moment equation, so its
    // variance is Var(A^k) / (n (E A^k log A)^2) at the root.
    RunningStats pow_stats;
    double slope = 0.0;
    for (double la : log_a) {
        double ak = std::exp(out.alpha_hat_mc * la);
        pow_stats.add(ak);
        slope += ak * la;
    }
    slope /= static_cast<double>(samples);
    out.se_mc = pow_stats.stddev() /
                (std::sqrt(static_cast<double>(samples)) * std::fabs(slope));
    return out;
}

EtaResult garch_eta(const GarchParams& params, const VolModelY& y, double K, int m,
                    double alpha_hat, std::int64_t samples, std::uint64_t seed,
                    GarchExponent exponent) {
    if (m < 0) throw std::invalid_argument("window length must be non-negative");
    if (!(K > 0.0)) throw std::invalid_argument("truncation level must be positive");
    const double kappa =
        (exponent == GarchExponent::kTwoAlpha) ? 2.0 * alpha_hat : alpha_hat;

    auto run_for = [&](double regime_scale, std::uint64_t sub_seed) {
        std::vector<double> terms(static_cast<std::size_t>(samples));
        parallel_for(samples, 1, [&](std::int64_t i) {
            CounterKey key{sub_seed, streams::kTheory, static_cast<std::uint64_t>(i), 0, Site{}};
            key.site = make_site({0});
            double y0 = y.deterministic() || y.regime_of_constants()
                            ? y.constant_scale() * regime_scale
                            : y.draw_site(key, regime_scale);
            if (std::fabs(y0) > K) y0 = 0.0;
            double head = pos_pow(y0, kappa);
            double prod = 1.0;
            double tail_max = 0.0;
            for (int v = 1; v <= m; ++v) {
                key.draw = 1;
                key.site = make_site({v});
                double xi = normal_draw(key);
                prod *= std::sqrt(params.alpha1 * xi * xi + params.beta1);
                key.draw = 2;
                double yv = y.deterministic() || y.regime_of_constants()
                                ? y.constant_scale() * regime_scale
                                : y.draw_site(key, regime_scale);
                if (std::fabs(yv) > K) yv = 0.0;
                tail_max = std::max(tail_max, yv * prod);
            }
            double tail = (m == 0) ? 0.0 : pos_pow(tail_max, kappa);
            terms[static_cast<std::size_t>(i)] = std::max(head - tail, 0.0);
        });
        RunningStats stats;
        for (double t : terms) stats.add(t);
        return EtaValue{stats.mean(), stats.std_error(), false};
    };

    EtaResult out;
    if (y.kind() == YKind::kRegime) {
        double mean = 0.0, var = 0.0;
        for (std::size_t i = 0; i < y.regime_scales().size(); ++i) {
            RegimeLabel label{static_cast<int>(i), y.regime_scales()[i]};
            EtaValue v = run_for(label.scale, seed + 1000 * (i + 1));
            out.per_regime.emplace_back(label, v);
            double q = y.regime_probs()[i];
            mean += q * v.eta;
            var += q * q * v.se * v.se;
        }
        out.overall = {mean, std::sqrt(var), false};
    } else {
        out.overall = run_for(1.0, seed);
    }
    return out;
}

double garch_tail_scale(const GarchParams& params, std::int64_t steps,
                        double tail_fraction, double rv_index, std::uint64_t seed) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
        throw std::invalid_argument("tail fraction must be in (0, 1)");
    }
    FieldSample path = simulate_garch(params, steps, 10000, seed);
    double q = empirical_quantile(std::move(path.values), 1.0 - tail_fraction);
    return tail_fraction * std::pow(q, rv_index);
}

}  // namespace svf
