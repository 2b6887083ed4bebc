#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svf/field.hpp"
#include "svf/rng.hpp"

namespace svf {

// Two-sided Pareto on {|x| >= 1}: P(xi > x) = p_xi x^{-alpha} and
// P(xi < -x) = (1 - p_xi) x^{-alpha} hold exactly for all x >= 1, so
// regular variation and tail balance are identities rather than limits.
class TailModel {
public:
    TailModel(double alpha, double p_xi);

    double alpha() const { return alpha_; }
    double p_xi() const { return p_xi_; }

    // {P(xi > x), P(xi < -x)} for x >= 1; throws below the support.
    std::pair<double, double> tail_prob(double x) const;

    // P(xi <= x) on the whole line.
    double cdf(double x) const;

    // Generalized inverse of cdf on (0,1).
    double quantile(double u) const;

    double draw(const CounterKey& key) const { return quantile(u01(key)); }

    std::string describe() const;

private:
    double alpha_;
    double p_xi_;
    // x^{1/alpha} with exact fast paths for the common indices.
    double root(double x) const;
};

std::vector<double> sample_xi(const TailModel& model, std::int64_t count,
                              std::uint64_t seed, std::uint64_t rep = 0,
                              std::uint64_t stream = streams::kNoise);

enum class YKind { kConstant, kIidLognormal, kIidAbsGaussian, kRegime };

// Multiplier-field models. All kinds are stationary; the regime kind draws
// a single global scale S per realization and multiplies a stationary base
// field, so its invariant sigma-algebra is sigma(S).
class VolModelY {
public:
    static VolModelY constant(double scale);
    static VolModelY iid_lognormal(double mu, double sigma);
    static VolModelY iid_absgaussian(double sigma);
    static VolModelY regime(std::vector<double> scales, std::vector<double> probs,
                            const VolModelY& base);

    YKind kind() const { return kind_; }
    double constant_scale() const { return scale_; }
    double mu() const { return mu_; }
    double sigma() const { return sigma_; }
    const std::vector<double>& regime_scales() const { return scales_; }
    const std::vector<double>& regime_probs() const { return probs_; }

    // Moment diagnostic order (Assumption-style requirement gamma > alpha);
    // defaults to alpha + 1 when paired with a tail model.
    double gamma_check() const { return gamma_check_; }
    void set_gamma_check(double g) { gamma_check_ = g; }

    bool deterministic() const { return kind_ == YKind::kConstant; }
    // Regime with a constant base: Y ≡ S with finitely many values.
    bool regime_of_constants() const;

    // E|Y_0|^a in closed form where one exists.
    std::optional<double> abs_moment(double a) const;

    RegimeLabel draw_regime(std::uint64_t seed, std::uint64_t rep) const;
    // Marginal draw at a site, conditionally on the regime scale (scale 1
    // for non-regime kinds).
    double draw_site(const CounterKey& key, double regime_scale = 1.0) const;

    FieldSample sample_field(const Box& window, std::uint64_t seed,
                             std::uint64_t rep = 0) const;

    std::string describe() const;

private:
    VolModelY() = default;
    YKind kind_ = YKind::kConstant;
    double scale_ = 1.0;
    double mu_ = 0.0;
    double sigma_ = 1.0;
    std::vector<double> scales_;
    std::vector<double> probs_;
    YKind base_kind_ = YKind::kConstant;
    double gamma_check_ = 3.0;
};

inline FieldSample sample_y_field(const VolModelY& model, const Box& window,
                                  std::uint64_t seed, std::uint64_t rep = 0) {
    return model.sample_field(window, seed, rep);
}

}  // namespace svf
