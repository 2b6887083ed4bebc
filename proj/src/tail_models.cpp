#include "svf/tail_models.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace svf {

TailModel::TailModel(double alpha, double p_xi) : alpha_(alpha), p_xi_(p_xi) {
    if (!(alpha > 0.0)) throw std::invalid_argument("tail index must be positive");
    if (!(p_xi > 0.0 && p_xi <= 1.0)) {
        throw std::invalid_argument("tail balance weight must be in (0, 1]");
    }
}

std::pair<double, double> TailModel::tail_prob(double x) const {
    if (x < 1.0) throw std::domain_error("tails are only defined on |x| >= 1");
    double base = std::pow(x, -alpha_);
    return {p_xi_ * base, (1.0 - p_xi_) * base};
}

double TailModel::cdf(double x) const {
    if (x <= -1.0) return (1.0 - p_xi_) * std::pow(-x, -alpha_);
    if (x < 1.0) return 1.0 - p_xi_;
    return 1.0 - p_xi_ * std::pow(x, -alpha_);
}

double TailModel::root(double x) const {
    if (alpha_ == 2.0) return std::sqrt(x);
    if (alpha_ == 1.0) return x;
    return std::pow(x, 1.0 / alpha_);
}

double TailModel::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile level must be in (0, 1)");
    const double q = 1.0 - p_xi_;
    if (u <= q) return -root(q / u);
    return root(p_xi_ / (1.0 - u));
}

std::string TailModel::describe() const {
    std::ostringstream os;
    os << "pareto2(alpha=" << alpha_ << ",p_xi=" << p_xi_ << ")";
    return os.str();
}

std::vector<double> sample_xi(const TailModel& model, std::int64_t count,
                              std::uint64_t seed, std::uint64_t rep,
                              std::uint64_t stream) {
    if (count < 0) throw std::invalid_argument("negative draw count");
    std::vector<double> out(static_cast<std::size_t>(count));
    CounterKey key{seed, stream, rep, 0, Site{}};
    for (std::int64_t i = 0; i < count; ++i) {
        key.draw = static_cast<std::uint64_t>(i);
        out[static_cast<std::size_t>(i)] = model.draw(key);
    }
    return out;
}

VolModelY VolModelY::constant(double scale) {
    VolModelY m;
    m.kind_ = YKind::kConstant;
    m.scale_ = scale;
    return m;
}

VolModelY VolModelY::iid_lognormal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("lognormal sigma must be positive");
    VolModelY m;
    m.kind_ = YKind::kIidLognormal;
    m.mu_ = mu;
    m.sigma_ = sigma;
    return m;
}

VolModelY VolModelY::iid_absgaussian(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("absgaussian sigma must be positive");
    VolModelY m;
    m.kind_ = YKind::kIidAbsGaussian;
    m.sigma_ = sigma;
    return m;
}

VolModelY VolModelY::regime(std::vector<double> scales, std::vector<double> probs,
                            const VolModelY& base) {
    if (scales.empty() || scales.size() != probs.size()) {
        throw std::invalid_argument("regime scales and probabilities must pair up");
    }
    double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (double p : probs) {
        if (!(p > 0.0)) throw std::invalid_argument("regime probabilities must be positive");
    }
    if (std::fabs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("regime probabilities must sum to 1");
    }
    if (base.kind_ == YKind::kRegime) {
        throw std::invalid_argument("regime base must not itself be a regime");
    }
    VolModelY m = base;
    m.base_kind_ = base.kind_;
    m.kind_ = YKind::kRegime;
    m.scales_ = std::move(scales);
    m.probs_ = std::move(probs);
    return m;
}

bool VolModelY::regime_of_constants() const {
    return kind_ == YKind::kRegime && base_kind_ == YKind::kConstant;
}

std::optional<double> VolModelY::abs_moment(double a) const {
    switch (kind_) {
        case YKind::kConstant:
            return std::pow(std::fabs(scale_), a);
        case YKind::kIidLognormal:
            // E e^{a(mu + sigma N)} = exp(a mu + a^2 sigma^2 / 2)
            return std::exp(a * mu_ + 0.5 * a * a * sigma_ * sigma_);
        case YKind::kIidAbsGaussian:
            // E|sigma N|^a = sigma^a 2^{a/2} Gamma((a+1)/2) / sqrt(pi)
            return std::pow(sigma_, a) * std::pow(2.0, 0.5 * a) *
                   std::exp(std::lgamma(0.5 * (a + 1.0))) / std::sqrt(M_PI);
        case YKind::kRegime: {
            VolModelY base = *this;
            base.kind_ = base_kind_;
            auto bm = base.abs_moment(a);
            if (!bm) return std::nullopt;
            double s = 0.0;
            for (std::size_t i = 0; i < scales_.size(); ++i) {
                s += probs_[i] * std::pow(std::fabs(scales_[i]), a) * *bm;
            }
            return s;
        }
    }
    return std::nullopt;
}

RegimeLabel VolModelY::draw_regime(std::uint64_t seed, std::uint64_t rep) const {
    if (kind_ != YKind::kRegime) return RegimeLabel{0, 1.0};
    double u = u01(CounterKey{seed, streams::kRegime, rep, 0, Site{}});
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs_.size(); ++i) {
        acc += probs_[i];
        if (u < acc) return RegimeLabel{static_cast<int>(i), scales_[i]};
    }
    return RegimeLabel{static_cast<int>(scales_.size()) - 1, scales_.back()};
}

double VolModelY::draw_site(const CounterKey& key, double regime_scale) const {
    YKind k = (kind_ == YKind::kRegime) ? base_kind_ : kind_;
    double base;
    switch (k) {
        case YKind::kConstant:
            base = scale_;
            break;
        case YKind::kIidLognormal:
            base = std::exp(mu_ + sigma_ * normal_draw(key));
            break;
        case YKind::kIidAbsGaussian:
            base = std::fabs(sigma_ * normal_draw(key));
            break;
        default:
            throw std::logic_error("unreachable multiplier kind");
    }
    return (kind_ == YKind::kRegime) ? regime_scale * base : base;
}

FieldSample VolModelY::sample_field(const Box& window, std::uint64_t seed,
                                    std::uint64_t rep) const {
    if (window.empty()) throw std::invalid_argument("empty multiplier window");
    FieldSample out;
    out.window = window;
    out.values.resize(static_cast<std::size_t>(window.cardinality()));
    out.model = describe();
    out.seed = seed;
    out.rep = rep;
    double scale = 1.0;
    if (kind_ == YKind::kRegime) {
        out.regime = draw_regime(seed, rep);
        scale = out.regime->scale;
    }
    YKind site_kind = (kind_ == YKind::kRegime) ? base_kind_ : kind_;
    if (site_kind == YKind::kConstant) {
        double v = scale_ * scale;
        for (auto& x : out.values) x = v;
        return out;
    }
    CounterKey key{seed, streams::kVolY, rep, 0, Site{}};
    std::int64_t idx = 0;
    for_each_site(window, [&](const Site& v) {
        key.site = v;
        out.values[static_cast<std::size_t>(idx++)] = draw_site(key, scale);
    });
    return out;
}

std::string VolModelY::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case YKind::kConstant:
            os << "const(" << scale_ << ")";
            break;
        case YKind::kIidLognormal:
            os << "lognormal(" << mu_ << "," << sigma_ << ")";
            break;
        case YKind::kIidAbsGaussian:
            os << "absgaussian(" << sigma_ << ")";
            break;
        case YKind::kRegime: {
            os << "regime({";
            for (std::size_t i = 0; i < scales_.size(); ++i) {
                if (i) os << ",";
                os << scales_[i];
            }
            os << "},base=";
            VolModelY base = *this;
            base.kind_ = base_kind_;
            os << base.describe() << ")";
            break;
        }
    }
    return os.str();
}

}  // namespace svf
