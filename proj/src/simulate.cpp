#include "svf/simulate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "svf/rng.hpp"

namespace svf {

KernelPsi::KernelPsi(int dimension, int truncation,
                     const std::map<Site, double, SiteLexLess>& coefficients)
    : dim_(dimension), t_(truncation) {
    if (dimension < 1 || dimension > kMaxDim) {
        throw std::invalid_argument("kernel dimension out of range");
    }
    if (truncation < 0) throw std::invalid_argument("negative truncation radius");
    for (const auto& [u, c] : coefficients) {
        if (c == 0.0) continue;
        for (int i = 0; i < dim_; ++i) {
            if (u.c[i] < -t_ || u.c[i] > t_) {
                throw std::invalid_argument("kernel support exceeds truncation box");
            }
        }
        for (int i = dim_; i < kMaxDim; ++i) {
            if (u.c[i] != 0) throw std::invalid_argument("kernel offset beyond dimension");
        }
        support_.emplace_back(u, c);
    }
    if (support_.empty()) throw std::invalid_argument("kernel has no nonzero coefficient");
}

KernelPsi KernelPsi::delta(int dimension) {
    std::map<Site, double, SiteLexLess> c;
    c[Site{}] = 1.0;
    return KernelPsi(dimension, 0, c);
}

KernelPsi KernelPsi::line(const std::vector<double>& coefficients) {
    std::map<Site, double, SiteLexLess> c;
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        c[make_site({static_cast<std::int64_t>(i)})] = coefficients[i];
    }
    return KernelPsi(1, static_cast<int>(coefficients.size()) - 1, c);
}

double KernelPsi::coefficient(const Site& u) const {
    for (const auto& [s, c] : support_) {
        if (s == u) return c;
    }
    return 0.0;
}

KernelPsi KernelPsi::scaled(double factor) const {
    std::map<Site, double, SiteLexLess> c;
    for (const auto& [u, v] : support_) c[u] = factor * v;
    return KernelPsi(dim_, t_, c);
}

std::string KernelPsi::describe() const {
    std::ostringstream os;
    os << "ma" << dim_ << "d{";
    bool first = true;
    for (const auto& [u, c] : support_) {
        if (!first) os << ",";
        first = false;
        os << "(";
        for (int i = 0; i < dim_; ++i) {
            if (i) os << ",";
            os << u.c[i];
        }
        os << "):" << c;
    }
    os << "}";
    return os.str();
}

GarchParams::GarchParams(double a0, double a1, double b1)
    : alpha0(a0), alpha1(a1), beta1(b1) {
    if (!(a0 > 0.0 && a1 > 0.0 && b1 > 0.0)) {
        throw std::invalid_argument("recursion coefficients must be positive");
    }
    if (!(a1 + b1 < 1.0)) {
        throw std::invalid_argument("alpha1 + beta1 must be below 1");
    }
}

std::string GarchParams::describe() const {
    std::ostringstream os;
    os << "garch(" << alpha0 << "," << alpha1 << "," << beta1 << ")";
    return os.str();
}

FieldSample convolve(const KernelPsi& kernel, const Box& window, const NoiseFn& noise) {
    if (window.empty()) throw std::invalid_argument("empty simulation window");
    if (window.dim != kernel.dimension()) {
        throw std::invalid_argument("window dimension does not match kernel");
    }
    FieldSample out;
    out.window = window;
    out.values.resize(static_cast<std::size_t>(window.cardinality()));
    const auto& support = kernel.support();
    std::int64_t idx = 0;
    for_each_site(window, [&](const Site& v) {
        double acc = 0.0;
        for (const auto& [u, c] : support) acc += c * noise(v - u);
        out.values[static_cast<std::size_t>(idx++)] = acc;
    });
    return out;
}

FieldSample simulate_ma(const KernelPsi& kernel, const TailModel& tail, const Box& window,
                        std::uint64_t seed, std::uint64_t rep) {
    CounterKey key{seed, streams::kNoise, rep, 0, Site{}};
    FieldSample out = convolve(kernel, window, [&](const Site& s) {
        CounterKey k = key;
        k.site = s;
        return tail.draw(k);
    });
    out.model = kernel.describe() + "/" + tail.describe();
    out.seed = seed;
    out.rep = rep;
    return out;
}

FieldSample simulate_garch(const GarchParams& params, std::int64_t length,
                           std::int64_t burn_in, std::uint64_t seed, std::uint64_t rep) {
    if (length < 1) throw std::invalid_argument("path length must be positive");
    if (burn_in < 0) throw std::invalid_argument("negative burn-in");
    FieldSample out;
    out.window.dim = 1;
    out.window.lo = make_site({0});
    out.window.hi = make_site({length - 1});
    out.values.resize(static_cast<std::size_t>(length));
    out.model = params.describe();
    out.seed = seed;
    out.rep = rep;

    double zsq = params.stationary_mean_sq();
    CounterKey key{seed, streams::kGarch, rep, 0, Site{}};
    for (std::int64_t i = 0; i < burn_in + length; ++i) {
        if (i >= burn_in) {
            out.values[static_cast<std::size_t>(i - burn_in)] = std::sqrt(zsq);
        }
        key.draw = static_cast<std::uint64_t>(i);
        double xi = normal_draw(key);
        zsq = params.alpha0 + zsq * (params.alpha1 * xi * xi + params.beta1);
    }
    return out;
}

}  // namespace svf
