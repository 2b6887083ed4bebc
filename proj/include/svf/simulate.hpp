#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "svf/field.hpp"
#include "svf/lattice.hpp"
#include "svf/tail_models.hpp"

namespace svf {

// Moving-average coefficients with finite support inside [-t, t]^d.
class KernelPsi {
public:
    KernelPsi(int dimension, int truncation,
              const std::map<Site, double, SiteLexLess>& coefficients);

    static KernelPsi delta(int dimension);
    // 1-d convenience: coefficients at offsets 0, 1, ..., k-1.
    static KernelPsi line(const std::vector<double>& coefficients);

    int dimension() const { return dim_; }
    int truncation() const { return t_; }
    const std::vector<std::pair<Site, double>>& support() const { return support_; }

    // psi_u, zero off the support.
    double coefficient(const Site& u) const;

    KernelPsi scaled(double factor) const;

    std::string describe() const;

private:
    int dim_;
    int t_;
    std::vector<std::pair<Site, double>> support_;  // lex order, nonzero only
};

struct GarchParams {
    double alpha0;
    double alpha1;
    double beta1;

    GarchParams(double a0, double a1, double b1);

    // Stationary mean of the squared recursion, alpha0 / (1 - alpha1 - beta1).
    double stationary_mean_sq() const { return alpha0 / (1.0 - alpha1 - beta1); }

    std::string describe() const;
};

// Noise field evaluated per site; injectable so tests can drive the
// convolution with deterministic inputs.
using NoiseFn = std::function<double(const Site&)>;

// Z_v = sum over the kernel support of psi_u * noise(v - u); the caller's
// noise function covers window padded by the truncation radius.
FieldSample convolve(const KernelPsi& kernel, const Box& window, const NoiseFn& noise);

FieldSample simulate_ma(const KernelPsi& kernel, const TailModel& tail, const Box& window,
                        std::uint64_t seed, std::uint64_t rep = 0);

// One-dimensional volatility path Z_v = +sqrt(Z_v^2) from the squared
// recursion, started at the stationary mean, burn_in steps discarded.
FieldSample simulate_garch(const GarchParams& params, std::int64_t length,
                           std::int64_t burn_in, std::uint64_t seed,
                           std::uint64_t rep = 0);

}  // namespace svf
