#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "svf/field.hpp"
#include "svf/simulate.hpp"
#include "svf/tail_models.hpp"

namespace svf {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Discrete spectral distribution of a window (Z_v)_{v in B^(m)}: atoms are
// direction vectors of max-norm 1 over the window, in +/- pairs.
struct SpectralAtom {
    std::vector<double> theta;  // per support site, lex order
    double weight = 0.0;
};

struct SpectralAtoms {
    int dimension = 1;
    int m = 0;
    std::vector<Site> support;               // B^(m), lex order
    std::size_t origin = 0;                  // index of the lattice origin
    std::vector<std::size_t> after_origin;   // indices forming A_0^(m)
    std::vector<SpectralAtom> atoms;
};

double psi_alpha_norm(const KernelPsi& kernel, double alpha);
double ma_tail_balance_p(const KernelPsi& kernel, double alpha, double p_xi);
double ma_tail_constant(const KernelPsi& kernel, double alpha, double p_xi);

// a_n with domain_size * (limiting tail at a_n) = 1 under
// P(Z > x) ~ tail_constant * x^{-index}.
double norming_a_n(double tail_constant, double index, double domain_size);

SpectralAtoms ma_spectral_atoms(const KernelPsi& kernel, int m, double alpha, double p_xi);

struct MonteCarloValue {
    double value = 0.0;
    double se = 0.0;
    bool closed_form = false;
};

// E(Y_0)_+^alpha + ((1-p)/p) E(Y_0)_-^alpha.
MonteCarloValue breiman_constant(const VolModelY& y, double alpha, double p,
                                 std::int64_t samples, std::uint64_t seed,
                                 bool force_monte_carlo = false);

struct EtaValue {
    double eta = 0.0;
    double se = 0.0;
    bool exact = false;
};

struct EtaResult {
    EtaValue overall;
    std::vector<std::pair<RegimeLabel, EtaValue>> per_regime;  // regime models only
};

// Truncated extremal functional: ratio of
// E(((Y_0 1{|Y_0|<=K} Theta_0)_+^kappa - (max over A_0^(m) of
// Y_v 1{|Y_v|<=K} Theta_v)_+^kappa)_+) to E(Theta_0)_+^kappa.
// Exact atom enumeration whenever Y is (regime-wise) constant, Monte Carlo
// otherwise. kappa is the regular-variation index of Z.
EtaResult eta_tkm(const SpectralAtoms& atoms, const VolModelY& y, double K,
                  double kappa, std::int64_t samples, std::uint64_t seed);

struct EtaReport {
    double alpha_index = 0.0;  // RV index used as exponent
    double K = kInfinity;
    int m = 0;
    int t = 0;
    EtaValue eta;
    std::vector<std::pair<RegimeLabel, EtaValue>> per_regime;
    MonteCarloValue breiman;
    double theta = 0.0;  // eta / breiman, exact identity in the report
};

// Closed-form / Monte Carlo extremal functional of the moving-average
// volatility field: eta = E[max_v (p_xi (Y_v psi_v)_+^a + (1-p_xi)
// (Y_v psi_v)_-^a)_+] / (p ||psi||_a^a), theta = eta / Breiman.
EtaReport ma_extremal_index(const KernelPsi& kernel, const VolModelY& y, double alpha,
                            double p_xi, std::int64_t samples, std::uint64_t seed);

struct GarchIndexReport {
    double alpha_hat = 0.0;     // quadrature root of E A^kappa = 1
    double residual = 0.0;      // |E A^alpha_hat - 1| under quadrature
    double alpha_hat_mc = 0.0;  // root under the Monte Carlo moment curve
    double se_mc = 0.0;
    double rv_index() const { return 2.0 * alpha_hat; }
};

// Root of E (alpha1 xi^2 + beta1)^kappa = 1 by 128-node quadrature plus an
// independent Monte Carlo cross-check; throws if no positive root exists
// on the search bracket (moment condition unmet).
GarchIndexReport garch_tail_index(const GarchParams& params, std::int64_t samples,
                                  double tol, std::uint64_t seed);

enum class GarchExponent { kTwoAlpha, kLiteralAlpha };

// Monte Carlo of E(((Y_0 1{|Y_0|<=K})_+^kappa - (max_{1<=v<=m} Y_v
// 1{|Y_v|<=K} prod_{i<=v} sqrt(A_i))_+^kappa)_+) with kappa = 2 alpha_hat
// (the RV index) by default; the literal-exponent variant uses alpha_hat.
EtaResult garch_eta(const GarchParams& params, const VolModelY& y, double K, int m,
                    double alpha_hat, std::int64_t samples, std::uint64_t seed,
                    GarchExponent exponent = GarchExponent::kTwoAlpha);

// Fitted tail scale c with P(Z > x) ~ c x^{-rv_index}, calibrated at the
// empirical (1 - tail_fraction) quantile of a long simulated path.
double garch_tail_scale(const GarchParams& params, std::int64_t steps,
                        double tail_fraction, double rv_index, std::uint64_t seed);

}  // namespace svf
