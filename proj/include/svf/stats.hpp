#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace svf {

// Streaming mean/variance accumulator (Welford).
class RunningStats {
public:
    void add(double x) {
        ++n_;
        double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
        if (x < min_ || n_ == 1) min_ = x;
        if (x > max_ || n_ == 1) max_ = x;
    }

    std::int64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    double std_error() const {
        return n_ > 0 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
    }
    double min() const { return min_; }
    double max() const { return max_; }

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double min_ = 0.0;
    double max_ = 0.0;
};

double sample_mean(const std::vector<double>& x);
double sample_variance(const std::vector<double>& x);
double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

// Order statistic at probability level q in [0,1], lower empirical quantile:
// the ceil(q*n)-th smallest value. Operates on a scratch copy.
double empirical_quantile(std::vector<double> x, double q);

// Upper tail of the chi-square distribution, P(X > stat) with df degrees.
double chisq_upper_tail(double stat, int df);

// Chi-square goodness of fit of integer counts against Poisson(lambda).
// Cells with expected count below min_expected are pooled from the right
// tail inwards, then from the left. Returns {statistic, df, p_value}.
struct ChiSquareResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    int cells = 0;
};
ChiSquareResult poisson_chisq_gof(const std::vector<std::int64_t>& counts,
                                  double lambda, double min_expected = 5.0);

// Gauss-Hermite rule with weight exp(-x^2): integral f(x) e^{-x^2} dx
// ~ sum w_i f(x_i). Nodes from the Golub-Welsch eigenproblem.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_hermite(int n);

// E[g(N)] for N standard normal, via Gauss-Hermite transform.
double normal_expectation(const QuadratureRule& rule, const std::function<double(double)>& g);

// Root of f on [lo, hi]; requires a sign change. Plain bisection.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol = 1e-12, int max_iter = 200);

// Hill estimator of the tail index from the k largest |values|.
double hill_tail_index(std::vector<double> abs_values, int k);

// Poisson pmf, stable for large lambda.
inline double poisson_pmf(std::int64_t k, double lambda) {
    if (lambda <= 0.0) return k == 0 ? 1.0 : 0.0;
    double log_p = -lambda + static_cast<double>(k) * std::log(lambda) -
                   std::lgamma(static_cast<double>(k) + 1.0);
    return std::exp(log_p);
}

}  // namespace svf
