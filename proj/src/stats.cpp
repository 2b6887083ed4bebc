#include "svf/stats.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <numeric>
#include <stdexcept>

namespace svf {

double sample_mean(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    double m = sample_mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("correlation needs two equal-length samples");
    }
    double mx = sample_mean(x), my = sample_mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

double empirical_quantile(std::vector<double> x, double q) {
    if (x.empty()) throw std::invalid_argument("quantile of empty sample");
    if (q <= 0.0) return *std::min_element(x.begin(), x.end());
    if (q >= 1.0) return *std::max_element(x.begin(), x.end());
    auto n = static_cast<std::int64_t>(x.size());
    std::int64_t k = static_cast<std::int64_t>(std::ceil(q * static_cast<double>(n)));
    if (k < 1) k = 1;
    if (k > n) k = n;
    std::nth_element(x.begin(), x.begin() + (k - 1), x.end());
    return x[k - 1];
}

double chisq_upper_tail(double stat, int df) {
    if (df <= 0) return 1.0;
    if (stat <= 0.0) return 1.0;
    return boost::math::gamma_q(static_cast<double>(df) / 2.0, stat / 2.0);
}

ChiSquareResult poisson_chisq_gof(const std::vector<std::int64_t>& counts,
                                  double lambda, double min_expected) {
    ChiSquareResult out;
    if (counts.empty()) return out;
    const auto n = static_cast<double>(counts.size());
    std::int64_t max_count = *std::max_element(counts.begin(), counts.end());

    // Observed histogram over {0, 1, ..., max_count} plus expected masses;
    // the final cell absorbs the full upper tail.
    std::vector<double> observed(static_cast<std::size_t>(max_count) + 1, 0.0);
    for (auto c : counts) observed[static_cast<std::size_t>(c)] += 1.0;
    std::vector<double> expected(observed.size(), 0.0);
    double tail = 1.0;
    for (std::size_t k = 0; k + 1 < expected.size(); ++k) {
        double p = poisson_pmf(static_cast<std::int64_t>(k), lambda);
        expected[k] = n * p;
        tail -= p;
    }
    expected.back() = n * std::max(tail, 0.0);

    // Pool sparse cells: sweep from the right so the tail merges inward,
    // then a final left-edge merge if cell 0 is still too small.
    std::vector<double> obs_cells, exp_cells;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t k = expected.size(); k-- > 0;) {
        o_acc += observed[k];
        e_acc += expected[k];
        if (e_acc >= min_expected || k == 0) {
            obs_cells.push_back(o_acc);
            exp_cells.push_back(e_acc);
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if (exp_cells.size() >= 2 && exp_cells.back() < min_expected) {
        exp_cells[exp_cells.size() - 2] += exp_cells.back();
        obs_cells[obs_cells.size() - 2] += obs_cells.back();
        exp_cells.pop_back();
        obs_cells.pop_back();
    }

    out.cells = static_cast<int>(exp_cells.size());
    if (out.cells < 2) {
        out.df = 0;
        out.p_value = 1.0;
        return out;
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < exp_cells.size(); ++i) {
        double d = obs_cells[i] - exp_cells[i];
        stat += d * d / exp_cells[i];
    }
    out.statistic = stat;
    out.df = out.cells - 1;
    out.p_value = chisq_upper_tail(stat, out.df);
    return out;
}

QuadratureRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("quadrature order must be positive");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        double b = std::sqrt(static_cast<double>(i) / 2.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("quadrature eigensolve failed");
    }
    const double mu0 = std::sqrt(M_PI);  // integral of exp(-x^2)
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = solver.eigenvalues()(i);
        double v0 = solver.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

double normal_expectation(const QuadratureRule& rule, const std::function<double(double)>& g) {
    // N = sqrt(2) x under the exp(-x^2) weight; 1/sqrt(pi) normalizes.
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        s += rule.weights[i] * g(std::sqrt(2.0) * rule.nodes[i]);
    }
    return s / std::sqrt(M_PI);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol, int max_iter) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) {
        throw std::invalid_argument("bisection bracket has no sign change");
    }
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double hill_tail_index(std::vector<double> abs_values, int k) {
    auto n = static_cast<std::int64_t>(abs_values.size());
    if (k < 1 || k >= n) throw std::invalid_argument("hill order k out of range");
    for (auto& v : abs_values) v = std::fabs(v);
    // k+1 largest order statistics; threshold is the (k+1)-th largest.
    std::nth_element(abs_values.begin(), abs_values.begin() + k, abs_values.end(),
                     std::greater<double>());
    double threshold = abs_values[k];
    if (threshold <= 0.0) throw std::invalid_argument("hill threshold not positive");
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += std::log(abs_values[i] / threshold);
    return static_cast<double>(k) / s;
}

}  // namespace svf
