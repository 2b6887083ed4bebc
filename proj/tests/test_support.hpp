#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "svf/clusters.hpp"
#include "svf/lattice.hpp"
#include "svf/rng.hpp"

namespace svf::test {

// Reference partition for the proximity rule: transitive closure of the
// pairwise relation |u_l - w_l| < t_l on every axis, closed by repeated
// sweeps instead of union-find.
inline std::vector<std::vector<Site>> chain_closure_partition(
    const std::vector<Site>& phi, int dimension, const std::vector<std::int64_t>& t) {
    const std::size_t n = phi.size();
    std::vector<std::size_t> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = i;
    auto close = [&](const Site& a, const Site& b) {
        for (int l = 0; l < dimension; ++l) {
            if (std::llabs(a.c[l] - b.c[l]) >= t[static_cast<std::size_t>(l)]) return false;
        }
        return true;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (close(phi[i], phi[j]) && label[j] != label[i]) {
                    std::size_t m = std::min(label[i], label[j]);
                    label[i] = label[j] = m;
                    changed = true;
                }
            }
        }
    }
    std::vector<std::vector<Site>> clusters;
    std::vector<std::size_t> seen;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t root = label[i];
        std::size_t slot = clusters.size();
        for (std::size_t s = 0; s < seen.size(); ++s) {
            if (seen[s] == root) slot = s;
        }
        if (slot == clusters.size()) {
            seen.push_back(root);
            clusters.emplace_back();
        }
        clusters[slot].push_back(phi[i]);
    }
    for (auto& cluster : clusters) std::sort(cluster.begin(), cluster.end(), SiteLexLess{});
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& a, const auto& b) { return lex_less(a.front(), b.front()); });
    return clusters;
}

// Inverse-CDF Poisson variate from one uniform; exact for desk-scale lambda.
inline std::int64_t poisson_draw(double lambda, double u) {
    double pmf = std::exp(-lambda);
    double cum = pmf;
    std::int64_t k = 0;
    while (u > cum && k < 10000) {
        ++k;
        pmf *= lambda / static_cast<double>(k);
        cum += pmf;
    }
    return k;
}

// Failures before the first success, success probability p.
inline std::int64_t geometric_draw(double p, double u) {
    return static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

// Deterministic scratch uniform for test-local sampling.
inline double test_u01(std::uint64_t rep, std::uint64_t draw, std::uint64_t seed = 99) {
    return u01(CounterKey{seed, streams::kScratch, rep, draw, Site{}});
}

// Random proximity instance on a small d-dimensional range with duplicates
// removed; sites span [-range, range]^d.
inline std::vector<Site> random_phi(std::uint64_t rep, int dimension, std::int64_t max_size,
                                    std::int64_t range) {
    std::int64_t size = static_cast<std::int64_t>(test_u01(rep, 0) *
                                                  static_cast<double>(max_size + 1));
    std::vector<Site> phi;
    for (std::int64_t i = 0; i < size; ++i) {
        Site v;
        for (int l = 0; l < dimension; ++l) {
            double u = test_u01(rep, 16 + 8 * static_cast<std::uint64_t>(i) +
                                         static_cast<std::uint64_t>(l));
            v.c[l] = static_cast<std::int64_t>(std::floor(u * (2.0 * static_cast<double>(range) +
                                                               1.0))) -
                     range;
        }
        phi.push_back(v);
    }
    std::sort(phi.begin(), phi.end(), SiteLexLess{});
    phi.erase(std::unique(phi.begin(), phi.end()), phi.end());
    return phi;
}

}  // namespace svf::test
