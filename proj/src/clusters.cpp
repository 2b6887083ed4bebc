#include "svf/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace svf {

void ClusterPartition::validate() const {
    std::vector<Site> merged;
    std::int64_t total = 0;
    const Site* prev_first = nullptr;
    for (const auto& cluster : clusters) {
        if (cluster.empty()) throw std::logic_error("empty cluster");
        if (!std::is_sorted(cluster.begin(), cluster.end(), SiteLexLess{}))
            throw std::logic_error("cluster sites out of order");
        if (prev_first != nullptr && !lex_less(*prev_first, cluster.front()))
            throw std::logic_error("clusters out of order");
        prev_first = &cluster.front();
        total += static_cast<std::int64_t>(cluster.size());
        merged.insert(merged.end(), cluster.begin(), cluster.end());
    }
    if (total != static_cast<std::int64_t>(phi.size()))
        throw std::logic_error("cluster sizes do not sum to |phi|");
    std::sort(merged.begin(), merged.end(), SiteLexLess{});
    if (std::adjacent_find(merged.begin(), merged.end()) != merged.end())
        throw std::logic_error("clusters overlap");
    std::vector<Site> sorted_phi = phi;
    std::sort(sorted_phi.begin(), sorted_phi.end(), SiteLexLess{});
    if (merged != sorted_phi) throw std::logic_error("clusters do not cover phi");
}

std::vector<Site> exceedance_set(const FieldSample& field, const IndexSetGeometry& geom,
                                 double threshold) {
    const Box& window = field.window;
    const Box& bound = geom.bounding();
    for (int l = 0; l < geom.dimension(); ++l) {
        if (bound.lo.c[l] < window.lo.c[l] || bound.hi.c[l] > window.hi.c[l])
            throw std::invalid_argument("field does not cover the index set");
    }
    std::vector<Site> phi;
    for (const Site& v : geom.sites()) {
        if (field.at(v) > threshold) phi.push_back(v);
    }
    return phi;
}

namespace {

std::vector<Site> sorted_members(const std::vector<Site>& phi, const IndexSetGeometry& geom) {
    std::vector<Site> sorted = phi;
    std::sort(sorted.begin(), sorted.end(), SiteLexLess{});
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("duplicate exceedance site");
    for (const Site& v : sorted) {
        if (!geom.member(v)) throw std::invalid_argument("exceedance site outside the index set");
    }
    return sorted;
}

void finish_partition(ClusterPartition& part) {
    for (auto& cluster : part.clusters)
        std::sort(cluster.begin(), cluster.end(), SiteLexLess{});
    std::sort(part.clusters.begin(), part.clusters.end(),
              [](const std::vector<Site>& a, const std::vector<Site>& b) {
                  return lex_less(a.front(), b.front());
              });
}

}  // namespace

ClusterPartition box_clusters(const std::vector<Site>& phi, const IndexSetGeometry& geom) {
    ClusterPartition part;
    part.rule = ClusterRule::kBox;
    part.phi = sorted_members(phi, geom);
    std::map<Site, std::vector<Site>, SiteLexLess> by_box;
    for (const Site& v : part.phi) by_box[geom.box_of(v)].push_back(v);
    part.clusters.reserve(by_box.size());
    for (auto& [z, members] : by_box) part.clusters.push_back(std::move(members));
    finish_partition(part);
    return part;
}

namespace {

struct DisjointSets {
    std::vector<int> parent;
    std::vector<int> size;

    explicit DisjointSets(int n) : parent(n), size(n, 1) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
};

}  // namespace

ClusterPartition proximity_clusters(const std::vector<Site>& phi, int dimension,
                                    const std::vector<std::int64_t>& t_n) {
    if (dimension < 1 || dimension > kMaxDim) throw std::invalid_argument("bad dimension");
    if (static_cast<int>(t_n.size()) != dimension)
        throw std::invalid_argument("t_n size does not match dimension");
    for (std::int64_t t : t_n) {
        if (t < 1) throw std::invalid_argument("t_n entries must be positive");
    }
    ClusterPartition part;
    part.rule = ClusterRule::kProximity;
    part.phi = phi;
    std::sort(part.phi.begin(), part.phi.end(), SiteLexLess{});
    if (std::adjacent_find(part.phi.begin(), part.phi.end()) != part.phi.end())
        throw std::invalid_argument("duplicate exceedance site");

    const int n = static_cast<int>(part.phi.size());
    DisjointSets sets(n);
    for (int i = 0; i < n; ++i) {
        // Sites are lex sorted, so candidates with axis-0 gap < t_0 are contiguous.
        for (int j = i + 1; j < n; ++j) {
            if (part.phi[j].c[0] - part.phi[i].c[0] >= t_n[0]) break;
            bool close = true;
            for (int l = 1; l < dimension; ++l) {
                if (std::llabs(part.phi[j].c[l] - part.phi[i].c[l]) >= t_n[l]) {
                    close = false;
                    break;
                }
            }
            if (close) sets.unite(i, j);
        }
    }
    std::map<int, std::vector<Site>> by_root;
    for (int i = 0; i < n; ++i) by_root[sets.find(i)].push_back(part.phi[i]);
    part.clusters.reserve(by_root.size());
    for (auto& [root, members] : by_root) part.clusters.push_back(std::move(members));
    finish_partition(part);
    return part;
}

void validate_scaled_region(const IndexSetGeometry& geom, const ShapeC& region) {
    if (region.dimension() != geom.dimension())
        throw std::invalid_argument("region dimension does not match the index set");
    RealBox rb = region.bounding();
    Box scan;
    scan.dim = geom.dimension();
    for (int l = 0; l < scan.dim; ++l) {
        double c = geom.c_n()[l];
        scan.lo.c[l] = static_cast<std::int64_t>(std::floor(rb.lo[l] * c)) - 1;
        scan.hi.c[l] = static_cast<std::int64_t>(std::ceil(rb.hi[l] * c)) + 1;
    }
    bool any = false;
    for_each_site(scan, [&](const Site& v) {
        if (!geom.member_scaled(region, v)) return;
        any = true;
        if (!geom.member(v)) throw std::invalid_argument("region extends outside the index set");
    });
    if (!any) throw std::invalid_argument("region contains no lattice sites");
}

void validate_lattice_region(const IndexSetGeometry& geom, const Box& region) {
    if (region.dim != geom.dimension())
        throw std::invalid_argument("region dimension does not match the index set");
    if (region.empty()) throw std::invalid_argument("region contains no lattice sites");
    for_each_site(region, [&](const Site& v) {
        if (!geom.member(v)) throw std::invalid_argument("region extends outside the index set");
    });
}

std::vector<std::int64_t> count_regions_scaled(const ClusterPartition& partition,
                                               const IndexSetGeometry& geom,
                                               const std::vector<ShapeC>& regions,
                                               bool validate_regions) {
    if (validate_regions) {
        for (const ShapeC& region : regions) validate_scaled_region(geom, region);
    }
    std::vector<std::int64_t> counts(regions.size(), 0);
    for (std::size_t r = 0; r < regions.size(); ++r) {
        for (const auto& cluster : partition.clusters) {
            for (const Site& v : cluster) {
                if (geom.member_scaled(regions[r], v)) {
                    ++counts[r];
                    break;
                }
            }
        }
    }
    return counts;
}

std::vector<std::int64_t> count_regions_lattice(const ClusterPartition& partition,
                                                const IndexSetGeometry& geom,
                                                const std::vector<Box>& regions,
                                                bool validate_regions) {
    if (validate_regions) {
        for (const Box& region : regions) validate_lattice_region(geom, region);
    }
    std::vector<std::int64_t> counts(regions.size(), 0);
    for (std::size_t r = 0; r < regions.size(); ++r) {
        for (const auto& cluster : partition.clusters) {
            for (const Site& v : cluster) {
                if (regions[r].contains(v)) {
                    ++counts[r];
                    break;
                }
            }
        }
    }
    return counts;
}

PoissonGofReport poisson_gof(const std::vector<std::int64_t>& counts, double lambda) {
    if (counts.size() < 100) throw std::invalid_argument("need at least 100 counts");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    PoissonGofReport report;
    std::vector<double> x(counts.begin(), counts.end());
    report.mean = sample_mean(x);
    double var = sample_variance(x);
    report.dispersion = report.mean > 0.0 ? var / report.mean : 0.0;
    report.degenerate =
        std::adjacent_find(counts.begin(), counts.end(), std::not_equal_to<>()) == counts.end();
    report.chisq = poisson_chisq_gof(counts, lambda);
    return report;
}

}  // namespace svf
