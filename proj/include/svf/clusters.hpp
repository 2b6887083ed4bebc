#pragma once

#include <cstdint>
#include <vector>

#include "svf/field.hpp"
#include "svf/geometry.hpp"
#include "svf/stats.hpp"

namespace svf {

enum class ClusterRule { kBox, kProximity };

// Partition of the exceedance set into clusters; clusters are pairwise
// disjoint, cover phi, hold lex-sorted sites, and are ordered by smallest
// member.
struct ClusterPartition {
    ClusterRule rule = ClusterRule::kBox;
    std::vector<Site> phi;
    std::vector<std::vector<Site>> clusters;

    std::int64_t gamma() const { return static_cast<std::int64_t>(clusters.size()); }
    // Throws if the partition invariants fail.
    void validate() const;
};

// Sites v in D_n with field value strictly above the threshold.
std::vector<Site> exceedance_set(const FieldSample& field, const IndexSetGeometry& geom,
                                 double threshold);

// One cluster per occupied J-box.
ClusterPartition box_clusters(const std::vector<Site>& phi, const IndexSetGeometry& geom);

// Connected components of the graph joining u, w when |u_l - w_l| < t_l
// on every axis (transitive closure of the proximity relation).
ClusterPartition proximity_clusters(const std::vector<Site>& phi, int dimension,
                                    const std::vector<std::int64_t>& t_n);

// Number of clusters meeting each region; counts intersections, so one
// cluster can increment several regions. Passing the box partition yields
// the N/L counts and the proximity partition the N-tilde/L-tilde counts.
std::vector<std::int64_t> count_regions_scaled(const ClusterPartition& partition,
                                               const IndexSetGeometry& geom,
                                               const std::vector<ShapeC>& regions,
                                               bool validate_regions = true);
std::vector<std::int64_t> count_regions_lattice(const ClusterPartition& partition,
                                                const IndexSetGeometry& geom,
                                                const std::vector<Box>& regions,
                                                bool validate_regions = true);

// Throws unless every lattice point of the scaled region c_n A lies in D_n.
void validate_scaled_region(const IndexSetGeometry& geom, const ShapeC& region);
void validate_lattice_region(const IndexSetGeometry& geom, const Box& region);

struct PoissonGofReport {
    double mean = 0.0;
    double dispersion = 0.0;  // sample variance / sample mean
    ChiSquareResult chisq;
    bool degenerate = false;  // constant sample
};

PoissonGofReport poisson_gof(const std::vector<std::int64_t>& counts, double lambda);

}  // namespace svf
