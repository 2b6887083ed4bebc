#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svf/lattice.hpp"

namespace svf {

// Shape parameters are validated to at most 6 decimal places so that all
// lattice membership tests reduce to exact integer comparisons.
constexpr std::int64_t kCoordScale = 1000000;

std::int64_t to_scaled_exact(double value);

// Real half-open box, [lo, hi) per axis.
struct RealBox {
    std::array<double, kMaxDim> lo{};
    std::array<double, kMaxDim> hi{};
    bool operator==(const RealBox&) const = default;
};

enum class ShapeKind { kUnitBox, kBoxUnion, kDisc };

// Bounded shape C with non-empty interior and null boundary, one of:
// the unit box [0,1)^d, a disjoint union of half-open boxes, or a closed
// planar disc.
class ShapeC {
public:
    static ShapeC unit_box(int dimension);
    static ShapeC box_union(int dimension, const std::vector<RealBox>& boxes);
    static ShapeC disc(double center_x, double center_y, double radius);

    ShapeKind kind() const { return kind_; }
    int dimension() const { return dim_; }
    double volume() const { return volume_; }
    const std::vector<RealBox>& boxes() const { return boxes_; }
    double disc_center(int axis) const;
    double disc_radius() const;

    // Is v / c in C, where c is the per-axis scaling? Exact.
    bool contains_site(const Site& v, const std::vector<std::int64_t>& c_scaled) const;

    // Real bounding box of C.
    RealBox bounding() const;

    std::string describe() const;

private:
    ShapeC() = default;
    ShapeKind kind_ = ShapeKind::kUnitBox;
    int dim_ = 1;
    double volume_ = 1.0;
    std::vector<RealBox> boxes_;                         // box kinds
    std::vector<std::array<std::int64_t, 2>> sb_;        // scaled box bounds per axis
    std::array<std::int64_t, 2> center_scaled_{};        // disc
    std::int64_t radius_scaled_ = 0;
};

// D_n = c_n C on the integer lattice, with the J-box tiling J_z =
// (x_n + t_n (z + [0,1)^d)) and its inner/outer approximations.
class IndexSetGeometry {
public:
    IndexSetGeometry(const ShapeC& shape, const std::vector<double>& c_n,
                     const std::vector<std::int64_t>& t_n,
                     const std::vector<double>& x_n = {});

    // Same point set, different box side lengths.
    IndexSetGeometry rebox(const std::vector<std::int64_t>& t_n) const;

    const ShapeC& shape() const { return shape_; }
    int dimension() const { return dim_; }
    const std::vector<double>& c_n() const { return c_real_; }
    const std::vector<std::int64_t>& t_n() const { return t_; }
    const std::vector<double>& x_n() const { return x_real_; }

    const std::vector<Site>& sites() const { return sites_; }
    std::int64_t cardinality() const { return static_cast<std::int64_t>(sites_.size()); }
    const Box& bounding() const { return bounding_; }
    bool member(const Site& v) const;

    // J-box index of a site and the lattice sites of a J-box.
    Site box_of(const Site& v) const;
    Box box_sites(const Site& z) const;
    std::int64_t t_star() const { return t_star_; }

    const std::vector<Site>& inner_boxes() const { return inner_; }   // P_n
    const std::vector<Site>& outer_boxes() const { return outer_; }   // Q_n
    bool in_inner(const Site& z) const;
    bool in_outer(const Site& z) const;
    std::int64_t inner_cardinality() const;  // |D_n^-|
    std::int64_t outer_cardinality() const;  // |D_n^+|

    // Membership of v in the scaled region c_n A for a sub-shape A.
    bool member_scaled(const ShapeC& a, const Site& v) const;

private:
    IndexSetGeometry() = default;
    void build_boxes();

    ShapeC shape_;
    int dim_ = 1;
    std::vector<double> c_real_;
    std::vector<double> x_real_;
    std::vector<std::int64_t> c_;  // scaled by kCoordScale
    std::vector<std::int64_t> x_;  // scaled by kCoordScale
    std::vector<std::int64_t> t_;
    std::int64_t t_star_ = 1;
    std::vector<Site> sites_;
    Box bounding_;
    std::vector<std::uint8_t> mask_;
    std::vector<Site> inner_;
    std::vector<Site> outer_;
    Box zbox_;
    std::vector<std::uint8_t> zcode_;  // 0 outside, 1 outer only, 2 inner
};

double approximation_ratio(const IndexSetGeometry& geom);

// Sites of v + [-m, m]^d strictly after v in lexicographic order.
std::vector<Site> ordered_neighborhood(const Site& v, int dimension, std::int64_t m);
std::vector<Site> ordered_neighborhood(const Site& v, int dimension,
                                       const std::vector<std::int64_t>& radius);

// Tile counts for a finer tiling with k = j^d tiles per copy of C:
// inner = #{z : tile_z inside B}, outer = #{z : tile_z meets B}.
struct SubregionCounts {
    std::int64_t inner = 0;
    std::int64_t outer = 0;
    std::int64_t tiles_per_axis = 0;
};
SubregionCounts subregion_boxes(const IndexSetGeometry& geom, std::int64_t k,
                                const std::vector<Site>& candidate);

}  // namespace svf
