#include "svf/geometry.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace svf {

namespace {

using bigint = boost::multiprecision::cpp_int;

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

// v / c >= bound, all quantities scaled by kCoordScale where noted.
bool ge_scaled(std::int64_t v, std::int64_t c_scaled, std::int64_t bound_scaled) {
    __int128 lhs = static_cast<__int128>(v) * kCoordScale * kCoordScale;
    __int128 rhs = static_cast<__int128>(bound_scaled) * c_scaled;
    return lhs >= rhs;
}

bool lt_scaled(std::int64_t v, std::int64_t c_scaled, std::int64_t bound_scaled) {
    __int128 lhs = static_cast<__int128>(v) * kCoordScale * kCoordScale;
    __int128 rhs = static_cast<__int128>(bound_scaled) * c_scaled;
    return lhs < rhs;
}

}  // namespace

std::int64_t to_scaled_exact(double value) {
    double scaled = value * static_cast<double>(kCoordScale);
    double rounded = std::nearbyint(scaled);
    if (std::fabs(scaled - rounded) > 1e-3 || std::fabs(rounded) > 9e15) {
        throw std::invalid_argument("coordinate parameters must have at most 6 decimals");
    }
    return static_cast<std::int64_t>(rounded);
}

ShapeC ShapeC::unit_box(int dimension) {
    RealBox b;
    for (int i = 0; i < dimension; ++i) {
        b.lo[i] = 0.0;
        b.hi[i] = 1.0;
    }
    return box_union(dimension, {b});
}

ShapeC ShapeC::box_union(int dimension, const std::vector<RealBox>& boxes) {
    if (dimension < 1 || dimension > kMaxDim) {
        throw std::invalid_argument("shape dimension out of range");
    }
    if (boxes.empty()) throw std::invalid_argument("box union needs at least one box");
    ShapeC s;
    s.kind_ = (boxes.size() == 1 && [&] {
                  for (int i = 0; i < dimension; ++i) {
                      if (boxes[0].lo[i] != 0.0 || boxes[0].hi[i] != 1.0) return false;
                  }
                  return true;
              }())
                  ? ShapeKind::kUnitBox
                  : ShapeKind::kBoxUnion;
    s.dim_ = dimension;
    s.boxes_ = boxes;
    s.volume_ = 0.0;
    for (const auto& b : boxes) {
        double vol = 1.0;
        for (int i = 0; i < dimension; ++i) {
            if (!(b.hi[i] > b.lo[i])) {
                throw std::invalid_argument("shape boxes need non-empty interior");
            }
            vol *= b.hi[i] - b.lo[i];
            s.sb_.push_back({to_scaled_exact(b.lo[i]), to_scaled_exact(b.hi[i])});
        }
        s.volume_ += vol;
    }
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            bool overlap = true;
            for (int a = 0; a < dimension; ++a) {
                if (boxes[i].lo[a] >= boxes[j].hi[a] || boxes[j].lo[a] >= boxes[i].hi[a]) {
                    overlap = false;
                    break;
                }
            }
            if (overlap) throw std::invalid_argument("shape boxes must be disjoint");
        }
    }
    return s;
}

ShapeC ShapeC::disc(double center_x, double center_y, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("disc radius must be positive");
    ShapeC s;
    s.kind_ = ShapeKind::kDisc;
    s.dim_ = 2;
    s.volume_ = M_PI * radius * radius;
    s.center_scaled_ = {to_scaled_exact(center_x), to_scaled_exact(center_y)};
    s.radius_scaled_ = to_scaled_exact(radius);
    return s;
}

double ShapeC::disc_center(int axis) const {
    return static_cast<double>(center_scaled_[static_cast<std::size_t>(axis)]) /
           static_cast<double>(kCoordScale);
}

double ShapeC::disc_radius() const {
    return static_cast<double>(radius_scaled_) / static_cast<double>(kCoordScale);
}

bool ShapeC::contains_site(const Site& v, const std::vector<std::int64_t>& c_scaled) const {
    if (kind_ == ShapeKind::kDisc) {
        // Clear all denominators in sum_l (v_l / c_l - x_l)^2 <= r^2; the
        // common denominator of each difference is c_0 c_1 kCoordScale^2.
        bigint c0 = c_scaled[0], c1 = c_scaled[1];
        bigint scale2 = bigint(kCoordScale) * kCoordScale;
        bigint term0 = bigint(v.c[0]) * c1 * scale2 - bigint(center_scaled_[0]) * c0 * c1;
        bigint term1 = bigint(v.c[1]) * c0 * scale2 - bigint(center_scaled_[1]) * c0 * c1;
        bigint lhs = term0 * term0 + term1 * term1;
        bigint rc = bigint(radius_scaled_) * c0 * c1;
        return lhs <= rc * rc;
    }
    std::size_t idx = 0;
    for (std::size_t b = 0; b < boxes_.size(); ++b) {
        bool inside = true;
        for (int i = 0; i < dim_; ++i, ++idx) {
            if (!ge_scaled(v.c[i], c_scaled[static_cast<std::size_t>(i)], sb_[idx][0]) ||
                !lt_scaled(v.c[i], c_scaled[static_cast<std::size_t>(i)], sb_[idx][1])) {
                inside = false;
            }
        }
        if (inside) return true;
    }
    return false;
}

RealBox ShapeC::bounding() const {
    RealBox out;
    if (kind_ == ShapeKind::kDisc) {
        for (int i = 0; i < 2; ++i) {
            out.lo[i] = disc_center(i) - disc_radius();
            out.hi[i] = disc_center(i) + disc_radius();
        }
        return out;
    }
    for (int i = 0; i < dim_; ++i) {
        out.lo[i] = boxes_[0].lo[i];
        out.hi[i] = boxes_[0].hi[i];
    }
    for (const auto& b : boxes_) {
        for (int i = 0; i < dim_; ++i) {
            out.lo[i] = std::min(out.lo[i], b.lo[i]);
            out.hi[i] = std::max(out.hi[i], b.hi[i]);
        }
    }
    return out;
}

std::string ShapeC::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case ShapeKind::kUnitBox:
            os << "unit-box(d=" << dim_ << ")";
            break;
        case ShapeKind::kBoxUnion:
            os << "box-union(" << boxes_.size() << " boxes, d=" << dim_ << ")";
            break;
        case ShapeKind::kDisc:
            os << "disc(center=(" << disc_center(0) << "," << disc_center(1)
               << "),r=" << disc_radius() << ")";
            break;
    }
    return os.str();
}

IndexSetGeometry::IndexSetGeometry(const ShapeC& shape, const std::vector<double>& c_n,
                                   const std::vector<std::int64_t>& t_n,
                                   const std::vector<double>& x_n)
    : shape_(shape), dim_(shape.dimension()), c_real_(c_n), x_real_(x_n), t_(t_n) {
    if (static_cast<int>(c_n.size()) != dim_ || static_cast<int>(t_n.size()) != dim_) {
        throw std::invalid_argument("scaling and box-side vectors must match the dimension");
    }
    if (x_real_.empty()) x_real_.assign(static_cast<std::size_t>(dim_), 0.0);
    if (static_cast<int>(x_real_.size()) != dim_) {
        throw std::invalid_argument("shift vector must match the dimension");
    }
    for (double c : c_n) {
        if (!(c > 0.0)) throw std::invalid_argument("scaling entries must be positive");
        c_.push_back(to_scaled_exact(c));
    }
    for (std::int64_t t : t_n) {
        if (t < 1) throw std::invalid_argument("box side lengths must be positive integers");
        t_star_ *= t;
    }
    for (double x : x_real_) x_.push_back(to_scaled_exact(x));

    // Enumerate a conservative bounding box of c_n C and keep members.
    RealBox rb = shape_.bounding();
    Box scan;
    scan.dim = dim_;
    for (int i = 0; i < dim_; ++i) {
        scan.lo.c[i] = static_cast<std::int64_t>(std::floor(rb.lo[i] * c_n[static_cast<std::size_t>(i)])) - 1;
        scan.hi.c[i] = static_cast<std::int64_t>(std::ceil(rb.hi[i] * c_n[static_cast<std::size_t>(i)])) + 1;
    }
    for_each_site(scan, [&](const Site& v) {
        if (shape_.contains_site(v, c_)) sites_.push_back(v);
    });
    if (sites_.empty()) throw std::invalid_argument("scaled shape contains no lattice point");

    bounding_.dim = dim_;
    bounding_.lo = sites_.front();
    bounding_.hi = sites_.front();
    for (const auto& v : sites_) {
        for (int i = 0; i < dim_; ++i) {
            bounding_.lo.c[i] = std::min(bounding_.lo.c[i], v.c[i]);
            bounding_.hi.c[i] = std::max(bounding_.hi.c[i], v.c[i]);
        }
    }
    mask_.assign(static_cast<std::size_t>(bounding_.cardinality()), 0);
    for (const auto& v : sites_) mask_[static_cast<std::size_t>(bounding_.index_of(v))] = 1;

    build_boxes();
}

IndexSetGeometry IndexSetGeometry::rebox(const std::vector<std::int64_t>& t_n) const {
    if (t_n.size() != t_.size()) {
        throw std::invalid_argument("box-side vector must match the dimension");
    }
    IndexSetGeometry out = *this;
    out.t_ = t_n;
    out.t_star_ = 1;
    for (std::int64_t t : t_n) {
        if (t < 1) throw std::invalid_argument("box side lengths must be positive integers");
        out.t_star_ *= t;
    }
    out.inner_.clear();
    out.outer_.clear();
    out.zcode_.clear();
    out.build_boxes();
    return out;
}

void IndexSetGeometry::build_boxes() {
    std::map<Site, std::int64_t, SiteLexLess> counts;
    for (const auto& v : sites_) ++counts[box_of(v)];

    zbox_.dim = dim_;
    zbox_.lo = counts.begin()->first;
    zbox_.hi = counts.begin()->first;
    for (const auto& [z, cnt] : counts) {
        for (int i = 0; i < dim_; ++i) {
            zbox_.lo.c[i] = std::min(zbox_.lo.c[i], z.c[i]);
            zbox_.hi.c[i] = std::max(zbox_.hi.c[i], z.c[i]);
        }
    }
    zcode_.assign(static_cast<std::size_t>(zbox_.cardinality()), 0);
    for (const auto& [z, cnt] : counts) {
        bool full = cnt == t_star_;
        zcode_[static_cast<std::size_t>(zbox_.index_of(z))] = full ? 2 : 1;
        outer_.push_back(z);
        if (full) inner_.push_back(z);
    }
}

bool IndexSetGeometry::member(const Site& v) const {
    if (!bounding_.contains(v)) return false;
    return mask_[static_cast<std::size_t>(bounding_.index_of(v))] != 0;
}

Site IndexSetGeometry::box_of(const Site& v) const {
    Site z;
    for (int i = 0; i < dim_; ++i) {
        std::size_t si = static_cast<std::size_t>(i);
        z.c[i] = floor_div(v.c[i] * kCoordScale - x_[si], t_[si] * kCoordScale);
    }
    return z;
}

Box IndexSetGeometry::box_sites(const Site& z) const {
    Box b;
    b.dim = dim_;
    for (int i = 0; i < dim_; ++i) {
        std::size_t si = static_cast<std::size_t>(i);
        std::int64_t lo_num = x_[si] + t_[si] * kCoordScale * z.c[i];
        std::int64_t hi_num = lo_num + t_[si] * kCoordScale;
        b.lo.c[i] = ceil_div(lo_num, kCoordScale);
        b.hi.c[i] = ceil_div(hi_num, kCoordScale) - 1;
    }
    return b;
}

bool IndexSetGeometry::in_inner(const Site& z) const {
    if (!zbox_.contains(z)) return false;
    return zcode_[static_cast<std::size_t>(zbox_.index_of(z))] == 2;
}

bool IndexSetGeometry::in_outer(const Site& z) const {
    if (!zbox_.contains(z)) return false;
    return zcode_[static_cast<std::size_t>(zbox_.index_of(z))] != 0;
}

std::int64_t IndexSetGeometry::inner_cardinality() const {
    return static_cast<std::int64_t>(inner_.size()) * t_star_;
}

std::int64_t IndexSetGeometry::outer_cardinality() const {
    return static_cast<std::int64_t>(outer_.size()) * t_star_;
}

bool IndexSetGeometry::member_scaled(const ShapeC& a, const Site& v) const {
    if (a.dimension() != dim_) {
        throw std::invalid_argument("region dimension does not match the geometry");
    }
    return a.contains_site(v, c_);
}

double approximation_ratio(const IndexSetGeometry& geom) {
    return static_cast<double>(geom.outer_cardinality() - geom.inner_cardinality()) /
           static_cast<double>(geom.cardinality());
}

std::vector<Site> ordered_neighborhood(const Site& v, int dimension,
                                       const std::vector<std::int64_t>& radius) {
    if (static_cast<int>(radius.size()) != dimension) {
        throw std::invalid_argument("radius vector must match the dimension");
    }
    Box b;
    b.dim = dimension;
    for (int i = 0; i < dimension; ++i) {
        if (radius[static_cast<std::size_t>(i)] < 1) {
            throw std::invalid_argument("neighborhood radius must be at least 1");
        }
        b.lo.c[i] = v.c[i] - radius[static_cast<std::size_t>(i)];
        b.hi.c[i] = v.c[i] + radius[static_cast<std::size_t>(i)];
    }
    std::vector<Site> out;
    for_each_site(b, [&](const Site& z) {
        if (lex_less(v, z)) out.push_back(z);
    });
    return out;
}

std::vector<Site> ordered_neighborhood(const Site& v, int dimension, std::int64_t m) {
    return ordered_neighborhood(v, dimension,
                                std::vector<std::int64_t>(static_cast<std::size_t>(dimension), m));
}

SubregionCounts subregion_boxes(const IndexSetGeometry& geom, std::int64_t k,
                                const std::vector<Site>& candidate) {
    if (k < 1) throw std::invalid_argument("tile count must be positive");
    const int d = geom.dimension();
    std::int64_t j = static_cast<std::int64_t>(
        std::llround(std::pow(static_cast<double>(k), 1.0 / static_cast<double>(d))));
    std::int64_t jp = 1;
    for (int i = 0; i < d; ++i) jp *= j;
    if (jp != k) throw std::invalid_argument("tile count must be a d-th power");

    std::vector<std::int64_t> c_scaled, x_scaled;
    for (int i = 0; i < d; ++i) {
        c_scaled.push_back(to_scaled_exact(geom.c_n()[static_cast<std::size_t>(i)]));
        x_scaled.push_back(to_scaled_exact(geom.x_n()[static_cast<std::size_t>(i)]));
    }

    auto tile_of = [&](const Site& v) {
        Site z;
        for (int i = 0; i < d; ++i) {
            std::size_t si = static_cast<std::size_t>(i);
            z.c[i] = floor_div((v.c[i] * kCoordScale - x_scaled[si]) * j, c_scaled[si]);
        }
        return z;
    };
    // Lattice cardinality of tile z: product over axes of the number of
    // integers in [x + c z / j, x + c (z+1) / j).
    auto tile_total = [&](const Site& z) {
        std::int64_t total = 1;
        for (int i = 0; i < d; ++i) {
            std::size_t si = static_cast<std::size_t>(i);
            std::int64_t denom = kCoordScale * j;
            std::int64_t lo = ceil_div(x_scaled[si] * j + c_scaled[si] * z.c[i], denom);
            std::int64_t hi = ceil_div(x_scaled[si] * j + c_scaled[si] * (z.c[i] + 1), denom);
            total *= hi - lo;
        }
        return total;
    };

    std::map<Site, std::int64_t, SiteLexLess> counts;
    for (const auto& v : candidate) {
        if (!geom.member(v)) {
            throw std::invalid_argument("candidate region leaves the index set");
        }
        ++counts[tile_of(v)];
    }
    SubregionCounts out;
    out.tiles_per_axis = j;
    for (const auto& [z, cnt] : counts) {
        ++out.outer;
        if (cnt == tile_total(z)) ++out.inner;
    }
    return out;
}

}  // namespace svf
