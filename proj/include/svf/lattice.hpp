#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace svf {

// Lattice sites live in Z^d with d <= kMaxDim. Coordinates beyond the
// active dimension are kept at zero so that comparisons over the full
// array agree with the d-dimensional lexicographic order.
constexpr int kMaxDim = 4;

struct Site {
    std::array<std::int64_t, kMaxDim> c{};

    std::int64_t& operator[](int i) { return c[i]; }
    std::int64_t operator[](int i) const { return c[i]; }
    bool operator==(const Site&) const = default;
};

inline Site make_site(std::initializer_list<std::int64_t> coords) {
    Site s;
    int i = 0;
    for (auto v : coords) s.c[i++] = v;
    return s;
}

inline Site operator+(Site a, const Site& b) {
    for (int i = 0; i < kMaxDim; ++i) a.c[i] += b.c[i];
    return a;
}

inline Site operator-(Site a, const Site& b) {
    for (int i = 0; i < kMaxDim; ++i) a.c[i] -= b.c[i];
    return a;
}

// Translation invariant total order on Z^d (lexicographic).
inline bool lex_less(const Site& a, const Site& b) {
    for (int i = 0; i < kMaxDim; ++i) {
        if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    }
    return false;
}

struct SiteLexLess {
    bool operator()(const Site& a, const Site& b) const { return lex_less(a, b); }
};

// Closed integer box [lo, hi] per axis.
struct Box {
    int dim = 1;
    Site lo;
    Site hi;

    bool operator==(const Box&) const = default;

    bool contains(const Site& v) const {
        for (int i = 0; i < dim; ++i) {
            if (v.c[i] < lo.c[i] || v.c[i] > hi.c[i]) return false;
        }
        return true;
    }

    std::int64_t extent(int axis) const { return hi.c[axis] - lo.c[axis] + 1; }

    std::int64_t cardinality() const {
        std::int64_t n = 1;
        for (int i = 0; i < dim; ++i) {
            if (hi.c[i] < lo.c[i]) return 0;
            n *= extent(i);
        }
        return n;
    }

    bool empty() const { return cardinality() == 0; }

    // Row-major index in lexicographic site order.
    std::int64_t index_of(const Site& v) const {
        std::int64_t idx = 0;
        for (int i = 0; i < dim; ++i) idx = idx * extent(i) + (v.c[i] - lo.c[i]);
        return idx;
    }

    Site site_at(std::int64_t idx) const {
        Site v;
        for (int i = dim - 1; i >= 0; --i) {
            std::int64_t e = extent(i);
            v.c[i] = lo.c[i] + idx % e;
            idx /= e;
        }
        return v;
    }

    Box padded(const Site& radius) const {
        Box b = *this;
        for (int i = 0; i < dim; ++i) {
            b.lo.c[i] -= radius.c[i];
            b.hi.c[i] += radius.c[i];
        }
        return b;
    }

    Box padded(std::int64_t r) const {
        Site rad;
        for (int i = 0; i < dim; ++i) rad.c[i] = r;
        return padded(rad);
    }

    std::string to_string() const;
};

// Visits box sites in lexicographic order.
template <typename Fn>
void for_each_site(const Box& box, Fn&& fn) {
    if (box.empty()) return;
    Site v = box.lo;
    while (true) {
        fn(v);
        int axis = box.dim - 1;
        while (axis >= 0) {
            if (++v.c[axis] <= box.hi.c[axis]) break;
            v.c[axis] = box.lo.c[axis];
            --axis;
        }
        if (axis < 0) break;
    }
}

inline std::string Box::to_string() const {
    std::string s;
    for (int i = 0; i < dim; ++i) {
        if (i) s += " x ";
        s += "[" + std::to_string(lo.c[i]) + "," + std::to_string(hi.c[i]) + "]";
    }
    return s;
}

// Floor division for negative-safe box arithmetic.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace svf
