#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "svf/lattice.hpp"

namespace svf {

// Global regime drawn once per realization (index into the scale set).
struct RegimeLabel {
    int index = 0;
    double scale = 1.0;
    bool operator==(const RegimeLabel&) const = default;
};

// Dense realization on a box window, row-major in lexicographic site order.
// meta fields suffice to regenerate the sample bit-identically.
struct FieldSample {
    Box window;
    std::vector<double> values;
    std::string model;
    std::uint64_t seed = 0;
    std::uint64_t rep = 0;
    std::optional<RegimeLabel> regime;

    double at(const Site& v) const { return values[window.index_of(v)]; }
    double& at(const Site& v) { return values[window.index_of(v)]; }

    void validate() const {
        if (static_cast<std::int64_t>(values.size()) != window.cardinality()) {
            throw std::logic_error("field value count does not match window");
        }
    }
};

inline FieldSample product_field(const FieldSample& y, const FieldSample& z) {
    if (y.window != z.window) throw std::invalid_argument("product of mismatched windows");
    FieldSample out;
    out.window = y.window;
    out.values.resize(y.values.size());
    for (std::size_t i = 0; i < y.values.size(); ++i) out.values[i] = y.values[i] * z.values[i];
    out.model = y.model + "*" + z.model;
    out.seed = z.seed;
    out.rep = z.rep;
    out.regime = y.regime ? y.regime : z.regime;
    return out;
}

}  // namespace svf
