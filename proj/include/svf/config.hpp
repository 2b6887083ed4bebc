#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svf/estimators.hpp"
#include "svf/geometry.hpp"
#include "svf/lattice.hpp"
#include "svf/simulate.hpp"
#include "svf/tail_models.hpp"
#include "svf/theory.hpp"

namespace svf {

// Validation failure with the offending line when known; callers map this
// to exit code 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message);
    explicit ConfigError(const std::string& message);
    int line() const { return line_; }

private:
    int line_ = 0;
};

enum class ExperimentKind {
    kSimulate,
    kEtaTheory,
    kEtaEstimate,
    kSpectral,
    kClusters,
    kLimitTest,
    kGarchIndex,
    kGeometryCheck,
};

std::string kind_name(ExperimentKind kind);
ExperimentKind kind_from_name(const std::string& name);

struct TailSection {
    double alpha = 2.0;
    double p_xi = 1.0;
    bool operator==(const TailSection&) const = default;
};

struct KernelSection {
    bool present = false;
    int dimension = 1;
    int truncation = 0;
    std::vector<std::pair<Site, double>> support;  // lex order after parse
    bool operator==(const KernelSection&) const = default;
};

struct GarchSection {
    bool present = false;
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double beta1 = 0.0;
    std::int64_t burn_in = 2000;
    double tail_fraction = 1e-3;
    std::int64_t tail_steps = 1000000;
    std::int64_t index_samples = 1000000;
    double tol = 1e-6;
    std::string exponent = "two_alpha";  // or "literal"
    bool operator==(const GarchSection&) const = default;
};

struct YSection {
    std::string kind = "constant";  // constant | lognormal | absgaussian | regime
    double scale = 1.0;
    double mu = 0.0;
    double sigma = 1.0;
    std::vector<double> scales;
    std::vector<double> probs;
    double base_scale = 1.0;  // regime base is a constant field
    bool operator==(const YSection&) const = default;
};

struct GeometrySection {
    int dimension = 1;
    std::string shape = "unit_box";  // unit_box | box_union | disc
    std::vector<RealBox> boxes;
    double disc_cx = 0.0;
    double disc_cy = 0.0;
    double disc_radius = 0.0;
    std::vector<double> c{1.0};
    std::vector<std::int64_t> t{1};
    std::vector<double> x;  // tiling shift, defaults to zero
    bool operator==(const GeometrySection&) const = default;
};

struct PlanSection {
    std::int64_t reps = 1;
    std::vector<double> thresholds{1.0};
    int m = 1;
    double K = kInfinity;
    std::int64_t samples = 100000;
    double quantile = 0.999;
    std::optional<double> eta;
    std::vector<double> y_window;
    std::vector<std::int64_t> t_schedule;
    double gof_p_min = 0.01;
    double dispersion_lo = 0.85;
    double dispersion_hi = 1.15;
    double corr_max = 0.1;
    double tv_max = 0.05;
    bool operator==(const PlanSection&) const = default;
};

struct RegionSection {
    std::vector<RealBox> scaled;  // each box is one region inside C
    std::vector<Box> lattice;
    bool operator==(const RegionSection&) const = default;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::kSimulate;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out;

    TailSection tail;
    KernelSection kernel;
    GarchSection garch;
    YSection y;
    GeometrySection geometry;
    PlanSection plan;
    RegionSection regions;

    bool operator==(const ExperimentConfig&) const = default;
};

// Strict sectioned key=value parser: unknown sections and keys are errors
// naming the offender; '#' starts a comment.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Canonical form; parse(serialize(config)) == config.
std::string serialize_config(const ExperimentConfig& config);

// Model builders; each validates per the owning module's rules.
TailModel make_tail(const ExperimentConfig& config);
KernelPsi make_kernel(const ExperimentConfig& config);
GarchParams make_garch(const ExperimentConfig& config);
VolModelY make_y(const ExperimentConfig& config);
ShapeC make_shape(const GeometrySection& section);
IndexSetGeometry make_geometry(const ExperimentConfig& config);
// Full plan, including the fitted GARCH norming when the garch section is
// present.
ReplicationPlan make_plan(const ExperimentConfig& config);

}  // namespace svf
