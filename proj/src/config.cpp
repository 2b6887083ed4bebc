#include "svf/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace svf {

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

ConfigError::ConfigError(const std::string& message) : std::runtime_error(message) {}

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kKindNames = {
    {ExperimentKind::kSimulate, "simulate"},
    {ExperimentKind::kEtaTheory, "eta-theory"},
    {ExperimentKind::kEtaEstimate, "eta-estimate"},
    {ExperimentKind::kSpectral, "spectral"},
    {ExperimentKind::kClusters, "clusters"},
    {ExperimentKind::kLimitTest, "limit-test"},
    {ExperimentKind::kGarchIndex, "garch-index"},
    {ExperimentKind::kGeometryCheck, "geometry-check"},
};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Split on commas outside parentheses.
std::vector<std::string> split_top(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct ValueParser {
    int line;

    [[noreturn]] void fail(const std::string& message) const { throw ConfigError(line, message); }

    double number(const std::string& s) const {
        std::string t = trim(s);
        if (t == "inf") return kInfinity;
        char* end = nullptr;
        double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0') fail("not a number: '" + t + "'");
        return v;
    }
    std::int64_t integer(const std::string& s) const {
        std::string t = trim(s);
        char* end = nullptr;
        long long v = std::strtoll(t.c_str(), &end, 10);
        if (end == t.c_str() || *end != '\0') fail("not an integer: '" + t + "'");
        return v;
    }
    std::uint64_t unsigned_integer(const std::string& s) const {
        std::string t = trim(s);
        char* end = nullptr;
        unsigned long long v = std::strtoull(t.c_str(), &end, 10);
        if (end == t.c_str() || *end != '\0') fail("not an unsigned integer: '" + t + "'");
        return v;
    }
    std::vector<double> numbers(const std::string& s) const {
        std::vector<double> out;
        for (const std::string& part : split_top(s)) out.push_back(number(part));
        return out;
    }
    std::vector<std::int64_t> integers(const std::string& s) const {
        std::vector<std::int64_t> out;
        for (const std::string& part : split_top(s)) out.push_back(integer(part));
        return out;
    }
    // "(a,b,...)" with up to kMaxDim integer coordinates.
    Site site(const std::string& s) const {
        std::string t = trim(s);
        if (t.size() < 2 || t.front() != '(' || t.back() != ')')
            fail("expected a parenthesized site: '" + t + "'");
        std::vector<std::int64_t> coords = integers(t.substr(1, t.size() - 2));
        if (coords.empty() || static_cast<int>(coords.size()) > kMaxDim)
            fail("site needs 1 to 4 coordinates: '" + t + "'");
        Site v{};
        for (std::size_t i = 0; i < coords.size(); ++i) v.c[i] = coords[i];
        return v;
    }
    std::vector<double> corner(const std::string& s) const {
        std::string t = trim(s);
        if (t.size() < 2 || t.front() != '(' || t.back() != ')')
            fail("expected a parenthesized corner: '" + t + "'");
        return numbers(t.substr(1, t.size() - 2));
    }
    // "(lo...)-(hi...)" with real coordinates.
    RealBox real_box(const std::string& s) const {
        std::string t = trim(s);
        std::size_t split = t.find(")-(");
        if (split == std::string::npos) fail("expected '(lo)-(hi)': '" + t + "'");
        std::vector<double> lo = corner(t.substr(0, split + 1));
        std::vector<double> hi = corner(t.substr(split + 2));
        if (lo.size() != hi.size() || lo.empty() || static_cast<int>(lo.size()) > kMaxDim)
            fail("box corners must share 1 to 4 coordinates: '" + t + "'");
        RealBox box;
        for (std::size_t i = 0; i < lo.size(); ++i) {
            box.lo[i] = lo[i];
            box.hi[i] = hi[i];
        }
        return box;
    }
    Box lattice_box(const std::string& s, int dimension) const {
        std::string t = trim(s);
        std::size_t split = t.find(")-(");
        if (split == std::string::npos) fail("expected '(lo)-(hi)': '" + t + "'");
        Box box;
        box.dim = dimension;
        box.lo = site(t.substr(0, split + 1));
        box.hi = site(t.substr(split + 2));
        return box;
    }
    // "(site):value" entries.
    std::vector<std::pair<Site, double>> support(const std::string& s) const {
        std::vector<std::pair<Site, double>> out;
        for (const std::string& part : split_top(s)) {
            std::size_t colon = part.rfind(':');
            if (colon == std::string::npos || part.empty() || part[0] != '(')
                fail("expected '(site):value': '" + part + "'");
            out.emplace_back(site(part.substr(0, colon)), number(part.substr(colon + 1)));
        }
        return out;
    }
    bool boolean(const std::string& s) const {
        std::string t = trim(s);
        if (t == "true" || t == "1") return true;
        if (t == "false" || t == "0") return false;
        fail("not a boolean: '" + t + "'");
    }
};

// Shortest decimal form that parses back exactly.
std::string fmt(double v) {
    if (v == kInfinity) return "inf";
    char buf[40];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string fmt_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += fmt(values[i]);
    }
    return out;
}

std::string fmt_list(const std::vector<std::int64_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(values[i]);
    }
    return out;
}

std::string fmt_site(const Site& v, int dimension) {
    std::string out = "(";
    for (int l = 0; l < dimension; ++l) {
        if (l) out += ",";
        out += std::to_string(v.c[l]);
    }
    return out + ")";
}

std::string fmt_real_box(const RealBox& box, int dimension) {
    std::string lo = "(", hi = "(";
    for (int l = 0; l < dimension; ++l) {
        if (l) {
            lo += ",";
            hi += ",";
        }
        lo += fmt(box.lo[static_cast<std::size_t>(l)]);
        hi += fmt(box.hi[static_cast<std::size_t>(l)]);
    }
    return lo + ")-" + hi + ")";
}

}  // namespace

std::string kind_name(ExperimentKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    throw ConfigError("unknown experiment kind");
}

ExperimentKind kind_from_name(const std::string& name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    throw ConfigError("unknown experiment kind '" + name + "'");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    int kernel_dim_line = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        ValueParser p{line_no};
        if (line.front() == '[') {
            if (line.back() != ']') p.fail("unterminated section header");
            section = line.substr(1, line.size() - 2);
            if (section != "experiment" && section != "tail" && section != "kernel" &&
                section != "garch" && section != "y" && section != "geometry" &&
                section != "plan" && section != "regions") {
                p.fail("unknown section [" + section + "]");
            }
            if (section == "kernel") config.kernel.present = true;
            if (section == "garch") config.garch.present = true;
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (section.empty()) p.fail("key '" + key + "' outside any section");

        if (section == "experiment") {
            if (key == "kind") {
                try {
                    config.kind = kind_from_name(value);
                } catch (const ConfigError& e) {
                    p.fail(e.what());
                }
            } else if (key == "seed") {
                config.seed = p.unsigned_integer(value);
            } else if (key == "threads") {
                config.threads = static_cast<int>(p.integer(value));
            } else if (key == "out") {
                config.out = value;
            } else {
                p.fail("unknown key '" + key + "' in section [experiment]");
            }
        } else if (section == "tail") {
            if (key == "alpha") {
                config.tail.alpha = p.number(value);
            } else if (key == "p_xi") {
                config.tail.p_xi = p.number(value);
            } else {
                p.fail("unknown key '" + key + "' in section [tail]");
            }
        } else if (section == "kernel") {
            if (key == "dimension") {
                config.kernel.dimension = static_cast<int>(p.integer(value));
                kernel_dim_line = line_no;
            } else if (key == "truncation") {
                config.kernel.truncation = static_cast<int>(p.integer(value));
            } else if (key == "support") {
                config.kernel.support = p.support(value);
            } else {
                p.fail("unknown key '" + key + "' in section [kernel]");
            }
        } else if (section == "garch") {
            if (key == "alpha0") {
                config.garch.alpha0 = p.number(value);
            } else if (key == "alpha1") {
                config.garch.alpha1 = p.number(value);
            } else if (key == "beta1") {
                config.garch.beta1 = p.number(value);
            } else if (key == "burn_in") {
                config.garch.burn_in = p.integer(value);
            } else if (key == "tail_fraction") {
                config.garch.tail_fraction = p.number(value);
            } else if (key == "tail_steps") {
                config.garch.tail_steps = p.integer(value);
            } else if (key == "index_samples") {
                config.garch.index_samples = p.integer(value);
            } else if (key == "tol") {
                config.garch.tol = p.number(value);
            } else if (key == "exponent") {
                if (value != "two_alpha" && value != "literal")
                    p.fail("exponent must be two_alpha or literal");
                config.garch.exponent = value;
            } else {
                p.fail("unknown key '" + key + "' in section [garch]");
            }
        } else if (section == "y") {
            if (key == "kind") {
                if (value != "constant" && value != "lognormal" && value != "absgaussian" &&
                    value != "regime") {
                    p.fail("unknown y kind '" + value + "'");
                }
                config.y.kind = value;
            } else if (key == "scale") {
                config.y.scale = p.number(value);
            } else if (key == "mu") {
                config.y.mu = p.number(value);
            } else if (key == "sigma") {
                config.y.sigma = p.number(value);
            } else if (key == "scales") {
                config.y.scales = p.numbers(value);
            } else if (key == "probs") {
                config.y.probs = p.numbers(value);
            } else if (key == "base_scale") {
                config.y.base_scale = p.number(value);
            } else {
                p.fail("unknown key '" + key + "' in section [y]");
            }
        } else if (section == "geometry") {
            if (key == "dimension") {
                config.geometry.dimension = static_cast<int>(p.integer(value));
            } else if (key == "shape") {
                if (value != "unit_box" && value != "box_union" && value != "disc")
                    p.fail("unknown shape '" + value + "'");
                config.geometry.shape = value;
            } else if (key == "boxes") {
                config.geometry.boxes.clear();
                for (const std::string& part : split_top(value))
                    config.geometry.boxes.push_back(p.real_box(part));
            } else if (key == "disc_center") {
                std::vector<double> center = p.numbers(value);
                if (center.size() != 2) p.fail("disc_center needs two coordinates");
                config.geometry.disc_cx = center[0];
                config.geometry.disc_cy = center[1];
            } else if (key == "disc_radius") {
                config.geometry.disc_radius = p.number(value);
            } else if (key == "c") {
                config.geometry.c = p.numbers(value);
            } else if (key == "t") {
                config.geometry.t = p.integers(value);
            } else if (key == "x") {
                config.geometry.x = p.numbers(value);
            } else {
                p.fail("unknown key '" + key + "' in section [geometry]");
            }
        } else if (section == "plan") {
            if (key == "reps") {
                config.plan.reps = p.integer(value);
            } else if (key == "thresholds") {
                config.plan.thresholds = p.numbers(value);
            } else if (key == "m") {
                config.plan.m = static_cast<int>(p.integer(value));
            } else if (key == "K") {
                config.plan.K = p.number(value);
            } else if (key == "samples") {
                config.plan.samples = p.integer(value);
            } else if (key == "quantile") {
                config.plan.quantile = p.number(value);
            } else if (key == "eta") {
                config.plan.eta = p.number(value);
            } else if (key == "y_window") {
                config.plan.y_window = p.numbers(value);
            } else if (key == "t_schedule") {
                config.plan.t_schedule = p.integers(value);
            } else if (key == "gof_p_min") {
                config.plan.gof_p_min = p.number(value);
            } else if (key == "dispersion_lo") {
                config.plan.dispersion_lo = p.number(value);
            } else if (key == "dispersion_hi") {
                config.plan.dispersion_hi = p.number(value);
            } else if (key == "corr_max") {
                config.plan.corr_max = p.number(value);
            } else if (key == "tv_max") {
                config.plan.tv_max = p.number(value);
            } else {
                p.fail("unknown key '" + key + "' in section [plan]");
            }
        } else if (section == "regions") {
            if (key == "scaled") {
                config.regions.scaled.clear();
                for (const std::string& part : split_top(value))
                    config.regions.scaled.push_back(p.real_box(part));
            } else if (key == "lattice") {
                config.regions.lattice.clear();
                for (const std::string& part : split_top(value))
                    config.regions.lattice.push_back(
                        p.lattice_box(part, config.geometry.dimension));
            } else {
                p.fail("unknown key '" + key + "' in section [regions]");
            }
        }
    }
    if (config.kernel.present && config.kernel.support.empty()) {
        throw ConfigError(kernel_dim_line ? kernel_dim_line : 1,
                          "kernel section needs a support entry");
    }
    // Section order is free-form, so rebind region dimensions at the end.
    for (Box& box : config.regions.lattice) box.dim = config.geometry.dimension;
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& config) {
    std::ostringstream out;
    const int d = config.geometry.dimension;
    out << "[experiment]\n";
    out << "kind = " << kind_name(config.kind) << "\n";
    out << "seed = " << config.seed << "\n";
    out << "threads = " << config.threads << "\n";
    if (!config.out.empty()) out << "out = " << config.out << "\n";

    out << "\n[tail]\n";
    out << "alpha = " << fmt(config.tail.alpha) << "\n";
    out << "p_xi = " << fmt(config.tail.p_xi) << "\n";

    if (config.kernel.present) {
        out << "\n[kernel]\n";
        out << "dimension = " << config.kernel.dimension << "\n";
        out << "truncation = " << config.kernel.truncation << "\n";
        out << "support = ";
        for (std::size_t i = 0; i < config.kernel.support.size(); ++i) {
            if (i) out << ", ";
            out << fmt_site(config.kernel.support[i].first, config.kernel.dimension) << ":"
                << fmt(config.kernel.support[i].second);
        }
        out << "\n";
    }
    if (config.garch.present) {
        out << "\n[garch]\n";
        out << "alpha0 = " << fmt(config.garch.alpha0) << "\n";
        out << "alpha1 = " << fmt(config.garch.alpha1) << "\n";
        out << "beta1 = " << fmt(config.garch.beta1) << "\n";
        out << "burn_in = " << config.garch.burn_in << "\n";
        out << "tail_fraction = " << fmt(config.garch.tail_fraction) << "\n";
        out << "tail_steps = " << config.garch.tail_steps << "\n";
        out << "index_samples = " << config.garch.index_samples << "\n";
        out << "tol = " << fmt(config.garch.tol) << "\n";
        out << "exponent = " << config.garch.exponent << "\n";
    }

    out << "\n[y]\n";
    out << "kind = " << config.y.kind << "\n";
    if (config.y.kind == "constant") out << "scale = " << fmt(config.y.scale) << "\n";
    if (config.y.kind == "lognormal") out << "mu = " << fmt(config.y.mu) << "\n";
    if (config.y.kind == "lognormal" || config.y.kind == "absgaussian")
        out << "sigma = " << fmt(config.y.sigma) << "\n";
    if (config.y.kind == "regime") {
        out << "scales = " << fmt_list(config.y.scales) << "\n";
        out << "probs = " << fmt_list(config.y.probs) << "\n";
        out << "base_scale = " << fmt(config.y.base_scale) << "\n";
    }

    out << "\n[geometry]\n";
    out << "dimension = " << d << "\n";
    out << "shape = " << config.geometry.shape << "\n";
    if (config.geometry.shape == "box_union") {
        out << "boxes = ";
        for (std::size_t i = 0; i < config.geometry.boxes.size(); ++i) {
            if (i) out << ", ";
            out << fmt_real_box(config.geometry.boxes[i], d);
        }
        out << "\n";
    }
    if (config.geometry.shape == "disc") {
        out << "disc_center = " << fmt(config.geometry.disc_cx) << ", "
            << fmt(config.geometry.disc_cy) << "\n";
        out << "disc_radius = " << fmt(config.geometry.disc_radius) << "\n";
    }
    out << "c = " << fmt_list(config.geometry.c) << "\n";
    out << "t = " << fmt_list(config.geometry.t) << "\n";
    if (!config.geometry.x.empty()) out << "x = " << fmt_list(config.geometry.x) << "\n";

    const PlanSection defaults;
    out << "\n[plan]\n";
    out << "reps = " << config.plan.reps << "\n";
    out << "thresholds = " << fmt_list(config.plan.thresholds) << "\n";
    out << "m = " << config.plan.m << "\n";
    out << "K = " << fmt(config.plan.K) << "\n";
    out << "samples = " << config.plan.samples << "\n";
    out << "quantile = " << fmt(config.plan.quantile) << "\n";
    if (config.plan.eta) out << "eta = " << fmt(*config.plan.eta) << "\n";
    if (!config.plan.y_window.empty())
        out << "y_window = " << fmt_list(config.plan.y_window) << "\n";
    if (!config.plan.t_schedule.empty())
        out << "t_schedule = " << fmt_list(config.plan.t_schedule) << "\n";
    if (config.plan.gof_p_min != defaults.gof_p_min)
        out << "gof_p_min = " << fmt(config.plan.gof_p_min) << "\n";
    if (config.plan.dispersion_lo != defaults.dispersion_lo)
        out << "dispersion_lo = " << fmt(config.plan.dispersion_lo) << "\n";
    if (config.plan.dispersion_hi != defaults.dispersion_hi)
        out << "dispersion_hi = " << fmt(config.plan.dispersion_hi) << "\n";
    if (config.plan.corr_max != defaults.corr_max)
        out << "corr_max = " << fmt(config.plan.corr_max) << "\n";
    if (config.plan.tv_max != defaults.tv_max)
        out << "tv_max = " << fmt(config.plan.tv_max) << "\n";

    if (!config.regions.scaled.empty() || !config.regions.lattice.empty()) {
        out << "\n[regions]\n";
        if (!config.regions.scaled.empty()) {
            out << "scaled = ";
            for (std::size_t i = 0; i < config.regions.scaled.size(); ++i) {
                if (i) out << ", ";
                out << fmt_real_box(config.regions.scaled[i], d);
            }
            out << "\n";
        }
        if (!config.regions.lattice.empty()) {
            out << "lattice = ";
            for (std::size_t i = 0; i < config.regions.lattice.size(); ++i) {
                if (i) out << ", ";
                const Box& b = config.regions.lattice[i];
                out << fmt_site(b.lo, d) << "-" << fmt_site(b.hi, d);
            }
            out << "\n";
        }
    }
    return out.str();
}

TailModel make_tail(const ExperimentConfig& config) {
    return TailModel(config.tail.alpha, config.tail.p_xi);
}

KernelPsi make_kernel(const ExperimentConfig& config) {
    if (!config.kernel.present) throw ConfigError("missing [kernel] section");
    std::map<Site, double, SiteLexLess> coefficients;
    for (const auto& [site, value] : config.kernel.support) {
        if (coefficients.count(site)) throw ConfigError("duplicate kernel support site");
        coefficients[site] = value;
    }
    return KernelPsi(config.kernel.dimension, config.kernel.truncation, coefficients);
}

GarchParams make_garch(const ExperimentConfig& config) {
    if (!config.garch.present) throw ConfigError("missing [garch] section");
    return GarchParams(config.garch.alpha0, config.garch.alpha1, config.garch.beta1);
}

VolModelY make_y(const ExperimentConfig& config) {
    const YSection& y = config.y;
    if (y.kind == "constant") return VolModelY::constant(y.scale);
    if (y.kind == "lognormal") return VolModelY::iid_lognormal(y.mu, y.sigma);
    if (y.kind == "absgaussian") return VolModelY::iid_absgaussian(y.sigma);
    return VolModelY::regime(y.scales, y.probs, VolModelY::constant(y.base_scale));
}

ShapeC make_shape(const GeometrySection& section) {
    if (section.shape == "unit_box") return ShapeC::unit_box(section.dimension);
    if (section.shape == "box_union")
        return ShapeC::box_union(section.dimension, section.boxes);
    return ShapeC::disc(section.disc_cx, section.disc_cy, section.disc_radius);
}

IndexSetGeometry make_geometry(const ExperimentConfig& config) {
    return IndexSetGeometry(make_shape(config.geometry), config.geometry.c,
                            config.geometry.t, config.geometry.x);
}

ReplicationPlan make_plan(const ExperimentConfig& config) {
    ReplicationPlan plan(config.plan.reps, make_tail(config), make_geometry(config),
                         config.seed);
    plan.threads = config.threads;
    plan.thresholds = config.plan.thresholds;
    plan.y = make_y(config);
    if (config.kernel.present && config.garch.present)
        throw ConfigError("config sets both [kernel] and [garch]");
    if (config.kernel.present) plan.kernel = make_kernel(config);
    if (config.garch.present) {
        GarchParams params = make_garch(config);
        plan.garch = params;
        plan.garch_burn_in = config.garch.burn_in;
        GarchIndexReport index = garch_tail_index(params, config.garch.index_samples,
                                                  config.garch.tol, config.seed);
        // Distinct seed for the tail fit so it shares no draws with
        // replication 0 of the experiment itself.
        double scale = garch_tail_scale(params, config.garch.tail_steps,
                                        config.garch.tail_fraction, index.rv_index(),
                                        config.seed ^ 0x9e3779b97f4a7c15ULL);
        plan.garch_norming = GarchNorming{index.rv_index(), scale};
    }
    plan.validate();
    return plan;
}

}  // namespace svf
