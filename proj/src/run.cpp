#include "svf/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "svf/cluster_limits.hpp"
#include "svf/clusters.hpp"
#include "svf/estimators.hpp"
#include "svf/stats.hpp"
#include "svf/theory.hpp"

namespace svf {

namespace {

// JSON has no infinity literal; unbounded truncation levels become "inf".
nlohmann::json json_real(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

nlohmann::json table_json(const EstimateTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const EstimateRow& row : table.rows) {
        rows.push_back({{"estimator", row.estimator},
                        {"x", row.x},
                        {"estimate", row.estimate},
                        {"se", row.se},
                        {"reps", row.reps},
                        {"n_sites", row.n_sites},
                        {"regime", row.regime}});
    }
    return rows;
}

nlohmann::json eta_value_json(const EtaValue& value) {
    return {{"eta", value.eta}, {"se", value.se}, {"exact", value.exact}};
}

nlohmann::json per_regime_json(const std::vector<std::pair<RegimeLabel, EtaValue>>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [label, value] : rows) {
        nlohmann::json row = eta_value_json(value);
        row["regime"] = label.index;
        row["scale"] = label.scale;
        out.push_back(std::move(row));
    }
    return out;
}

nlohmann::json limit_report_json(const LimitTestReport& report) {
    nlohmann::json regions = nlohmann::json::array();
    for (const RegionReport& region : report.regions) {
        regions.push_back({{"label", region.label},
                           {"fraction", region.fraction},
                           {"lambda", region.lambda},
                           {"mean", region.mean},
                           {"mean_se", region.mean_se},
                           {"reps", region.reps},
                           {"regime", region.regime},
                           {"dispersion", region.gof.dispersion},
                           {"gof_statistic", region.gof.chisq.statistic},
                           {"gof_df", region.gof.chisq.df},
                           {"gof_p", region.gof.chisq.p_value},
                           {"degenerate", region.gof.degenerate}});
    }
    nlohmann::json pairs = nlohmann::json::array();
    for (const PairReport& pair : report.pairs) {
        pairs.push_back({{"first", pair.first},
                         {"second", pair.second},
                         {"regime", pair.regime},
                         {"correlation", pair.correlation},
                         {"mean_product", pair.mean_product},
                         {"product_se", pair.product_se},
                         {"lambda_product", pair.lambda_product}});
    }
    return {{"x", report.x},
            {"eta", report.eta},
            {"replications", report.replications},
            {"degenerate", report.degenerate},
            {"tilde_violations", report.tilde_violations},
            {"regions", regions},
            {"pairs", pairs}};
}

std::vector<ShapeC> scaled_regions_from(const ExperimentConfig& config) {
    std::vector<ShapeC> out;
    for (const RealBox& box : config.regions.scaled)
        out.push_back(ShapeC::box_union(config.geometry.dimension, {box}));
    return out;
}

std::string limit_counts_csv(const LimitCounts& counts) {
    std::string csv = "replication,rule,gamma";
    for (const std::string& label : counts.labels) csv += "," + label;
    csv += "\n";
    const std::size_t reps = counts.box_total.size();
    for (std::size_t r = 0; r < reps; ++r) {
        for (int rule = 0; rule < 2; ++rule) {
            const auto& per_region = rule == 0 ? counts.box_counts : counts.prox_counts;
            csv += std::to_string(r) + (rule == 0 ? ",box," : ",proximity,");
            csv += std::to_string(rule == 0 ? counts.box_total[r] : counts.prox_total[r]);
            for (const auto& region : per_region)
                csv += "," + std::to_string(region[r]);
            csv += "\n";
        }
    }
    return csv;
}

struct SideFile {
    std::string name;
    std::string content;
};

ResultRecord base_record(const ExperimentConfig& config) {
    ResultRecord record;
    record.kind = kind_name(config.kind);
    record.version = kArtifactVersion;
    record.config_echo = serialize_config(config);
    return record;
}

void execute_simulate(const ExperimentConfig& config, ResultRecord& record,
                      std::vector<SideFile>& files) {
    ReplicationPlan plan = make_plan(config);
    const IndexSetGeometry& geom = plan.geometry;
    nlohmann::json maxima = nlohmann::json::array();
    nlohmann::json regimes = nlohmann::json::array();
    std::string csv;
    for (std::int64_t r = 0; r < plan.replications; ++r) {
        FieldSample field =
            simulate_plan_field(plan, geom.bounding(), static_cast<std::uint64_t>(r));
        double max_x = -kInfinity;
        for (const Site& v : geom.sites()) max_x = std::max(max_x, field.at(v));
        maxima.push_back(max_x);
        regimes.push_back(field.regime ? field.regime->index : -1);
        if (r == 0) {
            for (int l = 0; l < geom.dimension(); ++l)
                csv += (l ? ",v" : "v") + std::to_string(l);
            csv += ",value\n";
            char buf[64];
            for (const Site& v : geom.sites()) {
                std::string row;
                for (int l = 0; l < geom.dimension(); ++l)
                    row += (l ? "," : "") + std::to_string(v.c[l]);
                std::snprintf(buf, sizeof(buf), ",%.17g\n", field.at(v));
                csv += row + buf;
            }
        }
    }
    record.outputs = {{"replications", plan.replications},
                      {"n_sites", geom.cardinality()},
                      {"a_n", plan.norming()},
                      {"max", maxima},
                      {"regime", regimes}};
    files.push_back({"field.csv", std::move(csv)});
}

void execute_eta_theory(const ExperimentConfig& config, ResultRecord& record) {
    if (config.garch.present) {
        GarchParams params = make_garch(config);
        GarchIndexReport index = garch_tail_index(params, config.garch.index_samples,
                                                  config.garch.tol, config.seed);
        GarchExponent exponent = config.garch.exponent == "literal"
                                     ? GarchExponent::kLiteralAlpha
                                     : GarchExponent::kTwoAlpha;
        EtaResult eta = garch_eta(params, make_y(config), config.plan.K, config.plan.m,
                                  index.alpha_hat, config.plan.samples, config.seed, exponent);
        record.outputs = {{"alpha_hat", index.alpha_hat},
                          {"residual", index.residual},
                          {"alpha_hat_mc", index.alpha_hat_mc},
                          {"se_mc", index.se_mc},
                          {"rv_index", index.rv_index()},
                          {"m", config.plan.m},
                          {"K", json_real(config.plan.K)},
                          {"exponent", config.garch.exponent},
                          {"eta", eta.overall.eta},
                          {"eta_se", eta.overall.se},
                          {"eta_exact", eta.overall.exact},
                          {"per_regime", per_regime_json(eta.per_regime)}};
        return;
    }
    KernelPsi kernel = make_kernel(config);
    TailModel tail = make_tail(config);
    VolModelY y = make_y(config);
    EtaReport report = ma_extremal_index(kernel, y, tail.alpha(), tail.p_xi(),
                                         config.plan.samples, config.seed);
    SpectralAtoms atoms = ma_spectral_atoms(kernel, config.plan.m, tail.alpha(), tail.p_xi());
    EtaResult truncated = eta_tkm(atoms, y, config.plan.K, tail.alpha(), config.plan.samples,
                                  config.seed);
    record.outputs = {{"alpha", tail.alpha()},
                      {"p_xi", tail.p_xi()},
                      {"m", config.plan.m},
                      {"K", json_real(config.plan.K)},
                      {"eta", report.eta.eta},
                      {"eta_se", report.eta.se},
                      {"eta_exact", report.eta.exact},
                      {"breiman", report.breiman.value},
                      {"breiman_se", report.breiman.se},
                      {"theta", report.theta},
                      {"eta_tkm", truncated.overall.eta},
                      {"eta_tkm_se", truncated.overall.se},
                      {"eta_tkm_exact", truncated.overall.exact},
                      {"per_regime", per_regime_json(report.per_regime)}};
}

void execute_eta_estimate(const ExperimentConfig& config, ResultRecord& record,
                          std::vector<SideFile>& files) {
    ReplicationPlan plan = make_plan(config);
    EstimateTable table = run_plan(plan);
    record.outputs = {{"a_n", plan.norming()},
                      {"rv_index", plan.rv_index()},
                      {"n_sites", plan.geometry.cardinality()},
                      {"replications", plan.replications},
                      {"rows", table_json(table)}};
    files.push_back({"estimates.csv", table.to_csv()});
}

void execute_spectral(const ExperimentConfig& config, ResultRecord& record) {
    ReplicationPlan plan = make_plan(config);
    SpectralComparison comp =
        empirical_spectral_measure(plan, config.plan.m, config.plan.quantile);
    nlohmann::json atoms = nlohmann::json::array();
    for (std::size_t a = 0; a < comp.reference.atoms.size(); ++a) {
        atoms.push_back({{"direction", comp.reference.atoms[a].theta},
                         {"weight", comp.reference.atoms[a].weight},
                         {"empirical", comp.weights[a]}});
    }
    nlohmann::json support = nlohmann::json::array();
    for (const Site& v : comp.reference.support) {
        nlohmann::json coords = nlohmann::json::array();
        for (int l = 0; l < comp.reference.dimension; ++l) coords.push_back(v.c[l]);
        support.push_back(std::move(coords));
    }
    record.outputs = {{"m", config.plan.m},
                      {"quantile", config.plan.quantile},
                      {"windows", comp.windows},
                      {"kept", comp.kept},
                      {"radius_quantile", comp.radius_quantile},
                      {"total_variation", comp.total_variation},
                      {"other_weight", comp.other_weight},
                      {"support", support},
                      {"atoms", atoms}};

    // Optional window-tail cross-check when the config pins a y window.
    if (!config.plan.y_window.empty()) {
        std::vector<WindowTailRow> rows =
            window_tail_check(*plan.kernel, config.plan.y_window, config.plan.m, plan);
        nlohmann::json tail = nlohmann::json::array();
        for (const WindowTailRow& row : rows) {
            tail.push_back({{"x", row.x},
                            {"left", row.left},
                            {"se", row.se},
                            {"right", row.right},
                            {"ratio", row.ratio}});
        }
        record.outputs["window_tail"] = std::move(tail);
    }
}

LimitTestSpec build_limit_spec(const ExperimentConfig& config, const ReplicationPlan& plan) {
    LimitTestSpec spec(plan);
    if (!config.regions.lattice.empty()) {
        spec.lattice_regions = config.regions.lattice;
    } else if (!config.regions.scaled.empty()) {
        spec.scaled_regions = scaled_regions_from(config);
    } else {
        spec.scaled_regions = {plan.geometry.shape()};
    }
    return spec;
}

void execute_clusters(const ExperimentConfig& config, ResultRecord& record,
                      std::vector<SideFile>& files) {
    ReplicationPlan plan = make_plan(config);
    LimitTestSpec spec = build_limit_spec(config, plan);
    LimitCounts counts = run_limit_counts(spec);
    RunningStats box_stats, prox_stats;
    for (std::size_t r = 0; r < counts.box_total.size(); ++r) {
        box_stats.add(static_cast<double>(counts.box_total[r]));
        prox_stats.add(static_cast<double>(counts.prox_total[r]));
    }
    record.outputs = {{"replications", plan.replications},
                      {"threshold", plan.norming() * plan.thresholds.front()},
                      {"regions", counts.labels},
                      {"mean_boxes", box_stats.mean()},
                      {"mean_clusters", prox_stats.mean()},
                      {"tilde_violations", counts.tilde_violations}};
    files.push_back({"clusters.csv", limit_counts_csv(counts)});
}

double resolve_eta(const ExperimentConfig& config) {
    if (config.plan.eta) return *config.plan.eta;
    if (!config.kernel.present) {
        throw ConfigError(
            "extremal functional eta missing; run eta-theory or eta-estimate and set plan.eta");
    }
    TailModel tail = make_tail(config);
    // Limit tests expect eta at unit regime scale; strata rescale by s^alpha.
    VolModelY y = config.y.kind == "regime" ? VolModelY::constant(config.y.base_scale)
                                            : make_y(config);
    EtaReport report = ma_extremal_index(make_kernel(config), y, tail.alpha(), tail.p_xi(),
                                         config.plan.samples, config.seed);
    return report.eta.eta;
}

void execute_limit_test(const ExperimentConfig& config, ResultRecord& record,
                        std::vector<SideFile>& files) {
    ReplicationPlan plan = make_plan(config);
    LimitTestSpec spec = build_limit_spec(config, plan);
    spec.set_eta(resolve_eta(config));
    LimitCounts counts = run_limit_counts(spec);
    LimitTestReport box = report_from_counts(spec, counts, ClusterRule::kBox);
    LimitTestReport prox = report_from_counts(spec, counts, ClusterRule::kProximity);
    RuleAgreementReport agreement = agreement_from_counts(counts);
    record.outputs = {{"x", spec.plan.thresholds.front()},
                      {"eta", spec.eta},
                      {"replications", plan.replications},
                      {"box", limit_report_json(box)},
                      {"proximity", limit_report_json(prox)},
                      {"agreement",
                       {{"replications", agreement.replications},
                        {"differ_fraction", agreement.differ_fraction},
                        {"mean_abs_diff", agreement.mean_abs_diff},
                        {"tilde_violations", agreement.tilde_violations}}}};
    files.push_back({"counts.csv", limit_counts_csv(counts)});
}

void execute_garch_index(const ExperimentConfig& config, ResultRecord& record) {
    GarchParams params = make_garch(config);
    GarchIndexReport index = garch_tail_index(params, config.garch.index_samples,
                                              config.garch.tol, config.seed);
    record.outputs = {{"alpha_hat", index.alpha_hat},
                      {"residual", index.residual},
                      {"alpha_hat_mc", index.alpha_hat_mc},
                      {"se_mc", index.se_mc},
                      {"rv_index", index.rv_index()}};
}

void execute_geometry_check(const ExperimentConfig& config, ResultRecord& record) {
    IndexSetGeometry geom = make_geometry(config);
    nlohmann::json schedule = nlohmann::json::array();
    for (std::int64_t t : config.plan.t_schedule) {
        IndexSetGeometry g = geom.rebox(
            std::vector<std::int64_t>(static_cast<std::size_t>(geom.dimension()), t));
        schedule.push_back({{"t", t},
                            {"ratio", approximation_ratio(g)},
                            {"inner", g.inner_cardinality()},
                            {"outer", g.outer_cardinality()}});
    }
    record.outputs = {{"cardinality", geom.cardinality()},
                      {"inner", geom.inner_cardinality()},
                      {"outer", geom.outer_cardinality()},
                      {"ratio", approximation_ratio(geom)},
                      {"t", geom.t_n()},
                      {"schedule", schedule}};
}

}  // namespace

ResultRecord execute(const ExperimentConfig& config) {
    ResultRecord record = base_record(config);
    std::vector<SideFile> files;
    switch (config.kind) {
        case ExperimentKind::kSimulate:
            execute_simulate(config, record, files);
            break;
        case ExperimentKind::kEtaTheory:
            execute_eta_theory(config, record);
            break;
        case ExperimentKind::kEtaEstimate:
            execute_eta_estimate(config, record, files);
            break;
        case ExperimentKind::kSpectral:
            execute_spectral(config, record);
            break;
        case ExperimentKind::kClusters:
            execute_clusters(config, record, files);
            break;
        case ExperimentKind::kLimitTest:
            execute_limit_test(config, record, files);
            break;
        case ExperimentKind::kGarchIndex:
            execute_garch_index(config, record);
            break;
        case ExperimentKind::kGeometryCheck:
            execute_geometry_check(config, record);
            break;
    }
    nlohmann::json side = nlohmann::json::array();
    for (const SideFile& file : files) side.push_back(file.name);
    record.outputs["csv_files"] = side;
    record.outputs["csv_content"] = [&] {
        nlohmann::json m = nlohmann::json::object();
        for (const SideFile& file : files) m[file.name] = file.content;
        return m;
    }();
    return record;
}

std::vector<std::string> strict_failures(const ExperimentConfig& config,
                                         const ResultRecord& record) {
    std::vector<std::string> failures;
    const PlanSection& plan = config.plan;
    if (config.kind == ExperimentKind::kSpectral) {
        double tv = record.outputs.at("total_variation").get<double>();
        if (!(tv < plan.tv_max)) {
            failures.push_back("total variation " + std::to_string(tv) + " not below " +
                               std::to_string(plan.tv_max));
        }
    }
    if (config.kind == ExperimentKind::kLimitTest) {
        for (const char* rule : {"box", "proximity"}) {
            const nlohmann::json& report = record.outputs.at(rule);
            if (report.at("degenerate").get<bool>()) {
                failures.push_back(std::string(rule) + ": all counts zero");
                continue;
            }
            for (const auto& region : report.at("regions")) {
                std::string label = rule + std::string(":") +
                                    region.at("label").get<std::string>();
                double dispersion = region.at("dispersion").get<double>();
                if (dispersion < plan.dispersion_lo || dispersion > plan.dispersion_hi)
                    failures.push_back(label + ": dispersion " + std::to_string(dispersion));
                double p = region.at("gof_p").get<double>();
                if (!(p > plan.gof_p_min))
                    failures.push_back(label + ": gof p-value " + std::to_string(p));
            }
            for (const auto& pair : report.at("pairs")) {
                double corr = pair.at("correlation").get<double>();
                if (!(std::fabs(corr) < plan.corr_max))
                    failures.push_back(std::string(rule) + ": pair correlation " +
                                       std::to_string(corr));
            }
        }
    }
    return failures;
}

namespace {

void apply_overrides(ExperimentConfig& config, const RunOptions& options) {
    if (options.kind) config.kind = *options.kind;
    if (options.seed) config.seed = *options.seed;
    if (options.reps) config.plan.reps = *options.reps;
    if (options.threads) config.threads = *options.threads;
    if (!options.out.empty()) config.out = options.out;
}

void write_outputs(const ExperimentConfig& config, const ResultRecord& record,
                   std::ostream& log) {
    if (config.out.empty()) return;
    std::filesystem::create_directories(config.out);
    auto write = [&](const std::string& name, const std::string& content) {
        std::string path = config.out + "/" + name;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << content;
        log << "wrote " << path << "\n";
    };
    write("record.json", render_record(record));
    if (record.outputs.contains("csv_content")) {
        for (const auto& [name, content] :
             record.outputs.at("csv_content").items()) {
            write(name, content.get<std::string>());
        }
    }
}

}  // namespace

int run_experiment(const RunOptions& options, std::ostream& log) {
    ExperimentConfig config = load_config(options.config_path);
    apply_overrides(config, options);
    auto start = std::chrono::steady_clock::now();
    ResultRecord record = execute(config);
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << render_record(record);
    write_outputs(config, record, log);
    std::vector<std::string> failures = strict_failures(config, record);
    for (const std::string& failure : failures) log << "strict: " << failure << "\n";
    if (options.strict && !failures.empty()) return 3;
    return 0;
}

int run_report_merge(const std::vector<std::string>& record_paths, const std::string& out,
                     std::ostream& log) {
    std::vector<ResultRecord> records;
    for (const std::string& path : record_paths) records.push_back(load_record(path));
    nlohmann::json merged = report_merge(records);
    log << merged.dump(2) << "\n";
    if (!out.empty()) {
        std::filesystem::create_directories(out);
        std::string path = out + "/merged.json";
        std::ofstream file(path);
        if (!file) throw std::runtime_error("cannot write '" + path + "'");
        file << merged.dump(2) << "\n";
        log << "wrote " << path << "\n";
    }
    return 0;
}

}  // namespace svf
