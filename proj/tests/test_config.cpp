#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "svf/config.hpp"
#include "svf/report.hpp"
#include "svf/run.hpp"

using namespace svf;

namespace {

const char* kMaConfig = R"(# canonical two-tap model
[experiment]
kind = eta-theory
seed = 7

[tail]
alpha = 2.0
p_xi = 1.0

[kernel]
dimension = 1
truncation = 1
support = (0):1.0, (1):0.5

[y]
kind = constant
scale = 1.0

[geometry]
dimension = 1
shape = unit_box
c = 20000
t = 100

[plan]
reps = 100
m = 1
)";

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    std::filesystem::path dir = std::filesystem::temp_directory_path() / "svfield-tests";
    std::filesystem::create_directories(dir);
    std::filesystem::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p;
}

}  // namespace

TEST_CASE("kind names round-trip") {
    for (ExperimentKind kind :
         {ExperimentKind::kSimulate, ExperimentKind::kEtaTheory, ExperimentKind::kEtaEstimate,
          ExperimentKind::kSpectral, ExperimentKind::kClusters, ExperimentKind::kLimitTest,
          ExperimentKind::kGarchIndex, ExperimentKind::kGeometryCheck}) {
        CHECK(kind_from_name(kind_name(kind)) == kind);
    }
    CHECK_THROWS(kind_from_name("frobnicate"));
}

TEST_CASE("parser reads sections keys and comments") {
    ExperimentConfig config = parse_config(kMaConfig);
    CHECK(config.kind == ExperimentKind::kEtaTheory);
    CHECK(config.seed == 7);
    CHECK(config.tail.alpha == 2.0);
    CHECK(config.kernel.present);
    REQUIRE(config.kernel.support.size() == 2);
    CHECK(config.kernel.support[1].second == 0.5);
    CHECK(config.geometry.c == std::vector<double>{20000.0});
    CHECK(config.plan.reps == 100);
}

TEST_CASE("unknown keys and sections are named in errors") {
    try {
        parse_config("[tail]\nalpha_ = 2\n");
        FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("alpha_") != std::string::npos);
        CHECK(e.line() == 2);
    }
    try {
        parse_config("[nonsense]\n");
        FAIL("unknown section accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("nonsense") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("alpha = 2\n"), ConfigError);          // key before section
    CHECK_THROWS_AS(parse_config("[tail]\nalpha\n"), ConfigError);      // missing value
    CHECK_THROWS_AS(parse_config("[kernel]\ndimension = 1\n"), ConfigError);  // no support
}

TEST_CASE("round-trip serialization is a fixed point") {
    ExperimentConfig config = parse_config(kMaConfig);
    std::string text = serialize_config(config);
    ExperimentConfig again = parse_config(text);
    CHECK(again == config);
    CHECK(serialize_config(again) == text);
}

TEST_CASE("round-trip covers every section and model kind") {
    const char* full = R"(
[experiment]
kind = limit-test
seed = 123456789
threads = 3
out = /tmp/svfield-demo

[tail]
alpha = 1.75
p_xi = 0.6

[kernel]
dimension = 2
truncation = 1
support = (0,0):1.0, (0,1):-0.333333, (1,1):0.125

[y]
kind = regime
scales = 1.0, 2.0
probs = 0.5, 0.5
base_scale = 1.0

[geometry]
dimension = 2
shape = box_union
boxes = (0,0)-(1,0.5), (0,0.5)-(0.5,1)
c = 100, 100
t = 10, 10
x = 0.25, 0

[plan]
reps = 250
thresholds = 0.5, 1, 2
m = 2
K = 10
samples = 5000
quantile = 0.995
eta = 0.8
gof_p_min = 0.02

[regions]
scaled = (0,0)-(0.5,0.5), (0.5,0)-(1,0.5)
)";
    ExperimentConfig config = parse_config(full);
    CHECK(config.threads == 3);
    CHECK(config.y.kind == "regime");
    CHECK(config.geometry.boxes.size() == 2);
    CHECK(config.plan.eta.has_value());
    CHECK(config.regions.scaled.size() == 2);
    ExperimentConfig again = parse_config(serialize_config(config));
    CHECK(again == config);

    const char* garch = R"(
[experiment]
kind = garch-index
seed = 5

[garch]
alpha0 = 0.1
alpha1 = 0.1
beta1 = 0.85
index_samples = 10000

[y]
kind = lognormal
mu = 0.0
sigma = 0.5

[geometry]
dimension = 1
c = 1000
t = 20

[plan]
reps = 10
)";
    ExperimentConfig g = parse_config(garch);
    CHECK(g.garch.present);
    CHECK(parse_config(serialize_config(g)) == g);
}

TEST_CASE("infinite truncation survives the round trip") {
    ExperimentConfig config = parse_config(kMaConfig);
    CHECK(config.plan.K == kInfinity);
    ExperimentConfig again = parse_config(serialize_config(config));
    CHECK(again.plan.K == kInfinity);
}

TEST_CASE("builders reject inconsistent model bundles") {
    ExperimentConfig config = parse_config(kMaConfig);
    CHECK_NOTHROW(make_plan(config));

    ExperimentConfig dup = config;
    dup.kernel.support.push_back({make_site({0}), 2.0});
    CHECK_THROWS(make_kernel(dup));

    ExperimentConfig none = config;
    none.kernel.present = false;
    CHECK_THROWS(make_plan(none));

    ExperimentConfig unshaped = config;
    unshaped.geometry.shape = "disc";
    CHECK_THROWS(make_geometry(unshaped));  // disc demands dimension 2

    ExperimentConfig bad_y = config;
    bad_y.y.kind = "regime";
    bad_y.y.scales = {1.0, 2.0};
    bad_y.y.probs = {0.7};
    CHECK_THROWS(make_y(bad_y));
}

TEST_CASE("result records serialize and compare without wall clock") {
    ResultRecord rec;
    rec.kind = "eta-theory";
    rec.version = kArtifactVersion;
    rec.config_echo = kMaConfig;
    rec.outputs = {{"eta", 0.8}, {"theta", 0.8}};
    rec.wall_seconds = 1.25;

    ResultRecord back = record_from_json(record_to_json(rec));
    CHECK(back.kind == rec.kind);
    CHECK(back.outputs == rec.outputs);
    CHECK(same_outputs(rec, back));

    ResultRecord slower = rec;
    slower.wall_seconds = 99.0;
    CHECK(same_outputs(rec, slower));
    ResultRecord other = rec;
    other.outputs["eta"] = 0.9;
    CHECK_FALSE(same_outputs(rec, other));

    auto path = write_temp("record.json", render_record(rec));
    ResultRecord loaded = load_record(path.string());
    CHECK(same_outputs(rec, loaded));
}

TEST_CASE("report merge pools records of one kind") {
    ResultRecord a;
    a.kind = "eta-theory";
    a.outputs = {{"m", 1}, {"eta", 0.9}, {"note", "x"}, {"vec", {1, 2}}};
    ResultRecord b = a;
    b.outputs["m"] = 2;
    b.outputs["eta"] = 0.85;

    nlohmann::json merged = report_merge({a, b});
    CHECK(merged["kind"] == "eta-theory");
    CHECK(merged["records"] == 2);
    REQUIRE(merged["table"].size() == 2);
    CHECK(merged["table"][0]["eta"] == 0.9);
    CHECK(merged["table"][1]["m"] == 2);
    CHECK_FALSE(merged["table"][0].contains("vec"));  // scalars only

    nlohmann::json single = report_merge({a});
    CHECK(single["records"] == 1);
    CHECK(single["table"][0]["eta"] == 0.9);

    CHECK_THROWS(report_merge({}));
    ResultRecord mixed = a;
    mixed.kind = "spectral";
    CHECK_THROWS(report_merge({a, mixed}));
}

TEST_CASE("executing the canonical config reproduces the closed form") {
    ExperimentConfig config = parse_config(kMaConfig);
    ResultRecord rec = execute(config);
    CHECK(rec.kind == "eta-theory");
    CHECK(rec.outputs["eta"] == 0.8);
    CHECK(rec.outputs["theta"] == 0.8);
    CHECK(rec.outputs["eta_exact"] == true);
    CHECK(rec.outputs["K"] == "inf");
}

TEST_CASE("identical configs execute to identical outputs") {
    ExperimentConfig config = parse_config(kMaConfig);
    config.kind = ExperimentKind::kEtaEstimate;
    config.plan.reps = 60;
    config.geometry.c = {1500.0};
    config.geometry.t = {30};
    ResultRecord a = execute(config);
    ResultRecord b = execute(config);
    CHECK(same_outputs(a, b));
    CHECK(record_to_json(a)["outputs"] == record_to_json(b)["outputs"]);
}

TEST_CASE("thread count never changes the numbers") {
    ExperimentConfig config = parse_config(kMaConfig);
    config.kind = ExperimentKind::kEtaEstimate;
    config.plan.reps = 60;
    config.geometry.c = {1500.0};
    config.geometry.t = {30};
    config.threads = 1;
    ResultRecord serial = execute(config);
    config.threads = 4;
    ResultRecord parallel = execute(config);
    CHECK(serial.outputs == parallel.outputs);
}

TEST_CASE("run_experiment writes a reloadable record and csv tables") {
    std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "svfield-tests" / "run-out";
    std::filesystem::remove_all(dir);
    auto cfg = write_temp("estimate.ini", std::string(kMaConfig));

    RunOptions options;
    options.config_path = cfg.string();
    options.kind = ExperimentKind::kEtaEstimate;
    options.reps = 50;
    options.out = dir.string();
    std::ostringstream log;
    int rc = run_experiment(options, log);
    CHECK(rc == 0);

    ResultRecord rec = load_record((dir / "record.json").string());
    CHECK(rec.kind == "eta-estimate");
    CHECK(rec.outputs["replications"] == 50);
    CHECK(std::filesystem::exists(dir / "estimates.csv"));

    // The echoed config reruns to the same outputs (seed and overrides included).
    ExperimentConfig echo = parse_config(rec.config_echo);
    ResultRecord again = execute(echo);
    CHECK(again.outputs == rec.outputs);
}

TEST_CASE("strict mode flags statistical failures with exit three") {
    const char* degenerate = R"(
[experiment]
kind = limit-test
seed = 3

[kernel]
dimension = 1
truncation = 1
support = (0):1.0, (1):0.5

[y]
kind = constant
scale = 1.0

[geometry]
dimension = 1
c = 2000
t = 50

[plan]
reps = 150
thresholds = 1000
eta = 0.8
)";
    auto cfg = write_temp("degenerate.ini", degenerate);
    RunOptions options;
    options.config_path = cfg.string();
    std::ostringstream log;
    CHECK(run_experiment(options, log) == 0);
    options.strict = true;
    CHECK(run_experiment(options, log) == 3);
}

TEST_CASE("config errors surface before any execution") {
    auto cfg = write_temp("broken.ini", "[tail]\nalpha_ = 2\n");
    RunOptions options;
    options.config_path = cfg.string();
    std::ostringstream log;
    CHECK_THROWS_AS(run_experiment(options, log), ConfigError);
    options.config_path = "/nonexistent/path.ini";
    CHECK_THROWS(run_experiment(options, log));
}
