#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "svf/run.hpp"

namespace {

const std::vector<std::pair<std::string, std::string>> kExperiments = {
    {"simulate", "draw volatility-field realizations and report per-replication maxima"},
    {"eta-theory", "closed-form and quadrature extremal functional and tail index"},
    {"eta-estimate", "blocks, runs, and max-CDF estimators by replication"},
    {"spectral", "empirical window spectral measure against its atoms"},
    {"clusters", "exceedance clusters under the box and proximity rules"},
    {"limit-test", "Poisson limit goodness of fit over subregions"},
    {"garch-index", "tail index of the squared-recursion volatility model"},
    {"geometry-check", "box-tiling approximation diagnostics for the index set"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary volatility-field extremes workbench"};
    app.require_subcommand(1);

    svf::RunOptions options;
    std::vector<CLI::App*> experiment_subs;
    for (const auto& [name, description] : kExperiments) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("--config", options.config_path, "experiment config file")->required();
        sub->add_option("--seed", options.seed, "override the base seed");
        sub->add_option("--reps", options.reps, "override the replication count");
        sub->add_option("--threads", options.threads, "worker thread count");
        sub->add_option("--out", options.out, "output directory for record and CSV files");
        sub->add_flag("--strict", options.strict,
                      "exit 3 when a statistical acceptance check fails");
        experiment_subs.push_back(sub);
    }

    std::vector<std::string> merge_paths;
    std::string merge_out;
    CLI::App* merge = app.add_subcommand(
        "report-merge", "combine result records of one kind into a sweep table");
    merge->add_option("records", merge_paths, "record.json files to merge");
    merge->add_option("--out", merge_out, "output directory for the merged table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (merge->parsed()) return svf::run_report_merge(merge_paths, merge_out, std::cout);
        for (std::size_t i = 0; i < experiment_subs.size(); ++i) {
            if (experiment_subs[i]->parsed()) {
                options.kind = svf::kind_from_name(kExperiments[i].first);
                return svf::run_experiment(options, std::cout);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
