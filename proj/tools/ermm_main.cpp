// Command-line front end for the ermm pipeline. Links the C API only.

#include "ermm/ermm.h"

#include "CLI11.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace {

struct CommonOptions {
    std::string config_path;
    std::string seed;
    std::string filter;
    std::string out;
    std::string max_iterations;
};

void add_common(CLI::App* app, CommonOptions& options) {
    app->add_option("--config", options.config_path, "run configuration file")
        ->required();
    app->add_option("--seed", options.seed, "override the run seed");
    app->add_option("--filter", options.filter, "override the filter expression");
    app->add_option("--out", options.out, "override the output directory");
    app->add_option("--max-iterations", options.max_iterations,
                    "override the iteration cap");
}

int exit_code(ermm_status status) { return static_cast<int>(status); }

ermm_config* make_config(const CommonOptions& options) {
    char errbuf[512];
    ermm_config* config = ermm_config_load(options.config_path.c_str(), errbuf,
                                           sizeof(errbuf));
    if (config == nullptr) {
        std::fprintf(stderr, "error: %s\n", errbuf);
        return nullptr;
    }
    const std::vector<std::pair<const char*, const std::string*>> overrides = {
        {"seed", &options.seed},
        {"filter", &options.filter},
        {"out", &options.out},
        {"max_iterations", &options.max_iterations},
    };
    for (const auto& [key, value] : overrides) {
        if (value->empty()) continue;
        if (ermm_config_set(config, key, value->c_str()) != ERMM_OK) {
            std::fprintf(stderr, "error: %s\n", ermm_config_last_error(config));
            ermm_config_destroy(config);
            return nullptr;
        }
    }
    return config;
}

int run_command(const CommonOptions& options, const std::string& phase) {
    ermm_config* config = make_config(options);
    if (config == nullptr) return exit_code(ERMM_ERROR_CONFIG);

    char errbuf[512];
    ermm_run* run = ermm_run_open(config, errbuf, sizeof(errbuf));
    ermm_config_destroy(config);
    if (run == nullptr) {
        std::fprintf(stderr, "error: %s\n", errbuf);
        return exit_code(ERMM_ERROR_CONFIG);
    }

    ermm_status status = ERMM_OK;
    if (phase == "run-all") {
        status = ermm_run_all(run);
        if (status == ERMM_OK) {
            std::printf("run complete: %d iteration(s), terminal path '%s'\n",
                        ermm_run_iteration_count(run), ermm_run_terminal_path(run));
            std::printf("manifest: %s\n", ermm_run_manifest_path(run));
        }
    } else if (phase == "verify-manifest") {
        status = ermm_run_verify_manifest(run);
        if (status == ERMM_OK) std::printf("manifest verified\n");
    } else {
        status = ermm_run_phase(run, phase.c_str());
        if (status == ERMM_OK) std::printf("phase '%s' complete\n", phase.c_str());
    }
    if (status != ERMM_OK) {
        std::fprintf(stderr, "error: %s\n", ermm_run_last_error(run));
    }
    ermm_run_destroy(run);
    return exit_code(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ermm — disclosure clustering and maturity scoring pipeline"};
    app.require_subcommand(1);

    const std::vector<std::string> phases = {
        "ingest",     "filter",   "preprocess",      "cluster", "validate",
        "qualitative", "maturity", "report",         "run-all", "verify-manifest",
    };
    const std::vector<std::string> descriptions = {
        "parse the disclosure and external indicator files",
        "apply the configured include/exclude filter expression",
        "repair answers and emit the textual and binary encodings",
        "run ClusWiSARD (discover + fit), hierarchical and k-means",
        "build prevalence matrices and decide the next iteration path",
        "grounded-theory rounds and case-study dossiers",
        "derive per-city performance indicators and ERM-L levels",
        "emit the regional breakdown report",
        "run every phase including the iteration loop",
        "recompute the digests recorded in the manifest",
    };

    std::vector<CommonOptions> options(phases.size());
    for (std::size_t i = 0; i < phases.size(); ++i) {
        CLI::App* sub = app.add_subcommand(phases[i], descriptions[i]);
        add_common(sub, options[i]);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < phases.size(); ++i) {
        if (app.got_subcommand(phases[i])) {
            return run_command(options[i], phases[i]);
        }
    }
    return exit_code(ERMM_ERROR_CONFIG);
}
