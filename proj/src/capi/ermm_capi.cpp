#include "ermm/ermm.h"

#include "core/error.hpp"
#include "core/pipeline.hpp"

#include <cstring>
#include <string>

using ermm::Error;
using ermm::ErrorCategory;
using ermm::ErrorCode;
using ermm::Pipeline;
using ermm::RunConfiguration;

namespace {

constexpr const char* kVersion = "1.0.0";

ermm_status status_of(const Error& error) {
    if (error.code() == ErrorCode::NonConvergence) return ERMM_ERROR_NONCONVERGENCE;
    switch (error.category()) {
    case ErrorCategory::Config:
    case ErrorCategory::State:
        return ERMM_ERROR_CONFIG;
    case ErrorCategory::Data:
        return ERMM_ERROR_DATA;
    case ErrorCategory::Internal:
        return ERMM_ERROR;
    }
    return ERMM_ERROR;
}

void fill_errbuf(char* errbuf, size_t errbuf_len, const std::string& message) {
    if (errbuf == nullptr || errbuf_len == 0) return;
    const size_t n = message.size() < errbuf_len - 1 ? message.size() : errbuf_len - 1;
    std::memcpy(errbuf, message.data(), n);
    errbuf[n] = '\0';
}

} // namespace

struct ermm_config {
    RunConfiguration configuration;
    std::string last_error;
};

struct ermm_run {
    Pipeline pipeline;
    std::string last_error;
    std::string manifest_path;
    std::string terminal;

    explicit ermm_run(RunConfiguration cfg) : pipeline(std::move(cfg)) {
        manifest_path = pipeline.manifest_path();
    }
};

extern "C" {

const char* ermm_version(void) { return kVersion; }

ermm_config* ermm_config_load(const char* path, char* errbuf, size_t errbuf_len) {
    if (path == nullptr) {
        fill_errbuf(errbuf, errbuf_len, "path is null");
        return nullptr;
    }
    try {
        auto* config = new ermm_config;
        config->configuration = RunConfiguration::load_file(path);
        return config;
    } catch (const std::exception& error) {
        fill_errbuf(errbuf, errbuf_len, error.what());
        return nullptr;
    }
}

ermm_config* ermm_config_create(void) { return new (std::nothrow) ermm_config; }

ermm_status ermm_config_set(ermm_config* config, const char* key, const char* value) {
    if (config == nullptr || key == nullptr || value == nullptr) return ERMM_ERROR_CONFIG;
    try {
        config->configuration.set(key, value);
        return ERMM_OK;
    } catch (const Error& error) {
        config->last_error = error.what();
        return status_of(error);
    } catch (const std::exception& error) {
        config->last_error = error.what();
        return ERMM_ERROR;
    }
}

void ermm_config_destroy(ermm_config* config) { delete config; }

const char* ermm_config_last_error(const ermm_config* config) {
    return config == nullptr ? "" : config->last_error.c_str();
}

ermm_run* ermm_run_open(const ermm_config* config, char* errbuf, size_t errbuf_len) {
    if (config == nullptr) {
        fill_errbuf(errbuf, errbuf_len, "config is null");
        return nullptr;
    }
    try {
        return new ermm_run(config->configuration);
    } catch (const std::exception& error) {
        fill_errbuf(errbuf, errbuf_len, error.what());
        return nullptr;
    }
}

void ermm_run_destroy(ermm_run* run) { delete run; }

static ermm_status guarded(ermm_run* run, const char* what,
                           void (Pipeline::*member)(const std::string&),
                           const char* argument) {
    (void)what;
    try {
        (run->pipeline.*member)(argument);
        run->terminal = run->pipeline.terminal_path();
        return ERMM_OK;
    } catch (const Error& error) {
        run->last_error = error.what();
        run->terminal = run->pipeline.terminal_path();
        return status_of(error);
    } catch (const std::exception& error) {
        run->last_error = error.what();
        return ERMM_ERROR;
    }
}

ermm_status ermm_run_phase(ermm_run* run, const char* phase) {
    if (run == nullptr || phase == nullptr) return ERMM_ERROR_CONFIG;
    return guarded(run, "phase", &Pipeline::run_phase, phase);
}

ermm_status ermm_run_all(ermm_run* run) {
    if (run == nullptr) return ERMM_ERROR_CONFIG;
    try {
        run->pipeline.run_all();
        run->terminal = run->pipeline.terminal_path();
        return ERMM_OK;
    } catch (const Error& error) {
        run->last_error = error.what();
        run->terminal = run->pipeline.terminal_path();
        return status_of(error);
    } catch (const std::exception& error) {
        run->last_error = error.what();
        return ERMM_ERROR;
    }
}

ermm_status ermm_run_verify_manifest(ermm_run* run) {
    if (run == nullptr) return ERMM_ERROR_CONFIG;
    try {
        run->pipeline.verify_manifest();
        return ERMM_OK;
    } catch (const Error& error) {
        run->last_error = error.what();
        return status_of(error);
    } catch (const std::exception& error) {
        run->last_error = error.what();
        return ERMM_ERROR;
    }
}

const char* ermm_run_last_error(const ermm_run* run) {
    return run == nullptr ? "" : run->last_error.c_str();
}

const char* ermm_run_manifest_path(const ermm_run* run) {
    return run == nullptr ? "" : run->manifest_path.c_str();
}

int ermm_run_iteration_count(const ermm_run* run) {
    return run == nullptr ? 0 : run->pipeline.iteration_count();
}

const char* ermm_run_terminal_path(const ermm_run* run) {
    return run == nullptr ? "" : run->terminal.c_str();
}

} // extern "C"
