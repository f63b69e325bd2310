#pragma once

#include "core/validate.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ermm {

struct RunConfiguration {
    std::string config_id = "run";
    // input paths, resolved against the configuration file's directory
    std::string model_path;
    std::string disclosure_path;
    std::string externals_path;
    std::string dictionary_path;
    std::string cem_path;
    std::string pi_mapping_path;
    std::string filter_text;
    int base_year = 2019;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    double promotion_bar = 0.8;
    double agreement_margin = 0.1;
    int max_iterations = 10;
    int max_dist = 3;
    double near_best_delta = 0.05;
    int tuple_size = 8;
    double grounded_fraction = 0.2;
    std::optional<double> threshold;           // override discover mode
    std::optional<int> discriminator_limit;    // override discover mode
    std::optional<double> eps;                 // override the knee estimate
    int min_pts = 4;
    std::optional<double> cell_threshold;      // default: the current mpi
    bool literal_mpi = false;

    // raw key=value pairs as written, output location excluded; this is the
    // snapshot stored in the manifest
    std::map<std::string, std::string> raw;

    static RunConfiguration load_file(const std::string& path);
    void set(const std::string& key, const std::string& value,
             const std::string& base_dir = {});
    void validate() const; // paths exist, config_id filesystem-safe

    std::string run_dir() const; // out_dir / config_id
};

extern const std::vector<std::string> kPhaseNames; // pipeline order

class Pipeline {
  public:
    explicit Pipeline(RunConfiguration cfg);

    // Runs one phase for the current iteration; throws on violations.
    void run_phase(const std::string& phase);
    // Whole pipeline including the iteration loop; throws NonConvergence
    // when the loop exhausts max_iterations without a terminal path.
    void run_all();
    void verify_manifest() const;

    const std::string& manifest_path() const { return manifest_file_; }
    int iteration_count() const;
    std::string terminal_path() const;

  private:
    struct Artifacts; // lazily loaded inputs shared between phases

    RunConfiguration cfg_;
    std::string run_dir_;
    std::string manifest_file_;

    void load_manifest();
    void save_manifest() const;
    void require_phase_ok(const std::string& key) const;
    void record_phase(const std::string& key, const std::vector<std::string>& files,
                      std::size_t log_errors);
    std::string iter_dir(const std::string& phase, int iteration) const;
    static std::string iter_key(const std::string& phase, int iteration);
    int current_iteration() const;

    void phase_ingest();
    void phase_filter();
    void phase_preprocess(int iteration);
    void phase_cluster(int iteration);
    IterationPath phase_validate(int iteration);
    void phase_qualitative();
    void phase_maturity();
    void phase_report();

    // manifest document kept as serialized JSON string wrapper
    struct ManifestData;
    std::shared_ptr<ManifestData> manifest_;
};

} // namespace ermm
