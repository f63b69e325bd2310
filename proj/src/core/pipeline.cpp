#include "core/pipeline.hpp"

#include "core/csv.hpp"
#include "core/digest.hpp"
#include "core/encode.hpp"
#include "core/error.hpp"
#include "core/filter.hpp"
#include "core/maturity.hpp"
#include "core/text.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace ermm {

const std::vector<std::string> kPhaseNames = {
    "ingest",      "filter",   "preprocess", "cluster",
    "validate",    "qualitative", "maturity", "report",
};

namespace {

std::string parent_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    return parent.empty() ? std::string(".") : parent.string();
}

std::string join_path(const std::string& base, const std::string& path) {
    if (path.empty() || path.front() == '/' || base.empty()) return path;
    return (fs::path(base) / path).string();
}

bool filesystem_safe(const std::string& id) {
    if (id.empty()) return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) != 0 || c == '_' || c == '-' || c == '.';
    });
}

std::optional<double> parse_double_opt(const std::string& value) {
    return parse_flexible_number(value);
}

} // namespace

RunConfiguration RunConfiguration::load_file(const std::string& path) {
    RunConfiguration cfg;
    const std::string base = parent_dir(path);
    std::istringstream stream(read_text_file(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ConfigError,
                        "config line " + std::to_string(line_no) + ": expected key = value");
        }
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), base);
    }
    return cfg;
}

void RunConfiguration::set(const std::string& key, const std::string& value,
                           const std::string& base_dir) {
    auto numeric = [&](const char* name) {
        const auto parsed = parse_double_opt(value);
        if (!parsed) {
            throw Error(ErrorCode::ConfigError,
                        std::string("config key '") + name + "' needs a numeric value");
        }
        return *parsed;
    };

    if (key == "config_id") {
        config_id = value;
    } else if (key == "model") {
        model_path = join_path(base_dir, value);
    } else if (key == "disclosure") {
        disclosure_path = join_path(base_dir, value);
    } else if (key == "externals") {
        externals_path = join_path(base_dir, value);
    } else if (key == "dictionary") {
        dictionary_path = join_path(base_dir, value);
    } else if (key == "cem") {
        cem_path = join_path(base_dir, value);
    } else if (key == "pi_mapping") {
        pi_mapping_path = join_path(base_dir, value);
    } else if (key == "filter") {
        filter_text = value;
    } else if (key == "base_year") {
        base_year = static_cast<int>(numeric("base_year"));
    } else if (key == "seed") {
        seed = static_cast<std::uint64_t>(numeric("seed"));
    } else if (key == "out") {
        out_dir = join_path(base_dir, value);
        return; // the output location is not part of the config identity
    } else if (key == "promotion_bar") {
        promotion_bar = numeric("promotion_bar");
    } else if (key == "agreement_margin") {
        agreement_margin = numeric("agreement_margin");
    } else if (key == "max_iterations") {
        max_iterations = static_cast<int>(numeric("max_iterations"));
    } else if (key == "max_dist") {
        max_dist = static_cast<int>(numeric("max_dist"));
    } else if (key == "near_best_delta") {
        near_best_delta = numeric("near_best_delta");
    } else if (key == "tuple_size") {
        tuple_size = static_cast<int>(numeric("tuple_size"));
    } else if (key == "grounded_fraction") {
        grounded_fraction = numeric("grounded_fraction");
    } else if (key == "threshold") {
        threshold = numeric("threshold");
    } else if (key == "discriminator_limit") {
        discriminator_limit = static_cast<int>(numeric("discriminator_limit"));
    } else if (key == "eps") {
        eps = numeric("eps");
    } else if (key == "min_pts") {
        min_pts = static_cast<int>(numeric("min_pts"));
    } else if (key == "cell_threshold") {
        cell_threshold = numeric("cell_threshold");
    } else if (key == "literal_mpi") {
        literal_mpi = value == "true" || value == "1";
    } else {
        throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    }
    raw[key] = value;
}

void RunConfiguration::validate() const {
    if (!filesystem_safe(config_id)) {
        throw Error(ErrorCode::ConfigError,
                    "config_id '" + config_id + "' is not filesystem-safe");
    }
    for (const auto& [name, path] :
         std::vector<std::pair<std::string, std::string>>{
             {"model", model_path},
             {"disclosure", disclosure_path},
             {"dictionary", dictionary_path},
             {"cem", cem_path},
             {"pi_mapping", pi_mapping_path}}) {
        if (path.empty()) {
            throw Error(ErrorCode::ConfigError, "config key '" + name + "' is required");
        }
        if (!fs::exists(path)) {
            throw Error(ErrorCode::ConfigError,
                        "config path '" + name + "' does not exist: " + path);
        }
    }
    if (!externals_path.empty() && !fs::exists(externals_path)) {
        throw Error(ErrorCode::ConfigError,
                    "config path 'externals' does not exist: " + externals_path);
    }
    if (max_iterations < 1) {
        throw Error(ErrorCode::ConfigError, "max_iterations must be >= 1");
    }
    if (tuple_size < 1 || tuple_size > 24) {
        throw Error(ErrorCode::ConfigError, "tuple_size must be in 1..24");
    }
    if (filter_text.empty()) {
        throw Error(ErrorCode::ConfigError, "config key 'filter' is required");
    }
}

std::string RunConfiguration::run_dir() const {
    return (fs::path(out_dir) / config_id).string();
}

struct Pipeline::ManifestData {
    Json doc;
};

Pipeline::Pipeline(RunConfiguration cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    run_dir_ = cfg_.run_dir();
    manifest_file_ = (fs::path(run_dir_) / "manifest.json").string();
    fs::create_directories(run_dir_);
    manifest_ = std::make_shared<ManifestData>();
    load_manifest();
}

void Pipeline::load_manifest() {
    Json& doc = manifest_->doc;
    if (fs::exists(manifest_file_)) {
        doc = Json::parse(read_text_file(manifest_file_));
    } else {
        doc = Json::object();
        doc["config"] = Json(cfg_.raw);
        doc["phases"] = Json::object();
        doc["iterations"] = Json::array();
        doc["state"] = {{"iteration", 1}, {"terminal", nullptr}};
    }
}

void Pipeline::save_manifest() const {
    write_text_file(manifest_file_, manifest_->doc.dump(2) + "\n");
}

std::string Pipeline::iter_key(const std::string& phase, int iteration) {
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "iter%02d", iteration);
    return phase + "/" + buffer;
}

std::string Pipeline::iter_dir(const std::string& phase, int iteration) const {
    return (fs::path(run_dir_) / iter_key(phase, iteration)).string();
}

int Pipeline::current_iteration() const {
    return manifest_->doc["state"]["iteration"].get<int>();
}

int Pipeline::iteration_count() const {
    return static_cast<int>(manifest_->doc["iterations"].size());
}

std::string Pipeline::terminal_path() const {
    const auto& terminal = manifest_->doc["state"]["terminal"];
    return terminal.is_null() ? std::string() : terminal.get<std::string>();
}

void Pipeline::require_phase_ok(const std::string& key) const {
    const auto& phases = manifest_->doc["phases"];
    if (!phases.contains(key) || phases[key]["status"] != "ok") {
        throw Error(ErrorCode::PhaseOrderViolation,
                    "phase '" + key + "' has not completed");
    }
    if (phases[key]["log_errors"].get<std::size_t>() > 0) {
        throw Error(ErrorCode::UpstreamErrorGate,
                    "phase '" + key + "' logged errors; downstream outputs are blocked");
    }
}

void Pipeline::record_phase(const std::string& key, const std::vector<std::string>& files,
                            std::size_t log_errors) {
    Json entry;
    entry["status"] = "ok";
    entry["log_errors"] = log_errors;
    Json file_list = Json::array();
    for (const auto& file : files) {
        const std::string relative =
            fs::relative(fs::path(file), fs::path(run_dir_)).string();
        file_list.push_back({{"path", relative}, {"sha256", sha256_file_hex(file)}});
    }
    entry["files"] = file_list;
    manifest_->doc["phases"][key] = entry;
    save_manifest();
}

// ---------------------------------------------------------------------------
// shared phase inputs

struct Pipeline::Artifacts {
    ModelDefinition model;
    WorkingSet filtered;        // working set after the base filter
    std::vector<ExternalIndicatorRow> externals;
};

namespace {

WorkingSet load_working_set(const std::string& csv_path, const ModelDefinition& model,
                            const std::string& externals_csv) {
    auto [ws, log] = parse_disclosure_csv(csv_path, model);
    (void)log;
    if (!externals_csv.empty() && fs::exists(externals_csv)) {
        std::set<long long> ids;
        for (const auto& city : ws.cities) ids.insert(city.sample_id);
        for (const auto& row : parse_externals_csv(externals_csv)) {
            if (row.resolved_sample_id >= 0 && ids.count(row.resolved_sample_id) > 0) {
                ws.externals.push_back(row);
            }
        }
    }
    return ws;
}

} // namespace

// ---------------------------------------------------------------------------
// phases

void Pipeline::phase_ingest() {
    const std::string dir = (fs::path(run_dir_) / "ingest").string();
    fs::create_directories(dir);

    const ModelDefinition model = load_model(cfg_.model_path);
    auto [ws, log] = parse_disclosure_csv(cfg_.disclosure_path, model);

    std::vector<ExternalIndicatorRow> externals;
    if (!cfg_.externals_path.empty()) {
        externals = parse_externals_csv(cfg_.externals_path);
    }
    ws = join_externals(std::move(ws), externals, log);

    const std::string working = (fs::path(dir) / "working.csv").string();
    const std::string externals_out = (fs::path(dir) / "externals.csv").string();
    const std::string discards = (fs::path(dir) / "discards.csv").string();
    const std::string log_file = (fs::path(dir) / "ingest.log").string();

    write_disclosure_csv(working, ws);
    write_externals_csv(externals_out, ws.externals);

    // per-city discard counts drive the data-processing indicator
    std::map<long long, int> discard_counts;
    for (const auto& entry : log.entries()) {
        if (entry.level == LogLevel::Warning && entry.sample_id >= 0 &&
            starts_with(entry.message, "discarded")) {
            ++discard_counts[entry.sample_id];
        }
    }
    {
        CsvWriter writer(discards);
        writer.write_row({"sample_id", "discarded_records"});
        for (const auto& [sample_id, count] : discard_counts) {
            writer.write_row({std::to_string(sample_id), std::to_string(count)});
        }
    }
    log.write_file(log_file);
    record_phase("ingest", {working, externals_out, discards, log_file},
                 log.error_count());
}

void Pipeline::phase_filter() {
    require_phase_ok("ingest");
    const std::string dir = (fs::path(run_dir_) / "filter").string();
    fs::create_directories(dir);

    const ModelDefinition model = load_model(cfg_.model_path);
    const std::string working = (fs::path(run_dir_) / "ingest/working.csv").string();
    const std::string externals = (fs::path(run_dir_) / "ingest/externals.csv").string();
    WorkingSet ws = load_working_set(working, model, externals);

    RunLog log;
    const FilterExpression expr = parse_filter(cfg_.filter_text);
    const WorkingSet filtered = apply_filter(expr, ws, log, parent_dir(cfg_.disclosure_path));

    const std::string filtered_file = (fs::path(dir) / "filtered.csv").string();
    const std::string log_file = (fs::path(dir) / "filter.log").string();
    write_disclosure_csv(filtered_file, filtered);
    log.write_file(log_file);
    record_phase("filter", {filtered_file, log_file}, log.error_count());
}

void Pipeline::phase_preprocess(int iteration) {
    require_phase_ok("filter");
    if (iteration > 1) {
        require_phase_ok(iter_key("validate", iteration - 1));
    }
    const std::string dir = iter_dir("preprocess", iteration);
    fs::create_directories(dir);

    const ModelDefinition model = load_model(cfg_.model_path);
    WorkingSet ws = load_working_set((fs::path(run_dir_) / "filter/filtered.csv").string(),
                                     model,
                                     (fs::path(run_dir_) / "ingest/externals.csv").string());

    RunLog log;
    if (iteration > 1) {
        // drill-down: restrict to the samples selected by the previous pass
        const std::string selected =
            (fs::path(iter_dir("validate", iteration - 1)) / "selected_samples.txt").string();
        FilterExpression expr;
        expr.clauses.push_back(
            {FilterClause::Mode::Include, "#SampleId", {"@" + selected}});
        ws = apply_filter(expr, ws, log);
    }

    EncodeOptions options;
    options.base_year = cfg_.base_year;
    options.max_dist = cfg_.max_dist;
    const EncodeResult encoded = encode_working_set(ws, options, log);
    const auto dictionary = load_dictionary(cfg_.dictionary_path);
    const auto statistics = collect_statistics(ws, dictionary);

    const std::string textual = (fs::path(dir) / "textual.csv").string();
    const std::string pictures = (fs::path(dir) / "pictures.bin").string();
    const std::string consolidation = (fs::path(dir) / "consolidation.csv").string();
    const std::string questions = (fs::path(dir) / "questions.txt").string();
    const std::string stats_file = (fs::path(dir) / "statistics.csv").string();
    const std::string info = (fs::path(dir) / "info.txt").string();
    const std::string log_file = (fs::path(dir) / "preprocess.log").string();

    write_textual_csv(textual, encoded);
    write_binary_file(pictures, encoded);
    write_consolidation_csv(consolidation, encoded);
    write_questions_list(questions, model, encoded);
    write_statistics_csv(stats_file, statistics);
    write_info_file(info, encoded);
    log.write_file(log_file);
    record_phase(iter_key("preprocess", iteration),
                 {textual, pictures, consolidation, questions, stats_file, info, log_file},
                 log.error_count());
}

void Pipeline::phase_cluster(int iteration) {
    require_phase_ok(iter_key("preprocess", iteration));
    const std::string dir = iter_dir("cluster", iteration);
    fs::create_directories(dir);
    const std::string pre_dir = iter_dir("preprocess", iteration);

    RunLog log;
    const auto pictures = read_binary_file((fs::path(pre_dir) / "pictures.bin").string());

    Hyperparameters hp;
    hp.tuple_size = cfg_.tuple_size;
    hp.seed = cfg_.seed;
    hp.near_best_delta = cfg_.near_best_delta;
    hp.min_pts = cfg_.min_pts;
    hp.threshold = cfg_.threshold;
    hp.discriminator_limit = cfg_.discriminator_limit;
    if (!hp.concrete()) {
        // discover mode
        hp = cluswisard_auto(pictures, hp);
        log.info("discover mode chose threshold=" + format_double(*hp.threshold) +
                 " discriminator_limit=" + std::to_string(*hp.discriminator_limit));
    }

    auto [partition, distributions] = cluswisard_fit(pictures, hp);
    hp.k = std::max(1, partition.cluster_count);

    const ModelDefinition model = load_model(cfg_.model_path);
    const TextualTable table =
        read_textual_csv((fs::path(pre_dir) / "textual.csv").string());
    // rebuild the plan from the same inputs to interpret the textual columns
    WorkingSet ws = load_working_set((fs::path(run_dir_) / "filter/filtered.csv").string(),
                                     model,
                                     (fs::path(run_dir_) / "ingest/externals.csv").string());
    RunLog plan_log;
    EncodeOptions options;
    options.base_year = cfg_.base_year;
    options.max_dist = cfg_.max_dist;
    EncodingPlan plan = encode_working_set(ws, options, plan_log).plan;

    const VectorizedSet features = vectorize(table, plan);
    const ClusterPartition hierarchical = hierarchical_fit(features.matrix, hp.k);
    const ClusterPartition kmeans = kmeans_fit(features.matrix, hp.k, hp.seed);

    std::vector<SampleDistribution> hier_rows;
    std::vector<SampleDistribution> kmeans_rows;
    for (const auto& [sample_id, cluster] : hierarchical.assignments) {
        hier_rows.push_back({sample_id, 1, cluster});
    }
    for (const auto& [sample_id, cluster] : kmeans.assignments) {
        kmeans_rows.push_back({sample_id, 1, cluster});
    }

    const std::string hp_file = (fs::path(dir) / "hyperparameters.txt").string();
    write_hyperparameters_file(hp_file, hp);
    std::vector<std::string> files{hp_file};
    for (const auto& [engine, part, rows] :
         std::vector<std::tuple<Engine, const ClusterPartition*,
                                const std::vector<SampleDistribution>*>>{
             {Engine::ClusWiSARD, &partition, &distributions},
             {Engine::Hierarchical, &hierarchical, &hier_rows},
             {Engine::KMeans, &kmeans, &kmeans_rows}}) {
        const std::string clusters =
            (fs::path(dir) / ("clusters_" + std::string(engine_name(engine)) + ".csv"))
                .string();
        const std::string samples =
            (fs::path(dir) / ("samples_" + std::string(engine_name(engine)) + ".csv"))
                .string();
        write_clusters_distribution(clusters, *part);
        write_samples_distribution(samples, *rows);
        files.push_back(clusters);
        files.push_back(samples);
    }
    const std::string log_file = (fs::path(dir) / "cluster.log").string();
    log.write_file(log_file);
    files.push_back(log_file);
    record_phase(iter_key("cluster", iteration), files, log.error_count());
}

IterationPath Pipeline::phase_validate(int iteration) {
    require_phase_ok(iter_key("cluster", iteration));
    const std::string dir = iter_dir("validate", iteration);
    fs::create_directories(dir);
    const std::string cluster_dir = iter_dir("cluster", iteration);
    const std::string pre_dir = iter_dir("preprocess", iteration);

    RunLog log;
    const auto cluswisard = read_clusters_distribution(
        (fs::path(cluster_dir) / "clusters_cluswisard.csv").string(), Engine::ClusWiSARD);
    const auto hierarchical = read_clusters_distribution(
        (fs::path(cluster_dir) / "clusters_hierarchical.csv").string(),
        Engine::Hierarchical);
    const auto kmeans = read_clusters_distribution(
        (fs::path(cluster_dir) / "clusters_kmeans.csv").string(), Engine::KMeans);

    const PrevalenceMatrix p_hier = prevalence_matrix(cluswisard, hierarchical);
    const PrevalenceMatrix p_kmeans = prevalence_matrix(cluswisard, kmeans);
    auto mpi_of = [&](const PrevalenceMatrix& matrix) {
        return cfg_.literal_mpi ? mean_prevalence_index_literal(matrix)
                                : mean_prevalence_index(matrix);
    };
    const double mpi_hier = mpi_of(p_hier);
    const double mpi_kmeans = mpi_of(p_kmeans);

    AgreementSummary agreement;
    agreement.best_match_hierarchical = best_match_mean(p_hier);
    agreement.best_match_kmeans = best_match_mean(p_kmeans);
    agreement.dbscan_done = false;

    IterationState state;
    state.iteration_number = iteration;
    state.configuration_id = cfg_.config_id;
    for (const auto& it : manifest_->doc["iterations"]) {
        if (it["number"].get<int>() < iteration) {
            state.mpi_history.push_back(it["mpi"].get<double>());
        }
    }

    DecisionOptions options;
    options.promotion_bar = cfg_.promotion_bar;
    options.agreement_margin = cfg_.agreement_margin;

    double mpi = std::min(mpi_hier, mpi_kmeans);
    std::optional<double> mpi_dbscan;
    IterationPath path = decide_next_step(state, mpi, agreement, options);

    std::vector<std::string> files;
    if (path == IterationPath::RunDbscan) {
        log.info("validators are inconclusive, running dbscan");
        const ModelDefinition model = load_model(cfg_.model_path);
        const TextualTable table =
            read_textual_csv((fs::path(pre_dir) / "textual.csv").string());
        WorkingSet ws =
            load_working_set((fs::path(run_dir_) / "filter/filtered.csv").string(), model,
                             (fs::path(run_dir_) / "ingest/externals.csv").string());
        RunLog plan_log;
        EncodeOptions encode_options;
        encode_options.base_year = cfg_.base_year;
        encode_options.max_dist = cfg_.max_dist;
        const EncodingPlan plan = encode_working_set(ws, encode_options, plan_log).plan;
        const VectorizedSet features = vectorize(table, plan);

        const double eps = cfg_.eps.value_or(estimate_eps(features.matrix, cfg_.min_pts));
        const ClusterPartition dbscan = dbscan_fit(features.matrix, eps, cfg_.min_pts);
        log.info("dbscan eps=" + format_double(eps) + " found " +
                 std::to_string(dbscan.cluster_count) + " clusters and " +
                 std::to_string(dbscan.noise_members().size()) + " noise samples");

        std::vector<SampleDistribution> rows;
        for (const auto& [sample_id, cluster] : dbscan.assignments) {
            rows.push_back({sample_id, 1, cluster});
        }
        const std::string clusters = (fs::path(dir) / "clusters_dbscan.csv").string();
        const std::string samples = (fs::path(dir) / "samples_dbscan.csv").string();
        write_clusters_distribution(clusters, dbscan);
        write_samples_distribution(samples, rows);
        files.push_back(clusters);
        files.push_back(samples);

        const PrevalenceMatrix p_dbscan = prevalence_matrix(cluswisard, dbscan);
        mpi_dbscan = mpi_of(p_dbscan);
        const std::string dbscan_matrix =
            (fs::path(dir) / "prevalence_dbscan.csv").string();
        write_prevalence_matrix(dbscan_matrix, p_dbscan, *mpi_dbscan);
        files.push_back(dbscan_matrix);

        mpi = std::min(mpi, *mpi_dbscan);
        agreement.dbscan_done = true;
        path = decide_next_step(state, mpi, agreement, options);
    }

    const std::string hier_file = (fs::path(dir) / "prevalence_hierarchical.csv").string();
    const std::string kmeans_file = (fs::path(dir) / "prevalence_kmeans.csv").string();
    write_prevalence_matrix(hier_file, p_hier, mpi_hier);
    write_prevalence_matrix(kmeans_file, p_kmeans, mpi_kmeans);
    files.insert(files.begin(), kmeans_file);
    files.insert(files.begin(), hier_file);

    // selection feeds the next drill-down ("I:#SampleId=@file")
    const double cell_threshold = cfg_.cell_threshold.value_or(mpi);
    std::set<long long> selected_set;
    for (const long long id :
         select_high_prevalence_samples(p_hier, cluswisard, hierarchical, cell_threshold)) {
        selected_set.insert(id);
    }
    for (const long long id :
         select_high_prevalence_samples(p_kmeans, cluswisard, kmeans, cell_threshold)) {
        selected_set.insert(id);
    }
    const std::vector<long long> selected(selected_set.begin(), selected_set.end());
    const std::string selected_file = (fs::path(dir) / "selected_samples.txt").string();
    write_selected_samples(selected_file, selected);
    files.push_back(selected_file);

    log.info("iteration " + std::to_string(iteration) + " mpi=" + format_double(mpi) +
             " path=" + iteration_path_name(path));
    const std::string log_file = (fs::path(dir) / "validate.log").string();
    log.write_file(log_file);
    files.push_back(log_file);

    Json iteration_entry;
    iteration_entry["number"] = iteration;
    iteration_entry["mpi_hierarchical"] = mpi_hier;
    iteration_entry["mpi_kmeans"] = mpi_kmeans;
    if (mpi_dbscan) iteration_entry["mpi_dbscan"] = *mpi_dbscan;
    iteration_entry["mpi"] = mpi;
    iteration_entry["path"] = iteration_path_name(path);
    iteration_entry["selected_count"] = selected.size();
    iteration_entry["k"] = cluswisard.cluster_count;
    // a re-run of the same iteration replaces its entry
    Json kept = Json::array();
    for (const auto& it : manifest_->doc["iterations"]) {
        if (it["number"].get<int>() < iteration) kept.push_back(it);
    }
    kept.push_back(iteration_entry);
    manifest_->doc["iterations"] = kept;

    if (path == IterationPath::DrillDown) {
        manifest_->doc["state"]["iteration"] = iteration + 1;
    } else if (path == IterationPath::ToQualitative ||
               path == IterationPath::NewConfig) {
        manifest_->doc["state"]["terminal"] = iteration_path_name(path);
    }
    record_phase(iter_key("validate", iteration), files, log.error_count());
    return path;
}

void Pipeline::phase_qualitative() {
    // uses the last completed iteration's clusters
    const int iterations = iteration_count();
    if (iterations == 0) {
        throw Error(ErrorCode::PhaseOrderViolation,
                    "qualitative analysis needs a completed validate phase");
    }
    const int iteration =
        manifest_->doc["iterations"].back()["number"].get<int>();
    require_phase_ok(iter_key("validate", iteration));

    const std::string dir = (fs::path(run_dir_) / "qualitative").string();
    fs::create_directories(dir);
    const std::string cluster_dir = iter_dir("cluster", iteration);

    RunLog log;
    const ModelDefinition model = load_model(cfg_.model_path);
    const auto cluswisard = read_clusters_distribution(
        (fs::path(cluster_dir) / "clusters_cluswisard.csv").string(), Engine::ClusWiSARD);
    const auto hierarchical = read_clusters_distribution(
        (fs::path(cluster_dir) / "clusters_hierarchical.csv").string(),
        Engine::Hierarchical);
    WorkingSet ws = load_working_set((fs::path(run_dir_) / "filter/filtered.csv").string(),
                                     model,
                                     (fs::path(run_dir_) / "ingest/externals.csv").string());

    // the most promising cluster: best matched row of the prevalence matrix
    const PrevalenceMatrix matrix = prevalence_matrix(cluswisard, hierarchical);
    int promising = 0;
    double best_row = -1.0;
    for (std::size_t i = 0; i < matrix.m; ++i) {
        if (matrix.c_has_noise && i + 1 == matrix.m) break;
        const double row_max = *std::max_element(matrix.p[i].begin(), matrix.p[i].end());
        if (row_max > best_row + 1e-12) {
            best_row = row_max;
            promising = static_cast<int>(i);
        }
    }
    const auto members = cluswisard.members();
    const auto& cluster_members = members[static_cast<std::size_t>(promising)];
    log.info("grounded-theory rounds on cluster " + std::to_string(promising) + " with " +
             std::to_string(cluster_members.size()) + " cities");

    // distinct questions of the filtered set, in model order
    std::vector<std::string> questions;
    for (const auto& q : model.questions) {
        for (const auto& record : ws.records) {
            if (record.question_number == q.number) {
                questions.push_back(q.number);
                break;
            }
        }
    }

    auto answers_of = [&](long long sample_id, const std::string& question) {
        std::vector<const AnswerRecord*> matching;
        for (const auto& record : ws.records) {
            if (record.sample_id == sample_id && record.question_number == question &&
                !trim(record.response_answer).empty()) {
                matching.push_back(&record);
            }
        }
        std::string joined;
        for (std::size_t i = 0; i < matching.size(); ++i) {
            if (i > 0) joined += " | ";
            joined += matching[i]->response_answer;
        }
        return joined;
    };

    std::vector<std::string> files;
    QualitativeRoundLog rounds;
    rounds.cluster_id = promising;
    while (true) {
        const QualitativeRound round =
            grounded_sample(cluster_members, cfg_.grounded_fraction, rounds, cfg_.seed);
        const std::string matrix_file =
            (fs::path(dir) /
             ("comparison_matrix_round" + std::to_string(round.round_number) + ".csv"))
                .string();
        CsvWriter writer(matrix_file);
        CsvRow header{"sample_id"};
        header.insert(header.end(), questions.begin(), questions.end());
        writer.write_row(header);
        for (const long long sample_id : round.sampled) {
            CsvRow row{std::to_string(sample_id)};
            for (const auto& question : questions) {
                row.push_back(answers_of(sample_id, question));
            }
            writer.write_row(row);
        }
        files.push_back(matrix_file);
        log.info("round " + std::to_string(round.round_number) + " sampled " +
                 std::to_string(round.sampled.size()) + " cities, coverage " +
                 format_double(round.cumulative_fraction));
        if (round.complete) break;
    }

    // case studies: one city from every other cluster
    rounds.case_visits[promising] = {};
    while (true) {
        try {
            const auto [cluster, city] =
                case_study_select(cluswisard, rounds, promising, cfg_.seed);
            rounds.case_visits[cluster].push_back(city);
            WorkingSet dossier;
            dossier.model = ws.model;
            for (const auto& record : ws.records) {
                if (record.sample_id == city) dossier.records.push_back(record);
            }
            for (const auto& c : ws.cities) {
                if (c.sample_id == city) dossier.cities.push_back(c);
            }
            const std::string dossier_file =
                (fs::path(dir) / ("case_dossier_" + std::to_string(city) + ".csv")).string();
            write_disclosure_csv(dossier_file, dossier);
            files.push_back(dossier_file);
            log.info("case study: city " + std::to_string(city) + " of cluster " +
                     std::to_string(cluster));
        } catch (const Error& error) {
            if (error.code() != ErrorCode::AllClustersVisited) throw;
            break;
        }
    }

    const std::string log_file = (fs::path(dir) / "qualitative.log").string();
    log.write_file(log_file);
    files.push_back(log_file);
    record_phase("qualitative", files, log.error_count());
}

void Pipeline::phase_maturity() {
    const int iterations = iteration_count();
    if (iterations == 0) {
        throw Error(ErrorCode::PhaseOrderViolation,
                    "maturity scoring needs a completed validate phase");
    }
    require_phase_ok(iter_key("validate", 1));
    const std::string dir = (fs::path(run_dir_) / "maturity").string();
    fs::create_directories(dir);

    RunLog log;
    const ModelDefinition model = load_model(cfg_.model_path);
    // scoring covers the full filtered population of the first iteration
    WorkingSet ws = load_working_set((fs::path(run_dir_) / "filter/filtered.csv").string(),
                                     model,
                                     (fs::path(run_dir_) / "ingest/externals.csv").string());

    std::set<long long> discarded;
    {
        const auto rows =
            read_csv_file((fs::path(run_dir_) / "ingest/discards.csv").string());
        for (std::size_t r = 1; r < rows.size(); ++r) {
            discarded.insert(std::stoll(rows[r][0]));
        }
    }

    const PiMapping mapping = load_pi_mapping(cfg_.pi_mapping_path);
    const auto coverage = field_coverage(ws);
    PiDerivationInputs inputs;
    inputs.ws = &ws;
    inputs.coverage = &coverage;
    inputs.cities_with_discards = &discarded;
    inputs.mapping = &mapping;
    const auto vectors = derive_pi_from_data(inputs);

    const auto dictionary = load_dictionary(cfg_.dictionary_path);
    const auto statistics = collect_statistics(ws, dictionary);
    std::map<long long, const SampleStatistics*> stats_by_id;
    for (const auto& s : statistics) stats_by_id[s.sample_id] = &s;
    std::map<long long, CoverageRow> coverage_by_id;
    for (const auto& row : coverage) coverage_by_id[row.sample_id] = row;

    std::vector<QualityIndicator> inds;
    for (const auto& city : ws.cities) {
        const auto stats = stats_by_id.find(city.sample_id);
        const auto cover = coverage_by_id.find(city.sample_id);
        if (stats == stats_by_id.end() || cover == coverage_by_id.end()) continue;
        inds.push_back(quality_indicator(*stats->second, cover->second.answered_fields,
                                         cover->second.total_fields));
    }
    assign_deciles(inds);

    const CapabilityEvaluationMatrix cem = load_cem(cfg_.cem_path);
    const ProcessPIVector cem_vector = evaluate_cem(cem);

    const std::string erml_file = (fs::path(dir) / "erml_report.csv").string();
    const std::string ind_file = (fs::path(dir) / "quality_indicators.csv").string();
    const std::string cem_file = (fs::path(dir) / "cem_evaluation.csv").string();
    const std::string log_file = (fs::path(dir) / "maturity.log").string();
    write_erml_report(erml_file, ws.cities, vectors);
    write_quality_indicators(ind_file, inds);
    write_cem_evaluation(cem_file, cem_vector);
    for (const auto& pi : vectors) {
        log.info("city " + std::to_string(pi.sample_id) + " erm-l " +
                 std::to_string(derive_erml(pi).level));
    }
    log.write_file(log_file);
    record_phase("maturity", {erml_file, ind_file, cem_file, log_file}, log.error_count());
}

void Pipeline::phase_report() {
    require_phase_ok("maturity");
    const std::string dir = (fs::path(run_dir_) / "report").string();
    fs::create_directories(dir);

    RunLog log;
    const ModelDefinition model = load_model(cfg_.model_path);
    WorkingSet ws = load_working_set((fs::path(run_dir_) / "filter/filtered.csv").string(),
                                     model,
                                     (fs::path(run_dir_) / "ingest/externals.csv").string());
    const auto cluswisard = read_clusters_distribution(
        (fs::path(iter_dir("cluster", 1)) / "clusters_cluswisard.csv").string(),
        Engine::ClusWiSARD);

    std::vector<QualityIndicator> inds;
    const auto rows = read_csv_file(
        (fs::path(run_dir_) / "maturity/quality_indicators.csv").string());
    for (std::size_t r = 1; r < rows.size(); ++r) {
        inds.push_back({std::stoll(rows[r][0]), std::stod(rows[r][1]),
                        std::stoi(rows[r][2])});
    }

    const auto regional = regional_breakdown(cluswisard, inds, ws.cities);
    const std::string regional_file = (fs::path(dir) / "regional_report.csv").string();
    write_regional_report(regional_file, regional);

    log.info("regional report covers " + std::to_string(regional.size()) +
             " region/cluster groups");
    const std::string log_file = (fs::path(dir) / "report.log").string();
    log.write_file(log_file);
    record_phase("report", {regional_file, log_file}, log.error_count());
}

void Pipeline::run_phase(const std::string& phase) {
    if (phase == "ingest") {
        phase_ingest();
    } else if (phase == "filter") {
        phase_filter();
    } else if (phase == "preprocess") {
        phase_preprocess(current_iteration());
    } else if (phase == "cluster") {
        phase_cluster(current_iteration());
    } else if (phase == "validate") {
        phase_validate(current_iteration());
    } else if (phase == "qualitative") {
        phase_qualitative();
    } else if (phase == "maturity") {
        phase_maturity();
    } else if (phase == "report") {
        phase_report();
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown phase '" + phase + "'");
    }
}

void Pipeline::run_all() {
    phase_ingest();
    phase_filter();

    bool terminal = false;
    for (int iteration = 1; iteration <= cfg_.max_iterations; ++iteration) {
        phase_preprocess(iteration);
        phase_cluster(iteration);
        const IterationPath path = phase_validate(iteration);
        if (path == IterationPath::ToQualitative) {
            phase_qualitative();
            terminal = true;
            break;
        }
        if (path == IterationPath::NewConfig) {
            terminal = true;
            break;
        }
        // drill-down continues the loop with the selected samples
    }
    if (!terminal) {
        save_manifest();
        throw Error(ErrorCode::NonConvergence,
                    "iteration loop exhausted max_iterations=" +
                        std::to_string(cfg_.max_iterations) +
                        " without reaching a terminal path");
    }
    phase_maturity();
    phase_report();
}

void Pipeline::verify_manifest() const {
    const auto& phases = manifest_->doc["phases"];
    for (const auto& [key, entry] : phases.items()) {
        for (const auto& file : entry["files"]) {
            const std::string path =
                (fs::path(run_dir_) / file["path"].get<std::string>()).string();
            if (!fs::exists(path)) {
                throw Error(ErrorCode::ManifestMismatch,
                            "manifest file missing on disk: " + path);
            }
            const std::string digest = sha256_file_hex(path);
            if (digest != file["sha256"].get<std::string>()) {
                throw Error(ErrorCode::ManifestMismatch,
                            "digest mismatch for " + path + " (phase " + key + ")");
            }
        }
    }
}

} // namespace ermm
