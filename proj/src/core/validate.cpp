#include "core/validate.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/text.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace ermm {

namespace {

// noise maps to the trailing index when the partition has noise samples
struct AxisView {
    std::size_t size = 0;
    bool has_noise = false;
    std::size_t index_of(int cluster) const {
        return cluster == kNoise ? size - 1 : static_cast<std::size_t>(cluster);
    }
};

AxisView axis_view(const ClusterPartition& partition) {
    AxisView view;
    view.has_noise = !partition.noise_members().empty();
    view.size = static_cast<std::size_t>(partition.cluster_count) + (view.has_noise ? 1 : 0);
    return view;
}

} // namespace

PrevalenceMatrix prevalence_matrix(const ClusterPartition& c, const ClusterPartition& v) {
    if (c.assignments.size() != v.assignments.size()) {
        throw Error(ErrorCode::SampleSetMismatch,
                    "partitions cover different sample counts");
    }
    for (const auto& [sample_id, cluster] : c.assignments) {
        (void)cluster;
        if (v.assignments.find(sample_id) == v.assignments.end()) {
            throw Error(ErrorCode::SampleSetMismatch,
                        "sample " + std::to_string(sample_id) +
                            " missing from the validation partition");
        }
    }

    const AxisView rows = axis_view(c);
    const AxisView cols = axis_view(v);

    PrevalenceMatrix matrix;
    matrix.c_engine = c.engine;
    matrix.v_engine = v.engine;
    matrix.m = rows.size;
    matrix.n = cols.size;
    matrix.c_has_noise = rows.has_noise;
    matrix.v_has_noise = cols.has_noise;
    matrix.b.assign(matrix.m, std::vector<long long>(matrix.n, 0));
    matrix.c_sizes.assign(matrix.m, 0);
    matrix.v_sizes.assign(matrix.n, 0);

    for (const auto& [sample_id, c_cluster] : c.assignments) {
        const int v_cluster = v.assignments.at(sample_id);
        const std::size_t i = rows.index_of(c_cluster);
        const std::size_t j = cols.index_of(v_cluster);
        ++matrix.b[i][j];
        ++matrix.c_sizes[i];
        ++matrix.v_sizes[j];
    }

    matrix.p.assign(matrix.m, std::vector<double>(matrix.n, 0.0));
    for (std::size_t i = 0; i < matrix.m; ++i) {
        for (std::size_t j = 0; j < matrix.n; ++j) {
            const long long denominator = matrix.c_sizes[i] + matrix.v_sizes[j];
            matrix.p[i][j] = denominator == 0
                                 ? 0.0
                                 : 2.0 * static_cast<double>(matrix.b[i][j]) /
                                       static_cast<double>(denominator);
        }
    }
    return matrix;
}

double mean_prevalence_index(const PrevalenceMatrix& matrix) {
    if (matrix.m == 0 || matrix.n == 0) return 0.0;
    double sum = 0.0;
    for (const auto& row : matrix.p) {
        for (const double cell : row) sum += cell;
    }
    return sum / (static_cast<double>(matrix.m) * static_cast<double>(matrix.n));
}

double mean_prevalence_index_literal(const PrevalenceMatrix& matrix) {
    double sum = 0.0;
    // 1-based indices, exclusive bounds as printed
    for (std::size_t i = 2; i < matrix.m; ++i) {
        for (std::size_t j = 2; j < matrix.n; ++j) {
            sum += matrix.p[i - 1][j - 1] / (static_cast<double>(i) * static_cast<double>(j));
        }
    }
    return sum;
}

double best_match_mean(const PrevalenceMatrix& matrix) {
    if (matrix.m == 0 || matrix.n == 0) return 0.0;
    double sum = 0.0;
    for (const auto& row : matrix.p) {
        sum += *std::max_element(row.begin(), row.end());
    }
    return sum / static_cast<double>(matrix.m);
}

std::vector<long long> select_high_prevalence_samples(const PrevalenceMatrix& matrix,
                                                      const ClusterPartition& c,
                                                      const ClusterPartition& v,
                                                      double cell_threshold) {
    const AxisView rows = axis_view(c);
    const AxisView cols = axis_view(v);
    std::set<long long> selected;
    for (const auto& [sample_id, c_cluster] : c.assignments) {
        const int v_cluster = v.assignments.at(sample_id);
        const std::size_t i = rows.index_of(c_cluster);
        const std::size_t j = cols.index_of(v_cluster);
        if (matrix.p[i][j] >= cell_threshold) selected.insert(sample_id);
    }
    return {selected.begin(), selected.end()};
}

const char* iteration_path_name(IterationPath path) {
    switch (path) {
    case IterationPath::NewConfig: return "new-config";
    case IterationPath::DrillDown: return "drill-down";
    case IterationPath::ToQualitative: return "to-qualitative";
    case IterationPath::RunDbscan: return "run-dbscan";
    }
    return "?";
}

IterationPath decide_next_step(const IterationState& state, double latest_mpi,
                               const AgreementSummary& agreement,
                               const DecisionOptions& options) {
    const double gap =
        std::abs(agreement.best_match_hierarchical - agreement.best_match_kmeans);
    const bool conclusive = agreement.dbscan_done || gap >= options.agreement_margin;

    if (conclusive && latest_mpi >= options.promotion_bar) {
        return IterationPath::ToQualitative;
    }
    if (!conclusive) {
        return IterationPath::RunDbscan;
    }
    const double previous = state.mpi_history.empty() ? 0.0 : state.mpi_history.back();
    if (latest_mpi >= previous) {
        return IterationPath::DrillDown;
    }
    return IterationPath::NewConfig;
}

QualitativeRound grounded_sample(const std::vector<long long>& cluster_members,
                                 double fraction_per_round, QualitativeRoundLog& log,
                                 std::uint64_t seed) {
    if (cluster_members.empty()) {
        throw Error(ErrorCode::EmptyInput, "grounded_sample: empty cluster");
    }
    std::vector<long long> unseen;
    for (const long long id : cluster_members) {
        if (std::find(log.seen.begin(), log.seen.end(), id) == log.seen.end()) {
            unseen.push_back(id);
        }
    }
    if (unseen.empty()) {
        throw Error(ErrorCode::ClusterExhausted,
                    "grounded_sample: every city of the cluster was already sampled");
    }
    std::sort(unseen.begin(), unseen.end());

    const auto per_round = static_cast<std::size_t>(
        std::ceil(fraction_per_round * static_cast<double>(cluster_members.size())));
    const std::size_t take = std::max<std::size_t>(1, std::min(per_round, unseen.size()));

    QualitativeRound round;
    round.round_number = static_cast<int>(log.rounds.size()) + 1;
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(round.round_number));
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t pick =
            std::uniform_int_distribution<std::size_t>(0, unseen.size() - 1)(rng);
        round.sampled.push_back(unseen[pick]);
        unseen.erase(unseen.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    std::sort(round.sampled.begin(), round.sampled.end());

    log.seen.insert(log.seen.end(), round.sampled.begin(), round.sampled.end());
    round.cumulative_fraction = static_cast<double>(log.seen.size()) /
                                static_cast<double>(cluster_members.size());
    round.complete = round.cumulative_fraction > 0.5;
    log.rounds.push_back(round);
    return round;
}

std::pair<int, long long> case_study_select(const ClusterPartition& partition,
                                            const QualitativeRoundLog& visits,
                                            int analyzing_cluster, std::uint64_t seed) {
    const auto members = partition.members();
    for (int cluster = 0; cluster < partition.cluster_count; ++cluster) {
        if (cluster == analyzing_cluster) continue;
        if (visits.case_visits.count(cluster) > 0) continue;
        const auto& candidates = members[static_cast<std::size_t>(cluster)];
        if (candidates.empty()) continue;
        std::vector<long long> sorted = candidates;
        std::sort(sorted.begin(), sorted.end());
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(cluster));
        const std::size_t pick =
            std::uniform_int_distribution<std::size_t>(0, sorted.size() - 1)(rng);
        return {cluster, sorted[pick]};
    }
    throw Error(ErrorCode::AllClustersVisited,
                "case_study_select: every cluster has been visited");
}

void write_prevalence_matrix(const std::string& path, const PrevalenceMatrix& matrix,
                             double mpi) {
    CsvWriter writer(path);
    CsvRow header{""};
    for (std::size_t j = 0; j < matrix.n; ++j) {
        const bool noise = matrix.v_has_noise && j + 1 == matrix.n;
        header.push_back(std::string(engine_name(matrix.v_engine)) + ":" +
                         (noise ? "noise" : std::to_string(j)));
    }
    writer.write_row(header);
    for (std::size_t i = 0; i < matrix.m; ++i) {
        const bool noise = matrix.c_has_noise && i + 1 == matrix.m;
        CsvRow row{std::string(engine_name(matrix.c_engine)) + ":" +
                   (noise ? "noise" : std::to_string(i))};
        for (std::size_t j = 0; j < matrix.n; ++j) {
            row.push_back(format_double(matrix.p[i][j]));
        }
        writer.write_row(row);
    }
    writer.write_row({"mpi", format_double(mpi)});
}

void write_selected_samples(const std::string& path, const std::vector<long long>& ids) {
    std::ostringstream out;
    for (const long long id : ids) out << id << "\n";
    write_text_file(path, out.str());
}

} // namespace ermm
