#pragma once

#include "core/cluster.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ermm {

// Dice-style agreement matrix between two clusterings:
//   P[i][j] = 2 * b[i][j] / (c[i] + v[j])
// Noise samples occupy a dedicated trailing row/column on their side.
struct PrevalenceMatrix {
    Engine c_engine = Engine::ClusWiSARD;
    Engine v_engine = Engine::Hierarchical;
    std::size_t m = 0; // rows (including a noise row when present)
    std::size_t n = 0; // columns (including a noise column when present)
    bool c_has_noise = false;
    bool v_has_noise = false;
    std::vector<std::vector<double>> p;
    std::vector<std::vector<long long>> b;
    std::vector<long long> c_sizes;
    std::vector<long long> v_sizes;
};

PrevalenceMatrix prevalence_matrix(const ClusterPartition& c, const ClusterPartition& v);

// Arithmetic mean of all m*n cells.
double mean_prevalence_index(const PrevalenceMatrix& p);
// The printed form of the index: sum of P[i][j] / (i*j) over 1 < i < m,
// 1 < j < n with 1-based indices. Kept for comparison runs.
double mean_prevalence_index_literal(const PrevalenceMatrix& p);

// Mean over rows of the row maximum; how well each C cluster is matched.
double best_match_mean(const PrevalenceMatrix& p);

// Union of the b-intersections of every cell with P[i][j] >= cell_threshold.
std::vector<long long> select_high_prevalence_samples(const PrevalenceMatrix& p,
                                                      const ClusterPartition& c,
                                                      const ClusterPartition& v,
                                                      double cell_threshold);

enum class IterationPath { NewConfig, DrillDown, ToQualitative, RunDbscan };
const char* iteration_path_name(IterationPath path);

struct IterationState {
    int iteration_number = 0;
    std::string configuration_id;
    std::vector<double> mpi_history; // append-only
    std::vector<long long> selected_samples;
    IterationPath chosen_path = IterationPath::NewConfig;
};

struct AgreementSummary {
    double best_match_hierarchical = 0.0;
    double best_match_kmeans = 0.0;
    bool dbscan_done = false;
};

struct DecisionOptions {
    double promotion_bar = 0.8;
    double agreement_margin = 0.1;
};

// Iteration continuation rule. Precedence: promote when the index clears
// the bar and the validators are conclusive; run DBSCAN once when they are
// not; drill down while the index is not decreasing; otherwise start over
// with a new configuration.
IterationPath decide_next_step(const IterationState& state, double latest_mpi,
                               const AgreementSummary& agreement,
                               const DecisionOptions& options);

struct QualitativeRound {
    int round_number = 0;
    std::vector<long long> sampled;
    double cumulative_fraction = 0.0;
    bool complete = false; // more than half of the cluster has been seen
};

struct QualitativeRoundLog {
    int cluster_id = 0;
    std::vector<QualitativeRound> rounds;
    std::vector<long long> seen;
    std::map<int, std::vector<long long>> case_visits; // cluster -> visited cities
};

// Seeded sample of ceil(fraction * |cluster|) unseen cities.
QualitativeRound grounded_sample(const std::vector<long long>& cluster_members,
                                 double fraction_per_round, QualitativeRoundLog& log,
                                 std::uint64_t seed);

// One city from the lowest-index cluster not yet visited (the cluster under
// analysis counts as visited).
std::pair<int, long long> case_study_select(const ClusterPartition& partition,
                                            const QualitativeRoundLog& visits,
                                            int analyzing_cluster, std::uint64_t seed);

void write_prevalence_matrix(const std::string& path, const PrevalenceMatrix& matrix,
                             double mpi);
void write_selected_samples(const std::string& path, const std::vector<long long>& ids);

} // namespace ermm
