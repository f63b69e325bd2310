#pragma once

#include "core/encode.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ermm {

enum class Engine { ClusWiSARD, Hierarchical, KMeans, Dbscan };
const char* engine_name(Engine engine);

constexpr int kNoise = -1; // DBSCAN noise label

struct Hyperparameters {
    int tuple_size = 8;                         // bits per RAM address
    std::optional<double> threshold;            // nullopt = auto
    std::optional<int> discriminator_limit;     // nullopt = auto
    std::uint64_t seed = 1;
    int k = 1;              // cluster count for hierarchical / k-means
    double eps = 0.0;       // 0 = estimate from the 4-NN distance curve
    int min_pts = 4;
    double near_best_delta = 0.05;

    bool concrete() const { return threshold.has_value() && discriminator_limit.has_value(); }
};

struct ClusterPartition {
    Engine engine = Engine::ClusWiSARD;
    std::map<long long, int> assignments; // sample id -> cluster (kNoise allowed)
    int cluster_count = 0;                // dense 0..cluster_count-1, noise excluded

    std::vector<std::vector<long long>> members() const; // by cluster index
    std::vector<long long> noise_members() const;
};

struct SampleDistribution {
    long long sample_id = 0;
    int candidate_cluster_count = 1;
    int best_cluster = 0;
};

// pictures are '0'/'1' strings keyed by sample id, all of equal length
using BitPictures = std::vector<std::pair<long long, std::string>>;

std::pair<ClusterPartition, std::vector<SampleDistribution>>
cluswisard_fit(const BitPictures& pictures, const Hyperparameters& hp);

// Grid search over threshold x discriminator_limit, scoring each cell by
// the mean pairwise Rand agreement of five shuffled-order fits.
Hyperparameters cluswisard_auto(const BitPictures& pictures, const Hyperparameters& partial);

using FeatureMatrix = std::vector<std::pair<long long, std::vector<double>>>;

ClusterPartition hierarchical_fit(const FeatureMatrix& vectors, int k);
ClusterPartition kmeans_fit(const FeatureMatrix& vectors, int k, std::uint64_t seed);
ClusterPartition dbscan_fit(const FeatureMatrix& vectors, double eps, int min_pts);

// Knee of the ascending k-NN distance curve (maximum second difference).
double estimate_eps(const FeatureMatrix& vectors, int min_pts);

double rand_index(const ClusterPartition& a, const ClusterPartition& b);

// Feature vectors for the validation engines, derived from the same
// textual table that feeds binarization: numeric fields as values,
// single-select / YN as the option code, multi-select expanded to
// per-option indicators, table rows aggregated by element-wise max.
// Features are standardized to zero mean / unit variance.
struct VectorizedSet {
    FeatureMatrix matrix;
    // per sample: which fields read as answered (parity with the pictures)
    std::map<long long, std::vector<bool>> answered;
};
VectorizedSet vectorize(const TextualTable& table, const EncodingPlan& plan);

// Answered view of a bit-picture run, same notion as VectorizedSet.answered.
std::map<long long, std::vector<bool>> binary_answered(const EncodeResult& encoded);

// --- artifact files ---

void write_clusters_distribution(const std::string& path, const ClusterPartition& p);
void write_samples_distribution(const std::string& path,
                                const std::vector<SampleDistribution>& rows);
std::vector<SampleDistribution> read_samples_distribution(const std::string& path);
ClusterPartition read_clusters_distribution(const std::string& path, Engine engine);

void write_hyperparameters_file(const std::string& path, const Hyperparameters& hp);
Hyperparameters read_hyperparameters_file(const std::string& path);

} // namespace ermm
