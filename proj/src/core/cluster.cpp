#include "core/cluster.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace ermm {

const char* engine_name(Engine engine) {
    switch (engine) {
    case Engine::ClusWiSARD: return "cluswisard";
    case Engine::Hierarchical: return "hierarchical";
    case Engine::KMeans: return "kmeans";
    case Engine::Dbscan: return "dbscan";
    }
    return "?";
}

std::vector<std::vector<long long>> ClusterPartition::members() const {
    std::vector<std::vector<long long>> out(static_cast<std::size_t>(cluster_count));
    for (const auto& [sample_id, cluster] : assignments) {
        if (cluster >= 0) out[static_cast<std::size_t>(cluster)].push_back(sample_id);
    }
    return out;
}

std::vector<long long> ClusterPartition::noise_members() const {
    std::vector<long long> out;
    for (const auto& [sample_id, cluster] : assignments) {
        if (cluster == kNoise) out.push_back(sample_id);
    }
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Relabels clusters densely by first appearance over the given order.
void relabel_dense(ClusterPartition& partition, const std::vector<long long>& order,
                   const std::vector<int>& raw_labels) {
    std::map<int, int> remap;
    int next = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int raw = raw_labels[i];
        if (raw == kNoise) {
            partition.assignments[order[i]] = kNoise;
            continue;
        }
        auto it = remap.find(raw);
        if (it == remap.end()) it = remap.emplace(raw, next++).first;
        partition.assignments[order[i]] = it->second;
    }
    partition.cluster_count = next;
}

// --- ClusWiSARD ---
//
// One discriminator per cluster: a set of RAM nodes addressed by
// tuple_size-bit slices of the (seed-shuffled) picture. The response to a
// picture is the fraction of RAM nodes whose addressed cell was ever
// written during training.
class Discriminator {
  public:
    explicit Discriminator(std::size_t ram_count) : rams_(ram_count) {}

    void train(const std::vector<std::uint64_t>& addresses) {
        for (std::size_t r = 0; r < rams_.size(); ++r) {
            ++rams_[r][addresses[r]];
        }
    }

    double response(const std::vector<std::uint64_t>& addresses) const {
        if (rams_.empty()) return 0.0;
        std::size_t hits = 0;
        for (std::size_t r = 0; r < rams_.size(); ++r) {
            const auto it = rams_[r].find(addresses[r]);
            if (it != rams_[r].end() && it->second > 0) ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(rams_.size());
    }

  private:
    std::vector<std::map<std::uint64_t, int>> rams_;
};

struct WisardLayout {
    std::vector<std::size_t> mapping; // padded bit index -> picture position
    std::size_t padded_length = 0;
    std::size_t ram_count = 0;
    int tuple_size = 8;

    std::vector<std::uint64_t> addresses(const std::string& picture) const {
        std::vector<std::uint64_t> out(ram_count, 0);
        for (std::size_t i = 0; i < padded_length; ++i) {
            const std::size_t source = mapping[i];
            const bool bit = source < picture.size() && picture[source] == '1';
            if (bit) {
                out[i / static_cast<std::size_t>(tuple_size)] |=
                    1ull << (i % static_cast<std::size_t>(tuple_size));
            }
        }
        return out;
    }
};

WisardLayout make_layout(std::size_t picture_length, const Hyperparameters& hp) {
    WisardLayout layout;
    layout.tuple_size = hp.tuple_size;
    const auto tuple = static_cast<std::size_t>(hp.tuple_size);
    layout.padded_length = (picture_length + tuple - 1) / tuple * tuple;
    if (layout.padded_length == 0) layout.padded_length = tuple;
    layout.ram_count = layout.padded_length / tuple;
    layout.mapping.resize(layout.padded_length);
    std::iota(layout.mapping.begin(), layout.mapping.end(), 0);
    std::mt19937_64 rng(splitmix64(hp.seed));
    std::shuffle(layout.mapping.begin(), layout.mapping.end(), rng);
    return layout;
}

} // namespace

std::pair<ClusterPartition, std::vector<SampleDistribution>>
cluswisard_fit(const BitPictures& pictures, const Hyperparameters& hp) {
    if (pictures.empty()) {
        throw Error(ErrorCode::EmptyInput, "cluswisard_fit: no pictures");
    }
    if (!hp.concrete()) {
        throw Error(ErrorCode::InvalidArgument,
                    "cluswisard_fit: threshold and discriminator_limit must be concrete");
    }
    const std::size_t length = pictures.front().second.size();
    for (const auto& [sample_id, picture] : pictures) {
        if (picture.size() != length) {
            throw Error(ErrorCode::LengthMismatch,
                        "picture of sample " + std::to_string(sample_id) +
                            " has length " + std::to_string(picture.size()) +
                            ", expected " + std::to_string(length));
        }
    }
    const double threshold = *hp.threshold;
    const int limit = std::max(1, *hp.discriminator_limit);
    const WisardLayout layout = make_layout(length, hp);

    std::vector<std::vector<std::uint64_t>> addresses;
    addresses.reserve(pictures.size());
    for (const auto& [sample_id, picture] : pictures) {
        (void)sample_id;
        addresses.push_back(layout.addresses(picture));
    }

    // single streaming pass: train into the best-responding discriminator,
    // creating a new one while the response stays under the threshold and
    // the limit allows
    std::vector<Discriminator> discriminators;
    for (const auto& addr : addresses) {
        int best = -1;
        double best_response = -1.0;
        for (std::size_t d = 0; d < discriminators.size(); ++d) {
            const double response = discriminators[d].response(addr);
            if (response > best_response) {
                best_response = response;
                best = static_cast<int>(d);
            }
        }
        if (best < 0 || best_response < threshold) {
            if (static_cast<int>(discriminators.size()) < limit) {
                discriminators.emplace_back(layout.ram_count);
                discriminators.back().train(addr);
                continue;
            }
        }
        discriminators[static_cast<std::size_t>(best)].train(addr);
    }

    // final re-scoring pass
    std::vector<int> raw_labels(pictures.size(), 0);
    std::vector<SampleDistribution> distributions;
    distributions.reserve(pictures.size());
    std::vector<long long> order;
    order.reserve(pictures.size());
    for (std::size_t i = 0; i < pictures.size(); ++i) {
        const auto& addr = addresses[i];
        int best = 0;
        double best_response = -1.0;
        std::vector<double> responses(discriminators.size(), 0.0);
        for (std::size_t d = 0; d < discriminators.size(); ++d) {
            responses[d] = discriminators[d].response(addr);
            if (responses[d] > best_response) {
                best_response = responses[d];
                best = static_cast<int>(d);
            }
        }
        int candidates = 0;
        for (const double response : responses) {
            if (response >= best_response - hp.near_best_delta) ++candidates;
        }
        raw_labels[i] = best;
        order.push_back(pictures[i].first);
        distributions.push_back({pictures[i].first, std::max(1, candidates), best});
    }

    ClusterPartition partition;
    partition.engine = Engine::ClusWiSARD;
    relabel_dense(partition, order, raw_labels);
    // distributions report the dense labels
    for (auto& distribution : distributions) {
        distribution.best_cluster = partition.assignments.at(distribution.sample_id);
    }
    return {std::move(partition), std::move(distributions)};
}

double rand_index(const ClusterPartition& a, const ClusterPartition& b) {
    std::vector<long long> ids;
    for (const auto& [sample_id, cluster] : a.assignments) {
        (void)cluster;
        ids.push_back(sample_id);
    }
    const std::size_t n = ids.size();
    if (n < 2) return 1.0;
    std::size_t agree = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool same_a = a.assignments.at(ids[i]) == a.assignments.at(ids[j]);
            const bool same_b = b.assignments.at(ids[i]) == b.assignments.at(ids[j]);
            if (same_a == same_b) ++agree;
            ++pairs;
        }
    }
    return static_cast<double>(agree) / static_cast<double>(pairs);
}

Hyperparameters cluswisard_auto(const BitPictures& pictures,
                                const Hyperparameters& partial) {
    if (pictures.empty()) {
        throw Error(ErrorCode::EmptyInput, "cluswisard_auto: no pictures");
    }
    constexpr int kRuns = 5;
    const std::vector<int> limits{2, 4, 8, 16, 32};

    double best_score = -1.0;
    double best_threshold = 0.5;
    int best_limit = limits.front();

    int cell = 0;
    for (int step = 1; step <= 9; ++step) {
        const double threshold = step / 10.0;
        for (const int limit : limits) {
            ++cell;
            std::vector<ClusterPartition> partitions;
            partitions.reserve(kRuns);
            for (int run = 0; run < kRuns; ++run) {
                BitPictures shuffled = pictures;
                std::mt19937_64 rng(
                    splitmix64(partial.seed ^ splitmix64(
                        static_cast<std::uint64_t>(cell) * 131 + static_cast<std::uint64_t>(run))));
                std::shuffle(shuffled.begin(), shuffled.end(), rng);
                Hyperparameters hp = partial;
                hp.threshold = threshold;
                hp.discriminator_limit = limit;
                partitions.push_back(cluswisard_fit(shuffled, hp).first);
            }
            double sum = 0.0;
            int count = 0;
            for (int i = 0; i < kRuns; ++i) {
                for (int j = i + 1; j < kRuns; ++j) {
                    sum += rand_index(partitions[static_cast<std::size_t>(i)],
                                      partitions[static_cast<std::size_t>(j)]);
                    ++count;
                }
            }
            const double score = count > 0 ? sum / count : 1.0;
            // ties prefer the smaller limit, then the larger threshold
            const bool better =
                score > best_score + 1e-12 ||
                (std::abs(score - best_score) <= 1e-12 &&
                 (limit < best_limit ||
                  (limit == best_limit && threshold > best_threshold)));
            if (better) {
                best_score = score;
                best_threshold = threshold;
                best_limit = limit;
            }
        }
    }

    Hyperparameters chosen = partial;
    chosen.threshold = best_threshold;
    chosen.discriminator_limit = best_limit;
    return chosen;
}

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

void check_vectors(const FeatureMatrix& vectors) {
    if (vectors.empty()) {
        throw Error(ErrorCode::EmptyInput, "clustering: no feature vectors");
    }
    const std::size_t dims = vectors.front().second.size();
    for (const auto& [sample_id, vector] : vectors) {
        if (vector.size() != dims) {
            throw Error(ErrorCode::LengthMismatch,
                        "feature vector of sample " + std::to_string(sample_id) +
                            " has wrong dimension");
        }
    }
}

} // namespace

ClusterPartition hierarchical_fit(const FeatureMatrix& vectors, int k) {
    check_vectors(vectors);
    const std::size_t n = vectors.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw Error(ErrorCode::InvalidArgument, "hierarchical_fit: k out of range");
    }

    // average linkage over Euclidean distance, merging the lowest-index
    // closest pair until k clusters remain
    std::vector<std::vector<std::size_t>> clusters(n);
    for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};

    auto linkage = [&](const std::vector<std::size_t>& a,
                       const std::vector<std::size_t>& b) {
        double sum = 0.0;
        for (const std::size_t i : a) {
            for (const std::size_t j : b) {
                sum += std::sqrt(squared_distance(vectors[i].second, vectors[j].second));
            }
        }
        return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    };

    while (clusters.size() > static_cast<std::size_t>(k)) {
        double best = 0.0;
        std::size_t best_a = 0, best_b = 1;
        bool first = true;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const double d = linkage(clusters[a], clusters[b]);
                if (first || d < best - 1e-12) {
                    best = d;
                    best_a = a;
                    best_b = b;
                    first = false;
                }
            }
        }
        auto& target = clusters[best_a];
        target.insert(target.end(), clusters[best_b].begin(), clusters[best_b].end());
        std::sort(target.begin(), target.end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    }

    std::vector<int> raw_labels(n, 0);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (const std::size_t i : clusters[c]) raw_labels[i] = static_cast<int>(c);
    }
    std::vector<long long> order;
    order.reserve(n);
    for (const auto& [sample_id, vector] : vectors) {
        (void)vector;
        order.push_back(sample_id);
    }
    ClusterPartition partition;
    partition.engine = Engine::Hierarchical;
    relabel_dense(partition, order, raw_labels);
    return partition;
}

ClusterPartition kmeans_fit(const FeatureMatrix& vectors, int k, std::uint64_t seed) {
    check_vectors(vectors);
    const std::size_t n = vectors.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw Error(ErrorCode::InvalidArgument, "kmeans_fit: k out of range");
    }
    const std::size_t dims = vectors.front().second.size();

    // farthest-point initialization from a seeded start
    std::mt19937_64 rng(splitmix64(seed));
    std::vector<std::vector<double>> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    const std::size_t start = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    centroids.push_back(vectors[start].second);
    while (centroids.size() < static_cast<std::size_t>(k)) {
        std::size_t farthest = 0;
        double farthest_distance = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            double nearest = squared_distance(vectors[i].second, centroids[0]);
            for (std::size_t c = 1; c < centroids.size(); ++c) {
                nearest = std::min(nearest, squared_distance(vectors[i].second, centroids[c]));
            }
            if (nearest > farthest_distance + 1e-12) {
                farthest_distance = nearest;
                farthest = i;
            }
        }
        centroids.push_back(vectors[farthest].second);
    }

    std::vector<int> labels(n, 0);
    double previous_inertia = std::numeric_limits<double>::infinity();
    for (int iteration = 0; iteration < 300; ++iteration) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_distance = squared_distance(vectors[i].second, centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d =
                    squared_distance(vectors[i].second, centroids[static_cast<std::size_t>(c)]);
                if (d < best_distance - 1e-15) {
                    best_distance = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }

        // repair empty clusters by stealing the farthest point
        for (int c = 0; c < k; ++c) {
            if (std::count(labels.begin(), labels.end(), c) > 0) continue;
            std::size_t farthest = 0;
            double farthest_distance = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = squared_distance(
                    vectors[i].second, centroids[static_cast<std::size_t>(labels[i])]);
                if (d > farthest_distance + 1e-12) {
                    farthest_distance = d;
                    farthest = i;
                }
            }
            labels[farthest] = c;
            changed = true;
        }

        for (int c = 0; c < k; ++c) {
            std::vector<double> mean(dims, 0.0);
            std::size_t count = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (labels[i] != c) continue;
                for (std::size_t d = 0; d < dims; ++d) mean[d] += vectors[i].second[d];
                ++count;
            }
            if (count > 0) {
                for (double& value : mean) value /= static_cast<double>(count);
                centroids[static_cast<std::size_t>(c)] = std::move(mean);
            }
        }

        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            inertia += squared_distance(vectors[i].second,
                                        centroids[static_cast<std::size_t>(labels[i])]);
        }
        if (inertia > previous_inertia + 1e-9) {
            throw Error(ErrorCode::InvalidArgument,
                        "kmeans_fit: inertia increased, which breaks the contract");
        }
        previous_inertia = inertia;
        if (!changed) break;
    }

    std::vector<long long> order;
    order.reserve(n);
    for (const auto& [sample_id, vector] : vectors) {
        (void)vector;
        order.push_back(sample_id);
    }
    ClusterPartition partition;
    partition.engine = Engine::KMeans;
    relabel_dense(partition, order, labels);
    return partition;
}

double estimate_eps(const FeatureMatrix& vectors, int min_pts) {
    const std::size_t n = vectors.size();
    if (n == 0) return 1.0;
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, min_pts)), n - 1);
    if (k == 0) return 1.0;
    std::vector<double> knn(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> distances;
        distances.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            distances.push_back(std::sqrt(squared_distance(vectors[i].second, vectors[j].second)));
        }
        std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         distances.end());
        knn[i] = distances[k - 1];
    }
    std::sort(knn.begin(), knn.end());
    if (n < 3) return knn.back() > 0.0 ? knn.back() : 1.0;
    std::size_t knee = 1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double second_difference = knn[i + 1] - 2.0 * knn[i] + knn[i - 1];
        if (second_difference > best + 1e-12) {
            best = second_difference;
            knee = i;
        }
    }
    const double eps = knn[knee];
    return eps > 0.0 ? eps : (knn.back() > 0.0 ? knn.back() : 1.0);
}

ClusterPartition dbscan_fit(const FeatureMatrix& vectors, double eps, int min_pts) {
    check_vectors(vectors);
    if (eps <= 0.0 || min_pts < 1) {
        throw Error(ErrorCode::InvalidArgument, "dbscan_fit: eps > 0 and min_pts >= 1 required");
    }
    const std::size_t n = vectors.size();
    const double eps2 = eps * eps;

    auto neighbours = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j) {
            if (squared_distance(vectors[i].second, vectors[j].second) <= eps2) {
                out.push_back(j); // includes i itself
            }
        }
        return out;
    };

    constexpr int kUnvisited = -2;
    std::vector<int> labels(n, kUnvisited);
    int next_cluster = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != kUnvisited) continue;
        auto seed_neighbours = neighbours(i);
        if (seed_neighbours.size() < static_cast<std::size_t>(min_pts)) {
            labels[i] = kNoise;
            continue;
        }
        const int cluster = next_cluster++;
        labels[i] = cluster;
        std::vector<std::size_t> frontier = seed_neighbours;
        for (std::size_t f = 0; f < frontier.size(); ++f) {
            const std::size_t j = frontier[f];
            if (labels[j] == kNoise) labels[j] = cluster; // border point
            if (labels[j] != kUnvisited) continue;
            labels[j] = cluster;
            const auto j_neighbours = neighbours(j);
            if (j_neighbours.size() >= static_cast<std::size_t>(min_pts)) {
                frontier.insert(frontier.end(), j_neighbours.begin(), j_neighbours.end());
            }
        }
    }

    std::vector<long long> order;
    order.reserve(n);
    for (const auto& [sample_id, vector] : vectors) {
        (void)vector;
        order.push_back(sample_id);
    }
    ClusterPartition partition;
    partition.engine = Engine::Dbscan;
    relabel_dense(partition, order, labels);
    return partition;
}

VectorizedSet vectorize(const TextualTable& table, const EncodingPlan& plan) {
    VectorizedSet out;

    // feature layout per field
    struct Feature {
        std::size_t field = 0;
        int option = 0; // 0 = scalar feature, >0 = indicator of that option
    };
    std::vector<Feature> features;
    for (std::size_t f = 0; f < plan.fields.size(); ++f) {
        if (plan.fields[f].type == QType::MultiSelect) {
            for (int option = 1; option <= plan.fields[f].option_count; ++option) {
                features.push_back({f, option});
            }
        } else {
            features.push_back({f, 0});
        }
    }

    std::vector<std::size_t> column_of_field(plan.fields.size());
    for (std::size_t f = 0; f < plan.fields.size(); ++f) {
        bool found = false;
        for (std::size_t c = 0; c < table.field_ids.size(); ++c) {
            if (table.field_ids[c] == plan.fields[f].id()) {
                column_of_field[f] = c;
                found = true;
                break;
            }
        }
        if (!found) {
            throw Error(ErrorCode::UnknownKey,
                        "textual table lacks field '" + plan.fields[f].id() + "'");
        }
    }

    std::vector<std::vector<double>> raw(table.sample_ids.size(),
                                         std::vector<double>(features.size(), 0.0));
    for (std::size_t s = 0; s < table.sample_ids.size(); ++s) {
        std::vector<bool> answered(plan.fields.size(), false);
        for (std::size_t x = 0; x < features.size(); ++x) {
            const auto& feature = features[x];
            const FieldSpec& field = plan.fields[feature.field];
            const std::string& cell = table.rows[s][column_of_field[feature.field]];
            answered[feature.field] = textual_field_answered(field, cell);
            double value = 0.0;
            if (feature.option > 0) {
                for (const auto& row : split_rows(cell)) {
                    const auto code = parse_flexible_number(row);
                    if (code && static_cast<int>(*code) == feature.option) value = 1.0;
                }
            } else {
                // rows aggregate by element-wise max, mirroring the OR
                // superposition of the binary form
                for (const auto& row : split_rows(cell)) {
                    const auto parsed = parse_flexible_number(row);
                    if (parsed) value = std::max(value, *parsed);
                }
            }
            raw[s][x] = value;
        }
        out.answered[table.sample_ids[s]] = std::move(answered);
    }

    // standardize to zero mean / unit variance
    const std::size_t n = raw.size();
    for (std::size_t x = 0; x < features.size() && n > 0; ++x) {
        double mean = 0.0;
        for (std::size_t s = 0; s < n; ++s) mean += raw[s][x];
        mean /= static_cast<double>(n);
        double variance = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const double d = raw[s][x] - mean;
            variance += d * d;
        }
        variance /= static_cast<double>(n);
        const double sigma = std::sqrt(variance);
        for (std::size_t s = 0; s < n; ++s) {
            raw[s][x] = sigma > 1e-12 ? (raw[s][x] - mean) / sigma : 0.0;
        }
    }

    for (std::size_t s = 0; s < n; ++s) {
        out.matrix.emplace_back(table.sample_ids[s], std::move(raw[s]));
    }
    return out;
}

std::map<long long, std::vector<bool>> binary_answered(const EncodeResult& encoded) {
    std::map<long long, std::vector<bool>> out;
    for (const auto& sample : encoded.samples) {
        std::vector<bool> answered(encoded.plan.fields.size(), false);
        for (std::size_t f = 0; f < encoded.plan.fields.size(); ++f) {
            answered[f] = textual_field_answered(encoded.plan.fields[f], sample.textual[f]);
        }
        out[sample.sample_id] = std::move(answered);
    }
    return out;
}

void write_clusters_distribution(const std::string& path, const ClusterPartition& p) {
    CsvWriter writer(path);
    writer.write_row({"cluster", "size", "members"});
    const auto members = p.members();
    for (std::size_t c = 0; c < members.size(); ++c) {
        std::string joined;
        for (std::size_t i = 0; i < members[c].size(); ++i) {
            if (i > 0) joined.push_back(' ');
            joined += std::to_string(members[c][i]);
        }
        writer.write_row({std::to_string(c), std::to_string(members[c].size()), joined});
    }
    const auto noise = p.noise_members();
    if (!noise.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < noise.size(); ++i) {
            if (i > 0) joined.push_back(' ');
            joined += std::to_string(noise[i]);
        }
        writer.write_row({"noise", std::to_string(noise.size()), joined});
    }
}

void write_samples_distribution(const std::string& path,
                                const std::vector<SampleDistribution>& rows) {
    CsvWriter writer(path);
    writer.write_row({"sample_id", "candidate_cluster_count", "best_cluster"});
    for (const auto& row : rows) {
        writer.write_row({std::to_string(row.sample_id),
                          std::to_string(row.candidate_cluster_count),
                          std::to_string(row.best_cluster)});
    }
}

std::vector<SampleDistribution> read_samples_distribution(const std::string& path) {
    const auto rows = read_csv_file(path);
    std::vector<SampleDistribution> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 3) {
            throw Error(ErrorCode::UnreadableFile, "bad samples distribution row");
        }
        out.push_back({std::stoll(rows[r][0]), std::stoi(rows[r][1]), std::stoi(rows[r][2])});
    }
    return out;
}

ClusterPartition read_clusters_distribution(const std::string& path, Engine engine) {
    const auto rows = read_csv_file(path);
    ClusterPartition partition;
    partition.engine = engine;
    int max_cluster = -1;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 3) {
            throw Error(ErrorCode::UnreadableFile, "bad clusters distribution row");
        }
        const bool noise = rows[r][0] == "noise";
        const int cluster = noise ? kNoise : std::stoi(rows[r][0]);
        if (!noise) max_cluster = std::max(max_cluster, cluster);
        std::istringstream members(rows[r][2]);
        long long sample_id = 0;
        while (members >> sample_id) {
            partition.assignments[sample_id] = cluster;
        }
    }
    partition.cluster_count = max_cluster + 1;
    return partition;
}

void write_hyperparameters_file(const std::string& path, const Hyperparameters& hp) {
    std::ostringstream out;
    out << "threshold=" << format_double(hp.threshold.value_or(-1.0)) << "\n";
    out << "discriminator_limit=" << hp.discriminator_limit.value_or(-1) << "\n";
    out << "tuple_size=" << hp.tuple_size << "\n";
    out << "seed=" << hp.seed << "\n";
    out << "k=" << hp.k << "\n";
    out << "eps=" << format_double(hp.eps) << "\n";
    out << "min_pts=" << hp.min_pts << "\n";
    out << "near_best_delta=" << format_double(hp.near_best_delta) << "\n";
    write_text_file(path, out.str());
}

Hyperparameters read_hyperparameters_file(const std::string& path) {
    Hyperparameters hp;
    std::istringstream stream(read_text_file(path));
    std::string line;
    while (std::getline(stream, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::UnreadableFile, "bad hyperparameters line: " + line);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "threshold") {
                const double v = std::stod(value);
                if (v >= 0.0) hp.threshold = v;
            } else if (key == "discriminator_limit") {
                const int v = std::stoi(value);
                if (v >= 0) hp.discriminator_limit = v;
            } else if (key == "tuple_size") {
                hp.tuple_size = std::stoi(value);
            } else if (key == "seed") {
                hp.seed = std::stoull(value);
            } else if (key == "k") {
                hp.k = std::stoi(value);
            } else if (key == "eps") {
                hp.eps = std::stod(value);
            } else if (key == "min_pts") {
                hp.min_pts = std::stoi(value);
            } else if (key == "near_best_delta") {
                hp.near_best_delta = std::stod(value);
            } else {
                throw Error(ErrorCode::UnreadableFile, "unknown hyperparameter: " + key);
            }
        } catch (const std::invalid_argument&) {
            throw Error(ErrorCode::UnreadableFile, "bad hyperparameter value: " + line);
        }
    }
    return hp;
}

} // namespace ermm
