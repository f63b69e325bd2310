#pragma once

#include "core/cluster.hpp"
#include "core/encode.hpp"
#include "core/ingest.hpp"

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace ermm {

enum class Capability { Reliability, Usability, Integration, Auditability, Reproducibility };
constexpr int kCapabilityCount = 5;
const char* capability_name(Capability c);

enum class ProcessArea {
    DataModeling,
    DataAcquisition, // three sub-items
    DataProcessing,
    DataAnalysis,
    ReportBuilding,
    ReportPublishing,
    Deployment,
    Monitoring,
};
const char* process_area_name(ProcessArea area);

// One scoring slot: a process area plus the sub-item for data acquisition.
struct PiSlot {
    ProcessArea area = ProcessArea::DataModeling;
    int sub_item = 0; // 1..3 for DataAcquisition, 0 otherwise

    bool operator<(const PiSlot& other) const {
        if (area != other.area) return area < other.area;
        return sub_item < other.sub_item;
    }
    bool operator==(const PiSlot&) const = default;
};

// the ten slots in report order
std::vector<PiSlot> pi_slots();
// declared PI range of a slot (0-1 everywhere except Data Analysis 0-5)
std::pair<int, int> pi_range(const PiSlot& slot);
std::string pi_slot_token(const PiSlot& slot); // "data_acquisition.2" etc.

struct CemPractice {
    std::string practice_id;
    PiSlot slot;
    double weight = 0.0;
    std::array<int, kCapabilityCount> levels{}; // 0-5 each
};

struct CapabilityEvaluationMatrix {
    std::vector<CemPractice> practices;
    std::map<PiSlot, int> goal_fulfillment; // 0-5
};

CapabilityEvaluationMatrix load_cem(const std::string& path);

struct ProcessPIVector {
    long long sample_id = 0;
    int dm = 0;
    std::array<int, 3> da{};
    int dp = 0;
    int dan = 0;
    int rb = 0;
    int rp = 0;
    int dep = 0;
    int mon = 0;

    int get(const PiSlot& slot) const;
    void set(const PiSlot& slot, int value);
    std::string da_digits() const; // "110" style
    bool operator==(const ProcessPIVector&) const = default;
};

// Per slot: weighted mean of the practices' mean capability level plus the
// goal fulfilment, rescaled linearly from [0,10] into the slot's PI range.
ProcessPIVector evaluate_cem(const CapabilityEvaluationMatrix& cem);

struct ERMLevel {
    int level = 0;
};
const char* erm_level_name(int level);

// Gating rule calibrated against published per-city vectors; monotone in
// every performance indicator.
ERMLevel derive_erml(const ProcessPIVector& pi);

// Question mapping that drives the data-driven PI extraction. Keys are the
// slot tokens; values are question-number patterns (literal or prefix "X*")
// or one of the pseudo sources @external, @no_fatal, @coverage.
struct PiMapping {
    std::map<PiSlot, std::vector<std::string>> question_patterns;
};
PiMapping load_pi_mapping(const std::string& path);

struct PiDerivationInputs {
    const WorkingSet* ws = nullptr;
    const std::vector<CoverageRow>* coverage = nullptr;
    const std::set<long long>* cities_with_discards = nullptr;
    const PiMapping* mapping = nullptr;
};

std::vector<ProcessPIVector> derive_pi_from_data(const PiDerivationInputs& inputs);

struct QualityIndicator {
    long long sample_id = 0;
    double ind = 0.0;
    int decile = 1; // 1 = best 10%
};

// ind = 0.7 * coverage + 0.3 * dictionary-word share of the answer text.
QualityIndicator quality_indicator(const SampleStatistics& stats, int answered_fields,
                                   int total_fields);

// Descending-ind ranks mapped to deciles of size ceil(n/10); equal values
// share the decile of their best rank.
void assign_deciles(std::vector<QualityIndicator>& population);

struct RegionalRow {
    Region region = Region::NORAM;
    int cluster = 0; // kNoise allowed
    int count = 0;
    std::array<int, 10> decile_histogram{};
};

std::vector<RegionalRow> regional_breakdown(const ClusterPartition& partition,
                                            const std::vector<QualityIndicator>& inds,
                                            const std::vector<City>& cities);

void write_erml_report(const std::string& path, const std::vector<City>& cities,
                       const std::vector<ProcessPIVector>& vectors);
void write_quality_indicators(const std::string& path,
                              const std::vector<QualityIndicator>& inds);
void write_cem_evaluation(const std::string& path, const ProcessPIVector& vector);
void write_regional_report(const std::string& path, const std::vector<RegionalRow>& rows);

} // namespace ermm
