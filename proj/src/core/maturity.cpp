#include "core/maturity.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/text.hpp"

#include <algorithm>
#include <cmath>

namespace ermm {

const char* capability_name(Capability c) {
    switch (c) {
    case Capability::Reliability: return "reliability";
    case Capability::Usability: return "usability";
    case Capability::Integration: return "integration";
    case Capability::Auditability: return "auditability";
    case Capability::Reproducibility: return "reproducibility";
    }
    return "?";
}

const char* process_area_name(ProcessArea area) {
    switch (area) {
    case ProcessArea::DataModeling: return "data_modeling";
    case ProcessArea::DataAcquisition: return "data_acquisition";
    case ProcessArea::DataProcessing: return "data_processing";
    case ProcessArea::DataAnalysis: return "data_analysis";
    case ProcessArea::ReportBuilding: return "report_building";
    case ProcessArea::ReportPublishing: return "report_publishing";
    case ProcessArea::Deployment: return "deployment";
    case ProcessArea::Monitoring: return "monitoring";
    }
    return "?";
}

std::vector<PiSlot> pi_slots() {
    return {
        {ProcessArea::DataModeling, 0},   {ProcessArea::DataAcquisition, 1},
        {ProcessArea::DataAcquisition, 2}, {ProcessArea::DataAcquisition, 3},
        {ProcessArea::DataProcessing, 0}, {ProcessArea::DataAnalysis, 0},
        {ProcessArea::ReportBuilding, 0}, {ProcessArea::ReportPublishing, 0},
        {ProcessArea::Deployment, 0},     {ProcessArea::Monitoring, 0},
    };
}

std::pair<int, int> pi_range(const PiSlot& slot) {
    if (slot.area == ProcessArea::DataAnalysis) return {0, 5};
    return {0, 1};
}

std::string pi_slot_token(const PiSlot& slot) {
    std::string token = process_area_name(slot.area);
    if (slot.sub_item > 0) token += "." + std::to_string(slot.sub_item);
    return token;
}

namespace {

std::optional<PiSlot> parse_pi_slot(const std::string& raw) {
    const std::string token = to_lower_ascii(trim(raw));
    std::string base = token;
    int sub_item = 0;
    const std::size_t dot = token.rfind('.');
    if (dot != std::string::npos) {
        const std::string suffix = token.substr(dot + 1);
        if (suffix.size() == 1 && suffix[0] >= '1' && suffix[0] <= '3') {
            base = token.substr(0, dot);
            sub_item = suffix[0] - '0';
        }
    }
    for (const auto area :
         {ProcessArea::DataModeling, ProcessArea::DataAcquisition,
          ProcessArea::DataProcessing, ProcessArea::DataAnalysis,
          ProcessArea::ReportBuilding, ProcessArea::ReportPublishing,
          ProcessArea::Deployment, ProcessArea::Monitoring}) {
        if (base != process_area_name(area)) continue;
        if (area == ProcessArea::DataAcquisition) {
            if (sub_item == 0) return std::nullopt; // sub-item required
            return PiSlot{area, sub_item};
        }
        if (sub_item != 0) return std::nullopt;
        return PiSlot{area, 0};
    }
    // short aliases used in configuration files
    static const std::map<std::string, PiSlot> aliases = {
        {"dm", {ProcessArea::DataModeling, 0}},
        {"da1", {ProcessArea::DataAcquisition, 1}},
        {"da2", {ProcessArea::DataAcquisition, 2}},
        {"da3", {ProcessArea::DataAcquisition, 3}},
        {"dp", {ProcessArea::DataProcessing, 0}},
        {"dan", {ProcessArea::DataAnalysis, 0}},
        {"rb", {ProcessArea::ReportBuilding, 0}},
        {"rp", {ProcessArea::ReportPublishing, 0}},
        {"dep", {ProcessArea::Deployment, 0}},
        {"mon", {ProcessArea::Monitoring, 0}},
    };
    const auto it = aliases.find(token);
    if (it != aliases.end()) return it->second;
    return std::nullopt;
}

} // namespace

CapabilityEvaluationMatrix load_cem(const std::string& path) {
    CapabilityEvaluationMatrix cem;
    const auto rows = read_csv_file(path);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.empty()) continue;
        const std::string kind = to_lower_ascii(trim(row[0]));
        if (kind.empty() || kind[0] == '#') continue;
        if (kind == "practice") {
            if (row.size() != 4 + kCapabilityCount) {
                throw Error(ErrorCode::UnreadableFile,
                            "CEM practice row " + std::to_string(r + 1) +
                                " needs id, process, weight and five levels");
            }
            CemPractice practice;
            practice.practice_id = trim(row[1]);
            const auto slot = parse_pi_slot(row[2]);
            if (!slot) {
                throw Error(ErrorCode::UnreadableFile,
                            "CEM row " + std::to_string(r + 1) + ": unknown process '" +
                                row[2] + "'");
            }
            practice.slot = *slot;
            const auto weight = parse_flexible_number(row[3]);
            if (!weight || *weight <= 0.0) {
                throw Error(ErrorCode::UnreadableFile,
                            "CEM row " + std::to_string(r + 1) + ": bad weight");
            }
            practice.weight = *weight;
            for (int c = 0; c < kCapabilityCount; ++c) {
                const auto level = parse_flexible_number(row[static_cast<std::size_t>(4 + c)]);
                if (!level || *level < 0 || *level > 5 ||
                    *level != std::floor(*level)) {
                    throw Error(ErrorCode::UnreadableFile,
                                "CEM row " + std::to_string(r + 1) +
                                    ": levels must be integers 0-5");
                }
                practice.levels[static_cast<std::size_t>(c)] = static_cast<int>(*level);
            }
            cem.practices.push_back(std::move(practice));
        } else if (kind == "goal") {
            if (row.size() != 3) {
                throw Error(ErrorCode::UnreadableFile,
                            "CEM goal row " + std::to_string(r + 1) +
                                " needs process and level");
            }
            const auto slot = parse_pi_slot(row[1]);
            const auto level = parse_flexible_number(row[2]);
            if (!slot || !level || *level < 0 || *level > 5) {
                throw Error(ErrorCode::UnreadableFile,
                            "CEM goal row " + std::to_string(r + 1) + " is malformed");
            }
            cem.goal_fulfillment[*slot] = static_cast<int>(*level);
        } else {
            throw Error(ErrorCode::UnreadableFile,
                        "CEM row " + std::to_string(r + 1) + ": unknown kind '" + kind + "'");
        }
    }
    return cem;
}

int ProcessPIVector::get(const PiSlot& slot) const {
    switch (slot.area) {
    case ProcessArea::DataModeling: return dm;
    case ProcessArea::DataAcquisition: return da[static_cast<std::size_t>(slot.sub_item - 1)];
    case ProcessArea::DataProcessing: return dp;
    case ProcessArea::DataAnalysis: return dan;
    case ProcessArea::ReportBuilding: return rb;
    case ProcessArea::ReportPublishing: return rp;
    case ProcessArea::Deployment: return dep;
    case ProcessArea::Monitoring: return mon;
    }
    return 0;
}

void ProcessPIVector::set(const PiSlot& slot, int value) {
    switch (slot.area) {
    case ProcessArea::DataModeling: dm = value; return;
    case ProcessArea::DataAcquisition:
        da[static_cast<std::size_t>(slot.sub_item - 1)] = value;
        return;
    case ProcessArea::DataProcessing: dp = value; return;
    case ProcessArea::DataAnalysis: dan = value; return;
    case ProcessArea::ReportBuilding: rb = value; return;
    case ProcessArea::ReportPublishing: rp = value; return;
    case ProcessArea::Deployment: dep = value; return;
    case ProcessArea::Monitoring: mon = value; return;
    }
}

std::string ProcessPIVector::da_digits() const {
    std::string out;
    for (const int digit : da) out += std::to_string(digit);
    return out;
}

ProcessPIVector evaluate_cem(const CapabilityEvaluationMatrix& cem) {
    for (const auto& slot : pi_slots()) {
        double weight_sum = 0.0;
        bool any = false;
        for (const auto& practice : cem.practices) {
            if (practice.slot == slot) {
                weight_sum += practice.weight;
                any = true;
            }
        }
        if (any && std::abs(weight_sum - 1.0) > 1e-6) {
            throw Error(ErrorCode::WeightSumViolation,
                        "CEM weights of " + pi_slot_token(slot) + " sum to " +
                            format_double(weight_sum));
        }
    }

    ProcessPIVector vector;
    for (const auto& slot : pi_slots()) {
        double weighted = 0.0;
        for (const auto& practice : cem.practices) {
            if (practice.slot != slot) continue;
            double mean = 0.0;
            for (const int level : practice.levels) mean += level;
            mean /= kCapabilityCount;
            weighted += practice.weight * mean;
        }
        const auto goal = cem.goal_fulfillment.find(slot);
        const double raw = weighted + (goal != cem.goal_fulfillment.end() ? goal->second : 0);
        const auto [lo, hi] = pi_range(slot);
        const int value =
            static_cast<int>(std::lround(lo + raw / 10.0 * static_cast<double>(hi - lo)));
        vector.set(slot, std::clamp(value, lo, hi));
    }
    return vector;
}

const char* erm_level_name(int level) {
    switch (level) {
    case 0: return "Unavailable";
    case 1: return "Initial";
    case 2: return "Managed";
    case 3: return "Established";
    case 4: return "Predictable";
    case 5: return "Optimized";
    }
    return "?";
}

ERMLevel derive_erml(const ProcessPIVector& pi) {
    if (pi.dm == 0 || (pi.da[0] == 0 && pi.da[1] == 0 && pi.da[2] == 0)) {
        return {0};
    }
    if (pi.dp == 0) return {1};
    if (pi.dan < 2) return {2};
    if (pi.rp == 0 || pi.mon == 0 || pi.dan < 3) return {3};
    for (const auto& slot : pi_slots()) {
        if (pi.get(slot) < pi_range(slot).second) return {4};
    }
    return {5};
}

PiMapping load_pi_mapping(const std::string& path) {
    PiMapping mapping;
    const auto rows = read_csv_file(path);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.empty() || trim(row[0]).empty() || trim(row[0])[0] == '#') continue;
        const auto slot = parse_pi_slot(row[0]);
        if (!slot) {
            throw Error(ErrorCode::UnreadableFile,
                        "PI mapping row " + std::to_string(r + 1) + ": unknown slot '" +
                            row[0] + "'");
        }
        std::vector<std::string> patterns;
        for (std::size_t i = 1; i < row.size(); ++i) {
            const std::string pattern = trim(row[i]);
            if (!pattern.empty()) patterns.push_back(pattern);
        }
        if (patterns.empty()) {
            throw Error(ErrorCode::UnreadableFile,
                        "PI mapping row " + std::to_string(r + 1) + " has no patterns");
        }
        mapping.question_patterns[*slot] = std::move(patterns);
    }
    return mapping;
}

namespace {

bool question_matches(const std::string& question_number,
                      const std::vector<std::string>& patterns) {
    for (const auto& pattern : patterns) {
        if (!pattern.empty() && pattern.back() == '*') {
            if (starts_with(question_number, pattern.substr(0, pattern.size() - 1))) {
                return true;
            }
        } else if (question_number == pattern) {
            return true;
        }
    }
    return false;
}

} // namespace

std::vector<ProcessPIVector> derive_pi_from_data(const PiDerivationInputs& inputs) {
    const WorkingSet& ws = *inputs.ws;
    const PiMapping& mapping = *inputs.mapping;
    if (mapping.question_patterns.empty()) {
        throw Error(ErrorCode::ConfigError, "empty PI mapping");
    }

    std::map<long long, CoverageRow> coverage;
    for (const auto& row : *inputs.coverage) coverage[row.sample_id] = row;

    std::map<long long, std::set<std::string>> answered_questions;
    for (const auto& record : ws.records) {
        if (!trim(record.response_answer).empty()) {
            answered_questions[record.sample_id].insert(record.question_number);
        }
    }
    std::set<long long> has_external;
    for (const auto& external : ws.externals) {
        if (external.resolved_sample_id >= 0) has_external.insert(external.resolved_sample_id);
    }

    std::vector<ProcessPIVector> out;
    for (const auto& city : ws.cities) {
        ProcessPIVector pi;
        pi.sample_id = city.sample_id;
        const auto& answered = answered_questions[city.sample_id];

        for (const auto& slot : pi_slots()) {
            const auto patterns = mapping.question_patterns.find(slot);
            if (patterns == mapping.question_patterns.end()) continue;
            const auto& list = patterns->second;
            if (list.size() == 1 && list[0] == "@external") {
                pi.set(slot, has_external.count(city.sample_id) > 0 ? 1 : 0);
                continue;
            }
            if (list.size() == 1 && list[0] == "@no_fatal") {
                pi.set(slot,
                       inputs.cities_with_discards->count(city.sample_id) > 0 ? 0 : 1);
                continue;
            }
            if (list.size() == 1 && list[0] == "@coverage") {
                const auto row = coverage.find(city.sample_id);
                double fraction = 0.0;
                if (row != coverage.end() && row->second.total_fields > 0) {
                    fraction = static_cast<double>(row->second.answered_fields) /
                               static_cast<double>(row->second.total_fields);
                }
                const auto [lo, hi] = pi_range(slot);
                pi.set(slot, std::clamp(static_cast<int>(std::floor(
                                            hi * fraction + 0.5)),
                                        lo, hi));
                continue;
            }
            int flag = 0;
            for (const auto& question : answered) {
                if (question_matches(question, list)) {
                    flag = 1;
                    break;
                }
            }
            pi.set(slot, flag);
        }
        out.push_back(pi);
    }
    return out;
}

QualityIndicator quality_indicator(const SampleStatistics& stats, int answered_fields,
                                   int total_fields) {
    if (total_fields <= 0) {
        throw Error(ErrorCode::InvalidArgument, "quality_indicator: total_fields must be > 0");
    }
    const double coverage =
        static_cast<double>(answered_fields) / static_cast<double>(total_fields);
    const double dictionary_share =
        static_cast<double>(stats.wd_r) /
        static_cast<double>(std::max<long long>(stats.wc_r, 1));
    QualityIndicator ind;
    ind.sample_id = stats.sample_id;
    ind.ind = 0.7 * coverage + 0.3 * dictionary_share;
    return ind;
}

void assign_deciles(std::vector<QualityIndicator>& population) {
    if (population.empty()) return;
    std::vector<std::size_t> order(population.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (population[a].ind != population[b].ind) {
            return population[a].ind > population[b].ind;
        }
        return population[a].sample_id < population[b].sample_id;
    });
    const std::size_t n = population.size();
    const std::size_t bucket = (n + 9) / 10; // ceil(n/10)
    std::size_t rank_of_value = 0;
    for (std::size_t r = 0; r < n; ++r) {
        if (r == 0 || population[order[r]].ind != population[order[r - 1]].ind) {
            rank_of_value = r;
        }
        const int decile = static_cast<int>(rank_of_value / bucket) + 1;
        population[order[r]].decile = std::min(decile, 10);
    }
}

std::vector<RegionalRow> regional_breakdown(const ClusterPartition& partition,
                                            const std::vector<QualityIndicator>& inds,
                                            const std::vector<City>& cities) {
    std::map<long long, const QualityIndicator*> ind_by_id;
    for (const auto& ind : inds) ind_by_id[ind.sample_id] = &ind;

    std::map<std::pair<int, int>, RegionalRow> grouped; // (region, cluster)
    for (const auto& city : cities) {
        const auto assigned = partition.assignments.find(city.sample_id);
        if (assigned == partition.assignments.end()) continue;
        const auto key = std::make_pair(static_cast<int>(city.region), assigned->second);
        auto& row = grouped[key];
        row.region = city.region;
        row.cluster = assigned->second;
        ++row.count;
        const auto ind = ind_by_id.find(city.sample_id);
        if (ind != ind_by_id.end()) {
            ++row.decile_histogram[static_cast<std::size_t>(ind->second->decile - 1)];
        }
    }
    std::vector<RegionalRow> out;
    out.reserve(grouped.size());
    for (const auto& [key, row] : grouped) {
        (void)key;
        out.push_back(row);
    }
    return out;
}

void write_erml_report(const std::string& path, const std::vector<City>& cities,
                       const std::vector<ProcessPIVector>& vectors) {
    std::map<long long, const City*> city_by_id;
    for (const auto& city : cities) city_by_id[city.sample_id] = &city;

    CsvWriter writer(path);
    writer.write_row({"sample_id", "city", "erm_l", "data_modeling", "data_acquisition",
                      "data_processing", "data_analysis", "report_building",
                      "report_publishing", "deployment", "monitoring"});
    for (const auto& pi : vectors) {
        const auto city = city_by_id.find(pi.sample_id);
        writer.write_row({std::to_string(pi.sample_id),
                          city != city_by_id.end() ? city->second->name : "",
                          std::to_string(derive_erml(pi).level), std::to_string(pi.dm),
                          pi.da_digits(), std::to_string(pi.dp), std::to_string(pi.dan),
                          std::to_string(pi.rb), std::to_string(pi.rp),
                          std::to_string(pi.dep), std::to_string(pi.mon)});
    }
}

void write_quality_indicators(const std::string& path,
                              const std::vector<QualityIndicator>& inds) {
    CsvWriter writer(path);
    writer.write_row({"sample_id", "ind", "decile"});
    for (const auto& ind : inds) {
        writer.write_row({std::to_string(ind.sample_id), format_double(ind.ind),
                          std::to_string(ind.decile)});
    }
}

void write_cem_evaluation(const std::string& path, const ProcessPIVector& vector) {
    CsvWriter writer(path);
    writer.write_row({"process", "pi"});
    for (const auto& slot : pi_slots()) {
        writer.write_row({pi_slot_token(slot), std::to_string(vector.get(slot))});
    }
}

void write_regional_report(const std::string& path, const std::vector<RegionalRow>& rows) {
    CsvWriter writer(path);
    CsvRow header{"region", "cluster", "count"};
    for (int d = 1; d <= 10; ++d) header.push_back("decile_" + std::to_string(d));
    writer.write_row(header);
    for (const auto& row : rows) {
        CsvRow cells{region_name(row.region),
                     row.cluster == kNoise ? "noise" : std::to_string(row.cluster),
                     std::to_string(row.count)};
        for (const int count : row.decile_histogram) cells.push_back(std::to_string(count));
        writer.write_row(cells);
    }
}

} // namespace ermm
