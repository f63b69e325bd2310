#pragma once

#include "core/log.hpp"
#include "core/model.hpp"

#include <string>
#include <vector>

namespace ermm {

// One normalized cell of a disclosure form. column 0 / row 0 marks a
// direct (non-tabled) answer.
struct AnswerRecord {
    std::string questionnaire;
    int year_reported = 0;
    long long sample_id = 0;
    std::string organisation;
    std::string country;
    Region region = Region::NORAM;
    std::string parent_section;
    std::string section;
    std::string question_number;
    std::string question_name;
    int column_number = 0;
    std::string column_name;
    int row_number = 0;
    std::string row_name;
    std::string response_answer;
    std::string comments;
    std::string file_name;
    std::string last_update;
};

enum class IndicatorKind { GDP, SHDI, SCI, TOTAL_EMISSIONS_2019, HAS_PLAN, HAS_TARGET };

const char* indicator_name(IndicatorKind kind);
std::optional<IndicatorKind> parse_indicator(const std::string& token);
constexpr int kIndicatorCount = 6;

struct ExternalIndicatorRow {
    std::string key; // sample id or city name
    IndicatorKind kind = IndicatorKind::GDP;
    double value = 0.0;
    long long resolved_sample_id = -1; // set by join_externals
};

struct WorkingSet {
    const ModelDefinition* model = nullptr;
    std::vector<City> cities;
    std::vector<AnswerRecord> records;
    std::vector<ExternalIndicatorRow> externals;

    const City* find_city(long long sample_id) const;
    std::vector<long long> sample_ids() const;
};

// The 18 disclosure CSV column headers, in order.
extern const std::vector<std::string> kDisclosureHeader;

std::pair<WorkingSet, RunLog> parse_disclosure_csv(const std::string& file,
                                                   const ModelDefinition& model);

void write_disclosure_csv(const std::string& file, const WorkingSet& ws);

std::vector<ExternalIndicatorRow> parse_externals_csv(const std::string& file);
void write_externals_csv(const std::string& file,
                         const std::vector<ExternalIndicatorRow>& rows);

// Attaches external rows to cities: sample id match first, then the
// normalized city name. Unmatched or duplicate rows are logged, never fatal.
WorkingSet join_externals(WorkingSet ws, const std::vector<ExternalIndicatorRow>& tables,
                          RunLog& log);

// samples.txt format: one decimal sample id per line, '#' comments allowed.
std::vector<long long> read_samples_file(const std::string& path);

} // namespace ermm
