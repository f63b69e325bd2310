#pragma once

#include "core/ingest.hpp"
#include "core/log.hpp"
#include "core/model.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ermm {

// Restricted Damerau-Levenshtein distance (insert, delete, substitute,
// adjacent transposition; unit costs) over Unicode code points.
int dl_distance(const std::string& a, const std::string& b);

constexpr int kNotFound = 0;

// Option whose text minimizes dl_distance(raw, text), if that minimum is
// unique and <= max_dist; otherwise kNotFound.
int correct_option(const std::string& raw, const Question& q, int max_dist);

enum class AnswerFlag { NotAnswered, Answered, Corrected, Defaulted };

const char* answer_flag_name(AnswerFlag flag);

// Lenient numeric conversion; failures become (0, Defaulted).
std::pair<double, AnswerFlag> coerce_numeric(const std::string& raw, const Question& q);

// Out-of-range values are rescaled by the smallest power of ten that lands
// inside [range_min, range_max] (division tried before multiplication);
// when none does the value defaults to 0.
std::pair<double, AnswerFlag> range_check(const Question& q, double value);

struct EncodeOptions {
    int base_year = 2019;
    int max_dist = 3;
    bool include_externals = true;
};

// One entry of the field order shared by every sample of a run.
struct FieldSpec {
    std::string question_number; // "#GDP" etc. for external indicators
    int column_number = 0;       // 0 = direct answer, 1.. = table column
    QType type = QType::Nullable;
    Domain domain = Domain::Text;
    int option_count = 0;
    bool table_member = false; // belongs to a TABLE question
    bool external = false;
    IndicatorKind external_kind = IndicatorKind::GDP;

    std::string id() const;
};

struct NumericFieldStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    long long nonempty = 0; // answered entries contributing to the stats
};

struct EncodingPlan {
    int slot_size = 1;
    int base_year = 2019;
    std::vector<FieldSpec> fields;
    std::map<std::size_t, NumericFieldStats> numeric_stats; // by field index

    std::size_t bit_length() const { return fields.size() * static_cast<std::size_t>(slot_size); }
    std::optional<std::size_t> field_index(const std::string& id) const;
};

struct EncodedSample {
    long long sample_id = 0;
    std::vector<std::string> textual;  // per field; table rows ':'-joined
    std::vector<AnswerFlag> flags;     // per field, best row flag
    std::string bits;                  // '0'/'1', fields * slot_size chars
};

// Converts the raw row values of one field (row_number order) into the
// processed textual cell. The flag reports the strongest row outcome.
std::pair<std::string, AnswerFlag> to_textual(const std::vector<std::string>& row_values,
                                              const Question& q,
                                              const EncodeOptions& opts, RunLog* log,
                                              long long sample_id = -1);

std::vector<FieldSpec> build_field_order(const ModelDefinition& model,
                                         bool with_externals);

// --- binarization helpers ---

// Set-bit count for a thermometer of the given width: floor scaling with
// the value-at-max filling every bit; degenerate lo == hi encodes 0.
int thermometer_fill(int slot_size, double value, double lo, double hi);
std::string encode_thermometer(int slot_size, int set_bits);
// Bit-mapping for multi-select: option code c occupies the c-th segment of
// slot_size / option_count bits (1-based segments, code 0 sets nothing).
std::string encode_bitmap(int slot_size, int option_count, const std::vector<int>& codes);

// Splits a textual cell into per-row values ("" -> no rows).
std::vector<std::string> split_rows(const std::string& textual_cell);

// A field reads as answered when its textual cell carries any nonzero row;
// the binary picture and the feature vectors share this notion.
bool textual_field_answered(const FieldSpec& field, const std::string& textual_cell);

std::string binarize_field(const std::string& textual_cell, const FieldSpec& field,
                           const EncodingPlan& plan, std::size_t field_index);

// --- full pipeline over a working set ---

struct EncodeResult {
    EncodingPlan plan;
    std::vector<EncodedSample> samples; // sample_id order
};

EncodeResult encode_working_set(const WorkingSet& ws, const EncodeOptions& opts,
                                RunLog& log);

// --- per-city preprocessing statistics ---

struct SampleStatistics {
    long long sample_id = 0;
    int table_count = 0;
    int select_count = 0;
    int text_count = 0;
    int number_count = 0;
    int integer_count = 0;
    int year_count = 0;
    int date_count = 0;
    long long cc_r = 0, cc_c = 0; // characters in answers / comments
    long long wc_r = 0, wc_c = 0; // words
    long long wu_r = 0, wu_c = 0; // unique words
    long long wd_r = 0, wd_c = 0; // dictionary words
};

std::set<std::string> load_dictionary(const std::string& path);

std::vector<SampleStatistics> collect_statistics(const WorkingSet& ws,
                                                 const std::set<std::string>& dictionary);

// Answered-question coverage per city, over model fields only (externals
// excluded): fields with at least one non-empty response cell.
struct CoverageRow {
    long long sample_id = 0;
    int answered_fields = 0;
    int total_fields = 0;
};
std::vector<CoverageRow> field_coverage(const WorkingSet& ws);

// --- preprocessing artifact files ---

void write_textual_csv(const std::string& path, const EncodeResult& result);
void write_binary_file(const std::string& path, const EncodeResult& result);
void write_consolidation_csv(const std::string& path, const EncodeResult& result);
void write_questions_list(const std::string& path, const ModelDefinition& model,
                          const EncodeResult& result);
void write_statistics_csv(const std::string& path,
                          const std::vector<SampleStatistics>& stats);
void write_info_file(const std::string& path, const EncodeResult& result);

// Reads back the textual table: header of field ids plus one row per sample.
struct TextualTable {
    std::vector<std::string> field_ids;
    std::vector<long long> sample_ids;
    std::vector<std::vector<std::string>> rows;
};
TextualTable read_textual_csv(const std::string& path);
std::vector<std::pair<long long, std::string>> read_binary_file(const std::string& path);

} // namespace ermm
