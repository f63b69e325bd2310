#include "core/encode.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ermm {

int dl_distance(const std::string& a, const std::string& b) {
    const auto s = utf8_decode(a);
    const auto t = utf8_decode(b);
    const std::size_t n = s.size();
    const std::size_t m = t.size();
    if (n == 0) return static_cast<int>(m);
    if (m == 0) return static_cast<int>(n);

    std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const int cost = s[i - 1] == t[j - 1] ? 0 : 1;
            int best = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
            if (i > 1 && j > 1 && s[i - 1] == t[j - 2] && s[i - 2] == t[j - 1]) {
                best = std::min(best, d[i - 2][j - 2] + 1);
            }
            d[i][j] = best;
        }
    }
    return d[n][m];
}

int correct_option(const std::string& raw, const Question& q, int max_dist) {
    int best_code = kNotFound;
    int best_dist = -1;
    bool tie = false;
    for (const auto& option : q.options) {
        const int dist = dl_distance(raw, option.text);
        if (best_dist < 0 || dist < best_dist) {
            best_dist = dist;
            best_code = option.code;
            tie = false;
        } else if (dist == best_dist) {
            tie = true;
        }
    }
    if (best_dist < 0 || best_dist > max_dist || tie) return kNotFound;
    return best_code;
}

const char* answer_flag_name(AnswerFlag flag) {
    switch (flag) {
    case AnswerFlag::NotAnswered: return "not-answered";
    case AnswerFlag::Answered: return "answered";
    case AnswerFlag::Corrected: return "corrected";
    case AnswerFlag::Defaulted: return "defaulted";
    }
    return "?";
}

std::pair<double, AnswerFlag> coerce_numeric(const std::string& raw, const Question& q) {
    (void)q;
    const auto value = parse_flexible_number(raw);
    if (!value) return {0.0, AnswerFlag::Defaulted};
    return {*value, AnswerFlag::Answered};
}

std::pair<double, AnswerFlag> range_check(const Question& q, double value) {
    if (!q.range_checked) return {value, AnswerFlag::Answered};
    if (value >= q.range_min && value <= q.range_max) {
        return {value, AnswerFlag::Answered};
    }
    // scaling-error repair: smallest power of ten that lands inside,
    // scaling down before scaling up
    for (int magnitude = 1; magnitude <= 6; ++magnitude) {
        for (const double factor : {std::pow(10.0, -magnitude), std::pow(10.0, magnitude)}) {
            const double scaled = value * factor;
            if (scaled >= q.range_min && scaled <= q.range_max) {
                return {scaled, AnswerFlag::Corrected};
            }
        }
    }
    return {0.0, AnswerFlag::Defaulted};
}

std::string FieldSpec::id() const {
    if (column_number == 0) return question_number;
    return question_number + ":" + std::to_string(column_number);
}

std::optional<std::size_t> EncodingPlan::field_index(const std::string& id) const {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i].id() == id) return i;
    }
    return std::nullopt;
}

namespace {

AnswerFlag stronger(AnswerFlag a, AnswerFlag b) {
    auto rank = [](AnswerFlag f) {
        switch (f) {
        case AnswerFlag::Answered: return 3;
        case AnswerFlag::Corrected: return 2;
        case AnswerFlag::Defaulted: return 1;
        case AnswerFlag::NotAnswered: return 0;
        }
        return 0;
    };
    return rank(a) >= rank(b) ? a : b;
}

std::optional<std::string> compact_iso_date(const std::string& raw) {
    const std::string t = trim(raw);
    auto digits = [](const std::string& s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
            return std::isdigit(c) != 0;
        });
    };
    if (t.size() == 8 && digits(t)) return t;
    if (t.size() == 10 && (t[4] == '-' || t[4] == '/') && t[7] == t[4] &&
        digits(t.substr(0, 4)) && digits(t.substr(5, 2)) && digits(t.substr(8, 2))) {
        return t.substr(0, 4) + t.substr(5, 2) + t.substr(8, 2);
    }
    return std::nullopt;
}

// Conversion of one row value; the numeric mitigation chain is
// coerce -> range check -> domain rule.
std::pair<std::string, AnswerFlag> convert_row_value(const std::string& raw,
                                                     const Question& q,
                                                     const EncodeOptions& opts,
                                                     RunLog* log, long long sample_id) {
    const std::string value = trim(raw);

    if (is_select(q.type)) {
        if (value.empty()) return {"0", AnswerFlag::NotAnswered};
        if (const AnswerOption* option = q.find_option(value)) {
            return {std::to_string(option->code), AnswerFlag::Answered};
        }
        const int corrected = correct_option(value, q, opts.max_dist);
        if (corrected != kNotFound) {
            if (log != nullptr) {
                log->info("corrected answer '" + value + "' to option " +
                              std::to_string(corrected) + " of question '" + q.number + "'",
                          sample_id);
            }
            return {std::to_string(corrected), AnswerFlag::Corrected};
        }
        if (log != nullptr) {
            log->warning("no option of question '" + q.number + "' within distance " +
                             std::to_string(opts.max_dist) + " of '" + value + "'",
                         sample_id);
        }
        return {"0", AnswerFlag::Defaulted};
    }

    switch (q.domain) {
    case Domain::Text:
        return {value.empty() ? "0" : "1",
                value.empty() ? AnswerFlag::NotAnswered : AnswerFlag::Answered};
    case Domain::Date: {
        if (value.empty()) return {"0", AnswerFlag::NotAnswered};
        const auto compact = compact_iso_date(value);
        if (!compact) {
            if (log != nullptr) {
                log->warning("unparseable date '" + value + "' for question '" +
                                 q.number + "'",
                             sample_id);
            }
            return {"0", AnswerFlag::Defaulted};
        }
        return {*compact, AnswerFlag::Answered};
    }
    case Domain::Number:
    case Domain::Integer:
    case Domain::Year: {
        if (value.empty()) return {"0", AnswerFlag::NotAnswered};
        auto [parsed, flag] = coerce_numeric(value, q);
        if (flag == AnswerFlag::Defaulted) {
            if (log != nullptr) {
                log->warning("non-numeric answer '" + value + "' for question '" +
                                 q.number + "' set to zero / not answered",
                             sample_id);
            }
            return {"0", AnswerFlag::Defaulted};
        }
        if (q.range_checked) {
            auto [checked, check_flag] = range_check(q, parsed);
            if (check_flag == AnswerFlag::Corrected && log != nullptr) {
                log->info("rescaled out-of-range answer " + format_double(parsed) +
                              " to " + format_double(checked) + " for question '" +
                              q.number + "'",
                          sample_id);
            }
            if (check_flag == AnswerFlag::Defaulted) {
                if (log != nullptr) {
                    log->warning("answer " + format_double(parsed) +
                                     " outside range of question '" + q.number +
                                     "' set to zero / not answered",
                                 sample_id);
                }
                return {"0", AnswerFlag::Defaulted};
            }
            parsed = checked;
            if (check_flag == AnswerFlag::Corrected) flag = AnswerFlag::Corrected;
        }
        if (q.domain == Domain::Number) {
            if (parsed < 0.0) {
                if (log != nullptr) {
                    log->warning("negative value " + format_double(parsed) +
                                     " for question '" + q.number +
                                     "' set to zero / not answered",
                                 sample_id);
                }
                return {"0", AnswerFlag::Defaulted};
            }
            return {format_double(std::log10(1.0 + parsed)), flag};
        }
        if (q.domain == Domain::Integer) {
            return {std::to_string(std::llround(parsed)), flag};
        }
        // Year: distance from the base year, earlier years further away
        return {std::to_string(opts.base_year - std::llround(parsed)), flag};
    }
    }
    return {"0", AnswerFlag::NotAnswered};
}

} // namespace

std::pair<std::string, AnswerFlag> to_textual(const std::vector<std::string>& row_values,
                                              const Question& q,
                                              const EncodeOptions& opts, RunLog* log,
                                              long long sample_id) {
    if (row_values.empty()) return {"", AnswerFlag::NotAnswered};
    std::string joined;
    AnswerFlag flag = AnswerFlag::NotAnswered;
    for (std::size_t i = 0; i < row_values.size(); ++i) {
        auto [text, row_flag] = convert_row_value(row_values[i], q, opts, log, sample_id);
        if (i > 0) joined.push_back(':');
        joined += text;
        flag = stronger(flag, row_flag);
    }
    return {joined, flag};
}

std::vector<FieldSpec> build_field_order(const ModelDefinition& model,
                                         bool with_externals) {
    std::vector<FieldSpec> fields;
    for (const auto& q : model.questions) {
        if (q.type == QType::Table) {
            for (std::size_t c = 0; c < q.columns.size(); ++c) {
                const Question& column = q.columns[c];
                FieldSpec spec;
                spec.question_number = q.number;
                spec.column_number = static_cast<int>(c) + 1;
                spec.type = column.type;
                spec.domain = column.domain;
                spec.option_count = static_cast<int>(column.options.size());
                spec.table_member = true;
                fields.push_back(spec);
            }
        } else {
            FieldSpec spec;
            spec.question_number = q.number;
            spec.column_number = 0;
            spec.type = q.type;
            spec.domain = q.domain;
            spec.option_count = static_cast<int>(q.options.size());
            fields.push_back(spec);
        }
    }
    if (with_externals) {
        for (int k = 0; k < kIndicatorCount; ++k) {
            const auto kind = static_cast<IndicatorKind>(k);
            FieldSpec spec;
            spec.question_number = std::string("#") + indicator_name(kind);
            spec.column_number = 0;
            spec.type = QType::Nullable;
            spec.domain = (kind == IndicatorKind::HAS_PLAN || kind == IndicatorKind::HAS_TARGET)
                              ? Domain::Integer
                              : Domain::Number;
            spec.external = true;
            spec.external_kind = kind;
            fields.push_back(spec);
        }
    }
    return fields;
}

int thermometer_fill(int slot_size, double value, double lo, double hi) {
    if (!(hi > lo)) return 0;
    if (value >= hi) return slot_size;
    if (value <= lo) return 0;
    const int bits = static_cast<int>(std::floor(slot_size * (value - lo) / (hi - lo)));
    return std::clamp(bits, 0, slot_size);
}

std::string encode_thermometer(int slot_size, int set_bits) {
    std::string bits(static_cast<std::size_t>(slot_size), '0');
    const int n = std::clamp(set_bits, 0, slot_size);
    std::fill(bits.begin(), bits.begin() + n, '1');
    return bits;
}

std::string encode_bitmap(int slot_size, int option_count, const std::vector<int>& codes) {
    std::string bits(static_cast<std::size_t>(slot_size), '0');
    if (option_count <= 0) return bits;
    const int segment = slot_size / option_count;
    if (segment <= 0) return bits;
    for (int code : codes) {
        if (code < 1 || code > option_count) continue;
        const int begin = (code - 1) * segment;
        for (int i = 0; i < segment; ++i) bits[static_cast<std::size_t>(begin + i)] = '1';
    }
    return bits;
}

std::vector<std::string> split_rows(const std::string& textual_cell) {
    if (textual_cell.empty()) return {};
    std::vector<std::string> rows;
    std::string row;
    for (char c : textual_cell) {
        if (c == ':') {
            rows.push_back(row);
            row.clear();
        } else {
            row.push_back(c);
        }
    }
    rows.push_back(row);
    return rows;
}

bool textual_field_answered(const FieldSpec& field, const std::string& textual_cell) {
    (void)field;
    for (const auto& row : split_rows(textual_cell)) {
        if (row.empty()) continue;
        const auto value = parse_flexible_number(row);
        if (value && *value != 0.0) return true;
    }
    return false;
}

std::string binarize_field(const std::string& textual_cell, const FieldSpec& field,
                           const EncodingPlan& plan, std::size_t field_index) {
    const int slot = plan.slot_size;
    const auto rows = split_rows(textual_cell);

    if (field.type == QType::MultiSelect) {
        std::vector<int> codes;
        for (const auto& row : rows) {
            const auto value = parse_flexible_number(row);
            if (value) codes.push_back(static_cast<int>(*value));
        }
        return encode_bitmap(slot, field.option_count, codes);
    }
    if (field.type == QType::SingleSelect || field.type == QType::YesNo) {
        // thermometer up to the option position; rows superpose by OR,
        // hence the maximum code wins
        int max_code = 0;
        for (const auto& row : rows) {
            const auto value = parse_flexible_number(row);
            if (value) max_code = std::max(max_code, static_cast<int>(*value));
        }
        return encode_thermometer(slot, max_code);
    }
    if (field.domain == Domain::Text) {
        bool any = false;
        for (const auto& row : rows) {
            if (row == "1") any = true;
        }
        return std::string(static_cast<std::size_t>(slot), any ? '1' : '0');
    }

    // numeric thermometer scaled by the per-field stats
    const auto stats_it = plan.numeric_stats.find(field_index);
    const NumericFieldStats stats =
        stats_it == plan.numeric_stats.end() ? NumericFieldStats{} : stats_it->second;
    std::string bits(static_cast<std::size_t>(slot), '0');
    for (const auto& row : rows) {
        const auto value = parse_flexible_number(row);
        if (!value) continue;
        const int fill = thermometer_fill(slot, *value, stats.min, stats.max);
        for (int i = 0; i < fill; ++i) bits[static_cast<std::size_t>(i)] = '1';
    }
    return bits;
}

namespace {

int digit_count(const std::string& text) {
    int count = 0;
    for (char c : text) {
        if (c >= '0' && c <= '9') ++count;
    }
    return count;
}

} // namespace

EncodeResult encode_working_set(const WorkingSet& ws, const EncodeOptions& opts,
                                RunLog& log) {
    EncodeResult result;
    result.plan.base_year = opts.base_year;
    result.plan.fields = build_field_order(*ws.model, opts.include_externals);
    const auto& fields = result.plan.fields;

    // raw row values per (sample, field), ordered by row number
    struct Cell {
        std::vector<std::pair<int, std::string>> rows;
    };
    std::map<long long, std::vector<Cell>> cells;
    for (const auto& city : ws.cities) {
        cells[city.sample_id].resize(fields.size());
    }
    std::map<std::pair<std::string, int>, std::size_t> field_by_key;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        field_by_key[{fields[i].question_number, fields[i].column_number}] = i;
    }
    for (const auto& record : ws.records) {
        const auto it = field_by_key.find({record.question_number, record.column_number});
        if (it == field_by_key.end()) {
            log.warning("record for question '" + record.question_number + "' column " +
                            std::to_string(record.column_number) +
                            " has no field in the encoding plan",
                        record.sample_id);
            continue;
        }
        cells[record.sample_id][it->second].rows.emplace_back(record.row_number,
                                                              record.response_answer);
    }
    for (const auto& external : ws.externals) {
        if (external.resolved_sample_id < 0) continue;
        const auto cell_it = cells.find(external.resolved_sample_id);
        if (cell_it == cells.end()) continue;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (fields[i].external && fields[i].external_kind == external.kind) {
                cell_it->second[i].rows.emplace_back(0, format_double(external.value));
            }
        }
    }

    // textual pass, in sample id order
    for (auto& [sample_id, sample_cells] : cells) {
        EncodedSample sample;
        sample.sample_id = sample_id;
        sample.textual.resize(fields.size());
        sample.flags.resize(fields.size(), AnswerFlag::NotAnswered);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            auto& rows = sample_cells[i].rows;
            std::stable_sort(rows.begin(), rows.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            std::vector<std::string> values;
            values.reserve(rows.size());
            for (const auto& [row_no, value] : rows) {
                (void)row_no;
                values.push_back(value);
            }
            Question synthetic;
            const Question* question = nullptr;
            if (fields[i].external) {
                synthetic.number = fields[i].question_number;
                synthetic.type = QType::Nullable;
                synthetic.domain = fields[i].domain;
                question = &synthetic;
            } else {
                question = ws.model->resolve(fields[i].question_number,
                                             fields[i].column_number);
            }
            if (question == nullptr) continue;
            auto [text, flag] = to_textual(values, *question, opts, &log, sample_id);
            sample.textual[i] = text;
            sample.flags[i] = flag;
        }
        result.samples.push_back(std::move(sample));
    }

    // slot size and numeric stats over the processed values
    int slot = 1;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& field = fields[i];
        if (is_select(field.type)) {
            slot = std::max(slot, field.option_count);
            continue;
        }
        if (field.domain == Domain::Text) continue;
        NumericFieldStats stats;
        bool first = true;
        double sum = 0.0;
        for (const auto& sample : result.samples) {
            if (sample.flags[i] != AnswerFlag::Answered &&
                sample.flags[i] != AnswerFlag::Corrected) {
                continue;
            }
            for (const auto& row : split_rows(sample.textual[i])) {
                const auto value = parse_flexible_number(row);
                if (!value) continue;
                slot = std::max(slot, digit_count(row));
                if (first) {
                    stats.min = stats.max = *value;
                    first = false;
                } else {
                    stats.min = std::min(stats.min, *value);
                    stats.max = std::max(stats.max, *value);
                }
                sum += *value;
                ++stats.nonempty;
            }
        }
        if (stats.nonempty > 0) stats.mean = sum / static_cast<double>(stats.nonempty);
        result.plan.numeric_stats[i] = stats;
    }
    result.plan.slot_size = slot;

    // binary pass
    for (auto& sample : result.samples) {
        sample.bits.reserve(result.plan.bit_length());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            sample.bits += binarize_field(sample.textual[i], fields[i], result.plan, i);
        }
    }
    return result;
}

std::set<std::string> load_dictionary(const std::string& path) {
    const std::string content = read_text_file(path);
    std::set<std::string> words;
    std::istringstream stream(content);
    std::string line;
    while (std::getline(stream, line)) {
        const std::string word = to_lower_ascii(trim(line));
        if (!word.empty() && word[0] != '#') words.insert(word);
    }
    return words;
}

std::vector<SampleStatistics> collect_statistics(const WorkingSet& ws,
                                                 const std::set<std::string>& dictionary) {
    struct Accumulator {
        SampleStatistics stats;
        std::set<std::string> unique_r;
        std::set<std::string> unique_c;
        std::set<std::string> answered_tables;          // table question numbers
        std::set<std::pair<std::string, int>> answered; // non-table fields
    };
    std::map<long long, Accumulator> acc;
    for (const auto& city : ws.cities) {
        acc[city.sample_id].stats.sample_id = city.sample_id;
    }

    for (const auto& record : ws.records) {
        auto it = acc.find(record.sample_id);
        if (it == acc.end()) continue;
        Accumulator& a = it->second;

        const std::string answer = trim(record.response_answer);
        a.stats.cc_r += static_cast<long long>(codepoint_count(record.response_answer));
        a.stats.cc_c += static_cast<long long>(codepoint_count(record.comments));
        for (const auto& word : tokenize_words(record.response_answer)) {
            ++a.stats.wc_r;
            const std::string folded = to_lower_ascii(word);
            if (a.unique_r.insert(folded).second) ++a.stats.wu_r;
            if (dictionary.count(folded) > 0) ++a.stats.wd_r;
        }
        for (const auto& word : tokenize_words(record.comments)) {
            ++a.stats.wc_c;
            const std::string folded = to_lower_ascii(word);
            if (a.unique_c.insert(folded).second) ++a.stats.wu_c;
            if (dictionary.count(folded) > 0) ++a.stats.wd_c;
        }
        if (answer.empty()) continue;

        const Question* parent = ws.model->find_question(record.question_number);
        if (parent == nullptr) continue;
        if (parent->type == QType::Table) {
            if (a.answered_tables.insert(parent->number).second) ++a.stats.table_count;
            continue;
        }
        if (!a.answered.insert({record.question_number, record.column_number}).second) {
            continue;
        }
        if (is_select(parent->type)) {
            ++a.stats.select_count;
            continue;
        }
        switch (parent->domain) {
        case Domain::Text: ++a.stats.text_count; break;
        case Domain::Number: ++a.stats.number_count; break;
        case Domain::Integer: ++a.stats.integer_count; break;
        case Domain::Year: ++a.stats.year_count; break;
        case Domain::Date: ++a.stats.date_count; break;
        }
    }

    std::vector<SampleStatistics> out;
    out.reserve(acc.size());
    for (const auto& [sample_id, a] : acc) {
        (void)sample_id;
        out.push_back(a.stats);
    }
    return out;
}

std::vector<CoverageRow> field_coverage(const WorkingSet& ws) {
    const auto fields = build_field_order(*ws.model, false);
    std::map<std::pair<std::string, int>, std::size_t> field_by_key;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        field_by_key[{fields[i].question_number, fields[i].column_number}] = i;
    }
    std::map<long long, std::set<std::size_t>> answered;
    for (const auto& city : ws.cities) answered[city.sample_id] = {};
    for (const auto& record : ws.records) {
        if (trim(record.response_answer).empty()) continue;
        const auto it = field_by_key.find({record.question_number, record.column_number});
        if (it == field_by_key.end()) continue;
        answered[record.sample_id].insert(it->second);
    }
    std::vector<CoverageRow> out;
    for (const auto& [sample_id, set] : answered) {
        out.push_back({sample_id, static_cast<int>(set.size()),
                       static_cast<int>(fields.size())});
    }
    return out;
}

void write_textual_csv(const std::string& path, const EncodeResult& result) {
    CsvWriter writer(path);
    CsvRow header{"sample_id"};
    for (const auto& field : result.plan.fields) header.push_back(field.id());
    writer.write_row(header);
    for (const auto& sample : result.samples) {
        CsvRow row{std::to_string(sample.sample_id)};
        row.insert(row.end(), sample.textual.begin(), sample.textual.end());
        writer.write_row(row);
    }
}

void write_binary_file(const std::string& path, const EncodeResult& result) {
    CsvWriter writer(path);
    for (const auto& sample : result.samples) {
        writer.write_row({std::to_string(sample.sample_id), sample.bits});
    }
}

void write_consolidation_csv(const std::string& path, const EncodeResult& result) {
    CsvWriter writer(path);
    writer.write_row({"field", "min", "max", "mean", "nonempty"});
    for (const auto& [index, stats] : result.plan.numeric_stats) {
        writer.write_row({result.plan.fields[index].id(), format_double(stats.min),
                          format_double(stats.max), format_double(stats.mean),
                          std::to_string(stats.nonempty)});
    }
}

void write_questions_list(const std::string& path, const ModelDefinition& model,
                          const EncodeResult& result) {
    std::ostringstream out;
    std::set<std::string> seen;
    for (const auto& field : result.plan.fields) {
        if (field.external) continue;
        if (!seen.insert(field.question_number).second) continue;
        const Question* q = model.find_question(field.question_number);
        if (q == nullptr) continue;
        out << q->number << " " << q->name << "\n";
        auto list_options = [&out](const Question& question) {
            if (question.type != QType::MultiSelect) return;
            for (const auto& option : question.options) {
                out << "  " << option.code << " " << option.text << "\n";
            }
        };
        list_options(*q);
        for (const auto& column : q->columns) list_options(column);
    }
    write_text_file(path, out.str());
}

void write_statistics_csv(const std::string& path,
                          const std::vector<SampleStatistics>& stats) {
    CsvWriter writer(path);
    writer.write_row({"SampleId", "TABLE", "SELECT", "TEXT", "NUMBER", "INTEGER", "YEAR",
                      "DATE", "CC_R", "CC_C", "WC_R", "WC_C", "WU_R", "WU_C", "WD_R",
                      "WD_C"});
    for (const auto& s : stats) {
        writer.write_row({std::to_string(s.sample_id), std::to_string(s.table_count),
                          std::to_string(s.select_count), std::to_string(s.text_count),
                          std::to_string(s.number_count), std::to_string(s.integer_count),
                          std::to_string(s.year_count), std::to_string(s.date_count),
                          std::to_string(s.cc_r), std::to_string(s.cc_c),
                          std::to_string(s.wc_r), std::to_string(s.wc_c),
                          std::to_string(s.wu_r), std::to_string(s.wu_c),
                          std::to_string(s.wd_r), std::to_string(s.wd_c)});
    }
}

void write_info_file(const std::string& path, const EncodeResult& result) {
    std::ostringstream out;
    out << "slot_size=" << result.plan.slot_size << "\n";
    out << "base_year=" << result.plan.base_year << "\n";
    out << "fields=" << result.plan.fields.size() << "\n";
    out << "samples=" << result.samples.size() << "\n";
    out << "bits_per_sample=" << result.plan.bit_length() << "\n";
    write_text_file(path, out.str());
}

TextualTable read_textual_csv(const std::string& path) {
    const auto rows = read_csv_file(path);
    if (rows.empty()) {
        throw Error(ErrorCode::UnreadableFile, "textual file has no header: " + path);
    }
    TextualTable table;
    table.field_ids.assign(rows[0].begin() + 1, rows[0].end());
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size()) {
            throw Error(ErrorCode::UnreadableFile,
                        "textual file row " + std::to_string(r + 1) + " is ragged");
        }
        table.sample_ids.push_back(std::stoll(rows[r][0]));
        table.rows.emplace_back(rows[r].begin() + 1, rows[r].end());
    }
    return table;
}

std::vector<std::pair<long long, std::string>> read_binary_file(const std::string& path) {
    const auto rows = read_csv_file(path);
    std::vector<std::pair<long long, std::string>> out;
    for (const auto& row : rows) {
        if (row.size() != 2) {
            throw Error(ErrorCode::UnreadableFile, "binary file row is malformed");
        }
        out.emplace_back(std::stoll(row[0]), row[1]);
    }
    return out;
}

} // namespace ermm
