#include "core/filter.hpp"

#include "core/error.hpp"
#include "core/text.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ermm {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(part);
            part.clear();
        } else {
            part.push_back(c);
        }
    }
    parts.push_back(part);
    return parts;
}

bool pattern_matches_value(const std::string& pattern, const std::string& value) {
    if (!pattern.empty() && pattern.back() == '*') {
        return starts_with(value, pattern.substr(0, pattern.size() - 1));
    }
    return value == pattern;
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (base_dir.empty() || path.empty() || path.front() == '/') return path;
    return base_dir + "/" + path;
}

} // namespace

FilterExpression parse_filter(const std::string& text) {
    FilterExpression expr;
    for (const std::string& raw_clause : split(text, ';')) {
        const std::string clause_text = trim(raw_clause);
        if (clause_text.empty()) {
            throw Error(ErrorCode::FilterSyntax, "empty filter clause");
        }
        FilterClause clause;
        if (starts_with(clause_text, "I:")) {
            clause.mode = FilterClause::Mode::Include;
        } else if (starts_with(clause_text, "E:")) {
            clause.mode = FilterClause::Mode::Exclude;
        } else {
            throw Error(ErrorCode::FilterSyntax,
                        "clause must start with 'I:' or 'E:': '" + clause_text + "'");
        }
        const std::string body = clause_text.substr(2);
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::FilterSyntax, "clause has no '=': '" + clause_text + "'");
        }
        clause.key = trim(body.substr(0, eq));
        if (clause.key.empty()) {
            throw Error(ErrorCode::FilterSyntax, "clause has empty key");
        }
        for (const std::string& raw_pattern : split(body.substr(eq + 1), ',')) {
            const std::string pattern = trim(raw_pattern);
            if (pattern.empty()) {
                throw Error(ErrorCode::FilterSyntax, "empty pattern in clause");
            }
            if (pattern.front() == '@' && clause.key != "#SampleId") {
                throw Error(ErrorCode::FilterSyntax,
                            "'@file' patterns are only valid for #SampleId");
            }
            clause.patterns.push_back(pattern);
        }
        expr.clauses.push_back(std::move(clause));
    }
    if (expr.clauses.empty()) {
        throw Error(ErrorCode::FilterSyntax, "filter has no clauses");
    }
    return expr;
}

std::string render_filter(const FilterExpression& expr) {
    std::string out;
    for (std::size_t i = 0; i < expr.clauses.size(); ++i) {
        const auto& clause = expr.clauses[i];
        if (i > 0) out.push_back(';');
        out += clause.mode == FilterClause::Mode::Include ? "I:" : "E:";
        out += clause.key;
        out.push_back('=');
        for (std::size_t p = 0; p < clause.patterns.size(); ++p) {
            if (p > 0) out.push_back(',');
            out += clause.patterns[p];
        }
    }
    return out;
}

namespace {

// The value a record exposes for a filter key. Column-name keys address the
// 18 disclosure columns; meta keys start with '#'.
std::optional<std::string> record_value(const AnswerRecord& r,
                                        const ModelDefinition& model,
                                        const std::string& key) {
    if (key == "#FieldType") {
        const Question* q = model.resolve(r.question_number, r.column_number);
        if (q == nullptr) return std::nullopt;
        return std::string(qtype_name(q->type));
    }
    if (key == "#SampleId") return std::to_string(r.sample_id);
    if (key == "Questionnaire") return r.questionnaire;
    if (key == "Year Reported to CDP") return std::to_string(r.year_reported);
    if (key == "Account Number") return std::to_string(r.sample_id);
    if (key == "Organisation") return r.organisation;
    if (key == "Country") return r.country;
    if (key == "CDP Region") return std::string(region_name(r.region));
    if (key == "Parent Section") return r.parent_section;
    if (key == "Section") return r.section;
    if (key == "Question Number") return r.question_number;
    if (key == "Question Name") return r.question_name;
    if (key == "Column Number") return std::to_string(r.column_number);
    if (key == "Column Name") return r.column_name;
    if (key == "Row Number") return std::to_string(r.row_number);
    if (key == "Row Name") return r.row_name;
    if (key == "Response Answer") return r.response_answer;
    if (key == "Comments") return r.comments;
    if (key == "File Name") return r.file_name;
    if (key == "Last update") return r.last_update;
    throw Error(ErrorCode::UnknownKey, "unknown filter key '" + key + "'");
}

} // namespace

bool record_matches(const AnswerRecord& record, const ModelDefinition& model,
                    const std::string& key, const std::vector<std::string>& patterns,
                    const std::string& base_dir) {
    const auto value = record_value(record, model, key);
    if (!value) return false;
    for (const auto& pattern : patterns) {
        if (!pattern.empty() && pattern.front() == '@') {
            for (long long id : read_samples_file(resolve_path(base_dir, pattern.substr(1)))) {
                if (record.sample_id == id) return true;
            }
            continue;
        }
        if (pattern_matches_value(pattern, *value)) return true;
    }
    return false;
}

WorkingSet apply_filter(const FilterExpression& expr, const WorkingSet& ws, RunLog& log,
                        const std::string& base_dir) {
    WorkingSet out;
    out.model = ws.model;
    out.records = ws.records;

    for (const auto& clause : expr.clauses) {
        // resolve @file patterns once per clause
        std::set<long long> file_ids;
        std::vector<std::string> plain_patterns;
        for (const auto& pattern : clause.patterns) {
            if (!pattern.empty() && pattern.front() == '@') {
                for (long long id :
                     read_samples_file(resolve_path(base_dir, pattern.substr(1)))) {
                    file_ids.insert(id);
                }
            } else {
                plain_patterns.push_back(pattern);
            }
        }

        const std::size_t before = out.records.size();
        std::vector<AnswerRecord> kept;
        kept.reserve(out.records.size());
        for (auto& record : out.records) {
            bool matched = file_ids.count(record.sample_id) > 0;
            if (!matched && !plain_patterns.empty()) {
                matched = record_matches(record, *ws.model, clause.key, plain_patterns);
            }
            const bool keep = clause.mode == FilterClause::Mode::Include ? matched
                                                                         : !matched;
            if (keep) kept.push_back(std::move(record));
        }
        out.records = std::move(kept);
        log.info("filter clause '" +
                 render_filter(FilterExpression{{clause}}) + "' kept " +
                 std::to_string(out.records.size()) + " of " + std::to_string(before) +
                 " records");
    }

    std::set<long long> surviving;
    for (const auto& record : out.records) surviving.insert(record.sample_id);
    for (const auto& city : ws.cities) {
        if (surviving.count(city.sample_id) > 0) out.cities.push_back(city);
    }
    for (const auto& external : ws.externals) {
        if (surviving.count(external.resolved_sample_id) > 0) {
            out.externals.push_back(external);
        }
    }
    return out;
}

} // namespace ermm
