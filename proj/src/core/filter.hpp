#pragma once

#include "core/ingest.hpp"

#include <string>
#include <vector>

namespace ermm {

// Filter language: clauses separated by ';', each "I:<key>=<patterns>" or
// "E:<key>=<patterns>" with patterns separated by ','. A pattern is a
// literal, a prefix wildcard "X*", or (for #SampleId only) "@file".
struct FilterClause {
    enum class Mode { Include, Exclude };
    Mode mode = Mode::Include;
    std::string key;
    std::vector<std::string> patterns;

    bool operator==(const FilterClause&) const = default;
};

struct FilterExpression {
    std::vector<FilterClause> clauses;

    bool operator==(const FilterExpression&) const = default;
};

FilterExpression parse_filter(const std::string& text);
std::string render_filter(const FilterExpression& expr);

// Applies clauses left to right; Include keeps matching records, Exclude
// removes them. Cities without surviving records are pruned. "@file"
// references are resolved relative to base_dir when it is non-empty.
WorkingSet apply_filter(const FilterExpression& expr, const WorkingSet& ws,
                        RunLog& log, const std::string& base_dir = {});

// True when the record matches "key=patterns" under the working set's model.
bool record_matches(const AnswerRecord& record, const ModelDefinition& model,
                    const std::string& key, const std::vector<std::string>& patterns,
                    const std::string& base_dir = {});

} // namespace ermm
