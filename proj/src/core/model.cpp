#include "core/model.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/text.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ermm {

const char* domain_name(Domain d) {
    switch (d) {
    case Domain::Date: return "DATE";
    case Domain::Year: return "YEAR";
    case Domain::Number: return "NUMBER";
    case Domain::Integer: return "INTEGER";
    case Domain::Text: return "TEXT";
    }
    return "?";
}

const char* qtype_name(QType t) {
    switch (t) {
    case QType::Nullable: return "NULLABLE";
    case QType::NotNull: return "NOT_NULL";
    case QType::SingleSelect: return "SINGLE_SELECT";
    case QType::MultiSelect: return "MULTI_SELECT";
    case QType::Table: return "TABLE";
    case QType::YesNo: return "YN";
    }
    return "?";
}

std::optional<Domain> parse_domain(const std::string& token) {
    const std::string t = to_lower_ascii(trim(token));
    if (t == "date") return Domain::Date;
    if (t == "year") return Domain::Year;
    if (t == "number") return Domain::Number;
    if (t == "integer") return Domain::Integer;
    if (t == "text") return Domain::Text;
    return std::nullopt;
}

std::optional<QType> parse_qtype(const std::string& token) {
    const std::string t = to_lower_ascii(trim(token));
    if (t == "nullable" || t == "null") return QType::Nullable;
    if (t == "not_null" || t == "not-null") return QType::NotNull;
    if (t == "single_select" || t == "single-select") return QType::SingleSelect;
    if (t == "multi_select" || t == "multi-select") return QType::MultiSelect;
    if (t == "table") return QType::Table;
    if (t == "yn") return QType::YesNo;
    return std::nullopt;
}

bool is_select(QType t) {
    return t == QType::SingleSelect || t == QType::MultiSelect || t == QType::YesNo;
}

bool is_numeric(Domain d) {
    return d == Domain::Number || d == Domain::Integer || d == Domain::Year ||
           d == Domain::Date;
}

const AnswerOption* Question::find_option(const std::string& text) const {
    for (const auto& option : options) {
        if (option.text == text) return &option;
    }
    return nullptr;
}

const Question* Question::find_column(int column_number) const {
    if (column_number <= 0 || static_cast<std::size_t>(column_number) > columns.size()) {
        return nullptr;
    }
    return &columns[static_cast<std::size_t>(column_number) - 1];
}

const char* region_name(Region r) {
    switch (r) {
    case Region::NORAM: return "NORAM";
    case Region::LATAM: return "LATAM";
    case Region::EURO: return "EURO";
    case Region::SEASOC: return "SEASOC";
    case Region::AF: return "AF";
    case Region::SWAS: return "SWAS";
    case Region::EAS: return "EAS";
    case Region::ME: return "ME";
    }
    return "?";
}

std::optional<Region> parse_region(const std::string& token) {
    const std::string t = to_lower_ascii(trim(token));
    if (t == "noram") return Region::NORAM;
    if (t == "latam") return Region::LATAM;
    if (t == "euro") return Region::EURO;
    if (t == "seasoc") return Region::SEASOC;
    if (t == "af") return Region::AF;
    if (t == "swas") return Region::SWAS;
    if (t == "eas") return Region::EAS;
    if (t == "me") return Region::ME;
    return std::nullopt;
}

void ModelDefinition::build_index() const {
    if (!index_.empty() || questions.empty()) return;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        index_[questions[i].number] = i;
    }
}

const Question* ModelDefinition::find_question(const std::string& number) const {
    build_index();
    const auto it = index_.find(number);
    if (it == index_.end()) return nullptr;
    return &questions[it->second];
}

const Question* ModelDefinition::resolve(const std::string& number,
                                         int column_number) const {
    const Question* q = find_question(number);
    if (q == nullptr) return nullptr;
    if (q->type == QType::Table && column_number > 0) {
        return q->find_column(column_number);
    }
    return q;
}

namespace {

// Splits "a | b | c" on unescaped pipes and trims each part.
std::vector<std::string> split_pipes(const std::string& line) {
    std::vector<std::string> parts;
    std::string part;
    for (char c : line) {
        if (c == '|') {
            parts.push_back(trim(part));
            part.clear();
        } else {
            part.push_back(c);
        }
    }
    parts.push_back(trim(part));
    return parts;
}

struct KeyValue {
    std::string key;
    std::string value;
};

std::optional<KeyValue> split_assignment(const std::string& part) {
    const std::size_t eq = part.find('=');
    if (eq == std::string::npos) return std::nullopt;
    return KeyValue{to_lower_ascii(trim(part.substr(0, eq))), trim(part.substr(eq + 1))};
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
    std::ostringstream msg;
    msg << "model definition line " << line_no << ": " << why;
    throw Error(ErrorCode::MalformedDefinition, msg.str());
}

struct QuestionDraft {
    Question question;
    std::size_t line_no = 0;
    bool is_column = false;
};

void parse_range(const std::string& value, Question& q, std::size_t line_no) {
    const std::size_t dots = value.find("..");
    if (dots == std::string::npos) malformed(line_no, "range must be <min>..<max>");
    const auto lo = parse_flexible_number(value.substr(0, dots));
    const auto hi = parse_flexible_number(value.substr(dots + 2));
    if (!lo || !hi) malformed(line_no, "range bounds must be numeric");
    q.range_checked = true;
    q.range_min = *lo;
    q.range_max = *hi;
}

// "question: <number> | <name> | section=<id> | type=<t> | domain=<d> [| range=a..b]"
Question parse_question_header(const std::string& body, std::size_t line_no,
                               bool is_column) {
    const auto parts = split_pipes(body);
    if (parts.size() < 4) malformed(line_no, "expected number | name | key=value fields");
    Question q;
    q.number = parts[0];
    q.name = parts[1];
    if (q.number.empty()) malformed(line_no, "empty question number");
    for (std::size_t i = 2; i < parts.size(); ++i) {
        const auto kv = split_assignment(parts[i]);
        if (!kv) malformed(line_no, "expected key=value, got '" + parts[i] + "'");
        if (kv->key == "section") {
            q.section_id = kv->value;
        } else if (kv->key == "type") {
            const auto type = parse_qtype(kv->value);
            if (!type) malformed(line_no, "unknown question type '" + kv->value + "'");
            q.type = *type;
        } else if (kv->key == "domain") {
            const auto domain = parse_domain(kv->value);
            if (!domain) malformed(line_no, "unknown domain '" + kv->value + "'");
            q.domain = *domain;
        } else if (kv->key == "range") {
            parse_range(kv->value, q, line_no);
        } else {
            malformed(line_no, "unknown field '" + kv->key + "'");
        }
    }
    if (is_column && q.type == QType::Table) {
        malformed(line_no, "table columns cannot themselves be tables");
    }
    return q;
}

void finish_question(Question& q, std::size_t line_no) {
    if (q.type == QType::YesNo) {
        if (q.options.empty()) {
            q.options = {{1, "Yes"}, {2, "No"}};
        } else if (q.options.size() != 2 || q.options[0].text != "Yes" ||
                   q.options[1].text != "No") {
            malformed(line_no, "YN question '" + q.number + "' must have options Yes, No");
        }
    }
    const bool has_options = !q.options.empty();
    if (is_select(q.type) && !has_options) {
        malformed(line_no, "select question '" + q.number + "' has no options");
    }
    if (!is_select(q.type) && has_options) {
        malformed(line_no, "question '" + q.number + "' of type " +
                               qtype_name(q.type) + " cannot carry options");
    }
    if (q.range_checked && !(q.range_min < q.range_max)) {
        malformed(line_no, "question '" + q.number + "' has empty range");
    }
    std::set<std::string> texts;
    for (const auto& option : q.options) {
        if (!texts.insert(option.text).second) {
            malformed(line_no, "duplicate option text in question '" + q.number + "'");
        }
    }
    if (q.type == QType::Table && q.columns.empty()) {
        malformed(line_no, "table question '" + q.number + "' has no columns");
    }
    if (q.type != QType::Table && !q.columns.empty()) {
        malformed(line_no, "non-table question '" + q.number + "' has columns");
    }
}

} // namespace

ModelDefinition load_model(const std::string& definition_file) {
    const std::string content = read_text_file(definition_file);

    ModelDefinition model;
    std::optional<QuestionDraft> current;       // question being accumulated
    std::optional<QuestionDraft> current_column; // column of the current table

    auto close_column = [&]() {
        if (!current_column) return;
        finish_question(current_column->question, current_column->line_no);
        current->question.columns.push_back(std::move(current_column->question));
        current_column.reset();
    };
    auto close_question = [&]() {
        close_column();
        if (!current) return;
        finish_question(current->question, current->line_no);
        model.questions.push_back(std::move(current->question));
        current.reset();
    };

    std::istringstream stream(content);
    std::string raw_line;
    std::size_t line_no = 0;
    while (std::getline(stream, raw_line)) {
        ++line_no;
        if (!raw_line.empty() && raw_line.back() == '\r') raw_line.pop_back();
        const std::string line = trim(raw_line);
        if (line.empty() || line[0] == '#') continue;

        const std::size_t colon = line.find(':');
        if (colon == std::string::npos) malformed(line_no, "expected '<keyword>: ...'");
        const std::string keyword = to_lower_ascii(trim(line.substr(0, colon)));
        const std::string body = trim(line.substr(colon + 1));

        if (keyword == "form") {
            model.form_id = body;
        } else if (keyword == "year") {
            const auto year = parse_flexible_number(body);
            if (!year) malformed(line_no, "year must be numeric");
            model.reporting_year = static_cast<int>(*year);
        } else if (keyword == "section") {
            const auto parts = split_pipes(body);
            if (parts.size() != 2 || parts[0].empty()) {
                malformed(line_no, "section needs '<id> | <description>'");
            }
            model.sections.emplace_back(parts[0], parts[1]);
        } else if (keyword == "question") {
            close_question();
            QuestionDraft draft;
            draft.question = parse_question_header(body, line_no, false);
            draft.line_no = line_no;
            current = std::move(draft);
        } else if (keyword == "column") {
            if (!current || current->question.type != QType::Table) {
                malformed(line_no, "column outside a table question");
            }
            close_column();
            QuestionDraft draft;
            draft.question = parse_question_header(body, line_no, true);
            draft.line_no = line_no;
            draft.is_column = true;
            // columns are numbered by position, 1-based; the declared number
            // must match to keep the file readable
            const int expected = static_cast<int>(current->question.columns.size()) + 1;
            if (draft.question.number != std::to_string(expected)) {
                malformed(line_no, "column number must be " + std::to_string(expected));
            }
            draft.question.section_id = current->question.section_id;
            current_column = std::move(draft);
        } else if (keyword == "option") {
            if (body.empty()) malformed(line_no, "empty option text");
            Question* target = current_column ? &current_column->question
                              : current       ? &current->question
                                              : nullptr;
            if (target == nullptr) malformed(line_no, "option outside a question");
            target->options.push_back(
                {static_cast<int>(target->options.size()) + 1, body});
        } else {
            malformed(line_no, "unknown keyword '" + keyword + "'");
        }
    }
    close_question();

    if (model.form_id.empty()) {
        throw Error(ErrorCode::MalformedDefinition, "model definition has no form id");
    }

    std::set<std::string> section_ids;
    for (const auto& [id, description] : model.sections) {
        (void)description;
        section_ids.insert(id);
    }
    std::set<std::string> numbers;
    for (auto& q : model.questions) {
        if (!numbers.insert(q.number).second) {
            throw Error(ErrorCode::DuplicateQuestion,
                        "duplicate question number '" + q.number + "'");
        }
        if (section_ids.count(q.section_id) == 0) {
            throw Error(ErrorCode::DanglingSection,
                        "question '" + q.number + "' references unknown section '" +
                            q.section_id + "'");
        }
        q.parent_section = q.section_id;
        for (auto& column : q.columns) {
            column.parent_section = q.section_id;
        }
    }
    return model;
}

namespace {

bool strict_numeric(const std::string& raw, Domain domain) {
    const std::string t = trim(raw);
    if (t.empty()) return false;
    std::size_t i = 0;
    if (t[i] == '+' || t[i] == '-') ++i;
    bool digits = false;
    bool dot = false;
    for (; i < t.size(); ++i) {
        const char c = t[i];
        if (c >= '0' && c <= '9') {
            digits = true;
        } else if (c == '.' && !dot && domain == Domain::Number) {
            dot = true;
        } else {
            return false;
        }
    }
    return digits;
}

bool iso_date(const std::string& raw) {
    const std::string t = trim(raw);
    auto all_digits = [](const std::string& s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
            return std::isdigit(c) != 0;
        });
    };
    if (t.size() == 8 && all_digits(t)) return true;
    if (t.size() == 10 && (t[4] == '-' || t[4] == '/') && t[7] == t[4]) {
        return all_digits(t.substr(0, 4)) && all_digits(t.substr(5, 2)) &&
               all_digits(t.substr(8, 2));
    }
    return false;
}

} // namespace

ValidationOutcome validate_answer(const Question& q, const std::string& raw) {
    const std::string value = trim(raw);

    if (value.empty()) {
        if (q.type == QType::NotNull) {
            return ValidationOutcome::fatal("empty-not-null");
        }
        if (is_select(q.type)) {
            // representable as the "not answered" option code 0
            return ValidationOutcome::recoverable("empty-select");
        }
        return ValidationOutcome::ok();
    }

    if (is_select(q.type)) {
        if (q.find_option(value) != nullptr) return ValidationOutcome::ok();
        return ValidationOutcome::recoverable("option-mismatch");
    }

    if (q.type == QType::Table) {
        // cells of a table are validated against its column sub-questions
        return ValidationOutcome::ok();
    }

    switch (q.domain) {
    case Domain::Text:
        return ValidationOutcome::ok();
    case Domain::Date:
        if (iso_date(value)) return ValidationOutcome::ok();
        return ValidationOutcome::recoverable("date-format");
    case Domain::Number:
    case Domain::Integer:
    case Domain::Year: {
        if (!strict_numeric(value, q.domain)) {
            return ValidationOutcome::recoverable("numeric-coercion");
        }
        if (q.range_checked) {
            const auto parsed = parse_flexible_number(value);
            if (parsed && (*parsed < q.range_min || *parsed > q.range_max)) {
                return ValidationOutcome::recoverable("out-of-range");
            }
        }
        return ValidationOutcome::ok();
    }
    }
    return ValidationOutcome::ok();
}

} // namespace ermm
