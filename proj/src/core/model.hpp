#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ermm {

enum class Domain { Date, Year, Number, Integer, Text };
enum class QType { Nullable, NotNull, SingleSelect, MultiSelect, Table, YesNo };

const char* domain_name(Domain d);
const char* qtype_name(QType t);
std::optional<Domain> parse_domain(const std::string& token);
std::optional<QType> parse_qtype(const std::string& token);

bool is_select(QType t);
bool is_numeric(Domain d);

// Option codes are 1-based; 0 is reserved for "not found / not answered".
struct AnswerOption {
    int code = 0;
    std::string text;
};

struct Question {
    std::string number;
    std::string name;
    std::string section_id;
    std::string parent_section;
    QType type = QType::Nullable;
    Domain domain = Domain::Text;
    std::vector<AnswerOption> options;
    bool range_checked = false;
    double range_min = 0.0;
    double range_max = 0.0;
    std::vector<Question> columns; // sub-questions of a Table question

    const AnswerOption* find_option(const std::string& text) const;
    const Question* find_column(int column_number) const;
};

enum class Region { NORAM, LATAM, EURO, SEASOC, AF, SWAS, EAS, ME };

const char* region_name(Region r);
std::optional<Region> parse_region(const std::string& token);

struct City {
    long long sample_id = 0;
    std::string name;
    std::string country;
    Region region = Region::NORAM;
};

struct ModelDefinition {
    std::string form_id;
    int reporting_year = 0;
    std::vector<std::pair<std::string, std::string>> sections;
    std::vector<Question> questions;

    const Question* find_question(const std::string& number) const;
    // Effective question for an answer cell: the column sub-question when
    // column_number > 0 on a Table question, the question itself otherwise.
    const Question* resolve(const std::string& number, int column_number) const;

  private:
    mutable std::map<std::string, std::size_t> index_;
    void build_index() const;
};

ModelDefinition load_model(const std::string& definition_file);

struct ValidationOutcome {
    enum class Kind { Ok, Recoverable, Fatal };
    Kind kind = Kind::Ok;
    std::string reason;

    static ValidationOutcome ok() { return {Kind::Ok, {}}; }
    static ValidationOutcome recoverable(std::string reason) {
        return {Kind::Recoverable, std::move(reason)};
    }
    static ValidationOutcome fatal(std::string reason) {
        return {Kind::Fatal, std::move(reason)};
    }
    bool is_ok() const { return kind == Kind::Ok; }
    bool is_recoverable() const { return kind == Kind::Recoverable; }
    bool is_fatal() const { return kind == Kind::Fatal; }
};

ValidationOutcome validate_answer(const Question& q, const std::string& raw);

} // namespace ermm
