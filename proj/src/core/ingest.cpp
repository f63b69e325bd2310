#include "core/ingest.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/text.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace ermm {

const std::vector<std::string> kDisclosureHeader = {
    "Questionnaire",  "Year Reported to CDP",
    "Account Number", "Organisation",
    "Country",        "CDP Region",
    "Parent Section", "Section",
    "Question Number", "Question Name",
    "Column Number",  "Column Name",
    "Row Number",     "Row Name",
    "Response Answer", "Comments",
    "File Name",      "Last update",
};

const char* indicator_name(IndicatorKind kind) {
    switch (kind) {
    case IndicatorKind::GDP: return "GDP";
    case IndicatorKind::SHDI: return "SHDI";
    case IndicatorKind::SCI: return "SCI";
    case IndicatorKind::TOTAL_EMISSIONS_2019: return "TOTAL_EMISSIONS_2019";
    case IndicatorKind::HAS_PLAN: return "HAS_PLAN";
    case IndicatorKind::HAS_TARGET: return "HAS_TARGET";
    }
    return "?";
}

std::optional<IndicatorKind> parse_indicator(const std::string& token) {
    const std::string t = to_lower_ascii(trim(token));
    if (t == "gdp") return IndicatorKind::GDP;
    if (t == "shdi") return IndicatorKind::SHDI;
    if (t == "sci") return IndicatorKind::SCI;
    if (t == "total_emissions_2019") return IndicatorKind::TOTAL_EMISSIONS_2019;
    if (t == "has_plan") return IndicatorKind::HAS_PLAN;
    if (t == "has_target") return IndicatorKind::HAS_TARGET;
    return std::nullopt;
}

const City* WorkingSet::find_city(long long sample_id) const {
    for (const auto& city : cities) {
        if (city.sample_id == sample_id) return &city;
    }
    return nullptr;
}

std::vector<long long> WorkingSet::sample_ids() const {
    std::vector<long long> ids;
    ids.reserve(cities.size());
    for (const auto& city : cities) ids.push_back(city.sample_id);
    return ids;
}

namespace {

std::optional<long long> parse_integer(const std::string& raw) {
    const std::string t = trim(raw);
    if (t.empty()) return std::nullopt;
    std::size_t i = t[0] == '-' || t[0] == '+' ? 1 : 0;
    if (i == t.size()) return std::nullopt;
    for (; i < t.size(); ++i) {
        if (t[i] < '0' || t[i] > '9') return std::nullopt;
    }
    try {
        return std::stoll(t);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string row_context(std::size_t row_index) {
    std::ostringstream msg;
    msg << "row " << row_index + 1;
    return msg.str();
}

} // namespace

std::pair<WorkingSet, RunLog> parse_disclosure_csv(const std::string& file,
                                                   const ModelDefinition& model) {
    const auto rows = read_csv_file(file);
    RunLog log;
    WorkingSet ws;
    ws.model = &model;

    if (rows.empty()) {
        throw Error(ErrorCode::MissingColumn, "disclosure file has no header row");
    }
    const auto& header = rows.front();
    if (header.size() != kDisclosureHeader.size()) {
        std::ostringstream msg;
        msg << "disclosure header has " << header.size() << " columns, expected "
            << kDisclosureHeader.size();
        throw Error(ErrorCode::MissingColumn, msg.str());
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) != kDisclosureHeader[i]) {
            throw Error(ErrorCode::MissingColumn,
                        "unexpected column '" + header[i] + "' at position " +
                            std::to_string(i + 1) + ", expected '" +
                            kDisclosureHeader[i] + "'");
        }
    }

    std::map<long long, std::size_t> city_index;
    std::set<std::tuple<long long, std::string, int, int>> seen_cells;

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != kDisclosureHeader.size()) {
            log.warning("discarded " + row_context(r) + ": has " +
                        std::to_string(row.size()) + " columns");
            continue;
        }
        AnswerRecord record;
        record.questionnaire = trim(row[0]);
        const auto year = parse_integer(row[1]);
        const auto sample = parse_integer(row[2]);
        record.organisation = trim(row[3]);
        record.country = trim(row[4]);
        const auto region = parse_region(row[5]);
        record.parent_section = trim(row[6]);
        record.section = trim(row[7]);
        record.question_number = trim(row[8]);
        record.question_name = trim(row[9]);
        const auto column = parse_integer(row[10]);
        record.column_name = trim(row[11]);
        const auto row_no = parse_integer(row[12]);
        record.row_name = trim(row[13]);
        record.response_answer = row[14];
        record.comments = row[15];
        record.file_name = trim(row[16]);
        record.last_update = trim(row[17]);

        // scope filter: configured form and reporting year only
        if (record.questionnaire != model.form_id) {
            log.info("skipped " + row_context(r) + ": questionnaire '" +
                     record.questionnaire + "' out of scope");
            continue;
        }
        if (!year || static_cast<int>(*year) != model.reporting_year) {
            log.info("skipped " + row_context(r) + ": year out of scope");
            continue;
        }
        record.year_reported = static_cast<int>(*year);

        if (!sample || *sample <= 0) {
            log.warning("discarded " + row_context(r) + ": bad account number '" +
                        row[2] + "'");
            continue;
        }
        record.sample_id = *sample;
        if (!region) {
            log.warning("discarded " + row_context(r) + ": unknown region '" +
                            row[5] + "'",
                        record.sample_id);
            continue;
        }
        record.region = *region;
        if (!column || *column < 0 || !row_no || *row_no < 0) {
            log.warning("discarded " + row_context(r) + ": bad column/row number",
                        record.sample_id);
            continue;
        }
        record.column_number = static_cast<int>(*column);
        record.row_number = static_cast<int>(*row_no);

        const Question* question = model.find_question(record.question_number);
        if (question == nullptr) {
            log.warning("discarded " + row_context(r) + ": unknown question '" +
                            record.question_number + "'",
                        record.sample_id);
            continue;
        }
        const Question* effective = model.resolve(record.question_number,
                                                  record.column_number);
        if (effective == nullptr) {
            log.warning("discarded " + row_context(r) + ": question '" +
                            record.question_number + "' has no column " +
                            std::to_string(record.column_number),
                        record.sample_id);
            continue;
        }

        const auto outcome = validate_answer(*effective, record.response_answer);
        if (outcome.is_fatal()) {
            log.warning("discarded " + row_context(r) + ": question '" +
                            record.question_number + "' " + outcome.reason,
                        record.sample_id);
            continue;
        }
        if (outcome.is_recoverable()) {
            log.info("recoverable answer at " + row_context(r) + ": question '" +
                         record.question_number + "' " + outcome.reason,
                     record.sample_id);
        }

        const auto cell = std::make_tuple(record.sample_id, record.question_number,
                                          record.column_number, record.row_number);
        if (!seen_cells.insert(cell).second) {
            log.warning("discarded " + row_context(r) + ": duplicate cell for question '" +
                            record.question_number + "'",
                        record.sample_id);
            continue;
        }

        const auto found = city_index.find(record.sample_id);
        if (found == city_index.end()) {
            city_index[record.sample_id] = ws.cities.size();
            ws.cities.push_back({record.sample_id, record.organisation, record.country,
                                 record.region});
        } else {
            const City& known = ws.cities[found->second];
            if (known.name != record.organisation) {
                log.warning("inconsistent organisation name '" + record.organisation +
                                "' (keeping '" + known.name + "')",
                            record.sample_id);
            }
        }
        ws.records.push_back(std::move(record));
    }

    std::sort(ws.cities.begin(), ws.cities.end(),
              [](const City& a, const City& b) { return a.sample_id < b.sample_id; });
    return {std::move(ws), std::move(log)};
}

void write_disclosure_csv(const std::string& file, const WorkingSet& ws) {
    CsvWriter writer(file);
    writer.write_row(kDisclosureHeader);
    for (const auto& r : ws.records) {
        writer.write_row({r.questionnaire, std::to_string(r.year_reported),
                          std::to_string(r.sample_id), r.organisation, r.country,
                          region_name(r.region), r.parent_section, r.section,
                          r.question_number, r.question_name,
                          std::to_string(r.column_number), r.column_name,
                          std::to_string(r.row_number), r.row_name, r.response_answer,
                          r.comments, r.file_name, r.last_update});
    }
}

std::vector<ExternalIndicatorRow> parse_externals_csv(const std::string& file) {
    const auto rows = read_csv_file(file);
    std::vector<ExternalIndicatorRow> out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.empty() || (row.size() == 1 && trim(row[0]).empty())) continue;
        if (r == 0 && !row.empty() && to_lower_ascii(trim(row[0])) == "key") continue;
        if (row.size() != 3 && row.size() != 4) {
            throw Error(ErrorCode::MissingColumn,
                        "external indicator row " + std::to_string(r + 1) +
                            " must be key,indicator,value[,sample_id]");
        }
        const auto kind = parse_indicator(row[1]);
        if (!kind) {
            throw Error(ErrorCode::MissingColumn,
                        "unknown indicator kind '" + row[1] + "'");
        }
        const auto value = parse_flexible_number(row[2]);
        if (!value) {
            throw Error(ErrorCode::MissingColumn,
                        "non-numeric indicator value '" + row[2] + "'");
        }
        long long resolved = -1;
        if (row.size() == 4) {
            const auto id = parse_integer(row[3]);
            if (id) resolved = *id;
        }
        out.push_back({trim(row[0]), *kind, *value, resolved});
    }
    return out;
}

void write_externals_csv(const std::string& file,
                         const std::vector<ExternalIndicatorRow>& rows) {
    CsvWriter writer(file);
    writer.write_row({"key", "indicator", "value", "sample_id"});
    for (const auto& row : rows) {
        writer.write_row({row.key, indicator_name(row.kind), format_double(row.value),
                          std::to_string(row.resolved_sample_id)});
    }
}

WorkingSet join_externals(WorkingSet ws, const std::vector<ExternalIndicatorRow>& tables,
                          RunLog& log) {
    std::map<std::string, long long> by_name;
    for (const auto& city : ws.cities) {
        by_name[normalize_city_name(city.name)] = city.sample_id;
    }

    // (sample, kind) -> position in ws.externals, used for last-one-wins
    std::map<std::pair<long long, int>, std::size_t> attached;
    for (const auto& row : tables) {
        long long sample_id = -1;
        if (const auto id = parse_integer(row.key); id && ws.find_city(*id) != nullptr) {
            sample_id = *id;
        } else {
            const auto it = by_name.find(normalize_city_name(row.key));
            if (it != by_name.end()) sample_id = it->second;
        }
        if (sample_id < 0) {
            log.warning("external " + std::string(indicator_name(row.kind)) +
                        " row unmatched: '" + row.key + "'");
            continue;
        }
        ExternalIndicatorRow resolved = row;
        resolved.resolved_sample_id = sample_id;
        const auto key = std::make_pair(sample_id, static_cast<int>(row.kind));
        const auto it = attached.find(key);
        if (it != attached.end()) {
            log.warning("duplicate external " + std::string(indicator_name(row.kind)) +
                            " row: last one wins",
                        sample_id);
            ws.externals[it->second] = resolved;
        } else {
            attached[key] = ws.externals.size();
            ws.externals.push_back(resolved);
        }
    }
    std::sort(ws.externals.begin(), ws.externals.end(),
              [](const ExternalIndicatorRow& a, const ExternalIndicatorRow& b) {
                  if (a.resolved_sample_id != b.resolved_sample_id) {
                      return a.resolved_sample_id < b.resolved_sample_id;
                  }
                  return static_cast<int>(a.kind) < static_cast<int>(b.kind);
              });
    return ws;
}

std::vector<long long> read_samples_file(const std::string& path) {
    std::string content;
    try {
        content = read_text_file(path);
    } catch (const Error&) {
        throw Error(ErrorCode::UnreadableSampleFile, "cannot read samples file: " + path);
    }
    std::vector<long long> ids;
    std::istringstream stream(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto id = parse_integer(line);
        if (!id || *id <= 0) {
            throw Error(ErrorCode::UnreadableSampleFile,
                        "samples file line " + std::to_string(line_no) +
                            ": expected a sample id, got '" + line + "'");
        }
        ids.push_back(*id);
    }
    return ids;
}

} // namespace ermm
