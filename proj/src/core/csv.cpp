#include "core/csv.hpp"

#include "core/error.hpp"

#include <fstream>
#include <sstream>

namespace ermm {

std::vector<CsvRow> parse_csv(const std::string& content) {
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    const std::size_t n = content.size();
    for (std::size_t i = 0; i < n; ++i) {
        const char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            row.push_back(field);
            field.clear();
            field_started = true;
            break;
        case '\r':
            break;
        case '\n':
            if (!field.empty() || field_started || !row.empty()) {
                row.push_back(field);
                rows.push_back(row);
            }
            row.clear();
            field.clear();
            field_started = false;
            break;
        default:
            field.push_back(c);
            field_started = true;
            break;
        }
    }
    if (!field.empty() || field_started || !row.empty()) {
        row.push_back(field);
        rows.push_back(row);
    }
    return rows;
}

std::vector<CsvRow> read_csv_file(const std::string& path) {
    return parse_csv(read_text_file(path));
}

std::string csv_escape(const std::string& field) {
    const bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string csv_join(const CsvRow& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += csv_escape(row[i]);
    }
    return out;
}

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->out.open(path, std::ios::binary);
    if (!impl_->out) {
        delete impl_;
        throw Error(ErrorCode::UnreadableFile, "cannot write file: " + path);
    }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::write_row(const CsvRow& row) {
    impl_->out << csv_join(row) << "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::UnreadableFile, "cannot read file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::UnreadableFile, "cannot write file: " + path);
    }
    out << content;
}

} // namespace ermm
