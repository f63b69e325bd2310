#pragma once

#include <string>
#include <vector>

namespace ermm {

using CsvRow = std::vector<std::string>;

// RFC-4180 style reader: quoted fields, doubled quotes, CR/LF tolerant.
std::vector<CsvRow> parse_csv(const std::string& content);
std::vector<CsvRow> read_csv_file(const std::string& path);

std::string csv_escape(const std::string& field);
std::string csv_join(const CsvRow& row);

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void write_row(const CsvRow& row);

  private:
    struct Impl;
    Impl* impl_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace ermm
