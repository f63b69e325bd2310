#pragma once

#include <string>
#include <vector>

namespace ermm {

enum class LogLevel { Info, Warning, Error };

struct LogEntry {
    LogLevel level;
    std::string message;
    // Negative when the entry is not attributable to a single sample.
    long long sample_id = -1;
};

// Accumulates processing events for one phase. Written to disk with a
// per-run sequence stamp instead of wall-clock time so that reruns with
// identical inputs produce identical log files.
class RunLog {
  public:
    void info(std::string message, long long sample_id = -1);
    void warning(std::string message, long long sample_id = -1);
    void error(std::string message, long long sample_id = -1);

    const std::vector<LogEntry>& entries() const { return entries_; }
    bool has_errors() const { return error_count_ > 0; }
    std::size_t error_count() const { return error_count_; }

    // True when the given sample had at least one Error-level entry
    // (a discarded record, for example, is logged as a warning).
    bool sample_has_error(long long sample_id) const;
    bool sample_has_level(long long sample_id, LogLevel level) const;

    void append(const RunLog& other);
    void write_file(const std::string& path) const;

  private:
    std::vector<LogEntry> entries_;
    std::size_t error_count_ = 0;
};

const char* log_level_name(LogLevel level);

} // namespace ermm
