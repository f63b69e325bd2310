#include "core/log.hpp"

#include "core/error.hpp"

#include <cstdio>
#include <fstream>

namespace ermm {

const char* log_level_name(LogLevel level) {
    switch (level) {
    case LogLevel::Info: return "INFO";
    case LogLevel::Warning: return "WARNING";
    case LogLevel::Error: return "ERROR";
    }
    return "UNKNOWN";
}

void RunLog::info(std::string message, long long sample_id) {
    entries_.push_back({LogLevel::Info, std::move(message), sample_id});
}

void RunLog::warning(std::string message, long long sample_id) {
    entries_.push_back({LogLevel::Warning, std::move(message), sample_id});
}

void RunLog::error(std::string message, long long sample_id) {
    entries_.push_back({LogLevel::Error, std::move(message), sample_id});
    ++error_count_;
}

bool RunLog::sample_has_error(long long sample_id) const {
    return sample_has_level(sample_id, LogLevel::Error);
}

bool RunLog::sample_has_level(long long sample_id, LogLevel level) const {
    for (const auto& entry : entries_) {
        if (entry.sample_id == sample_id && entry.level == level) {
            return true;
        }
    }
    return false;
}

void RunLog::append(const RunLog& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
    error_count_ += other.error_count_;
}

void RunLog::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::UnreadableFile, "cannot write log file: " + path);
    }
    std::size_t seq = 0;
    char stamp[16];
    for (const auto& entry : entries_) {
        std::snprintf(stamp, sizeof(stamp), "%06zu", ++seq);
        out << "[" << stamp << "] [" << log_level_name(entry.level) << "] ";
        if (entry.sample_id >= 0) {
            out << "sample=" << entry.sample_id << " ";
        }
        out << entry.message << "\n";
    }
}

} // namespace ermm
