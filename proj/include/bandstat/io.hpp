#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace bandstat::io {

// Round-trip decimal formatting: '.' separator, no locale, shortest form
// that still parses back to the same double.
std::string num(double v);

// CSV emission: header always present, LF line endings, cells joined by
// commas with no quoting (callers pass clean tokens).
void csv_row(std::ostream& os, std::span<const std::string> cells);

// Histogram export rows (bin_left, bin_right, count, density).
struct HistogramRow {
    double left = 0.0;
    double right = 0.0;
    std::size_t count = 0;
    double density = 0.0;
};
void write_histogram_csv(std::ostream& os, std::span<const HistogramRow> rows);
void write_histogram_csv(const std::filesystem::path& path,
                         std::span<const HistogramRow> rows);

// Whole-file helpers; failures surface as io_error.
void write_text_file(const std::filesystem::path& path, const std::string& body);
std::string read_text_file(const std::filesystem::path& path);

// Holds an exclusively created lock file for one output directory; thrown
// io_error if another run holds it.  Removed on destruction.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& dir);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    std::filesystem::path lock_path_;
};

}  // namespace bandstat::io
