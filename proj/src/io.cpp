#include "bandstat/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bandstat/errors.hpp"

namespace bandstat::io {

std::string num(double v) {
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void csv_row(std::ostream& os, std::span<const std::string> cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
    }
    os << '\n';
}

void write_histogram_csv(std::ostream& os, std::span<const HistogramRow> rows) {
    csv_row(os, std::vector<std::string>{"bin_left", "bin_right", "count",
                                         "density"});
    for (const auto& r : rows)
        csv_row(os, std::vector<std::string>{num(r.left), num(r.right),
                                             std::to_string(r.count),
                                             num(r.density)});
}

void write_histogram_csv(const std::filesystem::path& path,
                         std::span<const HistogramRow> rows) {
    std::ostringstream os;
    write_histogram_csv(os, rows);
    write_text_file(path, os.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out << body;
    out.flush();
    if (!out) throw io_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw io_error("read failed: " + path.string());
    return os.str();
}

DirectoryLock::DirectoryLock(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    lock_path_ = dir / ".bandstat.lock";
    const int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        lock_path_.clear();
        throw io_error("output directory is locked by another run: " +
                       dir.string());
    }
    ::close(fd);
}

DirectoryLock::~DirectoryLock() {
    if (!lock_path_.empty()) {
        std::error_code ec;
        std::filesystem::remove(lock_path_, ec);
    }
}

}  // namespace bandstat::io
