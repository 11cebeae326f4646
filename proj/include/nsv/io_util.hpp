#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nsv {

// Shortest decimal string that round-trips to the same double
// (std::to_chars general form).  Used for every numeric CSV value so the
// files are compact and bit-faithful.
std::string format_double(double v);

// Writes `content` to `path` atomically: the data goes to a temporary file
// in the same directory which is then renamed over the target, so readers
// never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

void ensure_directory(const std::string& path);

// Minimal CSV support: comma separated, first row is the header, no
// quoting (none of our files need it).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by exact header name; -1 when absent.
    int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

double parse_double_strict(const std::string& s, const std::string& what);
std::int64_t parse_int_strict(const std::string& s, const std::string& what);

}  // namespace nsv
