#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace taillab {

// Minimal RFC-4180-style CSV writer: fields containing comma, quote, CR or LF
// are quoted, quotes doubled. Numbers are printed with %.17g so files
// round-trip and are byte-stable across runs.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void write_row(const std::vector<std::string>& fields);

    static std::string field(double x);
    static std::string field(int x) { return std::to_string(x); }
    static std::string field(long long x) { return std::to_string(x); }

private:
    std::ofstream out_;
};

std::string csv_escape(const std::string& raw);

}  // namespace taillab
